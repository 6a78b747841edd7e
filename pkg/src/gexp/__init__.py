"""gexp: a numerical laboratory for worst-case (sublinear) expectations.

The package solves the nonlinear heat equation that defines the worst-case
semigroup over a volatility band, estimates the same quantity by scenario-max
Monte Carlo, verifies two-point and shift Harnack inequalities with explicit
closed-form exponents, exercises the coupling-by-change-of-measure
construction pathwise, and probes an explicit Ornstein-Uhlenbeck kernel
family with a dominating sup-density.
"""

from .axioms import run_axioms
from .core import (
    Convexity,
    GsdeSpec,
    Kind,
    McConfig,
    Scenario,
    TestFunction,
    VolatilityBand,
    catalog,
    make_drift,
    make_scenario_lattice,
    qv_at,
)
from .coupling import (
    CouplingReport,
    eta_merge_defect,
    eta_schedule,
    mt_moment_check,
    novikov_pathwise_bound,
    run_coupling,
    run_coupling_suite,
)
from .gheat import (
    CflError,
    Grid1D,
    PdeSolution,
    g_operator,
    pbar_pde,
    require_safe,
    safe_window,
    solve,
)
from .harnack import (
    HarnackCertificate,
    harnack_exponent,
    harnack_grid,
    shift_harnack_exponent,
    shift_harnack_grid,
    verify_harnack,
    verify_shift_harnack,
)
from .kernels import (
    Ex38Report,
    KernelReport,
    MeanMode,
    OuFamily,
    classical_ou_harnack_exponent,
    dominance_check,
    ex38_probe,
    kernel_lower_bound_check,
    member_invariance_gap,
    normal_expectation,
    ou_kernel,
    ou_semigroup,
    quasi_invariance_check,
    run_kernel_suite,
    sup_kernel_definition_margin,
    sup_kernel_ex34,
)
from .simulate import PbarEstimate, pbar_mc, simulate_paths

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "VolatilityBand",
    "Scenario",
    "Kind",
    "GsdeSpec",
    "Convexity",
    "TestFunction",
    "McConfig",
    "make_scenario_lattice",
    "qv_at",
    "catalog",
    "make_drift",
    # gheat
    "Grid1D",
    "PdeSolution",
    "CflError",
    "g_operator",
    "solve",
    "pbar_pde",
    "safe_window",
    "require_safe",
    # simulate
    "PbarEstimate",
    "simulate_paths",
    "pbar_mc",
    # harnack
    "HarnackCertificate",
    "harnack_exponent",
    "shift_harnack_exponent",
    "verify_harnack",
    "verify_shift_harnack",
    "harnack_grid",
    "shift_harnack_grid",
    # coupling
    "CouplingReport",
    "eta_schedule",
    "eta_merge_defect",
    "novikov_pathwise_bound",
    "run_coupling",
    "run_coupling_suite",
    "mt_moment_check",
    # kernels
    "MeanMode",
    "OuFamily",
    "KernelReport",
    "Ex38Report",
    "normal_expectation",
    "ou_semigroup",
    "ou_kernel",
    "sup_kernel_ex34",
    "dominance_check",
    "quasi_invariance_check",
    "member_invariance_gap",
    "classical_ou_harnack_exponent",
    "kernel_lower_bound_check",
    "sup_kernel_definition_margin",
    "ex38_probe",
    "run_kernel_suite",
    # axioms
    "run_axioms",
]
