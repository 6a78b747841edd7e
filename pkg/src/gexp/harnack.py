"""Closed-form constants of the two Harnack-type inequalities and
certificate-grade verification against the PDE and Monte Carlo backends.

PDE-backend certificates are the acceptance authority; Monte Carlo
certificates are advisory because both sides are lower-bound estimates of a
sup, so the comparison is one-sided-noisy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    GsdeSpec,
    Kind,
    McConfig,
    Scenario,
    TestFunction,
    VolatilityBand,
    make_scenario_lattice,
)
from .gheat import Grid1D, require_safe, solve
from .simulate import pbar_mc

__all__ = [
    "HarnackCertificate",
    "harnack_exponent",
    "shift_harnack_exponent",
    "verify_harnack",
    "verify_shift_harnack",
    "harnack_grid",
    "shift_harnack_grid",
]

PDE_BUDGET = 2e-3  # default relative tolerance for PDE-backend certificates


def harnack_exponent(
    p: float, K: float, band: VolatilityBand, horizon: float, dist: float
) -> float:
    """Exponent of the two-point Harnack inequality,

        p K shi^4 (1 - e^{-2 slo^2 K T})
        ------------------------------------  * dist^2
        (p-1) slo^6 (1 - e^{-2 shi^2 K T})^2

    with slo, shi the band edges.  Continuous in all arguments and -> 0 as
    dist -> 0.

    The (p-1) power is the one the coupling argument yields: with
    q = p/(p-1), Holder gives (Pbar_T f(y))^p <= E[M^q]^{p-1} Pbar_T f^p(x),
    and the density moment satisfies log E[M^q] <= q(q-1)/2 * N where N is
    the quadratic-variation envelope of the control (the dist^2 expression
    above divided by pK/ ... i.e. N = 2K shi^4 (1-e^{-2 slo^2 KT}) dist^2 /
    (slo^6 (1-e^{-2 shi^2 KT})^2)).  Multiplying by (p-1) leaves a single
    (p-1) in the denominator.  A (p-1)^2 variant is too small: already in
    the classical degenerate-band case it drops below the sharp
    Ornstein-Uhlenbeck exponent p e^{-2KT} d^2 / ((p-1)(1-e^{-2KT})) for
    large p and small T, and the inequality then fails numerically
    (e.g. p=4, T=0.5).  The form used here dominates that sharp exponent
    for every p > 1, K > 0, T > 0.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if K <= 0:
        raise ValueError("K must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    a = math.exp(-2.0 * band.v_lo * K * horizon)
    b = math.exp(-2.0 * band.v_hi * K * horizon)
    return (
        p
        * K
        * band.sigma_hi**4
        * (1.0 - a)
        / ((p - 1.0) * band.sigma_lo**6 * (1.0 - b) ** 2)
        * dist**2
    )


def shift_harnack_exponent(
    p: float, K: float, sigma_lo: float, horizon: float, v: float
) -> float:
    """Exponent of the shift Harnack inequality,
    p v^2 / (2 slo^2 (p-1)) * (1/T + K + K^2 T / 3)."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if sigma_lo <= 0:
        raise ValueError("sigma_lo must be positive")
    if K < 0:
        raise ValueError("K must be nonnegative")
    return (
        p
        * v**2
        / (2.0 * sigma_lo**2 * (p - 1.0))
        * (1.0 / horizon + K + K**2 * horizon / 3.0)
    )


@dataclass(frozen=True)
class HarnackCertificate:
    """One verified instance of a Harnack-type inequality."""

    kind: str  # "harnack" | "shift-harnack"
    p: float
    horizon: float
    x: float
    y_or_shift: float
    payoff_id: str
    method: str  # "pde" | "mc"
    lhs: float
    rhs: float
    exponent: float
    tolerance_budget: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "horizon": self.horizon,
            "x": self.x,
            "y_or_shift": self.y_or_shift,
            "payoff": self.payoff_id,
            "method": self.method,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "exponent": self.exponent,
            "tolerance_budget": self.tolerance_budget,
            "pass": self.passed,
        }


def _certificate(kind, p, horizon, x, y_or_shift, payoff_id, method, lhs, base, expo, budget):
    rhs = base * math.exp(expo)
    return HarnackCertificate(
        kind=kind,
        p=p,
        horizon=horizon,
        x=x,
        y_or_shift=y_or_shift,
        payoff_id=payoff_id,
        method=method,
        lhs=lhs,
        rhs=rhs,
        exponent=expo,
        tolerance_budget=budget,
        passed=lhs <= rhs * (1.0 + budget),
    )


def _mc_values(spec, payoff, x0, horizon, band, mc, scenarios):
    if scenarios is None:
        scenarios = make_scenario_lattice(band, horizon, pieces=2, levels=3)
    est = pbar_mc(spec, payoff, x0, horizon, scenarios, mc)
    return est.value, est.argmax_std_error


def verify_harnack(
    spec: GsdeSpec,
    payoff: TestFunction,
    x: float,
    y: float,
    p: float,
    horizon: float,
    band: VolatilityBand,
    grid: Grid1D | None = None,
    method: str = "pde",
    mc: McConfig | None = None,
    scenarios: list[Scenario] | None = None,
    tolerance_budget: float | None = None,
) -> HarnackCertificate:
    """Check (Pbar_T f)^p(y) <= Pbar_T f^p(x) * exp(exponent) for the
    qv-driven equation."""
    if not payoff.positivity:
        raise ValueError("Harnack certificates require a nonnegative payoff")
    if spec.kind is not Kind.QV_DRIVEN:
        raise ValueError("the two-point Harnack inequality targets the qv-driven equation")
    expo = harnack_exponent(p, spec.lipschitz_k, band, horizon, abs(x - y))
    if method == "pde":
        grid = grid or Grid1D()
        require_safe(x, grid, band, horizon)
        require_safe(y, grid, band, horizon)
        lhs = solve(payoff, band, horizon, grid, spec).value_at(y) ** p
        base = solve(payoff.power(p), band, horizon, grid, spec).value_at(x)
        budget = PDE_BUDGET if tolerance_budget is None else tolerance_budget
    elif method == "mc":
        mc = mc or McConfig()
        vy, sy = _mc_values(spec, payoff, y, horizon, band, mc, scenarios)
        base, sx = _mc_values(spec, payoff.power(p), x, horizon, band, mc, scenarios)
        lhs = vy**p
        scale = max(abs(base), 1e-12)
        budget = (
            3.0 * (p * max(vy, 0.0) ** (p - 1) * sy + sx) / scale
            if tolerance_budget is None
            else tolerance_budget
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return _certificate(
        "harnack", p, horizon, x, y, payoff.id, method, lhs, base, expo, budget
    )


def verify_shift_harnack(
    spec: GsdeSpec,
    payoff: TestFunction,
    x: float,
    v: float,
    p: float,
    horizon: float,
    band: VolatilityBand,
    grid: Grid1D | None = None,
    method: str = "pde",
    mc: McConfig | None = None,
    scenarios: list[Scenario] | None = None,
    tolerance_budget: float | None = None,
) -> HarnackCertificate:
    """Check (Pbar_T f(x))^p <= Pbar_T [f^p(v + .)](x) * exp(exponent) for
    the time-driven equation."""
    if not payoff.positivity:
        raise ValueError("Harnack certificates require a nonnegative payoff")
    if spec.kind is not Kind.TIME_DRIVEN:
        raise ValueError("the shift Harnack inequality targets the time-driven equation")
    expo = shift_harnack_exponent(p, spec.lipschitz_k, band.sigma_lo, horizon, v)
    shifted = payoff.power(p).shifted(v)
    if method == "pde":
        grid = grid or Grid1D()
        require_safe(x, grid, band, horizon)
        lhs = solve(payoff, band, horizon, grid, spec).value_at(x) ** p
        base = solve(shifted, band, horizon, grid, spec).value_at(x)
        budget = PDE_BUDGET if tolerance_budget is None else tolerance_budget
    elif method == "mc":
        mc = mc or McConfig()
        vx, sx = _mc_values(spec, payoff, x, horizon, band, mc, scenarios)
        base, sb = _mc_values(spec, shifted, x, horizon, band, mc, scenarios)
        lhs = vx**p
        scale = max(abs(base), 1e-12)
        budget = (
            3.0 * (p * max(vx, 0.0) ** (p - 1) * sx + sb) / scale
            if tolerance_budget is None
            else tolerance_budget
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return _certificate(
        "shift-harnack", p, horizon, x, v, payoff.id, method, lhs, base, expo, budget
    )


def harnack_grid(
    drift_spec: GsdeSpec,
    payoffs: list[TestFunction],
    ps: list[float],
    horizons: list[float],
    bands: list[VolatilityBand],
    dists: np.ndarray,
    x0: float = 0.0,
    grid: Grid1D | None = None,
    tolerance_budget: float = PDE_BUDGET,
) -> list[HarnackCertificate]:
    """PDE-backend certificate sweep; solutions are reused across the
    distance grid (one pair of solves per parameter tuple)."""
    grid = grid or Grid1D()
    spec = replace(drift_spec, kind=Kind.QV_DRIVEN)
    certs = []
    for band in bands:
        for T in horizons:
            require_safe(x0 + max(dists), grid, band, T)
            for payoff in payoffs:
                for p in ps:
                    sol_f = solve(payoff, band, T, grid, spec)
                    sol_fp = solve(payoff.power(p), band, T, grid, spec)
                    base = sol_fp.value_at(x0)
                    for d in dists:
                        y = x0 + float(d)
                        expo = harnack_exponent(p, spec.lipschitz_k, band, T, abs(y - x0))
                        certs.append(
                            _certificate(
                                "harnack", p, T, x0, y, payoff.id, "pde",
                                sol_f.value_at(y) ** p, base, expo, tolerance_budget,
                            )
                        )
    return certs


def shift_harnack_grid(
    drift_spec: GsdeSpec,
    payoffs: list[TestFunction],
    ps: list[float],
    horizons: list[float],
    bands: list[VolatilityBand],
    shifts: np.ndarray,
    x0: float = 0.0,
    grid: Grid1D | None = None,
    tolerance_budget: float = PDE_BUDGET,
) -> list[HarnackCertificate]:
    """PDE-backend shift-Harnack sweep; the unshifted solve is shared across
    the shift grid."""
    grid = grid or Grid1D()
    spec = replace(drift_spec, kind=Kind.TIME_DRIVEN)
    certs = []
    for band in bands:
        for T in horizons:
            require_safe(x0, grid, band, T)
            for payoff in payoffs:
                sol_f = solve(payoff, band, T, grid, spec)
                for p in ps:
                    lhs = sol_f.value_at(x0) ** p
                    for v in shifts:
                        v = float(v)
                        expo = shift_harnack_exponent(
                            p, spec.lipschitz_k, band.sigma_lo, T, v
                        )
                        base = solve(
                            payoff.power(p).shifted(v), band, T, grid, spec
                        ).value_at(x0)
                        certs.append(
                            _certificate(
                                "shift-harnack", p, T, x0, v, payoff.id, "pde",
                                lhs, base, expo, tolerance_budget,
                            )
                        )
    return certs
