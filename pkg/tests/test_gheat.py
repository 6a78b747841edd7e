import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gexp import (
    CflError,
    Grid1D,
    Kind,
    TestFunction,
    VolatilityBand,
    catalog,
    g_operator,
    make_drift,
    pbar_pde,
    require_safe,
    safe_window,
    solve,
)
from gexp.kernels import normal_expectation

from conftest import classical_params


class TestGOperator:
    def test_derived_values(self):
        band = VolatilityBand(0.5, 1.0)
        assert g_operator(2.0, band) == pytest.approx(1.0, abs=1e-15)
        assert g_operator(-2.0, band) == pytest.approx(-0.25, abs=1e-15)
        assert g_operator(0.0, band) == 0.0

    @given(
        a=st.floats(-100.0, 100.0),
        b=st.floats(-100.0, 100.0),
        lam=st.floats(0.0, 50.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_homogeneous_and_subadditive(self, a, b, lam):
        band = VolatilityBand(0.5, 1.0)
        assert g_operator(lam * a, band) == pytest.approx(
            lam * g_operator(a, band), rel=1e-12, abs=1e-12
        )
        assert g_operator(a + b, band) <= g_operator(a, band) + g_operator(b, band) + 1e-12


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid1D(nx=2)
        with pytest.raises(ValueError):
            Grid1D(x_min=1.0, x_max=0.0)
        with pytest.raises(ValueError):
            Grid1D(cfl_safety=0.0)

    def test_cfl_violation_with_fixed_dt(self):
        grid = Grid1D(dt=1.0)
        with pytest.raises(CflError):
            solve(catalog()["sigmoid"], VolatilityBand(1.0, 1.0), 1.0, grid)


class TestGHeatSolve:
    def test_second_moment_degenerate_band(self, grid):
        # classical heat equation: E[X_1^2] = 1 starting from 0
        sol = solve(catalog()["sqclip"], VolatilityBand(1.0, 1.0), 1.0, grid)
        assert sol.value_at(0.0) == pytest.approx(1.0, abs=2e-3)

    def test_gnormal_moments_wide_band(self, grid, band_wide):
        # +clipped-x^2 sees the upper volatility, -clipped-x^2 the lower
        up = solve(catalog()["sqclip"], band_wide, 1.0, grid).value_at(0.0)
        neg = TestFunction(
            "neg-sqclip", lambda x: -np.minimum(x**2, 25.0), positivity=False, bound=25.0
        )
        dn = solve(neg, band_wide, 1.0, grid).value_at(0.0)
        assert up == pytest.approx(1.0, abs=1e-2)
        assert dn == pytest.approx(-0.25, abs=1e-2)

    def test_constant_preserved_exactly(self, grid, band_wide, ou_spec):
        for spec in (None, ou_spec, dataclasses.replace(ou_spec, kind=Kind.TIME_DRIVEN)):
            sol = solve(catalog()["one"], band_wide, 1.0, grid, spec)
            assert np.all(sol.values == 1.0)

    def test_comparison_principle_bound(self, grid, band_wide, ou_spec):
        for pid, f in catalog().items():
            sol = solve(f, band_wide, 1.0, grid, ou_spec)
            assert np.all(sol.values <= f.bound + 1e-12), pid
            assert np.all(sol.values >= -1e-12), pid

    def test_monotone_in_payoff(self, grid, band_wide, ou_spec):
        lo, hi = safe_window(grid, band_wide, 1.0)
        mask = (grid.xs >= lo) & (grid.xs <= hi)
        one = solve(catalog()["one"], band_wide, 1.0, grid, ou_spec).values
        for pid in ("sigmoid", "cauchy", "bump"):
            sol = solve(catalog()[pid], band_wide, 1.0, grid, ou_spec).values
            assert np.max((sol - one)[mask]) <= 2e-3, pid

    def test_classical_reduction_quadrature(self, grid, band_classical):
        for did in ("zero", "ou"):
            spec = make_drift(did)
            sol = solve(catalog()["sigmoid"], band_classical, 1.0, grid, spec)
            for x in (-1.0, 0.0, 1.0):
                mean, var = classical_params(did, x)
                oracle = normal_expectation(catalog()["sigmoid"], mean, var, 64)
                assert sol.value_at(x) == pytest.approx(oracle, rel=1e-3), (did, x)

    def test_time_driven_classical_reduction(self, grid, band_classical, ou_spec):
        spec = dataclasses.replace(ou_spec, kind=Kind.TIME_DRIVEN)
        sol = solve(catalog()["cauchy"], band_classical, 1.0, grid, spec)
        mean, var = classical_params("ou", 1.0)
        oracle = normal_expectation(catalog()["cauchy"], mean, var, 128)
        assert sol.value_at(1.0) == pytest.approx(oracle, rel=1e-3)

    def test_grid_refinement_stability(self, band_wide, ou_spec):
        coarse = solve(catalog()["sigmoid"], band_wide, 1.0, Grid1D(nx=201), ou_spec)
        fine = solve(catalog()["sigmoid"], band_wide, 1.0, Grid1D(nx=401), ou_spec)
        assert abs(coarse.value_at(0.5) - fine.value_at(0.5)) < 4 * 2e-3

    def test_strong_feller_smoothing(self, band_wide):
        # a near-step payoff: the solution's modulus of continuity shrinks
        # with dx while the payoff's stays order one
        step = TestFunction("step", lambda x: 1.0 / (1.0 + np.exp(-x / 0.05)))
        diffs = []
        for nx in (201, 401):
            grid = Grid1D(nx=nx)
            lo, hi = safe_window(grid, band_wide, 1.0)
            mask = (grid.xs >= lo) & (grid.xs <= hi)
            u = solve(step, band_wide, 1.0, grid).values[mask]
            diffs.append(np.max(np.abs(np.diff(u))))
        assert diffs[1] < 0.7 * diffs[0]
        assert diffs[1] < 0.05


class TestPbarPde:
    def test_constant_payoff_exact(self, band_wide, ou_spec):
        assert pbar_pde(ou_spec, catalog()["one"], 0.0, 1.0, band_wide) == 1.0

    def test_classical_sigmoid_oracle(self, band_classical):
        spec = make_drift("zero")
        val = pbar_pde(spec, catalog()["sigmoid"], 0.0, 1.0, band_classical)
        oracle = normal_expectation(catalog()["sigmoid"], 0.0, 1.0, 64)
        assert val == pytest.approx(oracle, rel=1e-3)

    def test_wider_band_dominates(self, band_wide, band_classical):
        # sup over a superset of scenarios can only grow
        spec = make_drift("const:0.5")
        for pid in ("sigmoid", "cauchy", "bump", "sqclip"):
            wide = pbar_pde(spec, catalog()[pid], 0.0, 1.0, band_wide)
            tight = pbar_pde(spec, catalog()[pid], 0.0, 1.0, band_classical)
            assert wide >= tight - 2e-3, pid

    def test_padding_zone_rejected(self, band_classical):
        spec = make_drift("zero")
        with pytest.raises(ValueError):
            pbar_pde(spec, catalog()["sigmoid"], 9.5, 1.0, band_classical)
        with pytest.raises(ValueError):
            require_safe(-9.5, Grid1D(), band_classical, 1.0)

    def test_truncation_check_passes_for_interior_point(self, band_classical):
        spec = make_drift("zero")
        val = pbar_pde(
            spec, catalog()["sigmoid"], 0.0, 1.0, band_classical,
            check_truncation=True,
        )
        assert 0.4 < val < 0.6

    def test_subadditive_and_homogeneous(self, grid, band_wide, ou_spec):
        cat = catalog()
        f, g = cat["sigmoid"], cat["bump"]
        vf = pbar_pde(ou_spec, f, 0.0, 1.0, band_wide, grid)
        vg = pbar_pde(ou_spec, g, 0.0, 1.0, band_wide, grid)
        vs = pbar_pde(ou_spec, f.plus(g), 0.0, 1.0, band_wide, grid)
        assert vs <= vf + vg + 2e-3
        lam = 3.0
        vl = pbar_pde(ou_spec, f.scaled(lam), 0.0, 1.0, band_wide, grid)
        assert vl == pytest.approx(lam * vf, abs=1e-12)
