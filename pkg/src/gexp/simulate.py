"""Worst-case Monte Carlo: per-scenario Euler-Maruyama for both G-SDE kinds
and the scenario-max estimator of the worst-case semigroup.

Randomness comes from a counter-based (Philox) generator: the draw consumed
at (path, step) is a fixed function of the seed, so re-running any scenario
with the same seed reuses the identical normal increments.  That common-
random-numbers contract is what makes the estimator exactly monotone,
constant-preserving, homogeneous and subadditive across payoffs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GsdeSpec, Kind, McConfig, Scenario, TestFunction

__all__ = ["PbarEstimate", "simulate_paths", "pbar_mc"]


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class PbarEstimate:
    """Scenario-max estimate of the worst-case expectation.

    `value` is the maximum of the per-scenario means and, because the finite
    lattice is a subset of the admissible controls, a lower-bound estimate of
    the true sup (the PDE value is authoritative).
    """

    value: float
    argmax_scenario: str
    per_scenario: tuple[tuple[float, float], ...]  # (mean, std_error)
    n_paths: int
    n_steps: int
    seed: int

    @property
    def argmax_std_error(self) -> float:
        means = [m for m, _ in self.per_scenario]
        return self.per_scenario[int(np.argmax(means))][1]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_scenario": self.argmax_scenario,
            "per_scenario": [
                {"mean": m, "std_error": s} for m, s in self.per_scenario
            ],
            "n_paths": self.n_paths,
            "n_steps": self.n_steps,
            "seed": self.seed,
        }

    def csv_rows(self) -> list[list]:
        return [
            [i, m, s] for i, (m, s) in enumerate(self.per_scenario)
        ]


def simulate_paths(
    spec: GsdeSpec,
    x0: float,
    scenario: Scenario,
    mc: McConfig,
    keep_paths: bool = False,
):
    """Euler-Maruyama ensemble on the uniform grid h = T / n_steps.

    Per step with scenario level v the increment is
      qv-driven:   dX = b(X) v h + sqrt(v h) Z
      time-driven: dX = b(X) h   + sqrt(v h) Z
    Returns the terminal values X_T, or the full (n_paths, n_steps+1) path
    matrix when keep_paths is set.
    """
    T = scenario.horizon
    h = T / mc.n_steps
    levels = scenario.step_levels(mc.n_steps)
    rng = _generator(mc.seed)
    x = np.full(mc.n_paths, float(x0))
    paths = np.empty((mc.n_paths, mc.n_steps + 1)) if keep_paths else None
    if keep_paths:
        paths[:, 0] = x
    for i in range(mc.n_steps):
        v = levels[i]
        z = rng.standard_normal(mc.n_paths)
        if spec.kind is Kind.QV_DRIVEN:
            x = x + spec.b(x) * (v * h) + np.sqrt(v * h) * z
        else:
            x = x + spec.b(x) * h + np.sqrt(v * h) * z
        if keep_paths:
            paths[:, i + 1] = x
        if (i & 255) == 255 and not np.all(np.isfinite(x)):
            raise RuntimeError(f"non-finite state at step {i}")
    if not np.all(np.isfinite(x)):
        raise RuntimeError(f"non-finite state at step {mc.n_steps}")
    return paths if keep_paths else x


def pbar_mc(
    spec: GsdeSpec,
    payoff: TestFunction,
    x0: float,
    horizon: float,
    scenarios: list[Scenario],
    mc: McConfig,
) -> PbarEstimate:
    """Scenario-max Monte Carlo estimate of the worst-case semigroup value."""
    if not scenarios:
        raise ValueError("scenario list is empty")
    per = []
    for sc in scenarios:
        if abs(sc.horizon - horizon) > 1e-12:
            raise ValueError("scenario horizon differs from the requested horizon")
        xt = simulate_paths(spec, x0, sc, mc)
        vals = np.asarray(payoff(xt), dtype=float)
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / np.sqrt(mc.n_paths)) if mc.n_paths > 1 else 0.0
        per.append((mean, se))
    means = [m for m, _ in per]
    k = int(np.argmax(means))
    return PbarEstimate(
        value=means[k],
        argmax_scenario=scenarios[k].label,
        per_scenario=tuple(per),
        n_paths=mc.n_paths,
        n_steps=mc.n_steps,
        seed=mc.seed,
    )
