"""Domain types shared by every other module: the volatility band, the
piecewise-constant volatility scenarios that realize the uncertainty class,
G-SDE specifications, bounded test functions and Monte Carlo configuration.

All types are immutable after construction; every operation here is a pure
function of its inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

__all__ = [
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
]


@dataclass(frozen=True)
class VolatilityBand:
    """Uncertainty interval [sigma_lo, sigma_hi] for the volatility.

    The quadratic variation of the driving noise accrues at a squared rate
    confined to [sigma_lo**2, sigma_hi**2].  A degenerate band
    sigma_lo == sigma_hi recovers the classical (single-measure) setting.
    """

    sigma_lo: float
    sigma_hi: float

    def __post_init__(self):
        if not (0.0 < self.sigma_lo <= self.sigma_hi):
            raise ValueError(
                f"need 0 < sigma_lo <= sigma_hi, got ({self.sigma_lo}, {self.sigma_hi})"
            )

    @property
    def v_lo(self) -> float:
        """Lower squared-volatility bound."""
        return self.sigma_lo**2

    @property
    def v_hi(self) -> float:
        """Upper squared-volatility bound."""
        return self.sigma_hi**2

    @property
    def degenerate(self) -> bool:
        return self.sigma_lo == self.sigma_hi


@dataclass(frozen=True)
class Scenario:
    """One piecewise-constant squared-volatility control.

    `values[i]` is the squared-volatility level on [breakpoints[i],
    breakpoints[i+1]).  The induced quadratic variation qv(t) is the exact
    piecewise-linear integral of the level path.
    """

    band: VolatilityBand
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2 or bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0 and contain the horizon")
        if len(self.values) != len(bp) - 1:
            raise ValueError("need exactly one value per interval")
        if any(t1 >= t2 for t1, t2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        eps = 1e-12
        lo, hi = self.band.v_lo, self.band.v_hi
        if any(v < lo - eps or v > hi + eps for v in self.values):
            raise ValueError("scenario level outside the governing band")

    @property
    def horizon(self) -> float:
        return self.breakpoints[-1]

    @cached_property
    def _qv_nodes(self) -> np.ndarray:
        dts = np.diff(self.breakpoints)
        return np.concatenate([[0.0], np.cumsum(np.asarray(self.values) * dts)])

    def qv(self, t):
        """Quadratic variation qv(t) = int_0^t v_s ds, exact closed form."""
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.horizon + 1e-12):
            raise ValueError("time outside [0, T]")
        return np.interp(t, self.breakpoints, self._qv_nodes)

    def value_at(self, t):
        """Squared-volatility level in force at time t (right-continuous)."""
        idx = np.clip(
            np.searchsorted(self.breakpoints, t, side="right") - 1,
            0,
            len(self.values) - 1,
        )
        return np.asarray(self.values)[idx]

    def step_levels(self, n_steps: int) -> np.ndarray:
        """Levels sampled at the left endpoints of a uniform n_steps grid."""
        ts = np.arange(n_steps) * (self.horizon / n_steps)
        return np.asarray(self.value_at(ts), dtype=float)

    @property
    def label(self) -> str:
        return "v=" + ",".join(f"{v:g}" for v in self.values)


def qv_at(scenario: Scenario, t: float) -> float:
    """Quadratic variation of the scenario at time t."""
    return float(scenario.qv(t))


def make_scenario_lattice(
    band: VolatilityBand,
    horizon: float,
    pieces: int,
    levels: int,
    max_scenarios: int = 4096,
) -> list[Scenario]:
    """All piecewise-constant controls on a uniform partition of [0, horizon]
    with levels drawn from a uniform grid of [v_lo, v_hi].

    The two constant extreme scenarios are always in the result.  A degenerate
    band collapses to the single classical scenario.
    """
    if pieces < 1 or levels < 1 or horizon <= 0:
        raise ValueError("need pieces >= 1, levels >= 1, horizon > 0")
    grid = np.unique(np.linspace(band.v_lo, band.v_hi, levels))
    if len(grid) ** pieces > max_scenarios:
        raise ValueError(
            f"{len(grid)}^{pieces} scenarios exceeds the cap {max_scenarios}"
        )
    bp = tuple(np.linspace(0.0, horizon, pieces + 1))
    return [
        Scenario(band, bp, combo)
        for combo in itertools.product(tuple(grid), repeat=pieces)
    ]


class Kind(Enum):
    """Which G-SDE the drift enters: through the quadratic variation clock
    (dX = b(X) d<B> + dB) or through calendar time (dX = b(X) dt + dB)."""

    QV_DRIVEN = "qv"
    TIME_DRIVEN = "time"


_LIPSCHITZ_GRID = np.linspace(-10.0, 10.0, 41)


@dataclass(frozen=True)
class GsdeSpec:
    """Drift specification for a 1-D G-SDE.

    The Lipschitz constant is user-supplied; it is spot-checked on a fixed
    sample grid at construction (inference from samples would be unsound).
    """

    drift: Callable[[np.ndarray], np.ndarray]
    lipschitz_k: float
    kind: Kind
    name: str = "drift"

    def __post_init__(self):
        if self.lipschitz_k < 0:
            raise ValueError("lipschitz_k must be nonnegative")
        xs = _LIPSCHITZ_GRID
        bx = np.asarray(self.drift(xs), dtype=float)
        if bx.shape != xs.shape:
            bx = np.broadcast_to(bx, xs.shape)
        diff = np.abs(bx[:, None] - bx[None, :])
        dist = np.abs(xs[:, None] - xs[None, :])
        if np.any(diff > self.lipschitz_k * dist * (1 + 1e-9) + 1e-12):
            raise ValueError("drift violates the declared Lipschitz constant")

    def b(self, x):
        out = np.asarray(self.drift(np.asarray(x, dtype=float)), dtype=float)
        return np.broadcast_to(out, np.shape(x)) if out.shape != np.shape(x) else out


class Convexity(Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    NEITHER = "neither"


@dataclass(frozen=True)
class TestFunction:
    """A bounded payoff with known sup-norm.  Harnack certificates require
    positivity; the catalog ships only nonnegative members."""

    __test__ = False  # not a pytest collection target

    id: str
    eval: Callable[[np.ndarray], np.ndarray]
    positivity: bool = True
    convexity: Convexity = Convexity.NEITHER
    bound: float = 1.0

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def power(self, p: float) -> "TestFunction":
        if not self.positivity:
            raise ValueError("powers only defined for nonnegative payoffs")
        f = self.eval
        return TestFunction(
            id=f"{self.id}^{p:g}",
            eval=lambda x, f=f, p=p: f(x) ** p,
            positivity=True,
            convexity=Convexity.NEITHER,
            bound=self.bound**p,
        )

    def shifted(self, v: float) -> "TestFunction":
        f = self.eval
        return TestFunction(
            id=f"{self.id}(+{v:g})",
            eval=lambda x, f=f, v=v: f(x + v),
            positivity=self.positivity,
            convexity=self.convexity,
            bound=self.bound,
        )

    def plus(self, other: "TestFunction") -> "TestFunction":
        f, g = self.eval, other.eval
        return TestFunction(
            id=f"{self.id}+{other.id}",
            eval=lambda x, f=f, g=g: f(x) + g(x),
            positivity=self.positivity and other.positivity,
            convexity=Convexity.NEITHER,
            bound=self.bound + other.bound,
        )

    def scaled(self, lam: float) -> "TestFunction":
        if lam < 0:
            raise ValueError("only nonnegative scaling keeps positivity")
        f = self.eval
        return TestFunction(
            id=f"{lam:g}*{self.id}",
            eval=lambda x, f=f, lam=lam: lam * f(x),
            positivity=self.positivity,
            convexity=self.convexity,
            bound=lam * self.bound,
        )


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


SQCLIP_BOUND = 25.0
BUMP_WIDTH = 0.5


def catalog() -> dict[str, TestFunction]:
    """The shipped test-function catalog: all members bounded and >= 0."""
    return {
        "one": TestFunction("one", lambda x: np.ones_like(x), bound=1.0),
        "sigmoid": TestFunction("sigmoid", _sigmoid, bound=1.0),
        "cauchy": TestFunction("cauchy", lambda x: 1.0 / (1.0 + x**2), bound=1.0),
        "bump": TestFunction(
            "bump",
            lambda x: _sigmoid((x + 1.0) / BUMP_WIDTH) * _sigmoid((1.0 - x) / BUMP_WIDTH),
            bound=1.0,
        ),
        "sqclip": TestFunction(
            "sqclip",
            lambda x: np.minimum(x**2, SQCLIP_BOUND),
            convexity=Convexity.NEITHER,
            bound=SQCLIP_BOUND,
        ),
    }


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.  n_steps must be a power of two so halving
    checks stay on nested grids.  epsilon0 is the Novikov slack."""

    n_paths: int = 10_000
    n_steps: int = 256
    seed: int = 12345
    epsilon0: float = 0.5

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if self.n_steps < 1 or (self.n_steps & (self.n_steps - 1)) != 0:
            raise ValueError("n_steps must be a positive power of two")
        if self.epsilon0 <= 0:
            raise ValueError("epsilon0 must be positive")


def make_drift(drift_id: str) -> GsdeSpec:
    """Drift catalog by serializable id: zero, const:c, ou, tanh:K.

    The returned spec has QV_DRIVEN kind; callers switch kind with
    dataclasses.replace when the time-driven equation is wanted.
    """
    if drift_id == "zero":
        return GsdeSpec(lambda x: np.zeros_like(x), 0.0, Kind.QV_DRIVEN, "zero")
    if drift_id == "ou":
        return GsdeSpec(lambda x: -x, 1.0, Kind.QV_DRIVEN, "ou")
    if drift_id.startswith("const:"):
        c = float(drift_id.split(":", 1)[1])
        return GsdeSpec(
            lambda x, c=c: np.full_like(x, c), 0.0, Kind.QV_DRIVEN, drift_id
        )
    if drift_id.startswith("tanh:"):
        k = float(drift_id.split(":", 1)[1])
        return GsdeSpec(
            lambda x, k=k: -k * np.tanh(x), k, Kind.QV_DRIVEN, drift_id
        )
    raise ValueError(f"unknown drift id {drift_id!r}")
