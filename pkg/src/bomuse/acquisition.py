"""Acquisition functions, the over-explorative trade-off schedule, and a
deterministic box-constrained maximizer.

The AI's trade-off is beta = zeta * (sqrt(sigma) * sqrt(2 ln(1/delta) + 1
+ gamma) + B)^2, with zeta defaulting to 7; ``zeta_lower_bound`` exposes the
exact heuristic bound behind that default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import norm

from .gp import GpPosterior

__all__ = [
    "GpUcb",
    "EcGpUcb",
    "ExpectedImprovement",
    "PureExploration",
    "AcquisitionSpec",
    "BetaSchedule",
    "acquisition_value",
    "acquisition_values",
    "bo_muse_beta",
    "zeta_lower_bound",
    "maximize",
]


@dataclass(frozen=True)
class GpUcb:
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")


@dataclass(frozen=True)
class EcGpUcb:
    """UCB with the enlarged-confidence term for mis-specified models."""

    beta: float
    epsilon: float
    t: int
    sigma: float

    def __post_init__(self):
        if self.beta < 0 or self.epsilon < 0:
            raise ValueError("beta and epsilon must be nonnegative")
        if self.t < 1:
            raise ValueError("t must be a positive integer")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class ExpectedImprovement:
    best_y: float


@dataclass(frozen=True)
class PureExploration:
    pass


AcquisitionSpec = Union[GpUcb, EcGpUcb, ExpectedImprovement, PureExploration]


@dataclass(frozen=True)
class BetaSchedule:
    """Inputs to the AI trade-off: accumulated information gain and the
    running norm-bound estimate, both non-decreasing over a session."""

    delta: float
    running_gamma: float
    running_B: float
    sigma: float
    zeta: float = 7.0

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.running_gamma < 0:
            raise ValueError("running_gamma must be nonnegative")
        if self.running_B < 1:
            raise ValueError("running_B must be >= 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.zeta < 1:
            raise ValueError("zeta must be >= 1")


def acquisition_values(a: AcquisitionSpec, gp: GpPosterior, X: np.ndarray) -> np.ndarray:
    """Acquisition over the rows of X (vectorized)."""
    mu, var = gp.mean_var(X)
    sd = np.sqrt(var)
    if isinstance(a, GpUcb):
        return mu + math.sqrt(a.beta) * sd
    if isinstance(a, EcGpUcb):
        mult = math.sqrt(a.beta) + a.epsilon * math.sqrt(a.t) / a.sigma
        return mu + mult * sd
    if isinstance(a, ExpectedImprovement):
        out = np.zeros_like(mu)
        pos = sd > 0
        z = (mu[pos] - a.best_y) / sd[pos]
        out[pos] = (mu[pos] - a.best_y) * norm.cdf(z) + sd[pos] * norm.pdf(z)
        return np.maximum(out, 0.0)
    if isinstance(a, PureExploration):
        return sd
    raise TypeError(f"unknown acquisition spec {a!r}")


def acquisition_value(a: AcquisitionSpec, gp: GpPosterior, x) -> float:
    x = np.asarray(x, dtype=float)
    return float(acquisition_values(a, gp, x[None, :] if x.ndim == 1 else x)[0])


def bo_muse_beta(s: BetaSchedule) -> float:
    """Trade-off for the over-explorative AI: strictly increasing in both the
    accumulated gain and the norm-bound estimate."""
    root = math.sqrt(s.sigma) * math.sqrt(2.0 * math.log(1.0 / s.delta) + 1.0 + s.running_gamma)
    return s.zeta * (root + s.running_B) ** 2


def zeta_lower_bound(phi: float) -> float:
    """Exact heuristic lower bound on the AI over-exploration multiplier.

    (1 + (1/phi) ln(1/(2 - e^phi)))^2 on phi in (0, ln 2); at phi = ln(3/2)
    this is (1 + ln2/ln(3/2))^2 ~ 7.34, rounded down to the default zeta = 7.
    """
    if not (0.0 < phi < math.log(2.0)):
        raise ValueError("phi must lie in the open interval (0, ln 2)")
    return (1.0 + math.log(1.0 / (2.0 - math.exp(phi))) / phi) ** 2


def maximize(
    a: AcquisitionSpec,
    gp: GpPosterior,
    bounds,
    rng,
    n_probes: int = 512,
    n_refine: int = 8,
    rounds: int = 20,
) -> np.ndarray:
    """Deterministic argmax search: uniform probes plus coordinate refinement.

    512 uniform probes; the best 8 are refined by 20 rounds of shrinking-step
    axis search.  Ties break toward the lowest candidate index, making the
    result a pure function of (acquisition, gp, bounds, seed).
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    lo, hi = _box(bounds)
    d = lo.size
    probes = rng.uniform(lo, hi, size=(n_probes, d))
    vals = acquisition_values(a, gp, probes)
    order = np.argsort(-vals, kind="stable")[:n_refine]
    cands = probes[order].copy()
    cvals = vals[order].copy()

    step = (hi - lo) / 4.0
    for _ in range(rounds):
        for axis in range(d):
            for sign in (1.0, -1.0):
                trial = cands.copy()
                trial[:, axis] = np.clip(trial[:, axis] + sign * step[axis], lo[axis], hi[axis])
                tvals = acquisition_values(a, gp, trial)
                better = tvals > cvals
                cands[better] = trial[better]
                cvals[better] = tvals[better]
        step *= 0.7

    best = int(np.argmax(cvals))  # first max wins on ties
    return cands[best]


def _box(bounds) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise ValueError("bounds must be a nonempty list of [lo, hi] pairs")
    lo, hi = arr[:, 0], arr[:, 1]
    if np.any(hi <= lo):
        raise ValueError("each bound must satisfy lo < hi")
    return lo, hi
