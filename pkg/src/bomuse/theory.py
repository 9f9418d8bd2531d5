"""Executable audits of the mathematical scaffolding behind the trade-off
schedule: generalized (power) means, the Hadamard-product mean bounds, and
bracket bounds on the posterior variance at a reference point.

These run as a verification suite, outside the optimization hot path;
failures produce structured reports rather than exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import gp as gp_mod
from .kernels import KernelSpec, cross_cov, diag_cov

__all__ = [
    "generalized_mean",
    "check_mean_monotonicity",
    "HadamardBoundReport",
    "check_hadamard_mean_bounds",
    "VarianceBracket",
    "posterior_variance_bracket",
    "run_mean_monotonicity_audit",
    "run_hadamard_audit",
    "run_variance_bracket_audit",
]

# beyond this order the power mean is numerically indistinguishable from
# min/max, and exponentiation risks overflow
_EXTREME_THETA = 50.0


def generalized_mean(theta: float, a) -> float:
    """Power mean M_theta: min at -inf, harmonic/geometric/arithmetic at
    theta = -1/0/1, max at +inf.  Entries must be strictly positive."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("need at least one entry")
    if np.any(a <= 0):
        raise ValueError("all entries must be strictly positive")
    if theta == 0.0:
        return float(np.exp(np.mean(np.log(a))))
    if theta <= -_EXTREME_THETA:
        return float(np.min(a))
    if theta >= _EXTREME_THETA:
        return float(np.max(a))
    # ((1/n) sum a_i^theta)^(1/theta).  Center the logs first: for small
    # |theta| the naive log-domain form loses the exponent to rounding, while
    # expm1/log1p on the centered values keeps the relative error independent
    # of theta
    log_a = np.log(a)
    center = float(np.mean(log_a))
    spread = theta * (log_a - center)
    if np.max(np.abs(spread)) < 500.0:
        log_mean = math.log1p(float(np.mean(np.expm1(spread))))
    else:
        log_mean = float(logsumexp(spread)) - math.log(a.size)
    return float(np.exp(center + log_mean / theta))


def check_mean_monotonicity(a, theta1: float, theta2: float) -> bool:
    """True iff M_theta1(a) <= M_theta2(a) + 1e-12, for theta1 <= theta2."""
    if theta1 > theta2:
        raise ValueError("expected theta1 <= theta2")
    return generalized_mean(theta1, a) <= generalized_mean(theta2, a) + 1e-12


@dataclass
class HadamardBoundReport:
    lhs: float
    bounds: dict = field(default_factory=dict)  # name -> rhs
    slacks: dict = field(default_factory=dict)  # name -> rhs - lhs
    passes: dict = field(default_factory=dict)  # name -> bool

    @property
    def all_pass(self) -> bool:
        return all(self.passes.values())


def _conjugate(q: float) -> float:
    if q < 1:
        raise ValueError("q must lie in [1, inf]")
    if q == 1.0:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def check_hadamard_mean_bounds(a, b, z: float, q: float,
                               rel_slack: float = 1e-10) -> HadamardBoundReport:
    """Audit the three upper bounds on M_{-inf}(a*b) for one (a, b, z, q).

    Bounds checked: M_{-z}(a) M_z(b); M_{|zq|}(a) M_{|zq'|}(b) with q' the
    Holder conjugate of q; and M_{-|z|}(a) M_{q|z|/(q-1)}(b).
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("a and b must have equal length")
    qp = _conjugate(q)
    lhs = generalized_mean(-math.inf, a * b)

    az = abs(z)

    def order(u: float, v: float) -> float:
        # 0 * inf arises at z = 0, where the lemma degenerates to the
        # geometric-mean case: treat the product order as 0
        return 0.0 if (u == 0.0 or v == 0.0) else u * v

    bounds = {
        "opposite_orders": generalized_mean(-z, a) * generalized_mean(z, b),
        "holder_split": generalized_mean(order(az, q), a)
        * generalized_mean(order(az, qp), b),
        "reverse_holder": generalized_mean(-az, a)
        * generalized_mean(order(az, qp), b),
    }
    report = HadamardBoundReport(lhs=lhs)
    for name, rhs in bounds.items():
        report.bounds[name] = rhs
        report.slacks[name] = rhs - lhs
        report.passes[name] = lhs <= rhs * (1.0 + rel_slack) + 1e-300
    return report


@dataclass
class VarianceBracket:
    lower: float
    upper: float
    actual: float

    @property
    def upper_holds(self) -> bool:
        return self.actual <= self.upper + 1e-8

    @property
    def lower_holds(self) -> bool:
        return self.actual >= self.lower - 1e-8


def posterior_variance_bracket(kernel: KernelSpec, X, x_star,
                               noise_variance: float) -> VarianceBracket:
    """Closed-form bracket for the posterior variance at ``x_star``.

    Requires a constant kernel diagonal K** (e.g. SE).  With
    D_t = K** - |K(x*, x_t)| and D_min their minimum over the n observations:

        lower = K** (s2 + 2 n D_min - n D_min^2 / K**) / (s2 + n K**)
        upper = K** (s2 + 2 sum D_t - sum D_t^2 / K**) / (s2 + n K**)

    The upper bound is Gershgorin-based and should always hold; the lower
    bound comes from a worst-case sampling argument and is audited, not
    asserted.
    """
    X = np.asarray(X, dtype=float)
    x_star = np.asarray(x_star, dtype=float).ravel()
    diag = diag_cov(kernel, X) if X.size else np.array([])
    k_star_star = float(diag_cov(kernel, x_star[None, :])[0])
    if X.size and not np.allclose(diag, k_star_star, rtol=1e-10, atol=1e-12):
        raise ValueError("variance bracket requires a constant kernel diagonal")

    n = X.shape[0] if X.size else 0
    s2 = noise_variance
    if n == 0:
        return VarianceBracket(k_star_star, k_star_star, k_star_star)

    k_cross = cross_cov(kernel, x_star[None, :], X).ravel()
    D = k_star_star - np.abs(k_cross)
    d_min = float(np.min(D))
    denom = s2 + n * k_star_star
    lower = k_star_star * (s2 + 2 * n * d_min - n * d_min**2 / k_star_star) / denom
    upper = k_star_star * (s2 + 2 * np.sum(D) - np.sum(D**2) / k_star_star) / denom

    data = [gp_mod.Observation.make(row, 0.0) for row in X]
    posterior = gp_mod.fit(kernel, data, s2)
    actual = gp_mod.posterior_variance(posterior, x_star)
    return VarianceBracket(float(lower), float(upper), actual)


# ---------------------------------------------------------------------------
# Randomized audit drivers (the verify-theory suite)
# ---------------------------------------------------------------------------


def _random_order(rng) -> float:
    """Random power-mean order, mixing finite values with the +/-inf ends."""
    u = rng.random()
    if u < 0.1:
        return -math.inf
    if u < 0.2:
        return math.inf
    return float(rng.uniform(-10.0, 10.0))


def run_mean_monotonicity_audit(trials: int, seed: int = 0) -> dict:
    """M_theta <= M_theta' for theta <= theta' on random positive vectors."""
    rng = np.random.default_rng(seed)
    violations = 0
    max_slack = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        a = rng.uniform(0.05, 10.0, size=n)
        t1, t2 = sorted((_random_order(rng), _random_order(rng)))
        m1 = generalized_mean(t1, a)
        m2 = generalized_mean(t2, a)
        if m1 > m2 + 1e-12:
            violations += 1
            max_slack = max(max_slack, m1 - m2)
    return {
        "check": "mean_monotonicity",
        "trials": trials,
        "violations": violations,
        "max_slack": max_slack,
    }


def run_hadamard_audit(trials: int, seed: int = 0) -> dict:
    """The three product-mean upper bounds on random (a, b, z, q) draws."""
    rng = np.random.default_rng(seed)
    violations = 0
    max_slack = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        a = rng.uniform(0.05, 10.0, size=n)
        b = rng.uniform(0.05, 10.0, size=n)
        u = rng.random()
        if u < 0.05:
            z = 0.0
        elif u < 0.1:
            z = math.inf if rng.random() < 0.5 else -math.inf
        else:
            z = float(rng.uniform(-5.0, 5.0))
        q = 1.0 if rng.random() < 0.05 else float(rng.uniform(1.0, 10.0))
        report = check_hadamard_mean_bounds(a, b, z, q)
        for name, ok in report.passes.items():
            if not ok:
                violations += 1
                rel = (report.lhs - report.bounds[name]) / max(report.bounds[name], 1e-300)
                max_slack = max(max_slack, rel)
    return {
        "check": "hadamard_mean_bounds",
        "trials": trials,
        "violations": violations,
        "max_slack": max_slack,
    }


def run_variance_bracket_audit(instances: int, seed: int = 0) -> dict:
    """Bracket audit on random SE-kernel instances (n <= 20 observations).

    Upper-bound failures are hard violations; lower-bound failures are
    expected occasionally (worst-case sampling argument) and only logged.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    lower_violations = 0
    max_slack = 0.0
    for _ in range(instances):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 21))
        ell = float(rng.uniform(0.3, 3.0))
        kernel = KernelSpec("se", lengthscale=ell,
                            signal_variance=float(rng.uniform(0.5, 2.0)))
        X = rng.uniform(-2.0, 2.0, size=(n, d))
        x_star = rng.uniform(-2.0, 2.0, size=d)
        s2 = float(rng.uniform(1e-4, 1.0))
        bracket = posterior_variance_bracket(kernel, X, x_star, s2)
        if not bracket.upper_holds:
            violations += 1
            max_slack = max(max_slack, bracket.actual - bracket.upper)
        if not bracket.lower_holds:
            lower_violations += 1
    return {
        "check": "posterior_variance_bracket",
        "trials": instances,
        "violations": violations,
        "max_slack": max_slack,
        "lower_bound_violations_logged": lower_violations,
    }
