"""Gaussian-process posterior over the shared observation set.

Fitting caches a Cholesky factor of (K + noise*I) so that posterior queries,
the online information-gain increments and the RKHS-norm estimate all reuse
one factorization.  Hyperparameters are chosen by maximizing the log marginal
likelihood over a log-spaced lengthscale grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .kernels import KernelSpec, cross_cov, diag_cov, gram

__all__ = [
    "Observation",
    "GpPosterior",
    "GpNumericalError",
    "fit",
    "posterior_mean",
    "posterior_variance",
    "information_gain_increment",
    "rkhs_norm_estimate",
    "log_marginal_likelihood",
    "fit_hyperparameters",
]


class GpNumericalError(RuntimeError):
    """Factorization failed even after jitter escalation."""

    def __init__(self, message: str, jitters: Sequence[float] = ()):
        super().__init__(message)
        self.jitters = list(jitters)


@dataclass(frozen=True)
class Observation:
    x: tuple
    y: float
    source: str = "init"  # "human" | "ai" | "init"

    @staticmethod
    def make(x, y, source="init") -> "Observation":
        return Observation(tuple(float(v) for v in np.asarray(x).ravel()), float(y), source)


@dataclass(frozen=True)
class GpPosterior:
    """Fitted GP: immutable after construction, safe for concurrent queries."""

    kernel: KernelSpec
    noise_variance: float
    X: np.ndarray = field(compare=False)  # (n, d)
    y: np.ndarray = field(compare=False)  # (n,)
    chol: Optional[np.ndarray] = field(compare=False)  # lower factor of K + s2 I
    weights: Optional[np.ndarray] = field(compare=False)  # (K + s2 I)^-1 y

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def mean_var(self, Xq) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at query rows, vectorized."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        prior_var = diag_cov(self.kernel, Xq)
        if self.n == 0:
            return np.zeros(Xq.shape[0]), prior_var
        Kx = cross_cov(self.kernel, self.X, Xq)  # (n, m)
        mu = Kx.T @ self.weights
        V = cho_solve((self.chol, True), Kx)  # (K+s2I)^-1 Kx
        var = prior_var - np.sum(Kx * V, axis=0)
        return mu, np.maximum(var, 0.0)


def _cholesky_with_jitter(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky of A, escalating diagonal jitter on failure.

    Jitter starts at 1e-10 * trace/n and escalates x10 up to 1e-4 * trace/n.
    """
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0)), 0.0
    scale = max(np.trace(A) / n, np.finfo(float).tiny)
    tried = []
    for level in [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4]:
        jitter = level * scale
        tried.append(jitter)
        try:
            L = np.linalg.cholesky(A + jitter * np.eye(n))
            return L, jitter
        except np.linalg.LinAlgError:
            continue
    raise GpNumericalError(
        f"Cholesky factorization failed for {n}x{n} system", tried
    )


def fit(kernel: KernelSpec, data: Sequence[Observation], noise_variance: float) -> GpPosterior:
    """Fit the GP posterior; with empty data this is the prior."""
    if noise_variance <= 0:
        raise ValueError("noise_variance must be positive")
    if len(data) == 0:
        return GpPosterior(kernel, noise_variance, np.zeros((0, 0)), np.zeros(0), None, None)
    X = np.array([obs.x for obs in data], dtype=float)
    y = np.array([obs.y for obs in data], dtype=float)
    K = gram(kernel, X)
    L, _ = _cholesky_with_jitter(K + noise_variance * np.eye(len(data)))
    weights = cho_solve((L, True), y)
    return GpPosterior(kernel, noise_variance, X, y, L, weights)


def posterior_mean(gp: GpPosterior, x) -> float:
    mu, _ = gp.mean_var(np.asarray(x, dtype=float)[None, :] if np.ndim(x) == 1 else x)
    return float(mu[0])


def posterior_variance(gp: GpPosterior, x) -> float:
    _, var = gp.mean_var(np.asarray(x, dtype=float)[None, :] if np.ndim(x) == 1 else x)
    return float(var[0])


def information_gain_increment(gp_before: GpPosterior, x) -> float:
    """ln(1 + sigma^-2 * var_before(x)): the running information-gain term.

    Sessions sum this over every observation, in insertion order, to maintain
    the accumulated gain used by the AI trade-off schedule.
    """
    var = posterior_variance(gp_before, x)
    return math.log1p(var / gp_before.noise_variance)


def rkhs_norm_estimate(gp: GpPosterior) -> float:
    """y^T (K + s2 I)^-1 y, the online surrogate for the objective's norm bound.

    The session applies the max-update against its running value (started at
    1), keeping the estimate non-decreasing.
    """
    if gp.n == 0:
        raise ValueError("rkhs_norm_estimate requires at least one observation")
    return float(gp.y @ gp.weights)


def log_marginal_likelihood(kernel: KernelSpec, data: Sequence[Observation],
                            noise_variance: float) -> float:
    """Gaussian log marginal likelihood of the observations under the kernel."""
    X = np.array([obs.x for obs in data], dtype=float)
    y = np.array([obs.y for obs in data], dtype=float)
    n = len(data)
    K = gram(kernel, X)
    L, _ = _cholesky_with_jitter(K + noise_variance * np.eye(n))
    alpha = cho_solve((L, True), y)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(-0.5 * y @ alpha - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi))


def fit_hyperparameters(
    kernel_family: str,
    data: Sequence[Observation],
    noise_variance: float,
    domain_diagonal: float,
    feature_map=None,
    grid_size: int = 25,
) -> KernelSpec:
    """Maximum-likelihood kernel selection over a log-spaced lengthscale grid.

    The grid spans [1e-2, 1e1] * domain_diagonal with ``grid_size`` points;
    signal variance is pinned to the sample variance of y.  For non-SE
    families there is nothing to tune beyond the signal variance.
    """
    if len(data) < 2:
        raise ValueError("fit_hyperparameters requires >= 2 observations")
    if domain_diagonal <= 0:
        raise ValueError("domain_diagonal must be positive")
    y = np.array([obs.y for obs in data], dtype=float)
    sig_var = max(float(np.var(y)), 1e-12)

    if kernel_family != "se":
        return KernelSpec(family=kernel_family, signal_variance=sig_var,
                          feature_map=feature_map)

    grid = np.geomspace(1e-2 * domain_diagonal, 1e1 * domain_diagonal, grid_size)
    best = None
    best_lml = -np.inf
    failures = []
    for ell in grid:
        cand = KernelSpec("se", lengthscale=float(ell), signal_variance=sig_var,
                          feature_map=feature_map)
        try:
            lml = log_marginal_likelihood(cand, data, noise_variance)
        except GpNumericalError as err:
            failures.append(err)
            continue
        if lml > best_lml:
            best, best_lml = cand, lml
    if best is None:
        raise GpNumericalError("all lengthscale candidates failed factorization")
    return best
