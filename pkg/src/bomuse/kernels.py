"""Covariance functions, optionally composed with high-level feature maps.

A kernel may operate on raw inputs or on ``p(x)`` for a feature map ``p``
encoding domain knowledge (the "expert's view" of the search space).
Three families are supported: squared-exponential, linear, and polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "FeatureMap",
    "KernelSpec",
    "kernel_eval",
    "gram",
    "cross_cov",
    "builtin_feature_map",
    "kernel_to_json",
    "kernel_from_json",
]


@dataclass(frozen=True)
class FeatureMap:
    """Deterministic transform from input space to feature space.

    ``apply`` must accept an array of shape (n, dim_in) and return
    (n, dim_out); it is also expected to work on a single (dim_in,) vector.
    """

    name: str
    dim_in: int
    dim_out: int
    apply: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.dim_in:
            raise ValueError(
                f"feature map {self.name!r} expects dim {self.dim_in}, got {x.shape[1]}"
            )
        out = np.asarray(self.apply(x), dtype=float)
        if out.shape != (x.shape[0], self.dim_out):
            raise ValueError(
                f"feature map {self.name!r} returned shape {out.shape}, "
                f"expected {(x.shape[0], self.dim_out)}"
            )
        return out[0] if single else out


@dataclass(frozen=True)
class KernelSpec:
    """Covariance function family plus hyperparameters.

    ``lengthscale`` is used by the squared-exponential family only, with the
    convention k(x,x') = v * exp(-||x-x'||^2 / (2 l^2)).  ``degree`` applies
    to the polynomial family, k(x,x') = v * (1 + x.x')^d.  When
    ``feature_map`` is set the kernel is evaluated on mapped inputs.
    """

    family: str  # "se" | "linear" | "polynomial"
    lengthscale: float = 1.0
    signal_variance: float = 1.0
    degree: int = 2
    feature_map: Optional[FeatureMap] = None

    def __post_init__(self):
        if self.family not in ("se", "linear", "polynomial"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.lengthscale <= 0:
            raise ValueError("lengthscale must be positive")
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    def _features(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.feature_map is None:
            return X
        if X.shape[1] != self.feature_map.dim_in:
            raise ValueError(
                f"input dim {X.shape[1]} != feature map dim_in {self.feature_map.dim_in}"
            )
        return self.feature_map(X)


def _pairwise_sqdist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # ||a-b||^2 computed stably; clamp tiny negatives from cancellation
    d2 = (
        np.sum(A * A, axis=1)[:, None]
        - 2.0 * (A @ B.T)
        + np.sum(B * B, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def cross_cov(k: KernelSpec, X: np.ndarray, X2: np.ndarray) -> np.ndarray:
    """Covariance matrix K[i,j] = k(X[i], X2[j])."""
    A = k._features(np.atleast_2d(X))
    B = k._features(np.atleast_2d(X2))
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch between inputs")
    v = k.signal_variance
    if k.family == "se":
        # exact zeros on coincident rows keep k(x,x) == signal_variance
        return v * np.exp(-_pairwise_sqdist(A, B) / (2.0 * k.lengthscale**2))
    if k.family == "linear":
        return v * (A @ B.T)
    return v * (1.0 + A @ B.T) ** k.degree


def kernel_eval(k: KernelSpec, x: np.ndarray, x2: np.ndarray) -> float:
    """Evaluate k(x, x2) for single input vectors."""
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape:
        raise ValueError("dimension mismatch between x and x2")
    return float(cross_cov(k, x[None, :], x2[None, :])[0, 0])


def diag_cov(k: KernelSpec, X: np.ndarray) -> np.ndarray:
    """Vector of k(x, x) over the rows of X (cheaper than a full Gram)."""
    A = k._features(np.atleast_2d(X))
    v = k.signal_variance
    if k.family == "se":
        return np.full(A.shape[0], v)
    sq = np.sum(A * A, axis=1)
    if k.family == "linear":
        return v * sq
    return v * (1.0 + sq) ** k.degree


def gram(k: KernelSpec, X) -> np.ndarray:
    """Gram matrix of k on the rows of X.  Empty X yields a 0x0 matrix."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros((0, 0))
    X = np.atleast_2d(X)
    K = cross_cov(k, X, X)
    return 0.5 * (K + K.T)  # kill roundoff asymmetry


# ---------------------------------------------------------------------------
# Built-in feature maps (the benchmark "high level features")
# ---------------------------------------------------------------------------


def _matyas_features(X: np.ndarray) -> np.ndarray:
    x1, x2 = X[:, 0], X[:, 1]
    return np.stack([x1**2, x2**2, x1 * x2], axis=1)


def _ackley_features(X: np.ndarray) -> np.ndarray:
    return np.concatenate(
        [np.cos(X), np.linalg.norm(X, axis=1, keepdims=True)], axis=1
    )


def _rastrigin_features(X: np.ndarray) -> np.ndarray:
    return np.concatenate([X**2, np.cos(X)], axis=1)


def _levy_features(X: np.ndarray) -> np.ndarray:
    # sin^2(x_1) followed by x_j^2 sin^2(x_j) for each coordinate
    return np.concatenate(
        [np.sin(X[:, :1]) ** 2, X**2 * np.sin(X) ** 2], axis=1
    )


_BUILTIN_MAPS = {
    "matyas-2d": FeatureMap("matyas-2d", 2, 3, _matyas_features),
    "ackley-4d": FeatureMap("ackley-4d", 4, 5, _ackley_features),
    "rastrigin-5d": FeatureMap("rastrigin-5d", 5, 10, _rastrigin_features),
    "levy-6d": FeatureMap("levy-6d", 6, 7, _levy_features),
}


def builtin_feature_map(name: str) -> FeatureMap:
    try:
        return _BUILTIN_MAPS[name]
    except KeyError:
        raise ValueError(
            f"unknown feature map {name!r}; available: {sorted(_BUILTIN_MAPS)}"
        ) from None


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def kernel_to_json(k: KernelSpec) -> dict:
    return {
        "family": k.family,
        "lengthscale": k.lengthscale,
        "signal_variance": k.signal_variance,
        "degree": k.degree,
        "feature_map": k.feature_map.name if k.feature_map is not None else None,
    }


def kernel_from_json(obj: dict) -> KernelSpec:
    fm = obj.get("feature_map")
    return KernelSpec(
        family=obj["family"],
        lengthscale=float(obj.get("lengthscale", 1.0)),
        signal_variance=float(obj.get("signal_variance", 1.0)),
        degree=int(obj.get("degree", 2)),
        feature_map=builtin_feature_map(fm) if fm else None,
    )
