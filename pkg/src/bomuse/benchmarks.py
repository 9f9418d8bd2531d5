"""Synthetic benchmark objectives with known optima and their high-level
feature maps, plus hooks for plugging in external objectives.

All four built-ins are minimization problems with minimum value 0; the
engine handles orientation, so ``eval`` here is the raw analytic form.
"""

from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .kernels import FeatureMap, builtin_feature_map

__all__ = ["ObjectiveSpec", "builtin", "builtin_names", "SubprocessObjective"]


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    dim: int
    bounds: tuple  # ((lo, hi), ...) per dimension
    eval: Callable[[np.ndarray], float] = field(compare=False)
    direction: str = "min"  # "min" | "max"
    optimum_x: Optional[tuple] = None
    optimum_value: Optional[float] = None
    feature_map: Optional[FeatureMap] = None

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise ValueError(f"{self.name} expects dim {self.dim}, got {x.size}")
        return float(self.eval(x))

    @property
    def has_known_optimum(self) -> bool:
        return self.optimum_value is not None


def _matyas(x: np.ndarray) -> float:
    return 0.26 * (x[0] ** 2 + x[1] ** 2) - 0.48 * x[0] * x[1]


def _ackley(x: np.ndarray, a=20.0, b=0.2, c=2.0 * math.pi) -> float:
    d = x.size
    term1 = -a * math.exp(-b * math.sqrt(np.sum(x * x) / d))
    term2 = -math.exp(np.sum(np.cos(c * x)) / d)
    return term1 + term2 + a + math.e


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x)))


def _levy(x: np.ndarray) -> float:
    w = 1.0 + (x - 1.0) / 4.0
    head = math.sin(math.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + math.sin(2.0 * math.pi * w[-1]) ** 2)
    return float(head + mid + tail)


_BUILTINS = {
    "matyas-2d": dict(
        dim=2, fn=_matyas, lo=-10.0, hi=10.0, opt_x=(0.0, 0.0)
    ),
    "ackley-4d": dict(
        dim=4, fn=_ackley, lo=-32.768, hi=32.768, opt_x=(0.0,) * 4
    ),
    "rastrigin-5d": dict(
        dim=5, fn=_rastrigin, lo=-5.12, hi=5.12, opt_x=(0.0,) * 5
    ),
    "levy-6d": dict(
        dim=6, fn=_levy, lo=-10.0, hi=10.0, opt_x=(1.0,) * 6
    ),
}


def builtin_names() -> list[str]:
    return sorted(_BUILTINS)


def builtin(name: str) -> ObjectiveSpec:
    """One of the four built-in benchmarks, with standard box bounds."""
    try:
        cfg = _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; available: {builtin_names()}"
        ) from None
    dim = cfg["dim"]
    return ObjectiveSpec(
        name=name,
        dim=dim,
        bounds=tuple((cfg["lo"], cfg["hi"]) for _ in range(dim)),
        eval=cfg["fn"],
        direction="min",
        optimum_x=cfg["opt_x"],
        optimum_value=0.0,
        feature_map=builtin_feature_map(name),
    )


class SubprocessObjective:
    """External objective over a line-delimited JSON subprocess protocol.

    Sends {"x": [...]} per evaluation on stdin and expects {"y": ...} per
    line on stdout.  Wrap the result in an ObjectiveSpec to use it in a
    session (optimum unknown, so regret falls back to best-observed).
    """

    def __init__(self, argv: list[str]):
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True
        )

    def __call__(self, x) -> float:
        msg = json.dumps({"x": [float(v) for v in np.asarray(x).ravel()]})
        self._proc.stdin.write(msg + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise RuntimeError("external objective process closed its output")
        return float(json.loads(line)["y"])

    def close(self):
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)
