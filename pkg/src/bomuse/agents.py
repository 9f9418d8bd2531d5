"""Suggestion policies: the over-explorative AI, simulated experts, the
pure-exploration baseline, and the live-human placeholder.

Every machine policy sees only the shared observation list; each agent fits
its own GP (own kernel, optionally refit by maximum likelihood) on that
shared data, so agents never read each other's models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import gp as gp_mod
from .acquisition import (
    BetaSchedule,
    ExpectedImprovement,
    GpUcb,
    PureExploration,
    bo_muse_beta,
    maximize,
)
from .kernels import KernelSpec, kernel_from_json, kernel_to_json

__all__ = ["AgentSpec", "PENDING", "suggest", "prepare_posterior"]

# sentinel for a live human whose suggestion has not been posted yet
PENDING = None

_POLICIES = {
    "bo_muse_ai",
    "simulated_expert_ucb",
    "simulated_expert_ei",
    "pure_explorer",
    "live_human",
}

# the simulated expert maximizes mu + 0.001 sigma; in UCB terms sqrt(beta) = 0.001
DEFAULT_EXPERT_BETA = 1e-6


@dataclass(frozen=True)
class AgentSpec:
    id: str
    role: str  # "ai" | "human"
    policy: str
    kernel: KernelSpec
    noise_variance: float
    beta_hat: float = DEFAULT_EXPERT_BETA  # simulated_expert_ucb only
    ml_fit: bool = True  # refit lengthscale by maximum likelihood each batch

    def __post_init__(self):
        if self.role not in ("ai", "human"):
            raise ValueError(f"unknown role {self.role!r}")
        if self.policy not in _POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.policy == "live_human" and self.role != "human":
            raise ValueError("live_human agents must have role='human'")
        if self.noise_variance <= 0:
            raise ValueError("noise_variance must be positive")
        if self.beta_hat < 0:
            raise ValueError("beta_hat must be nonnegative")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "role": self.role,
            "policy": self.policy,
            "kernel": kernel_to_json(self.kernel),
            "noise_variance": self.noise_variance,
            "beta_hat": self.beta_hat,
            "ml_fit": self.ml_fit,
        }

    @staticmethod
    def from_json(obj: dict) -> "AgentSpec":
        return AgentSpec(
            id=obj["id"],
            role=obj["role"],
            policy=obj["policy"],
            kernel=kernel_from_json(obj["kernel"]),
            noise_variance=float(obj["noise_variance"]),
            beta_hat=float(obj.get("beta_hat", DEFAULT_EXPERT_BETA)),
            ml_fit=bool(obj.get("ml_fit", True)),
        )


def _domain_diagonal(bounds) -> float:
    arr = np.asarray(bounds, dtype=float)
    return float(np.linalg.norm(arr[:, 1] - arr[:, 0]))


def prepare_posterior(
    agent: AgentSpec,
    shared_data: Sequence[gp_mod.Observation],
    bounds,
) -> gp_mod.GpPosterior:
    """Fit the agent's GP on the shared data, refitting hyperparameters by
    maximum likelihood when enabled and enough data is available."""
    kernel = agent.kernel
    if agent.ml_fit and len(shared_data) >= 2:
        kernel = gp_mod.fit_hyperparameters(
            agent.kernel.family,
            shared_data,
            agent.noise_variance,
            _domain_diagonal(bounds),
            feature_map=agent.kernel.feature_map,
        )
    return gp_mod.fit(kernel, list(shared_data), agent.noise_variance)


def suggest(
    agent: AgentSpec,
    shared_data: Sequence[gp_mod.Observation],
    schedule: BetaSchedule,
    bounds,
    rng,
) -> Optional[np.ndarray]:
    """Next query point for the agent, or PENDING for a live human.

    ``schedule`` must reflect the data up to and including the previous
    batch; models update only at batch boundaries.
    """
    if agent.policy == "live_human":
        return PENDING
    posterior = prepare_posterior(agent, shared_data, bounds)
    if agent.policy == "bo_muse_ai":
        acq = GpUcb(bo_muse_beta(schedule))
    elif agent.policy == "simulated_expert_ucb":
        acq = GpUcb(agent.beta_hat)
    elif agent.policy == "simulated_expert_ei":
        best = max((obs.y for obs in shared_data), default=0.0)
        acq = ExpectedImprovement(best)
    elif agent.policy == "pure_explorer":
        acq = PureExploration()
    else:  # pragma: no cover - guarded in __post_init__
        raise ValueError(agent.policy)
    return maximize(acq, posterior, bounds, rng)
