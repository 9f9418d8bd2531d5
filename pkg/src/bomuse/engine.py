"""Batch optimization loop: one human plus one AI suggestion per batch, a
shared observation set, online information-gain and norm-bound tracking, and
regret accounting.  Also hosts the single-agent baseline loops.

The engine always maximizes internally; minimization objectives are negated
on the way in and records keep the user's orientation.  All randomness is
derived statelessly from (seed, purpose, batch), so a session is a pure
function of its config and can be persisted as plain JSON.
"""

from __future__ import annotations

import dataclasses
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import gp as gp_mod
from .acquisition import BetaSchedule, GpUcb, bo_muse_beta, maximize
from .agents import AgentSpec, prepare_posterior, suggest
from .benchmarks import ObjectiveSpec, builtin
from .gp import Observation
from .kernels import KernelSpec, builtin_feature_map

__all__ = [
    "MODES",
    "SessionConfig",
    "BatchRecord",
    "RegretTrace",
    "Session",
    "default_config",
    "run_session",
    "compute_regret",
    "export_csv",
    "srinivas_beta",
]

MODES = ("bo_muse", "generic_bo", "human_only", "human_plus_pure_exploration")

# rng stream purposes (seed, purpose, batch)
_RNG_INIT = 0
_RNG_RANGE = 1
_RNG_HUMAN_OPT = 2
_RNG_AI_OPT = 3
_RNG_NOISE = 4

# default observation noise std as a fraction of the sampled objective range
NOISE_RANGE_FRACTION = 1e-2

# virtual grid size for the stand-in Srinivas-style schedule of the plain
# GP-UCB baseline
SRINIVAS_GRID = 10_000


def srinivas_beta(t: int, delta: float) -> float:
    """Stand-in discrete-domain UCB schedule: 2 ln(|grid| t^2 pi^2 / (6 delta))."""
    return 2.0 * math.log(SRINIVAS_GRID * t * t * math.pi**2 / (6.0 * delta))


@dataclass(frozen=True)
class SessionConfig:
    objective: ObjectiveSpec
    bounds: tuple
    num_init: int
    budget_batches: int
    delta: float
    zeta: float
    seed: int
    mode: str
    human_agent: Optional[AgentSpec] = None
    ai_agent: Optional[AgentSpec] = None
    sigma: Optional[float] = None  # noise std; None -> fraction of sampled range

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.budget_batches < 1:
            raise ValueError("budget_batches must be >= 1")
        if self.num_init < 0:
            raise ValueError("num_init must be nonnegative")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.zeta < 1:
            raise ValueError("zeta must be >= 1")
        if len(self.bounds) == 0:
            raise ValueError("bounds must be nonempty")
        if self.mode in ("bo_muse", "human_only", "human_plus_pure_exploration"):
            if self.human_agent is None:
                raise ValueError(f"mode {self.mode} requires a human agent")
        if self.mode in ("bo_muse", "generic_bo", "human_plus_pure_exploration"):
            if self.ai_agent is None:
                raise ValueError(f"mode {self.mode} requires an AI agent")


@dataclass(frozen=True)
class BatchRecord:
    s: int
    x_human: Optional[tuple]
    y_human: Optional[float]  # user orientation, noisy
    x_ai: Optional[tuple]
    y_ai: Optional[float]
    gamma_after: float
    B_after: float
    beta_used: Optional[float]


@dataclass
class RegretTrace:
    simple_regret: list  # per evaluation, non-increasing
    batch_regret: list  # per batch, >= 0
    cumulative: list  # running sum of batch regret
    optimum_known: bool
    best_observed: list  # best noiseless value so far, user orientation


def _orient(objective: ObjectiveSpec) -> float:
    return 1.0 if objective.direction == "max" else -1.0


def _pytuple(x) -> tuple:
    # plain Python floats so reprs, JSON, and CSV exports are identical
    # whether a point came from an array or a persisted document
    return tuple(float(v) for v in np.asarray(x).ravel())


def default_agents(objective: ObjectiveSpec, mode: str, noise_variance: float,
                   expert_policy: str = "simulated_expert_ucb") -> tuple:
    """(human_agent, ai_agent) defaults for a benchmark and mode.

    The simulated expert gets an SE kernel over the benchmark's high-level
    feature map; machine agents get a plain SE kernel.  Either may be None
    for single-agent modes.
    """
    se = KernelSpec("se")
    expert_kernel = KernelSpec("se", feature_map=objective.feature_map)
    human = None
    ai = None
    if mode in ("bo_muse", "human_only", "human_plus_pure_exploration"):
        human = AgentSpec("human", "human", expert_policy, expert_kernel, noise_variance)
    if mode == "bo_muse":
        ai = AgentSpec("ai", "ai", "bo_muse_ai", se, noise_variance)
    elif mode == "generic_bo":
        ai = AgentSpec("ai", "ai", "bo_muse_ai", se, noise_variance)
    elif mode == "human_plus_pure_exploration":
        ai = AgentSpec("ai", "ai", "pure_explorer", se, noise_variance)
    return human, ai


def default_config(
    benchmark: str,
    mode: str,
    seed: int,
    evaluations: int,
    num_init: Optional[int] = None,
    delta: float = 0.1,
    zeta: float = 7.0,
    sigma: Optional[float] = None,
    expert_policy: str = "simulated_expert_ucb",
    live_human: bool = False,
) -> SessionConfig:
    """Config for a built-in benchmark with the standard per-mode wiring.

    ``evaluations`` is the post-init objective-evaluation budget; two-agent
    modes consume two evaluations per batch, so they get half as many
    batches and every mode spends the same budget.
    """
    objective = builtin(benchmark)
    two_agent = mode in ("bo_muse", "human_plus_pure_exploration")
    batches = evaluations // 2 if two_agent else evaluations
    if batches < 1:
        raise ValueError("evaluation budget too small for one batch")
    if num_init is None:
        num_init = objective.dim + 1
    human, ai = default_agents(objective, mode, 1.0, expert_policy)
    if live_human and human is not None:
        human = dataclasses.replace(human, policy="live_human")
    return SessionConfig(
        objective=objective,
        bounds=objective.bounds,
        num_init=num_init,
        budget_batches=batches,
        delta=delta,
        zeta=zeta,
        seed=seed,
        mode=mode,
        human_agent=human,
        ai_agent=ai,
        sigma=sigma,
    )


@dataclass
class Evaluation:
    """One objective evaluation, in user orientation."""

    t: int
    s: int  # 0 for initial design
    source: str
    x: tuple
    y: float  # noisy
    f_true: float  # noiseless


class Session:
    """Mutable batch-loop state.  Advances serially; commits are atomic in
    the sense that a failed batch leaves the state untouched."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.sigma = self._resolve_sigma()
        # model noise matches true noise
        nv = self.sigma**2
        self.human_agent = (
            dataclasses.replace(config.human_agent, noise_variance=nv)
            if config.human_agent
            else None
        )
        self.ai_agent = (
            dataclasses.replace(config.ai_agent, noise_variance=nv)
            if config.ai_agent
            else None
        )
        self._orient = _orient(config.objective)
        self.data: list[Observation] = []  # internal (maximize) orientation
        self.evaluations: list[Evaluation] = []
        self.records: list[BatchRecord] = []
        self.gamma = 0.0
        self.B = 1.0
        self._draw_initial_design()

    # -- construction ------------------------------------------------------

    def _rng(self, purpose: int, batch: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.config.seed,
                                     spawn_key=(purpose, batch))
        return np.random.default_rng(seq)

    def _resolve_sigma(self) -> float:
        if self.config.sigma is not None:
            if self.config.sigma <= 0:
                raise ValueError("sigma must be positive")
            return float(self.config.sigma)
        # fixed stream: the noise level is a property of the objective, not
        # of the session seed, so every arm sees the same noise scale
        rng = self._rng_static(_RNG_RANGE, 0)
        lo, hi = self._box()
        probes = rng.uniform(lo, hi, size=(256, lo.size))
        vals = np.array([self.config.objective(p) for p in probes])
        spread = float(np.max(vals) - np.min(vals))
        return NOISE_RANGE_FRACTION * spread if spread > 0 else NOISE_RANGE_FRACTION

    @staticmethod
    def _rng_static(purpose: int, seed: int) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=seed, spawn_key=(purpose, 0))
        return np.random.default_rng(seq)

    def _box(self):
        arr = np.asarray(self.config.bounds, dtype=float)
        return arr[:, 0], arr[:, 1]

    def _draw_initial_design(self):
        cfg = self.config
        if cfg.num_init == 0:
            return
        lo, hi = self._box()
        rng = self._rng(_RNG_INIT)
        noise_rng = self._rng(_RNG_NOISE, 0)
        X = rng.uniform(lo, hi, size=(cfg.num_init, lo.size))
        for t, x in enumerate(X, start=1):
            f = cfg.objective(x)
            y = f + noise_rng.normal(0.0, self.sigma)
            self.evaluations.append(Evaluation(t, 0, "init", _pytuple(x), y, f))
            self.data.append(Observation.make(x, self._orient * y, "init"))
        # accumulated information gain starts from the initial design,
        # using the AI agent's base kernel (no data to refit on yet)
        if self.ai_agent is not None:
            kernel = self.ai_agent.kernel
            nv = self.ai_agent.noise_variance
            for i in range(len(self.data)):
                before = gp_mod.fit(kernel, self.data[:i], nv)
                self.gamma += gp_mod.information_gain_increment(before, self.data[i].x)

    # -- state -------------------------------------------------------------

    @property
    def finished(self) -> bool:
        return len(self.records) >= self.config.budget_batches

    @property
    def next_batch(self) -> int:
        return len(self.records) + 1

    def schedule(self) -> BetaSchedule:
        return BetaSchedule(
            delta=self.config.delta,
            running_gamma=self.gamma,
            running_B=self.B,
            sigma=self.sigma,
            zeta=self.config.zeta,
        )

    # -- batch loop --------------------------------------------------------

    def run_batch(self, live_human_x=None) -> BatchRecord:
        """Advance one batch.  For a live-human session the posted
        suggestion must be supplied; machine sessions ignore it."""
        if self.finished:
            raise RuntimeError("session budget exhausted")
        cfg = self.config
        s = self.next_batch
        sched = self.schedule()
        noise_rng = self._rng(_RNG_NOISE, s)
        lo, hi = self._box()

        # suggestions are computed from the committed data only
        x_human = x_ai = None
        beta_used: Optional[float] = None

        if self.human_agent is not None:
            if self.human_agent.policy == "live_human":
                if live_human_x is None:
                    raise RuntimeError("live human suggestion has not been posted")
                x_human = np.asarray(live_human_x, dtype=float).ravel()
                if x_human.size != lo.size:
                    raise ValueError("live suggestion has wrong dimension")
                if np.any(x_human < lo) or np.any(x_human > hi):
                    raise ValueError("live suggestion is out of bounds")
            else:
                x_human = suggest(self.human_agent, self.data, sched,
                                  cfg.bounds, self._rng(_RNG_HUMAN_OPT, s))

        ai_posterior = None
        if self.ai_agent is not None:
            ai_posterior = prepare_posterior(self.ai_agent, self.data, cfg.bounds)
            if cfg.mode == "generic_bo":
                beta_used = srinivas_beta(s, cfg.delta)
                x_ai = maximize(GpUcb(beta_used), ai_posterior, cfg.bounds,
                                self._rng(_RNG_AI_OPT, s))
            elif self.ai_agent.policy == "bo_muse_ai":
                beta_used = bo_muse_beta(sched)
                x_ai = maximize(GpUcb(beta_used), ai_posterior, cfg.bounds,
                                self._rng(_RNG_AI_OPT, s))
            else:  # pure explorer (and any other machine policy)
                x_ai = suggest(self.ai_agent, self.data, sched,
                               cfg.bounds, self._rng(_RNG_AI_OPT, s))

        # evaluate; any objective failure aborts before state is touched
        new_evals: list[Evaluation] = []
        new_obs: list[Observation] = []
        t = len(self.evaluations)
        for x, source in ((x_human, "human"), (x_ai, "ai")):
            if x is None:
                continue
            t += 1
            f = cfg.objective(x)
            y = f + noise_rng.normal(0.0, self.sigma)
            new_evals.append(Evaluation(t, s, source, _pytuple(x), y, f))
            new_obs.append(Observation.make(x, self._orient * y, source))

        # information-gain increments, sequential in insertion order
        gamma = self.gamma
        if ai_posterior is not None:
            kernel = ai_posterior.kernel
            nv = self.ai_agent.noise_variance
            before = ai_posterior
            staged = list(self.data)
            for obs in new_obs:
                gamma += gp_mod.information_gain_increment(before, obs.x)
                staged.append(obs)
                before = gp_mod.fit(kernel, staged, nv)
            B = max(self.B, gp_mod.rkhs_norm_estimate(before))
        else:
            B = self.B

        record = BatchRecord(
            s=s,
            x_human=_pytuple(x_human) if x_human is not None else None,
            y_human=next((e.y for e in new_evals if e.source == "human"), None),
            x_ai=_pytuple(x_ai) if x_ai is not None else None,
            y_ai=next((e.y for e in new_evals if e.source == "ai"), None),
            gamma_after=gamma,
            B_after=B,
            beta_used=beta_used,
        )

        # commit
        self.evaluations.extend(new_evals)
        self.data.extend(new_obs)
        self.records.append(record)
        self.gamma = gamma
        self.B = B
        return record

    # -- persistence -------------------------------------------------------

    def to_json(self) -> dict:
        cfg = self.config
        if cfg.objective.name not in ("matyas-2d", "ackley-4d", "rastrigin-5d", "levy-6d"):
            raise ValueError("only built-in benchmark sessions are persistable")
        return {
            "config": {
                "benchmark": cfg.objective.name,
                "num_init": cfg.num_init,
                "budget_batches": cfg.budget_batches,
                "delta": cfg.delta,
                "zeta": cfg.zeta,
                "seed": cfg.seed,
                "mode": cfg.mode,
                "sigma": cfg.sigma,
                "human_agent": cfg.human_agent.to_json() if cfg.human_agent else None,
                "ai_agent": cfg.ai_agent.to_json() if cfg.ai_agent else None,
            },
            "evaluations": [dataclasses.asdict(e) for e in self.evaluations],
            "records": [dataclasses.asdict(r) for r in self.records],
            "gamma": self.gamma,
            "B": self.B,
            "sigma_resolved": self.sigma,
        }

    @staticmethod
    def from_json(obj: dict) -> "Session":
        c = obj["config"]
        objective = builtin(c["benchmark"])
        config = SessionConfig(
            objective=objective,
            bounds=objective.bounds,
            num_init=c["num_init"],
            budget_batches=c["budget_batches"],
            delta=c["delta"],
            zeta=c["zeta"],
            seed=c["seed"],
            mode=c["mode"],
            human_agent=AgentSpec.from_json(c["human_agent"]) if c["human_agent"] else None,
            ai_agent=AgentSpec.from_json(c["ai_agent"]) if c["ai_agent"] else None,
            sigma=c["sigma"],
        )
        session = Session.__new__(Session)
        session.config = config
        session.sigma = obj["sigma_resolved"]
        nv = session.sigma**2
        session.human_agent = (
            dataclasses.replace(config.human_agent, noise_variance=nv)
            if config.human_agent
            else None
        )
        session.ai_agent = (
            dataclasses.replace(config.ai_agent, noise_variance=nv)
            if config.ai_agent
            else None
        )
        session._orient = _orient(objective)
        session.evaluations = [
            Evaluation(e["t"], e["s"], e["source"], tuple(e["x"]), e["y"], e["f_true"])
            for e in obj["evaluations"]
        ]
        session.records = [
            BatchRecord(
                s=r["s"],
                x_human=tuple(r["x_human"]) if r["x_human"] is not None else None,
                y_human=r["y_human"],
                x_ai=tuple(r["x_ai"]) if r["x_ai"] is not None else None,
                y_ai=r["y_ai"],
                gamma_after=r["gamma_after"],
                B_after=r["B_after"],
                beta_used=r["beta_used"],
            )
            for r in obj["records"]
        ]
        session.data = [
            Observation.make(e.x, session._orient * e.y, e.source)
            for e in session.evaluations
        ]
        session.gamma = obj["gamma"]
        session.B = obj["B"]
        return session


def run_session(config: SessionConfig) -> tuple[list[BatchRecord], RegretTrace]:
    """Run all batches of a machine-only session and compute its regret."""
    session = Session(config)
    while not session.finished:
        session.run_batch()
    return session.records, compute_regret_from_session(session)


def compute_regret_from_session(session: Session) -> RegretTrace:
    return _regret_from_evaluations(session.evaluations, session.config.objective)


def compute_regret(records: Sequence[BatchRecord], objective: ObjectiveSpec,
                   init_x: Sequence = ()) -> RegretTrace:
    """Regret trace recomputed from batch records (plus optional initial
    design points), evaluating the noiseless objective at every stored x."""
    evals: list[Evaluation] = []
    t = 0
    for x in init_x:
        t += 1
        evals.append(Evaluation(t, 0, "init", tuple(x), math.nan, objective(x)))
    for rec in records:
        for x, source in ((rec.x_human, "human"), (rec.x_ai, "ai")):
            if x is None:
                continue
            t += 1
            evals.append(Evaluation(t, rec.s, source, tuple(x), math.nan, objective(x)))
    return _regret_from_evaluations(evals, objective)


def _regret_from_evaluations(evaluations: Sequence[Evaluation],
                             objective: ObjectiveSpec) -> RegretTrace:
    orient = _orient(objective)
    best = -math.inf
    best_series = []
    for e in evaluations:
        best = max(best, orient * e.f_true)
        best_series.append(orient * best)

    if not objective.has_known_optimum:
        return RegretTrace([], [], [], False, best_series)

    g_star = orient * objective.optimum_value
    simple = []
    best = -math.inf
    for e in evaluations:
        best = max(best, orient * e.f_true)
        simple.append(g_star - best)

    batch_regret = []
    cumulative = []
    total = 0.0
    by_batch: dict[int, list[float]] = {}
    for e in evaluations:
        if e.s > 0:
            by_batch.setdefault(e.s, []).append(g_star - orient * e.f_true)
    for s in sorted(by_batch):
        r = min(by_batch[s])
        batch_regret.append(r)
        total += r
        cumulative.append(total)
    return RegretTrace(simple, batch_regret, cumulative, True, best_series)


def export_csv(session: Session) -> str:
    """One row per evaluation: s, t, source, x..., y, f_star, simple_regret,
    batch_regret, gamma, B, beta."""
    trace = compute_regret_from_session(session)
    dim = session.config.objective.dim
    by_batch = {r.s: r for r in session.records}
    batch_r = {s + 1: trace.batch_regret[s] for s in range(len(trace.batch_regret))}

    buf = io.StringIO()
    cols = (
        ["s", "t", "source"]
        + [f"x{i + 1}" for i in range(dim)]
        + ["y", "f_star", "simple_regret", "batch_regret", "gamma", "B", "beta"]
    )
    buf.write(",".join(cols) + "\n")
    for i, e in enumerate(session.evaluations):
        rec = by_batch.get(e.s)
        row = [str(e.s), str(e.t), e.source]
        row += [repr(v) for v in e.x]
        row.append(repr(e.y))
        row.append(repr(e.f_true))
        row.append(repr(trace.simple_regret[i]) if trace.optimum_known else "")
        row.append(repr(batch_r[e.s]) if (e.s in batch_r and trace.optimum_known) else "")
        if rec is not None:
            row.append(repr(rec.gamma_after))
            row.append(repr(rec.B_after))
            row.append(repr(rec.beta_used) if rec.beta_used is not None else "")
        else:
            row += ["", "", ""]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
