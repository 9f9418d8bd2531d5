"""Session lifecycle over HTTP with JSON-file persistence.

This is the bridge between the batch engine and a live human expert: the
expert's browser polls session state and posts a suggestion, then the batch
is advanced.  Every mutation is persisted (atomic rename) before the call
returns, so a restart reloads the exact committed state.
"""

from __future__ import annotations

import datetime
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import engine
from .engine import Session

__all__ = ["SessionStore", "create_app"]


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


@dataclass
class StoredSession:
    id: str
    session: Session
    phase: str  # "awaiting_human" | "awaiting_advance" | "finished"
    pending_suggestion: Optional[list]
    optimum_public: bool
    created: str
    updated: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase,
            "pending_suggestion": self.pending_suggestion,
            "optimum_public": self.optimum_public,
            "created": self.created,
            "updated": self.updated,
            "session": self.session.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "StoredSession":
        return StoredSession(
            id=obj["id"],
            session=Session.from_json(obj["session"]),
            phase=obj["phase"],
            pending_suggestion=obj["pending_suggestion"],
            optimum_public=obj["optimum_public"],
            created=obj["created"],
            updated=obj["updated"],
        )


class SessionStore:
    """One JSON document per session; per-id commit lock serializes
    mutations, reads see the last committed snapshot."""

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        safe = "".join(c if (c.isalnum() or c in "-_") else "_" for c in session_id)
        return self.data_dir / f"{safe}.json"

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def load(self, session_id: str) -> StoredSession:
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        with open(path) as fh:
            return StoredSession.from_json(json.load(fh))

    def save(self, state: StoredSession):
        path = self._path(state.id)
        fd, tmp = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(state.to_json(), fh)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.json"))


class CreateSessionRequest(BaseModel):
    id: str
    benchmark: str
    mode: str = "bo_muse"
    evaluations: int = 20
    num_init: Optional[int] = None
    delta: float = 0.1
    zeta: float = 7.0
    seed: int = 0
    sigma: Optional[float] = None
    live_human: bool = False
    expert_policy: str = "simulated_expert_ucb"
    optimum_public: bool = False


class SuggestionRequest(BaseModel):
    x: list[float]


def _phase_for(session: Session) -> str:
    if session.finished:
        return "finished"
    human = session.human_agent
    if human is not None and human.policy == "live_human":
        return "awaiting_human"
    return "awaiting_advance"


def _view(state: StoredSession) -> dict:
    """Public session view.  Noiseless objective values and the optimum are
    withheld unless the session declares its optimum public."""
    s = state.session
    cfg = s.config
    direction = cfg.objective.direction
    observations = [
        {"t": e.t, "s": e.s, "source": e.source, "x": list(e.x), "y": e.y}
        for e in s.evaluations
    ]
    best = None
    if observations:
        pick = max if direction == "max" else min
        best_obs = pick(observations, key=lambda o: o["y"])
        best = {"x": best_obs["x"], "y": best_obs["y"], "t": best_obs["t"]}
    view = {
        "id": state.id,
        "phase": state.phase,
        "benchmark": cfg.objective.name,
        "mode": cfg.mode,
        "direction": direction,
        "bounds": [list(b) for b in cfg.bounds],
        "dim": cfg.objective.dim,
        "num_init": cfg.num_init,
        "batch": len(s.records),
        "budget_batches": cfg.budget_batches,
        "has_pending_suggestion": state.pending_suggestion is not None,
        "observations": observations,
        "best": best,
        "created": state.created,
        "updated": state.updated,
    }
    if state.optimum_public and cfg.objective.has_known_optimum:
        view["optimum_value"] = cfg.objective.optimum_value
        view["optimum_x"] = list(cfg.objective.optimum_x)
    return view


def create_app(data_dir) -> FastAPI:
    app = FastAPI(title="bomuse session service")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": store.list_ids()}

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        with store.lock(req.id):
            if store.exists(req.id):
                raise HTTPException(409, f"session {req.id!r} already exists")
            try:
                config = engine.default_config(
                    req.benchmark,
                    req.mode,
                    seed=req.seed,
                    evaluations=req.evaluations,
                    num_init=req.num_init,
                    delta=req.delta,
                    zeta=req.zeta,
                    sigma=req.sigma,
                    expert_policy=req.expert_policy,
                    live_human=req.live_human,
                )
                session = Session(config)
            except ValueError as err:
                raise HTTPException(400, str(err)) from err
            now = _now()
            state = StoredSession(
                id=req.id,
                session=session,
                phase=_phase_for(session),
                pending_suggestion=None,
                optimum_public=req.optimum_public,
                created=now,
                updated=now,
            )
            store.save(state)
            return _view(state)

    def _load_or_404(session_id: str) -> StoredSession:
        try:
            return store.load(session_id)
        except KeyError:
            raise HTTPException(404, f"no session {session_id!r}") from None

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _view(_load_or_404(session_id))

    @app.post("/sessions/{session_id}/suggestion")
    def post_suggestion(session_id: str, req: SuggestionRequest):
        with store.lock(session_id):
            state = _load_or_404(session_id)
            if state.phase != "awaiting_human":
                raise HTTPException(
                    409, f"session is {state.phase}, not awaiting a human suggestion"
                )
            bounds = np.asarray(state.session.config.bounds, dtype=float)
            x = np.asarray(req.x, dtype=float)
            if x.size != bounds.shape[0]:
                raise HTTPException(
                    400, f"expected {bounds.shape[0]} coordinates, got {x.size}"
                )
            for i, (lo, hi) in enumerate(bounds):
                if not (lo <= x[i] <= hi):
                    raise HTTPException(
                        400,
                        f"coordinate {i + 1} = {x[i]} outside bounds [{lo}, {hi}]",
                    )
            state.pending_suggestion = [float(v) for v in x]
            state.phase = "awaiting_advance"
            state.updated = _now()
            store.save(state)
            return _view(state)

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str):
        with store.lock(session_id):
            state = _load_or_404(session_id)
            if state.phase == "finished":
                raise HTTPException(409, "session is finished")
            if state.phase == "awaiting_human":
                raise HTTPException(409, "awaiting a human suggestion")
            try:
                record = state.session.run_batch(state.pending_suggestion)
            except (RuntimeError, ValueError) as err:
                raise HTTPException(409, str(err)) from err
            state.pending_suggestion = None
            state.phase = _phase_for(state.session)
            state.updated = _now()
            store.save(state)
            return {
                "record": {
                    "s": record.s,
                    "x_human": list(record.x_human) if record.x_human else None,
                    "y_human": record.y_human,
                    "x_ai": list(record.x_ai) if record.x_ai else None,
                    "y_ai": record.y_ai,
                    "gamma_after": record.gamma_after,
                    "B_after": record.B_after,
                    "beta_used": record.beta_used,
                },
                "phase": state.phase,
            }

    @app.get("/sessions/{session_id}/export.csv", response_class=PlainTextResponse)
    def export(session_id: str):
        state = _load_or_404(session_id)
        return engine.export_csv(state.session)

    return app
