"""End-to-end acceptance checks, one per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or on
failure) so the suite doubles as a release checklist.
"""

import math
import statistics
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from bomuse import gp as gp_mod
from bomuse.acquisition import BetaSchedule, bo_muse_beta, zeta_lower_bound
from bomuse.engine import Session, default_config, export_csv, run_session
from bomuse.gp import Observation, fit, information_gain_increment
from bomuse.kernels import KernelSpec, cross_cov, gram
from bomuse.service import create_app
from bomuse.theory import (
    run_hadamard_audit,
    run_mean_monotonicity_audit,
    run_variance_bracket_audit,
)


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_gp_matches_dense_oracle():
    rng = np.random.default_rng(0)
    kernels = [
        KernelSpec("se"),
        KernelSpec("se", lengthscale=0.7, signal_variance=2.0),
        KernelSpec("linear"),
        KernelSpec("polynomial", degree=2),
        KernelSpec("polynomial", degree=3),
    ]
    start = time.monotonic()
    worst = 0.0
    for i in range(200):
        kernel = kernels[i % len(kernels)]
        n = int(rng.integers(1, 101))
        d = int(rng.integers(1, 5))
        s2 = float(rng.uniform(0.01, 1.0))
        X = rng.uniform(-2, 2, (n, d))
        y = rng.normal(size=n)
        gp = fit(kernel, [Observation.make(x, yi) for x, yi in zip(X, y)], s2)
        xq = rng.uniform(-2, 2, d)
        K = gram(kernel, X)
        inv = np.linalg.inv(K + s2 * np.eye(n))
        kx = cross_cov(kernel, X, xq[None, :]).ravel()
        mu_o = float(y @ inv @ kx)
        var_o = float(cross_cov(kernel, xq[None, :], xq[None, :])[0, 0] - kx @ inv @ kx)
        mu, var = gp.mean_var(xq[None, :])
        worst = max(
            worst,
            abs(float(mu[0]) - mu_o) / max(1.0, abs(mu_o)),
            abs(float(var[0]) - max(var_o, 0.0)) / max(1.0, abs(var_o)),
        )
    elapsed = time.monotonic() - start
    report(
        "GP posterior matches dense oracle on 200 instances",
        worst <= 1e-8 and elapsed < 30.0,
        f"worst rel err {worst:.2e}, {elapsed:.1f}s",
    )


def test_information_gain_identity():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        kernel = KernelSpec("se", lengthscale=float(rng.uniform(0.3, 2.0)))
        n = int(rng.integers(2, 15))
        d = int(rng.integers(1, 4))
        s2 = float(rng.uniform(0.01, 1.0))
        X = rng.uniform(-2, 2, (n, d))
        total = 0.0
        data = []
        for i in range(n):
            total += information_gain_increment(fit(kernel, data, s2), X[i])
            data.append(Observation.make(X[i], 0.0))
        oracle = float(np.linalg.slogdet(np.eye(n) + gram(kernel, X) / s2)[1])
        worst = max(worst, abs(total - oracle))
    report(
        "accumulated information gain telescopes to log det(I + K/s2), 50 sequences",
        worst <= 1e-8,
        f"worst abs err {worst:.2e}",
    )


def test_beta_schedule_and_zeta_bound():
    beta = bo_muse_beta(BetaSchedule(delta=math.exp(-1.0), running_gamma=0.0,
                                     running_B=1.0, sigma=1.0))
    expected = 7.0 * (math.sqrt(3.0) + 1.0) ** 2
    lb = zeta_lower_bound(math.log(1.5))
    ok = abs(beta - expected) <= 1e-10 and 7.30 <= lb <= 7.40
    report(
        "trade-off schedule hand value and multiplier lower bound",
        ok,
        f"beta err {abs(beta - expected):.1e}, bound {lb:.6f}",
    )


def test_inequality_audits():
    start = time.monotonic()
    mono = run_mean_monotonicity_audit(10_000, seed=0)
    hada = run_hadamard_audit(10_000, seed=0)
    bracket = run_variance_bracket_audit(100, seed=0)
    elapsed = time.monotonic() - start
    violations = mono["violations"] + hada["violations"] + bracket["violations"]
    report(
        "mean-order and product-mean audits (10^4 trials each) plus variance "
        "upper bound (100 instances)",
        violations == 0 and elapsed < 60.0,
        f"{violations} violations, {elapsed:.1f}s",
    )


def _final_median(benchmark, mode, evaluations, seeds):
    finals = {}
    for seed in seeds:
        config = default_config(benchmark, mode, seed=seed,
                                evaluations=evaluations, num_init=3)
        _, trace = run_session(config)
        finals[seed] = trace.simple_regret[-1]
    return finals


def test_teaming_beats_baselines_matyas():
    seeds = range(10)
    start = time.monotonic()
    team = _final_median("matyas-2d", "bo_muse", 20, seeds)
    generic = _final_median("matyas-2d", "generic_bo", 20, seeds)
    explore = _final_median("matyas-2d", "human_plus_pure_exploration", 20, seeds)
    elapsed = time.monotonic() - start
    m_team = statistics.median(team.values())
    m_gen = statistics.median(generic.values())
    m_exp = statistics.median(explore.values())
    wins = sum(team[s] <= explore[s] for s in seeds)
    ok = m_team <= m_gen and m_team <= m_exp and wins >= 7 and elapsed < 300.0
    report(
        "teaming outperforms both baselines on matyas-2d (10 seeds, 3+20)",
        ok,
        f"medians team={m_team:.3g} generic={m_gen:.3g} explore={m_exp:.3g}, "
        f"wins {wins}/10, {elapsed:.0f}s",
    )


def test_teaming_beats_exploration_ackley():
    seeds = range(10)
    start = time.monotonic()
    team = _final_median("ackley-4d", "bo_muse", 40, seeds)
    explore = _final_median("ackley-4d", "human_plus_pure_exploration", 40, seeds)
    elapsed = time.monotonic() - start
    m_team = statistics.median(team.values())
    m_exp = statistics.median(explore.values())
    ok = m_team <= m_exp and elapsed < 900.0
    report(
        "teaming outperforms expert+exploration on ackley-4d (10 seeds, 3+40)",
        ok,
        f"medians team={m_team:.3g} explore={m_exp:.3g}, {elapsed:.0f}s",
    )


def test_repeat_runs_are_byte_identical():
    ok = True
    for mode in ("bo_muse", "generic_bo", "human_plus_pure_exploration"):
        config = default_config("matyas-2d", mode, seed=13, evaluations=8)
        a, b = Session(config), Session(config)
        while not a.finished:
            a.run_batch()
        while not b.finished:
            b.run_batch()
        ok = ok and export_csv(a) == export_csv(b)
    report("repeated runs export byte-identical CSVs", ok)


def test_service_equals_library(tmp_path):
    client = TestClient(create_app(tmp_path / "data"))
    r = client.post("/sessions", json={"id": "acc", "benchmark": "matyas-2d",
                                       "evaluations": 10, "seed": 4})
    assert r.status_code == 201
    while client.get("/sessions/acc").json()["phase"] != "finished":
        client.post("/sessions/acc/advance")
    via_http = client.get("/sessions/acc/export.csv").text

    session = Session(default_config("matyas-2d", "bo_muse", seed=4, evaluations=10))
    while not session.finished:
        session.run_batch()
    report("HTTP-driven session matches in-process run", via_http == export_csv(session))
