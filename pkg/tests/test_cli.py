import json
import socket
import subprocess
import sys
import time
import urllib.request

import pytest
from click.testing import CliRunner

from bomuse import theory
from bomuse.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def run_args(out, seeds="0,1", evaluations=4):
    return [
        "run", "--benchmark", "matyas-2d", "--seeds", seeds,
        "--batches", str(evaluations), "--out", str(out),
    ]


def test_run_writes_tidy_and_aggregate(runner, tmp_path):
    out = tmp_path / "results.csv"
    result = runner.invoke(main, run_args(out))
    assert result.exit_code == 0, result.output
    tidy = out.read_text().strip().split("\n")
    assert tidy[0] == "mode,seed,t,simple_regret"
    modes = {line.split(",")[0] for line in tidy[1:]}
    assert modes == {"bo_muse", "generic_bo", "human_plus_pure_exploration"}
    # 3 init + 4 evaluations per (mode, seed)
    assert len(tidy) == 1 + 3 * 2 * 7

    agg = (tmp_path / "results.csv.agg.csv").read_text().strip().split("\n")
    assert agg[0].split(",")[0] == "t"
    assert "bo_muse_mean" in agg[0]
    assert "bo_muse_stderr" in agg[0]
    assert len(agg) == 1 + 7


def test_run_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert runner.invoke(main, run_args(a)).exit_code == 0
    assert runner.invoke(main, run_args(b)).exit_code == 0
    assert a.read_text() == b.read_text()
    assert (tmp_path / "a.csv.agg.csv").read_text() == \
        (tmp_path / "b.csv.agg.csv").read_text()


def test_run_single_seed_stderr_zero(runner, tmp_path):
    out = tmp_path / "one.csv"
    assert runner.invoke(main, run_args(out, seeds="5")).exit_code == 0
    agg = (tmp_path / "one.csv.agg.csv").read_text().strip().split("\n")
    header = agg[0].split(",")
    idx = header.index("bo_muse_stderr")
    for line in agg[1:]:
        assert float(line.split(",")[idx]) == 0.0


def test_run_stdout_when_no_out(runner):
    result = runner.invoke(
        main, ["run", "--benchmark", "matyas-2d", "--seeds", "0", "--batches", "2"]
    )
    assert result.exit_code == 0
    assert result.stdout.startswith("mode,seed,t,simple_regret\n")
    assert "final mean simple regret" in result.stderr


def test_run_rejects_unknown_mode(runner):
    result = runner.invoke(
        main, ["run", "--benchmark", "matyas-2d", "--modes", "simulated_annealing"]
    )
    assert result.exit_code != 0


def test_verify_theory_passes(runner):
    result = runner.invoke(main, ["verify-theory", "--trials", "200",
                                  "--bracket-instances", "10"])
    assert result.exit_code == 0, result.output
    reports = json.loads(result.stdout)
    assert [r["check"] for r in reports] == [
        "mean_monotonicity", "hadamard_mean_bounds", "posterior_variance_bracket",
    ]
    assert all(r["violations"] == 0 for r in reports)


def test_verify_theory_fails_on_injected_fault(runner, monkeypatch):
    def broken(trials, seed=0):
        return {"check": "mean_monotonicity", "trials": trials,
                "violations": 3, "max_slack": 0.5}

    monkeypatch.setattr(theory, "run_mean_monotonicity_audit", broken)
    result = runner.invoke(main, ["verify-theory", "--trials", "10",
                                  "--bracket-instances", "2"])
    assert result.exit_code == 1


def test_verify_theory_rejects_bad_trials(runner):
    assert runner.invoke(main, ["verify-theory", "--trials", "0"]).exit_code != 0


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_roundtrip(tmp_path):
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "bomuse.cli", "serve",
         "--bind", f"127.0.0.1:{port}", "--data-dir", str(tmp_path / "data")],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                with urllib.request.urlopen(f"{base}/healthz", timeout=1) as r:
                    assert json.load(r) == {"status": "ok"}
                break
            except OSError:
                time.sleep(0.1)
        else:
            pytest.fail("server did not come up")

        body = json.dumps({"id": "cli-test", "benchmark": "matyas-2d",
                           "evaluations": 4, "seed": 0}).encode()
        req = urllib.request.Request(f"{base}/sessions", data=body,
                                     headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=5) as r:
            assert r.status == 201
        adv = urllib.request.Request(f"{base}/sessions/cli-test/advance", data=b"")
        with urllib.request.urlopen(adv, timeout=30) as r:
            assert json.load(r)["record"]["s"] == 1
    finally:
        proc.terminate()
        proc.wait(timeout=10)
