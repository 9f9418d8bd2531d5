"""Command-line entry points: headless experiment runner, theory verifier,
and the session service."""

from __future__ import annotations

import io
import json
import math
import sys

import click

from . import engine, theory
from .benchmarks import builtin_names

DEFAULT_MODES = "bo_muse,generic_bo,human_plus_pure_exploration"


@click.group()
def main():
    """Human-AI teaming Bayesian optimization toolkit."""


@main.command("run")
@click.option("--benchmark", required=True, type=click.Choice(builtin_names()))
@click.option("--modes", default=DEFAULT_MODES, show_default=True,
              help="Comma-separated session modes to compare.")
@click.option("--seeds", default="0,1,2,3,4,5,6,7,8,9", show_default=True,
              help="Comma-separated seeds; one repeat per seed.")
@click.option("--batches", "evaluations", default=20, show_default=True,
              help="Objective-evaluation budget per mode after the initial "
                   "design (two-agent modes spend 2 per batch).")
@click.option("--init", "num_init", default=None, type=int,
              help="Initial design size (default: dimension + 1).")
@click.option("--sigma", default=None, type=float,
              help="Observation noise std (default: 1% of sampled range).")
@click.option("--zeta", default=7.0, show_default=True)
@click.option("--delta", default=0.1, show_default=True)
@click.option("--expert-policy", default="simulated_expert_ucb", show_default=True,
              type=click.Choice(["simulated_expert_ucb", "simulated_expert_ei"]))
@click.option("--out", "out_path", default=None,
              help="Path for the tidy per-run CSV; aggregated CSV goes to "
                   "<out>.agg.csv.  Defaults to stdout (tidy only).")
def cmd_run(benchmark, modes, seeds, evaluations, num_init, sigma, zeta, delta,
            expert_policy, out_path):
    """Run seeded regret comparisons across modes and export CSVs."""
    mode_list = [m.strip() for m in modes.split(",") if m.strip()]
    seed_list = [int(s) for s in seeds.split(",") if s.strip()]
    for mode in mode_list:
        if mode not in engine.MODES:
            raise click.BadParameter(f"unknown mode {mode!r}")

    # traces[mode][seed] = simple-regret series (init + evaluations entries)
    traces: dict[str, dict[int, list]] = {m: {} for m in mode_list}
    for mode in mode_list:
        for seed in seed_list:
            config = engine.default_config(
                benchmark, mode, seed=seed, evaluations=evaluations,
                num_init=num_init, delta=delta, zeta=zeta, sigma=sigma,
                expert_policy=expert_policy,
            )
            try:
                _, trace = engine.run_session(config)
            except Exception as err:
                click.echo(f"session failed: mode={mode} seed={seed}: {err}", err=True)
                sys.exit(1)
            traces[mode][seed] = trace.simple_regret

    tidy = _tidy_csv(traces)
    agg = _aggregate_csv(traces, seed_list)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(tidy)
        with open(f"{out_path}.agg.csv", "w") as fh:
            fh.write(agg)
    else:
        click.echo(tidy, nl=False)

    click.echo("final mean simple regret:", err=True)
    for mode in mode_list:
        finals = [traces[mode][s][-1] for s in seed_list]
        click.echo(f"  {mode}: {sum(finals) / len(finals):.6g}", err=True)


def _tidy_csv(traces) -> str:
    buf = io.StringIO()
    buf.write("mode,seed,t,simple_regret\n")
    for mode in traces:
        for seed in sorted(traces[mode]):
            for t, r in enumerate(traces[mode][seed], start=1):
                buf.write(f"{mode},{seed},{t},{r!r}\n")
    return buf.getvalue()


def _aggregate_csv(traces, seed_list) -> str:
    modes = list(traces)
    buf = io.StringIO()
    header = ["t"]
    for mode in modes:
        header += [f"{mode}_mean", f"{mode}_stderr"]
    buf.write(",".join(header) + "\n")
    n_t = max(len(traces[m][s]) for m in modes for s in seed_list)
    for t in range(n_t):
        row = [str(t + 1)]
        for mode in modes:
            # series may differ in length across modes (batching); pad by
            # holding the final value so every iteration has a column entry
            vals = []
            for seed in seed_list:
                series = traces[mode][seed]
                vals.append(series[min(t, len(series) - 1)])
            mean = sum(vals) / len(vals)
            if len(vals) > 1:
                var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                stderr = math.sqrt(var / len(vals))
            else:
                stderr = 0.0
            row += [repr(mean), repr(stderr)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


@main.command("verify-theory")
@click.option("--trials", default=10_000, show_default=True)
@click.option("--bracket-instances", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
def cmd_verify_theory(trials, bracket_instances, seed):
    """Audit the supporting inequalities; exit 1 on any hard violation."""
    if trials < 1:
        raise click.BadParameter("trials must be >= 1")
    reports = [
        theory.run_mean_monotonicity_audit(trials, seed=seed),
        theory.run_hadamard_audit(trials, seed=seed),
        theory.run_variance_bracket_audit(bracket_instances, seed=seed),
    ]
    click.echo(json.dumps(reports, indent=2))
    if any(r["violations"] > 0 for r in reports):
        sys.exit(1)


@main.command("serve")
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="host:port to listen on.")
@click.option("--data-dir", default="./bomuse-sessions", show_default=True)
def cmd_serve(bind, data_dir):
    """Serve the session API over HTTP (SIGTERM-clean shutdown)."""
    import uvicorn

    from .service import create_app

    host, _, port = bind.rpartition(":")
    app = create_app(data_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
