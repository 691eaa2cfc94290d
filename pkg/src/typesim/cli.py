"""Command-line entry points: simulate, classify, fit, bench, sweep, serve.

Run artifacts land in the directory named by TYPESIM_DATA_DIR (default
./typesim_runs), keyed by a content hash of the request so identical
invocations reuse their persisted outputs.

Exit codes: 2 invalid configuration or arguments, 3 simulation failure,
4 non-finite fit objective.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import bench as bench_mod
from . import optimizer as opt
from .env import EnvConfig, RewardParams
from .keyboard import builtin_layout_names, load_builtin_layout
from .mechanisms import UserParams
from .metrics import (BACKSPACE, Tap, aggregate, report, report_from_log,
                      reports_to_csv)
from .supervisor import PolicyParams, run_episode
from .traces import dumps_trace

EXIT_INVALID = 2
EXIT_SIM_FAILURE = 3
EXIT_NONFINITE = 4


def data_dir() -> Path:
    d = Path(os.environ.get("TYPESIM_DATA_DIR", "typesim_runs"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def run_id(kind: str, payload: dict) -> str:
    blob = json.dumps({"kind": kind, **payload}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def record_run(kind: str, payload: dict, artifacts: list[str]) -> dict:
    rec = {"id": run_id(kind, payload), "kind": kind, "request": payload,
           "artifacts": artifacts}
    path = data_dir() / f"{rec['id']}.run.json"
    path.write_text(json.dumps(rec, indent=2), encoding="utf-8")
    return rec


def _load_params(params_file: str | None, group: str | None):
    """Parameter triple from an explicit JSON file or a fitted group name."""
    if params_file:
        doc = json.loads(Path(params_file).read_text(encoding="utf-8"))
        return (UserParams.from_dict(doc["user_params"]),
                PolicyParams.from_dict(doc["policy_params"]),
                RewardParams.from_dict(doc.get("reward_params", {})))
    return bench_mod.load_fitted_params(group or "young_adults")


def _invalid(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INVALID)


@click.group()
def main():
    """Touchscreen typing simulator with human-like errors."""


@main.command()
@click.option("--phrase", required=True, help="text to transcribe")
@click.option("--layout", "layout_name", default="qwerty_en", show_default=True)
@click.option("--level", default=1, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--episodes", default=1, show_default=True, type=int)
@click.option("--params", "params_file", default=None,
              help="JSON file with user/policy/reward params")
@click.option("--group", default=None, help="bundled fitted group to use")
@click.option("--out", default=None, help="output JSONL path")
@click.option("--metrics-csv", default=None,
              help="also write per-trace metrics (one CSV row per episode)")
def simulate(phrase, layout_name, level, seed, episodes, params_file, group,
             out, metrics_csv):
    """Roll episodes and write JSONL traces plus a metrics summary."""
    try:
        up, pp, rp = _load_params(params_file, group)
        layout = load_builtin_layout(layout_name)
        dictionary = bench_mod.builtin_dictionary() if level == 2 else None
        config = EnvConfig(layout=layout, phrase=phrase, level=level,
                           autocorrect_dictionary=dictionary)
    except (ValueError, OSError, KeyError) as exc:
        _invalid(str(exc))
    payload = {"phrase": phrase, "layout": layout_name, "level": level,
               "seed": seed, "episodes": episodes,
               "user_params": up.to_dict(), "policy_params": pp.to_dict(),
               "reward_params": rp.to_dict()}
    out_path = Path(out) if out else data_dir() / f"{run_id('simulate', payload)}.jsonl"
    try:
        rng = np.random.default_rng(seed)
        seeds = [seed] if episodes == 1 else [int(s) for s in
                                              rng.integers(0, 2 ** 62, episodes)]
        traces = [run_episode(config, up, pp, rp, s) for s in seeds]
    except Exception as exc:  # noqa: BLE001 - simulation failures exit 3
        click.echo(f"simulation failure: {exc}", err=True)
        sys.exit(EXIT_SIM_FAILURE)
    with open(out_path, "w", encoding="utf-8") as fh:
        for tr in traces:
            fh.write(dumps_trace(tr) + "\n")
    reports = [report(tr) for tr in traces]
    artifacts = [str(out_path)]
    if metrics_csv:
        Path(metrics_csv).write_text(reports_to_csv(reports),
                                     encoding="utf-8")
        artifacts.append(metrics_csv)
    record_run("simulate", payload, artifacts)
    stats = aggregate(reports)
    click.echo(f"wrote {out_path} ({episodes} episode(s))")
    for name, (mean, sd) in stats.items():
        click.echo(f"  {name:<26} M={mean:8.3f}  SD={sd:8.3f}")


@main.command()
@click.option("--log", "log_file", required=True,
              help="keystroke CSV with char,time rows ('<' or BS = backspace)")
@click.option("--presented", required=True, help="the presented text")
@click.option("--total-time", default=None, type=float,
              help="override total time (default: last tap time)")
@click.option("--out", default=None, help="write the report JSON here")
def classify(log_file, presented, total_time, out):
    """Score an external keystroke log against a presented text."""
    taps = []
    try:
        with open(log_file, encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "char":
                    continue
                ch = row[0]
                if ch in ("<", "\\b", "BS", "backspace"):
                    ch = BACKSPACE
                taps.append(Tap(ch, float(row[1]) if len(row) > 1 else 0.0))
    except (OSError, ValueError) as exc:
        _invalid(f"cannot read log: {exc}")
    t = total_time if total_time is not None else (taps[-1].time if taps else 0.0)
    rep = report_from_log(taps, presented, t)
    doc = {k: v for k, v in rep.to_dict().items()}
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--targets", "targets_file", required=True)
@click.option("--group", default=None,
              help="group row in the targets file (default: first)")
@click.option("--outer", default=8, show_default=True, type=int)
@click.option("--inner", default=12, show_default=True, type=int)
@click.option("--outer-init", default=6, show_default=True, type=int)
@click.option("--inner-init", default=8, show_default=True, type=int)
@click.option("--episodes", default=40, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--checkpoint", default=None, help="resumable checkpoint path")
@click.option("--out", default=None, help="fit artifact path")
def fit(targets_file, group, outer, inner, outer_init, inner_init, episodes,
        seed, checkpoint, out):
    """Joint two-loop fit of policy+reward (outer) and user params (inner)."""
    try:
        targets = bench_mod.load_targets(targets_file)
        chosen = targets[0] if group is None else next(
            t for t in targets if t.group == group)
    except StopIteration:
        _invalid(f"group {group!r} not in targets file")
    except (OSError, ValueError) as exc:
        _invalid(str(exc))
    spec = opt.ObjectiveSpec(
        targets={m: opt.TargetDist(mean=s.mean, sd=s.effective_sd() or 0.0)
                 for m, s in chosen.metrics.items()},
        n_episodes=max(30, episodes))
    sim = opt.SimSetup(
        layout=load_builtin_layout("qwerty_en"),
        phrases=bench_mod.builtin_phrases(),
        level=chosen.level,
        dictionary=bench_mod.builtin_dictionary() if chosen.level == 2 else None)
    try:
        result = opt.fit_joint(spec, sim,
                               opt.Budget(n_init=outer_init, n_iter=outer),
                               opt.Budget(n_init=inner_init, n_iter=inner),
                               seed, checkpoint_path=checkpoint)
    except opt.NonFiniteObjective as exc:
        click.echo(f"non-finite objective: {exc}", err=True)
        sys.exit(EXIT_NONFINITE)
    if not result.get("completed", True):
        click.echo("stopped on the time guard; resume with the same command")
        return
    payload = {"targets": str(targets_file), "group": chosen.group,
               "seed": seed, "outer": outer, "inner": inner}
    out_path = Path(out) if out else data_dir() / f"{run_id('fit', payload)}.fit.json"
    opt.save_fit_artifact(out_path, result, opt.outer_space(),
                          {"outer": [outer_init, outer],
                           "inner": [inner_init, inner]}, seed)
    record_run("fit", payload, [str(out_path)])
    click.echo(f"wrote {out_path}")
    click.echo(f"best objective: {result['best_value']:.4f} bits")


@main.command(name="bench")
@click.option("--group", default="all", show_default=True)
@click.option("--scale", default=1.0, show_default=True, type=float,
              help="scale factor on the per-group episode counts")
@click.option("--episodes", default=None, type=int,
              help="override the episode count entirely")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_dir", default=None)
def bench_cmd(group, scale, episodes, seed, out_dir):
    """Benchmark fitted parameter sets against the bundled human targets."""
    targets = bench_mod.load_builtin_targets()
    by_name = {t.group: t for t in targets}
    if group == "all":
        names = list(by_name)
    elif group in by_name:
        names = [group]
    else:
        _invalid(f"unknown group {group!r}; available: {sorted(by_name)} or 'all'")
    out_base = Path(out_dir) if out_dir else data_dir()
    out_base.mkdir(parents=True, exist_ok=True)
    phrases = bench_mod.builtin_phrases()
    for name in names:
        t = by_name[name]
        try:
            up, pp, rp = bench_mod.load_fitted_params(name)
        except bench_mod.BenchError as exc:
            _invalid(str(exc))
        n = episodes or max(10, int(round(bench_mod.GROUP_EPISODES[name] * scale)))
        try:
            rep = bench_mod.run_bench(t, up, pp, rp, n, phrases, seed,
                                      scaled=(episodes is not None or scale != 1.0))
        except Exception as exc:  # noqa: BLE001
            click.echo(f"simulation failure: {exc}", err=True)
            sys.exit(EXIT_SIM_FAILURE)
        path = out_base / f"bench_{name}.json"
        path.write_text(json.dumps(rep.to_dict(), indent=2), encoding="utf-8")
        click.echo(rep.to_table())
        click.echo(f"wrote {path}\n")


@main.command()
@click.option("--group", default="finnish_typists", show_default=True)
@click.option("--sd", default=0.1, show_default=True, type=float)
@click.option("--runs", default=300, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default=None)
def sweep(group, sd, runs, seed, out):
    """Speed-accuracy sweep: Gaussian-perturbed parameters, one episode each."""
    try:
        up, pp, rp = bench_mod.load_fitted_params(group)
    except bench_mod.BenchError as exc:
        _invalid(str(exc))
    rows = bench_mod.speed_accuracy_sweep(up, pp, rp, sd, runs,
                                          bench_mod.builtin_phrases(), seed)
    payload = {"group": group, "sd": sd, "runs": runs, "seed": seed}
    out_path = Path(out) if out else data_dir() / f"{run_id('sweep', payload)}.csv"
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    record_run("sweep", payload, [str(out_path)])
    wpm = [r["wpm"] for r in rows if r["wpm"] is not None]
    corr = [r["corrected_errors"] for r in rows if r["wpm"] is not None]
    from scipy import stats as sstats
    rho = sstats.spearmanr(wpm, corr).statistic if len(wpm) > 2 else float("nan")
    click.echo(f"wrote {out_path} ({len(rows)} runs); "
               f"spearman(wpm, corrected errors) = {rho:.3f}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8077, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP API the explorer frontend consumes."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


@main.command()
def layouts():
    """List bundled keyboard layouts."""
    for name in builtin_layout_names():
        click.echo(name)


if __name__ == "__main__":
    main()
