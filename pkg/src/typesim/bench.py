"""Benchmark harness: leveled simulations compared to human aggregates.

The bundled targets file carries published per-group means and SDs for
three correction levels.  A bench run simulates a group with its fitted
parameters, aggregates the same metrics, flags which land within one
human SD, and compares the prevalence ordering of the four error types.

Where a group's source data lacks SDs for error rates, the comparator
uses an assumed SD of one percentage point, marked as an assumption in
both the targets file and the report.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import mechanisms
from .env import AutocorrectDictionary, RewardParams
from .keyboard import load_builtin_layout
from .mechanisms import UserParams
from .metrics import aggregate, report
from .optimizer import SimSetup, simulate_reports
from .supervisor import PolicyParams, run_episode

ERROR_RATE_METRICS = ("Insertion errors (%)", "Omission errors (%)",
                      "Substitution errors (%)", "Transposition errors (%)")

# Error-rate SD assumed when the source data publishes none (in % points).
ASSUMED_ERROR_SD = 1.0

# Episode counts matching the source studies, scalable via --scale.
GROUP_EPISODES = {
    "young_adults": 500,
    "parkinsons": 500,
    "elderly": 500,
    "finnish_typists": 30,
    "gboard_typists": 5140,
    "autocorrect_users": 148,
}

POLICY_DEVIATION_NOTE = (
    "supervisory policy is a parametric rule set searched by the outer "
    "optimization loop, not a trained controller")


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class TargetStat:
    mean: float
    sd: float | None
    assumed_sd: bool = False

    def effective_sd(self) -> float | None:
        if self.sd is not None:
            return self.sd
        if self.assumed_sd:
            return ASSUMED_ERROR_SD
        return None


@dataclass
class HumanTargets:
    group: str
    level: int
    metrics: dict[str, TargetStat]
    participants: int = 0
    manual_correction: bool = False
    gaze_data: bool = False

    def error_rate_ordering(self) -> list[str]:
        rates = [(m, self.metrics[m].mean) for m in ERROR_RATE_METRICS
                 if m in self.metrics]
        return [m for m, _ in sorted(rates, key=lambda kv: -kv[1])]


def load_targets(path_or_file) -> list[HumanTargets]:
    """Parse a targets CSV into one HumanTargets per (group, level)."""
    if hasattr(path_or_file, "read"):
        reader = csv.DictReader(path_or_file)
        rows = list(reader)
    else:
        with open(path_or_file, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    required = {"group", "level", "metric", "mean", "sd", "assumed_sd_flag"}
    if rows and not required.issubset(rows[0].keys()):
        raise BenchError(
            f"targets file missing columns: {sorted(required - set(rows[0]))}")
    groups: dict[tuple[str, int], HumanTargets] = {}
    for row in rows:
        key = (row["group"], int(row["level"]))
        if key not in groups:
            groups[key] = HumanTargets(
                group=row["group"], level=int(row["level"]), metrics={},
                participants=int(row.get("participants") or 0),
                manual_correction=(row.get("manual_correction") or "0") == "1",
                gaze_data=(row.get("gaze_data") or "0") == "1")
        sd_raw = (row["sd"] or "").strip()
        sd = float(sd_raw) if sd_raw else None
        if sd is not None and sd < 0:
            raise BenchError(f"negative SD for {row['group']}/{row['metric']}")
        groups[key].metrics[row["metric"]] = TargetStat(
            mean=float(row["mean"]), sd=sd,
            assumed_sd=(row["assumed_sd_flag"] or "0") == "1")
    if not groups:
        raise BenchError("targets file contains no rows")
    return list(groups.values())


def save_targets(targets: list[HumanTargets]) -> str:
    """Serialize targets back to CSV (load -> save -> load is identity)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["group", "level", "metric", "mean", "sd",
                     "assumed_sd_flag", "participants", "manual_correction",
                     "gaze_data"])
    for t in targets:
        for metric, stat in t.metrics.items():
            writer.writerow([
                t.group, t.level, metric,
                f"{stat.mean:g}" if stat.mean == stat.mean else "",
                "" if stat.sd is None else f"{stat.sd:g}",
                "1" if stat.assumed_sd else "0",
                t.participants,
                "1" if t.manual_correction else "0",
                "1" if t.gaze_data else "0",
            ])
    return buf.getvalue()


def load_builtin_targets() -> list[HumanTargets]:
    ref = resources.files("typesim.data").joinpath("human_targets.csv")
    return load_targets(io.StringIO(ref.read_text(encoding="utf-8")))


def builtin_phrases() -> list[str]:
    ref = resources.files("typesim.data").joinpath("phrases_en.txt")
    return [line for line in ref.read_text(encoding="utf-8").splitlines()
            if line.strip()]


def builtin_dictionary() -> AutocorrectDictionary:
    ref = resources.files("typesim.data").joinpath("words_en.txt")
    return AutocorrectDictionary(
        [w for w in ref.read_text(encoding="utf-8").split() if w])


def fitted_group_names() -> list[str]:
    root = resources.files("typesim.data").joinpath("fitted")
    return sorted(p.name[:-5] for p in root.iterdir()
                  if p.name.endswith(".json"))


def load_fitted_params(group: str) -> tuple[UserParams, PolicyParams, RewardParams]:
    """The bundled fitted parameter triple for a benchmark group."""
    ref = resources.files("typesim.data").joinpath(f"fitted/{group}.json")
    if not ref.is_file():
        raise BenchError(
            f"no fitted parameters for group {group!r}; "
            f"available: {fitted_group_names()}")
    doc = json.loads(ref.read_text(encoding="utf-8"))
    return (UserParams.from_dict(doc["user_params"]),
            PolicyParams.from_dict(doc["policy_params"]),
            RewardParams.from_dict(doc["reward_params"]))


@dataclass
class BenchReport:
    group: str
    level: int
    n_episodes: int
    scaled: bool
    seed: int
    runtime_seconds: float
    rows: list[dict]
    human_ordering: list[str]
    simulated_ordering: list[str]
    ordering_matches: bool
    params: dict
    deviation_notes: list[str] = field(default_factory=lambda: [POLICY_DEVIATION_NOTE])

    def to_dict(self) -> dict:
        return {
            "schema": "typesim/bench-report/1",
            "group": self.group,
            "level": self.level,
            "n_episodes": self.n_episodes,
            "scaled": self.scaled,
            "seed": self.seed,
            "runtime_seconds": round(self.runtime_seconds, 3),
            "metrics": self.rows,
            "human_error_ordering": self.human_ordering,
            "simulated_error_ordering": self.simulated_ordering,
            "ordering_matches": self.ordering_matches,
            "params": self.params,
            "deviation_notes": self.deviation_notes,
        }

    def to_table(self) -> str:
        lines = [f"group: {self.group} (level {self.level}, "
                 f"{self.n_episodes} episodes{' [scaled]' if self.scaled else ''})"]
        header = (f"{'metric':<26}{'human M':>10}{'human SD':>10}"
                  f"{'sim M':>10}{'sim SD':>10}  within 1 SD")
        lines.append(header)
        lines.append("-" * len(header))
        for row in self.rows:
            h_sd = row["human_sd"]
            flag = {True: "yes", False: "NO", None: "n/a"}[row["within_1sd"]]
            if row.get("assumed_sd"):
                flag += " (assumed SD)"
            lines.append(
                f"{row['metric']:<26}"
                f"{row['human_mean']:>10.2f}"
                f"{'-' if h_sd is None else format(h_sd, '.2f'):>10}"
                f"{row['sim_mean']:>10.2f}{row['sim_sd']:>10.2f}  {flag}")
        lines.append(f"human error ordering:     {self.human_ordering}")
        lines.append(f"simulated error ordering: {self.simulated_ordering}"
                     f" ({'match' if self.ordering_matches else 'MISMATCH'})")
        for note in self.deviation_notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def _short_names(metrics: list[str]) -> list[str]:
    return [m.replace(" errors (%)", "").lower() for m in metrics]


def run_bench(targets: HumanTargets, up: UserParams, pp: PolicyParams,
              rp: RewardParams, n_episodes: int, phrase_set: list[str],
              seed: int, layout_name: str = "qwerty_en",
              scaled: bool = False) -> BenchReport:
    """Simulate one group and compare against its human aggregates."""
    if n_episodes <= 0:
        raise BenchError("n_episodes must be positive")
    started = time.monotonic()
    layout = load_builtin_layout(layout_name)
    dictionary = builtin_dictionary() if targets.level == 2 else None
    sim = SimSetup(layout=layout, phrases=phrase_set, level=targets.level,
                   dictionary=dictionary)
    reports = simulate_reports(up, pp, rp, sim, n_episodes, seed)
    stats = aggregate(reports)
    rows = []
    for metric, target in targets.metrics.items():
        sim_mean, sim_sd = stats[metric]
        eff_sd = target.effective_sd()
        within = (abs(sim_mean - target.mean) <= eff_sd
                  if eff_sd is not None else None)
        rows.append({
            "metric": metric,
            "human_mean": target.mean,
            "human_sd": target.sd,
            "assumed_sd": target.assumed_sd,
            "sim_mean": sim_mean,
            "sim_sd": sim_sd,
            "within_1sd": within,
        })
    sim_rates = sorted(
        ((m, stats[m][0]) for m in ERROR_RATE_METRICS if m in targets.metrics),
        key=lambda kv: -kv[1])
    simulated_ordering = _short_names([m for m, _ in sim_rates])
    human_ordering = _short_names(targets.error_rate_ordering())
    return BenchReport(
        group=targets.group,
        level=targets.level,
        n_episodes=n_episodes,
        scaled=scaled,
        seed=seed,
        runtime_seconds=time.monotonic() - started,
        rows=rows,
        human_ordering=human_ordering,
        simulated_ordering=simulated_ordering,
        ordering_matches=simulated_ordering == human_ordering,
        params={"user_params": up.to_dict(), "policy_params": pp.to_dict(),
                "reward_params": rp.to_dict()},
    )


def speed_accuracy_sweep(up: UserParams, pp: PolicyParams, rp: RewardParams,
                         sd: float, n_runs: int, phrase_set: list[str],
                         seed: int, level: int = 1,
                         layout_name: str = "qwerty_en") -> list[dict]:
    """Gaussian-perturbed single-episode runs for the speed-accuracy scatter.

    Each run redraws every normalized user parameter from N(base, sd^2)
    truncated into [0, 1], rolls one episode, and emits one scatter row.
    """
    layout = load_builtin_layout(layout_name)
    dictionary = builtin_dictionary() if level == 2 else None
    base = mechanisms.normalize(up)
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_runs):
        perturbed = np.clip(base + rng.normal(0.0, sd, size=base.shape),
                            0.0, 1.0) if sd > 0 else base.copy()
        up_i = mechanisms.denormalize(perturbed)
        phrase = phrase_set[i % len(phrase_set)]
        from .env import EnvConfig
        config = EnvConfig(layout=layout, phrase=phrase, level=level,
                           autocorrect_dictionary=dictionary)
        trace = run_episode(config, up_i, pp, rp, int(rng.integers(2 ** 62)))
        rep = report(trace)
        rows.append({
            "run": i,
            "wpm": rep.wpm,
            "immediate_corrections": rep.immediate_corrections,
            "delayed_corrections": rep.delayed_corrections,
            "corrected_errors": rep.immediate_corrections + rep.delayed_corrections,
            "uncorrected_error_rate": rep.uncorrected_error_rate,
        })
    return rows
