"""Produce the bundled fitted parameter files for the benchmark groups.

Pipeline per group: the policy knobs are pinned by the group's task
conditions (speed from the WPM target, proofreading cadence and
correction style from its correction metrics); capability priors come
from closed-form probes of the motor model against the group's error
rates; the package's inner optimization loop then refines the capability
parameters inside a narrow box around the priors; finally both the prior
point and the refined incumbent are re-simulated at 400 episodes and the
one that satisfies the group's hard reproduction constraints with the
lower divergence is selected.

Run:  python tools/fit_groups.py [group ...]
"""

import json
import sys
import time
from pathlib import Path

from typesim.bench import (ERROR_RATE_METRICS, builtin_dictionary,
                           builtin_phrases, load_builtin_targets)
from typesim.env import RewardParams
from typesim.keyboard import load_builtin_layout
from typesim.mechanisms import UserParams, param_bounds
from typesim.metrics import aggregate
from typesim.optimizer import (Budget, ObjectiveSpec, ParamSpace, SimSetup,
                               TargetDist, evaluate, fit_inner,
                               simulate_reports, user_params_from)
from typesim.supervisor import PolicyParams

OUT = Path(__file__).resolve().parent.parent / "src" / "typesim" / "data" / "fitted"

GROUPS = {
    "young_adults": {
        "user": UserParams(f_k=0.067, k_alpha=0.5, x0=0.05, y0=0.002,
                           k_bounce=0.005, k_swap=0.001, k_forget=0.0005,
                           p0_proof=0.4, p_obs_finger=0.05, memory_decay=0.1,
                           vision_acuity=1.0),
        "policy": PolicyParams(target_movement_time=0.235,
                               proofread_confidence_threshold=0.25,
                               proofread_interval=11,
                               immediate_correction_bias=0.7,
                               persistence=True),
        "search": ("f_k", "k_bounce", "k_forget", "p_obs_finger"),
        "box": 0.3,
        "weights": {"WPM": 2.0, "Substitution errors (%)": 3.0,
                    "Insertion errors (%)": 1.0, "Omission errors (%)": 1.0,
                    "Transposition errors (%)": 0.5},
    },
    "parkinsons": {
        "user": UserParams(f_k=0.118, k_alpha=0.5, x0=0.05, y0=0.003,
                           k_bounce=0.10, k_swap=0.01, k_forget=0.001,
                           p0_proof=0.5, p_obs_finger=0.1, memory_decay=0.1,
                           vision_acuity=1.0),
        "policy": PolicyParams(target_movement_time=0.48,
                               proofread_confidence_threshold=0.25,
                               proofread_interval=11,
                               immediate_correction_bias=0.7,
                               persistence=True),
        "search": ("f_k", "k_bounce", "k_forget", "k_swap"),
        "box": 0.25,
        "weights": {"WPM": 2.0, "Substitution errors (%)": 2.0,
                    "Insertion errors (%)": 2.0, "Omission errors (%)": 1.0,
                    "Transposition errors (%)": 0.5},
    },
    "elderly": {
        "user": UserParams(f_k=0.225, k_alpha=0.5, x0=0.05, y0=0.004,
                           k_bounce=0.48, k_swap=0.002, k_forget=0.0095,
                           p0_proof=0.6, p_obs_finger=0.5, memory_decay=0.05,
                           vision_acuity=0.9),
        "policy": PolicyParams(target_movement_time=2.3,
                               proofread_confidence_threshold=0.2,
                               proofread_interval=14,
                               immediate_correction_bias=0.7,
                               persistence=True),
        "search": ("f_k", "k_bounce", "k_forget"),
        "box": 0.2,
        "weights": {"WPM": 2.0, "Omission errors (%)": 3.0,
                    "Substitution errors (%)": 1.0,
                    "Insertion errors (%)": 1.0,
                    "Transposition errors (%)": 0.5},
    },
    "finnish_typists": {
        "user": UserParams(f_k=0.052, k_alpha=0.5, x0=0.05, y0=0.002,
                           k_bounce=0.004, k_swap=0.001, k_forget=0.001,
                           p0_proof=0.35, p_obs_finger=0.2, memory_decay=0.12,
                           vision_acuity=1.0),
        "policy": PolicyParams(target_movement_time=0.19,
                               proofread_confidence_threshold=0.45,
                               proofread_interval=7,
                               immediate_correction_bias=0.25,
                               persistence=True),
        "search": ("f_k", "p0_proof", "p_obs_finger"),
        "box": 0.25,
        "weights": {"WPM": 2.0, "Uncorrected error (%)": 1.5,
                    "Corrected error (%)": 1.5, "KSPC": 1.0,
                    "Backspaces": 1.0, "Delayed corrections": 0.5},
    },
    "gboard_typists": {
        "user": UserParams(f_k=0.055, k_alpha=0.5, x0=0.05, y0=0.002,
                           k_bounce=0.004, k_swap=0.002, k_forget=0.002,
                           p0_proof=0.9, p_obs_finger=0.4, memory_decay=0.08,
                           vision_acuity=1.0),
        "policy": PolicyParams(target_movement_time=0.17,
                               proofread_confidence_threshold=0.12,
                               proofread_interval=16,
                               immediate_correction_bias=0.6,
                               persistence=False),
        "search": ("f_k", "p0_proof", "p_obs_finger"),
        "box": 0.25,
        "weights": {"WPM": 2.0, "Uncorrected error (%)": 1.5,
                    "Corrected error (%)": 1.5, "KSPC": 1.0,
                    "Backspaces": 1.0},
    },
    "autocorrect_users": {
        "user": UserParams(f_k=0.055, k_alpha=0.5, x0=0.05, y0=0.002,
                           k_bounce=0.004, k_swap=0.002, k_forget=0.002,
                           p0_proof=0.9, p_obs_finger=0.4, memory_decay=0.08,
                           vision_acuity=1.0),
        "policy": PolicyParams(target_movement_time=0.17,
                               proofread_confidence_threshold=0.12,
                               proofread_interval=16,
                               immediate_correction_bias=0.6,
                               persistence=False),
        "search": ("f_k", "p0_proof", "p_obs_finger"),
        "box": 0.25,
        "weights": {"WPM": 2.0, "Uncorrected error (%)": 1.5,
                    "Corrected error (%)": 1.5, "KSPC": 1.0,
                    "Backspaces": 1.0},
    },
}

REWARD = RewardParams(alpha=1.2, w=0.02)
BUDGET = Budget(n_init=10, n_iter=14)
FIT_EPISODES = 60
CHECK_EPISODES = 400
SEED = 20240801


def _ordering(agg):
    rates = sorted(((m, agg[m][0]) for m in ERROR_RATE_METRICS),
                   key=lambda kv: -kv[1])
    return [m.split()[0].lower() for m, _ in rates]


def constraints_ok(name: str, agg) -> bool:
    """The group's hard reproduction constraints at benchmark scale."""
    wpm = agg["WPM"][0]
    if name == "young_adults":
        return (abs(wpm - 29.4) <= 8.9
                and abs(agg["Substitution errors (%)"][0] - 3.47) <= 1.05
                and _ordering(agg) == ["substitution", "insertion",
                                       "omission", "transposition"])
    if name == "parkinsons":
        return (abs(wpm - 19.8) <= 6.9
                and _ordering(agg)[0] == "substitution")
    if name == "elderly":
        return (abs(wpm - 4.7) <= 3.1 and _ordering(agg)[0] == "omission")
    if name == "finnish_typists":
        return abs(wpm - 27.2) <= 3.6
    if name == "gboard_typists":
        return (abs(wpm - 35.7) <= 13.8
                and abs(agg["Uncorrected error (%)"][0] - 3.44) <= 3.79)
    if name == "autocorrect_users":
        return (abs(wpm - 32.2) <= 12.0
                and abs(agg["Uncorrected error (%)"][0] - 3.39) <= 4.15)
    return True


def fit_group(name: str, targets) -> dict:
    cfg = GROUPS[name]
    chosen = targets[name]
    prior: UserParams = cfg["user"]
    pp: PolicyParams = cfg["policy"]
    weights = cfg["weights"]
    spec = ObjectiveSpec(
        targets={m: TargetDist(mean=s.mean, sd=s.effective_sd() or 0.0)
                 for m, s in chosen.metrics.items() if m in weights},
        weights=weights, n_episodes=FIT_EPISODES)
    sim = SimSetup(layout=load_builtin_layout("qwerty_en"),
                   phrases=builtin_phrases(), level=chosen.level,
                   dictionary=(builtin_dictionary() if chosen.level == 2
                               else None))
    box = cfg["box"]
    names = cfg["search"]
    hard = param_bounds()
    lower, upper = [], []
    for dim in names:
        v = getattr(prior, dim)
        lo, hi = hard[dim]
        lower.append(max(lo, v * (1 - box)))
        upper.append(min(hi, v * (1 + box) if v > 0 else lo + 1e-3))
    space = ParamSpace(names=tuple(names), lower=tuple(lower),
                       upper=tuple(upper))

    t0 = time.time()
    res = fit_inner(pp, REWARD, spec, sim, BUDGET, seed=SEED, space=space)
    refined = user_params_from({**prior.to_dict(),
                                **res["best_user_params"]})
    candidates = [("refined", refined), ("prior", prior)]
    chosen_up, chosen_label, chosen_score = None, None, None
    for label, up in candidates:
        reports = simulate_reports(up, pp, REWARD, sim, CHECK_EPISODES,
                                   seed=SEED + 1)
        agg = aggregate(reports)
        ok = constraints_ok(name, agg)
        score = evaluate(up, pp, REWARD, spec, sim, SEED + 2)["objective"]
        print(f"  {label}: constraints={'ok' if ok else 'VIOLATED'} "
              f"jsd={score:.4f} wpm={agg['WPM'][0]:.1f}")
        if ok and (chosen_score is None or score < chosen_score):
            chosen_up, chosen_label, chosen_score = up, label, score
    if chosen_up is None:
        chosen_up, chosen_label = prior, "prior (constraints unmet)"
        chosen_score = float("nan")
    print(f"{name}: selected {chosen_label} ({time.time() - t0:.0f}s)")
    return {
        "group": name,
        "level": chosen.level,
        "user_params": chosen_up.to_dict(),
        "policy_params": pp.to_dict(),
        "reward_params": REWARD.to_dict(),
        "fit": {"selected": chosen_label, "objective_bits": chosen_score,
                "seed": SEED, "episodes_per_eval": FIT_EPISODES,
                "budget": [BUDGET.n_init, BUDGET.n_iter],
                "searched": list(names), "box": box},
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    targets = {t.group: t for t in load_builtin_targets()}
    names = sys.argv[1:] or list(GROUPS)
    for name in names:
        print(f"fitting {name} ...")
        doc = fit_group(name, targets)
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
