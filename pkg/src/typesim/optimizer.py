"""Two-loop parameter fitting against target metric distributions.

The objective is a weighted sum of per-metric Jensen-Shannon divergences
between histograms of simulated episodes and target distributions (given
either as raw samples or as mean/SD summaries expanded over the same
bins).  Both loops run Bayesian optimization with a Gaussian-process
surrogate and expected-improvement acquisition over a random candidate
set: the inner loop searches the eleven user-capability parameters, the
outer loop the policy strategy knobs plus the two reward parameters.

All randomness derives from (seed, iteration index), so an interrupted
run resumed from its checkpoint reproduces the uninterrupted result.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import optimize as sopt
from scipy import stats as sstats

from .env import AutocorrectDictionary, EnvConfig, RewardParams, TimeConstants
from .keyboard import KeyboardLayout
from .mechanisms import PARAM_FIELDS, UserParams
from .mechanisms import param_bounds as user_param_bounds
from .metrics import METRIC_NAMES, report
from .supervisor import PolicyParams, run_episode
from .traces import check_schema

FIT_SCHEMA = "typesim/fit/1"
CHECKPOINT_SCHEMA = "typesim/fit-checkpoint/1"


class OptimizerError(ValueError):
    pass


class NonFiniteObjective(OptimizerError):
    def __init__(self, point, value):
        super().__init__(f"objective returned {value!r} at point {point}")
        self.point = point
        self.value = value


# -- divergence --------------------------------------------------------------

def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence in bits between two discrete distributions.

    Both inputs must share a support size and each sum to 1 (within 1e-9).
    Always in [0, 1] bits, symmetric, zero iff the inputs are equal.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise OptimizerError("distributions must share one support")
    for name, v in (("p", p), ("q", q)):
        if (v < 0).any():
            raise OptimizerError(f"{name} has negative mass")
        if abs(v.sum() - 1.0) > 1e-9:
            raise OptimizerError(f"{name} does not sum to 1 (sum={v.sum()!r})")
    m = 0.5 * (p + q)
    def kl(a):
        mask = a > 0
        return float(np.sum(a[mask] * np.log2(a[mask] / m[mask])))
    return 0.5 * kl(p) + 0.5 * kl(q)


def _histogram(values, lo, hi, bins) -> np.ndarray:
    """Empirical probabilities over equal-width bins; outliers clip inward."""
    vals = np.clip(np.asarray(values, dtype=float), lo, hi)
    hist, _ = np.histogram(vals, bins=bins, range=(lo, hi))
    return hist.astype(float) / max(1, len(vals))


def _gaussian_bins(mean, sd, lo, hi, bins) -> np.ndarray:
    """A Gaussian discretized over the bin grid, tails folded into the edges."""
    edges = np.linspace(lo, hi, bins + 1)
    if sd <= 0:
        out = np.zeros(bins)
        idx = int(np.clip(np.searchsorted(edges, mean, side="right") - 1,
                          0, bins - 1))
        out[idx] = 1.0
        return out
    cdf = sstats.norm.cdf(edges, loc=mean, scale=sd)
    probs = np.diff(cdf)
    probs[0] += cdf[0]
    probs[-1] += 1.0 - cdf[-1]
    return probs / probs.sum()


def _smooth(p: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    p = p + eps
    return p / p.sum()


# -- objective spec ----------------------------------------------------------

@dataclass(frozen=True)
class TargetDist:
    """Target for one metric: raw samples, or a (mean, sd) summary."""

    mean: float | None = None
    sd: float | None = None
    values: tuple[float, ...] | None = None

    def bin_range(self) -> tuple[float, float]:
        if self.values is not None:
            lo, hi = min(self.values), max(self.values)
            pad = 0.05 * (hi - lo)
            if pad == 0:
                pad = max(1.0, abs(lo) * 0.1)
            return max(0.0, lo - pad), hi + pad
        sd = self.sd if self.sd else 0.0
        lo = self.mean - 4.0 * sd
        hi = self.mean + 4.0 * sd
        if hi <= lo:
            lo, hi = self.mean - 1.0, self.mean + 1.0
        return max(0.0, lo), hi

    def histogram(self, lo, hi, bins) -> np.ndarray:
        if self.values is not None:
            return _histogram(self.values, lo, hi, bins)
        return _gaussian_bins(self.mean, self.sd if self.sd else 0.0,
                              lo, hi, bins)


@dataclass
class ObjectiveSpec:
    targets: dict[str, TargetDist]
    weights: dict[str, float] = field(default_factory=dict)
    n_episodes: int = 60
    n_bins: int = 20

    def __post_init__(self):
        if self.n_episodes < 30:
            raise OptimizerError("n_episodes must be >= 30")
        if not self.targets:
            raise OptimizerError("at least one target metric is required")
        for name in self.targets:
            if name not in METRIC_NAMES:
                raise OptimizerError(f"unknown metric {name!r}")
        w = {name: self.weights.get(name, 1.0) for name in self.targets}
        if any(v < 0 for v in w.values()) or sum(w.values()) <= 0:
            raise OptimizerError("weights must be >= 0 with a positive sum")
        self.weights = w


@dataclass
class SimSetup:
    """Everything needed to roll evaluation episodes."""

    layout: KeyboardLayout
    phrases: list[str]
    level: int = 1
    time_constants: TimeConstants = field(default_factory=TimeConstants)
    dictionary: AutocorrectDictionary | None = None

    def config_for(self, episode_index: int) -> EnvConfig:
        phrase = self.phrases[episode_index % len(self.phrases)]
        return EnvConfig(layout=self.layout, phrase=phrase, level=self.level,
                         time_constants=self.time_constants,
                         autocorrect_dictionary=self.dictionary)


class SimulationFailure(RuntimeError):
    """An episode raised; carries the failing episode seed."""

    def __init__(self, episode_seed: int, cause: Exception):
        super().__init__(f"episode seed {episode_seed}: {cause}")
        self.episode_seed = episode_seed


def simulate_reports(up: UserParams, pp: PolicyParams, rp: RewardParams,
                     sim: SimSetup, n_episodes: int, seed: int):
    """Metrics reports for n deterministic episodes (round-robin phrases)."""
    rng = np.random.default_rng(seed)
    ep_seeds = rng.integers(0, 2 ** 62, size=n_episodes)
    reports = []
    for i in range(n_episodes):
        config = sim.config_for(i)
        try:
            trace = run_episode(config, up, pp, rp, int(ep_seeds[i]))
        except Exception as exc:
            raise SimulationFailure(int(ep_seeds[i]), exc) from exc
        reports.append(report(trace))
    return reports


def evaluate(up: UserParams, pp: PolicyParams, rp: RewardParams,
             spec: ObjectiveSpec, sim: SimSetup, seed: int) -> dict:
    """Weighted JSD objective between simulated and target distributions."""
    reports = simulate_reports(up, pp, rp, sim, spec.n_episodes, seed)
    dicts = [r.to_dict() for r in reports]
    total_weight = sum(spec.weights.values())
    objective = 0.0
    distributions = {}
    for name, target in spec.targets.items():
        lo, hi = target.bin_range()
        sim_values = [d[name] for d in dicts if d[name] is not None]
        sim_hist = _histogram(sim_values, lo, hi, spec.n_bins)
        tgt_hist = target.histogram(lo, hi, spec.n_bins)
        div = js_divergence(_smooth(sim_hist), _smooth(tgt_hist))
        objective += spec.weights[name] * div
        distributions[name] = {"range": [lo, hi],
                               "simulated": sim_hist.tolist(),
                               "target": tgt_hist.tolist(),
                               "jsd_bits": div}
    return {"objective": objective / total_weight,
            "distributions": distributions}


# -- parameter spaces ---------------------------------------------------------

@dataclass(frozen=True)
class ParamSpace:
    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise OptimizerError("dimension names must be unique")
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            if lo > hi:
                raise OptimizerError(f"dimension {name!r}: need lower <= upper")

    @property
    def dim(self) -> int:
        return len(self.names)

    def to_native(self, unit_vec) -> dict[str, float]:
        # a collapsed dimension (lower == upper) pins its value
        unit_vec = np.clip(np.asarray(unit_vec, dtype=float), 0.0, 1.0)
        return {name: lo + v * (hi - lo) for name, lo, hi, v in
                zip(self.names, self.lower, self.upper, unit_vec)}

    def to_dict(self):
        return {name: [lo, hi] for name, lo, hi in
                zip(self.names, self.lower, self.upper)}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSpace":
        names = tuple(d)
        return cls(names=names,
                   lower=tuple(float(d[n][0]) for n in names),
                   upper=tuple(float(d[n][1]) for n in names))


def user_space() -> ParamSpace:
    bounds = user_param_bounds()
    return ParamSpace(names=tuple(PARAM_FIELDS),
                      lower=tuple(bounds[n][0] for n in PARAM_FIELDS),
                      upper=tuple(bounds[n][1] for n in PARAM_FIELDS))


def _bounds_doc():
    from importlib import resources
    return json.loads(resources.files("typesim.data")
                      .joinpath("param_bounds.json").read_text(encoding="utf-8"))


POLICY_FIELDS = ("target_movement_time", "proofread_confidence_threshold",
                 "proofread_interval", "immediate_correction_bias",
                 "persistence")
REWARD_FIELDS = ("alpha", "w")


def outer_space() -> ParamSpace:
    doc = _bounds_doc()
    names = tuple(POLICY_FIELDS) + tuple(REWARD_FIELDS)
    lower = tuple(doc["policy_params"][n][0] for n in POLICY_FIELDS) + \
        tuple(doc["reward_params"][n][0] for n in REWARD_FIELDS)
    upper = tuple(doc["policy_params"][n][1] for n in POLICY_FIELDS) + \
        tuple(doc["reward_params"][n][1] for n in REWARD_FIELDS)
    return ParamSpace(names=names, lower=lower, upper=upper)


def user_params_from(native: dict[str, float]) -> UserParams:
    """UserParams from a (possibly partial) native dict; defaults fill gaps."""
    vals = UserParams().to_dict()
    vals.update({k: v for k, v in native.items() if k in PARAM_FIELDS})
    return UserParams(**vals)


def policy_reward_from(native: dict[str, float]) -> tuple[PolicyParams, RewardParams]:
    """Policy and reward params from a (possibly partial) native dict."""
    pv = PolicyParams().to_dict()
    pv.update({k: v for k, v in native.items() if k in POLICY_FIELDS})
    pv["proofread_interval"] = max(1, int(round(pv["proofread_interval"])))
    pv["persistence"] = bool(pv["persistence"] >= 0.5
                             if not isinstance(pv["persistence"], bool)
                             else pv["persistence"])
    rv = RewardParams().to_dict()
    rv.update({k: float(v) for k, v in native.items() if k in REWARD_FIELDS})
    return PolicyParams(**pv), RewardParams(**rv)


# -- Gaussian process surrogate -----------------------------------------------

class GaussianProcess:
    """SE-ARD kernel GP with hyperparameters refit by marginal likelihood."""

    def __init__(self, x: np.ndarray, y: np.ndarray, seed: int = 0):
        self.x = np.asarray(x, dtype=float)
        self.y_raw = np.asarray(y, dtype=float)
        self.y_mean = float(self.y_raw.mean())
        self.y_sd = float(self.y_raw.std()) or 1.0
        self.y = (self.y_raw - self.y_mean) / self.y_sd
        self.dim = self.x.shape[1]
        self.theta = self._fit(seed)
        self._prepare()

    @staticmethod
    def _kernel(x1, x2, ls, sf2):
        d = (x1[:, None, :] - x2[None, :, :]) / ls
        return sf2 * np.exp(-0.5 * np.sum(d * d, axis=2))

    def _nll(self, theta):
        ls = np.exp(theta[:self.dim])
        sf2 = math.exp(2.0 * theta[self.dim])
        sn2 = math.exp(2.0 * theta[self.dim + 1])
        k = self._kernel(self.x, self.x, ls, sf2)
        k[np.diag_indices_from(k)] += sn2 + 1e-10
        try:
            chol = sla.cholesky(k, lower=True)
        except sla.LinAlgError:
            return 1e10
        alpha = sla.cho_solve((chol, True), self.y)
        return float(0.5 * self.y @ alpha
                     + np.log(np.diag(chol)).sum()
                     + 0.5 * len(self.y) * math.log(2.0 * math.pi))

    def _fit(self, seed):
        lo = np.concatenate([np.full(self.dim, math.log(0.03)),
                             [math.log(0.05)], [math.log(1e-3)]])
        hi = np.concatenate([np.full(self.dim, math.log(10.0)),
                             [math.log(5.0)], [math.log(1.0)]])
        starts = [np.concatenate([np.full(self.dim, math.log(0.5)),
                                  [0.0], [math.log(0.1)]])]
        rng = np.random.default_rng(seed)
        starts.append(lo + rng.random(self.dim + 2) * (hi - lo))
        best = None
        for s in starts:
            res = sopt.minimize(self._nll, s, method="L-BFGS-B",
                                bounds=list(zip(lo, hi)))
            if best is None or res.fun < best.fun:
                best = res
        return best.x

    def _prepare(self):
        ls = np.exp(self.theta[:self.dim])
        sf2 = math.exp(2.0 * self.theta[self.dim])
        sn2 = math.exp(2.0 * self.theta[self.dim + 1])
        self.ls, self.sf2, self.sn2 = ls, sf2, sn2
        k = self._kernel(self.x, self.x, ls, sf2)
        k[np.diag_indices_from(k)] += sn2 + 1e-10
        self.chol = sla.cholesky(k, lower=True)
        self.alpha = sla.cho_solve((self.chol, True), self.y)

    def posterior(self, xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and SD in the raw (unstandardized) objective scale."""
        xq = np.asarray(xq, dtype=float)
        ks = self._kernel(xq, self.x, self.ls, self.sf2)
        mu = ks @ self.alpha
        v = sla.solve_triangular(self.chol, ks.T, lower=True)
        var = np.maximum(self.sf2 - np.sum(v * v, axis=0), 1e-12)
        return (mu * self.y_sd + self.y_mean, np.sqrt(var) * self.y_sd)


def expected_improvement(mu, sd, best_y, xi=1e-3):
    sd = np.maximum(np.asarray(sd, dtype=float), 1e-12)
    z = (best_y - mu - xi) / sd
    return sd * (z * sstats.norm.cdf(z) + sstats.norm.pdf(z))


# -- Bayesian optimization loop ------------------------------------------------

@dataclass
class Budget:
    n_init: int = 10
    n_iter: int = 30

    def __post_init__(self):
        if self.n_init < 2 or self.n_iter < 0:
            raise OptimizerError("budget needs n_init >= 2 and n_iter >= 0")


N_CANDIDATES = 1024


def _lhs(n: int, dim: int, rng) -> np.ndarray:
    """Latin hypercube sample in the unit cube."""
    out = np.empty((n, dim))
    for d in range(dim):
        out[:, d] = (rng.permutation(n) + rng.random(n)) / n
    return out


def _iter_seed(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def bo_minimize(f, space: ParamSpace, budget: Budget, seed: int,
                history: list | None = None, callback=None) -> dict:
    """Minimize f over the space; returns best point, value, and history.

    f receives a native-space dict.  history (as previously returned) lets
    an interrupted run resume: recorded evaluations are replayed instead
    of recomputed, and because every random draw depends only on (seed,
    iteration), the continuation is identical to an uninterrupted run.
    """
    history = list(history or [])
    evaluated_x = [np.asarray(h["point"], dtype=float) for h in history]
    evaluated_y = [float(h["value"]) for h in history]

    def run_point(index: int, unit: np.ndarray):
        unit = np.clip(unit, 0.0, 1.0)
        if index < len(history):
            return  # replayed from checkpoint
        value = f(space.to_native(unit))
        if value is None or not math.isfinite(value):
            raise NonFiniteObjective(space.to_native(unit), value)
        entry = {"point": [float(v) for v in unit], "value": float(value)}
        history.append(entry)
        evaluated_x.append(unit)
        evaluated_y.append(float(value))
        if callback is not None:
            callback(index, entry)

    init = _lhs(budget.n_init, space.dim, _iter_seed(seed, 0))
    for i in range(budget.n_init):
        run_point(i, init[i])

    for it in range(budget.n_iter):
        index = budget.n_init + it
        if index < len(history):
            continue
        rng = _iter_seed(seed, 1 + it)
        x = np.asarray(evaluated_x)
        y = np.asarray(evaluated_y)
        gp = GaussianProcess(x, y, seed=int(rng.integers(2 ** 31)))
        cands = rng.random((N_CANDIDATES, space.dim))
        mu, sd = gp.posterior(cands)
        ei = expected_improvement(mu, sd, y.min())
        run_point(index, cands[int(np.argmax(ei))])

    best_i = int(np.argmin(evaluated_y))
    return {
        "best_point": history[best_i]["point"],
        "best_native": space.to_native(history[best_i]["point"]),
        "best_value": evaluated_y[best_i],
        "history": history,
    }


# -- the two loops -------------------------------------------------------------

def fit_inner(pp: PolicyParams, rp: RewardParams, spec: ObjectiveSpec,
              sim: SimSetup, budget: Budget, seed: int,
              space: ParamSpace | None = None,
              history: list | None = None) -> dict:
    """Optimize user parameters with policy and reward frozen.

    Every candidate point is evaluated with the same episode seeds
    (common random numbers), which removes seed noise from objective
    differences and makes the Monte-Carlo landscape smooth enough for the
    surrogate to exploit.
    """
    space = space or user_space()
    eval_seed = int(np.random.SeedSequence([seed, 0xE7A1])
                    .generate_state(1)[0])

    def objective(native):
        up = user_params_from(native)
        return evaluate(up, pp, rp, spec, sim, eval_seed)["objective"]

    result = bo_minimize(objective, space, budget, seed, history=history)
    result["best_user_params"] = result["best_native"]
    return result


def _stable_hash(native: dict[str, float]) -> int:
    blob = json.dumps({k: round(v, 12) for k, v in sorted(native.items())})
    import hashlib
    return int(hashlib.sha256(blob.encode()).hexdigest()[:15], 16)


def fit_joint(spec: ObjectiveSpec, sim: SimSetup, outer_budget: Budget,
              inner_budget: Budget, seed: int,
              outer: ParamSpace | None = None,
              inner: ParamSpace | None = None,
              checkpoint_path=None, max_seconds: float | None = None) -> dict:
    """Joint two-loop fit: the outer objective is the inner-loop optimum.

    Writes a resumable checkpoint after every outer evaluation when a path
    is given; hitting max_seconds stops between evaluations with the
    checkpoint intact (resume by calling again with the same arguments).
    """
    outer = outer or outer_space()
    inner = inner or user_space()
    started = time.monotonic()
    history = []
    inner_results: list[dict] = []
    if checkpoint_path is not None:
        loaded = _load_checkpoint(checkpoint_path, seed)
        if loaded is not None:
            history, inner_results = loaded

    class OutOfTime(Exception):
        pass

    def objective(native):
        if max_seconds is not None and time.monotonic() - started > max_seconds:
            raise OutOfTime
        pp, rp = policy_reward_from(native)
        inner_seed = int(np.random.SeedSequence(
            [seed, _stable_hash(native)]).generate_state(1)[0]) % (2 ** 31)
        res = fit_inner(pp, rp, spec, sim, inner_budget, inner_seed, space=inner)
        inner_results.append({"user_params": res["best_user_params"],
                              "value": res["best_value"]})
        return res["best_value"]

    def checkpoint(index, entry):
        del index, entry
        if checkpoint_path is not None:
            _save_checkpoint(checkpoint_path, seed, history, inner_results)

    try:
        result = bo_minimize(objective, outer, outer_budget, seed,
                             history=history, callback=checkpoint)
    except OutOfTime:
        return {"completed": False, "history": history}

    best_i = int(np.argmin([h["value"] for h in result["history"]]))
    pp, rp = policy_reward_from(result["best_native"])
    return {
        "completed": True,
        "best_policy_params": pp.to_dict(),
        "best_reward_params": rp.to_dict(),
        "best_user_params": inner_results[best_i]["user_params"],
        "best_value": result["best_value"],
        "history": result["history"],
        "inner_results": inner_results,
    }


def _save_checkpoint(path, seed, history, inner_results):
    doc = {"schema": CHECKPOINT_SCHEMA, "seed": seed,
           "history": history, "inner_results": inner_results}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def _load_checkpoint(path, seed):
    import os
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    check_schema(doc.get("schema", ""), CHECKPOINT_SCHEMA)
    if doc.get("seed") != seed:
        raise OptimizerError("checkpoint seed differs from the requested seed")
    return doc["history"], doc["inner_results"]


def save_fit_artifact(path, result, space: ParamSpace, budgets, seed):
    doc = {
        "schema": FIT_SCHEMA,
        "space": space.to_dict(),
        "budgets": budgets,
        "seed": seed,
        "history": result["history"],
        "best": {k: result[k] for k in result if k.startswith("best")},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
    return doc
