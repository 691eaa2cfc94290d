"""Error-generating probability models and motor noise.

Every simulated typing error traces back to one of the closed forms here:

* motor endpoint spread from a speed-accuracy tradeoff (fast movements
  land less precisely), which produces wrong-key and no-key touches;
* speed-driven double taps and motor-command order swaps, 1 - exp(-k*v);
* memory lapses that drop a motor command, 1 - exp(-k*t) in the time
  since the last proofread;
* vision misses: overlooking a typo while proofreading (p0 * exp(-T),
  longer reading is more reliable) and overlooking a finger slip during
  guidance (constant).

All functions are pure given an explicit random generator; UserParams is
immutable and shareable across concurrent episodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from importlib import resources

import numpy as np

from .keyboard import Point


class ParamError(ValueError):
    """A parameter value violates its declared range."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InfeasibleSpeedError(ValueError):
    """Movement time at or below the minimum offset: spread is undefined."""


@dataclass(frozen=True)
class UserParams:
    """The per-user capability knobs that differentiate simulated groups.

    f_k, k_alpha, x0, y0 parameterize the motor speed-accuracy curve
    (smaller f_k = more dexterous finger).  k_bounce and k_swap scale the
    speed-driven double-tap and order-swap probabilities.  k_forget scales
    memory lapses, memory_decay erodes confidence in the typed-text belief,
    p0_proof and p_obs_finger are the two vision miss probabilities, and
    vision_acuity scales both of them down for sharper-eyed users.
    """

    f_k: float = 0.06          # motor capability constant, > 0
    k_alpha: float = 0.5       # resource-allocation exponent, in (0, 1)
    x0: float = 0.05           # minimal movement time offset, seconds
    y0: float = 0.002          # minimal endpoint-spread floor, normalized
    k_bounce: float = 0.005    # double-tap rate per unit finger speed
    k_swap: float = 0.005      # order-swap rate per unit finger speed
    k_forget: float = 0.002    # lapse decay rate per second
    p0_proof: float = 0.3      # base probability of missing a typo
    p_obs_finger: float = 0.3  # probability of missing a finger slip
    memory_decay: float = 0.08  # belief confidence decay rate per second
    vision_acuity: float = 1.0  # in (0, 1]; scales both miss probabilities

    def __post_init__(self):
        if not (self.f_k > 0 and math.isfinite(self.f_k)):
            raise ParamError("f_k", "must be finite and > 0")
        if not (0.0 < self.k_alpha < 1.0):
            raise ParamError("k_alpha", "must lie strictly inside (0, 1)")
        if self.x0 < 0:
            raise ParamError("x0", "must be >= 0")
        if self.y0 < 0:
            raise ParamError("y0", "must be >= 0")
        for name in ("k_bounce", "k_swap", "k_forget", "memory_decay"):
            if getattr(self, name) < 0:
                raise ParamError(name, "must be >= 0")
        for name in ("p0_proof", "p_obs_finger"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParamError(name, "must lie in [0, 1]")
        if not (0.0 < self.vision_acuity <= 1.0):
            raise ParamError("vision_acuity", "must lie in (0, 1]")

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "UserParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ParamError(sorted(unknown)[0], "unknown parameter")
        return cls(**{k: float(v) for k, v in d.items()})


PARAM_FIELDS = tuple(f.name for f in fields(UserParams))


def _load_bounds() -> dict[str, tuple[float, float]]:
    raw = json.loads(resources.files("typesim.data")
                     .joinpath("param_bounds.json").read_text(encoding="utf-8"))
    return {k: (float(lo), float(hi)) for k, (lo, hi) in raw["user_params"].items()}


_BOUNDS_CACHE: dict[str, tuple[float, float]] | None = None


def param_bounds() -> dict[str, tuple[float, float]]:
    """Per-field [min, max] used to normalize parameters into [0, 1]."""
    global _BOUNDS_CACHE
    if _BOUNDS_CACHE is None:
        _BOUNDS_CACHE = _load_bounds()
    return _BOUNDS_CACHE


def normalize(up: UserParams) -> np.ndarray:
    """Map a UserParams to the unit cube using the declared bounds."""
    bounds = param_bounds()
    out = np.empty(len(PARAM_FIELDS))
    for i, name in enumerate(PARAM_FIELDS):
        lo, hi = bounds[name]
        out[i] = (getattr(up, name) - lo) / (hi - lo)
    return out


def denormalize(vec: np.ndarray) -> UserParams:
    """Inverse of normalize; values are clipped into the declared bounds."""
    bounds = param_bounds()
    vals = {}
    for i, name in enumerate(PARAM_FIELDS):
        lo, hi = bounds[name]
        vals[name] = lo + float(np.clip(vec[i], 0.0, 1.0)) * (hi - lo)
    return UserParams(**vals)


# -- motor noise ----------------------------------------------------------

def endpoint_spread(p: UserParams, movement_time: float) -> float:
    """Touch endpoint standard deviation for a movement of the given time.

    Solves (y - y0)^(1-ka) * (x - x0)^ka = f_k for y.  Slower movements
    land tighter; the result is strictly decreasing in movement_time.
    """
    dx = movement_time - p.x0
    if dx <= 0:
        raise InfeasibleSpeedError(
            f"movement_time {movement_time} <= x0 {p.x0}: infeasible speed")
    ka = p.k_alpha
    return p.y0 + math.exp((math.log(p.f_k) - ka * math.log(dx)) / (1.0 - ka))


def sample_touch(p: UserParams, target: Point, movement_time: float,
                 rng: np.random.Generator) -> Point:
    """Target plus isotropic Gaussian endpoint noise, clamped on-screen."""
    sd = endpoint_spread(p, movement_time)
    dx, dy = rng.normal(0.0, sd, size=2)
    return Point(min(1.0, max(0.0, target.x + dx)),
                 min(1.0, max(0.0, target.y + dy)))


# -- per-keystroke error probabilities ------------------------------------

def p_bounce(p: UserParams, speed: float) -> float:
    """Probability of an unintentional double tap at the given speed."""
    if speed < 0:
        raise ValueError("speed must be >= 0")
    return 1.0 - math.exp(-p.k_bounce * speed)


def p_swap(p: UserParams, speed: float) -> float:
    """Probability of swapping this motor command with the next one."""
    if speed < 0:
        raise ValueError("speed must be >= 0")
    return 1.0 - math.exp(-p.k_swap * speed)


def p_lapse(p: UserParams, elapsed_since_proofread: float) -> float:
    """Probability of forgetting the next motor command."""
    if elapsed_since_proofread < 0:
        raise ValueError("elapsed time must be >= 0")
    return 1.0 - math.exp(-p.k_forget * elapsed_since_proofread)


def p_miss_typo(p: UserParams, proofread_duration: float) -> float:
    """Probability of overlooking a typo during a proofread of length T."""
    if proofread_duration < 0:
        raise ValueError("proofread duration must be >= 0")
    return p.vision_acuity * p.p0_proof * math.exp(-proofread_duration)


def p_miss_slip(p: UserParams) -> float:
    """Probability of not noticing a finger slip during visual guidance."""
    return p.vision_acuity * p.p_obs_finger


# -- combined draw ---------------------------------------------------------

@dataclass(frozen=True)
class MechanismDraws:
    """Outcome of all stochastic checks for one keystroke."""

    lapse_occurred: bool
    swap_occurred: bool
    bounce_occurred: bool
    touch_point: Point


def draw_keystroke(p: UserParams, target: Point, movement_time: float,
                   speed: float, elapsed_since_proofread: float,
                   rng: np.random.Generator) -> MechanismDraws:
    """Draw every mechanism outcome for one keystroke, in a fixed order.

    The draw order (lapse, swap, touch, bounce) is part of the determinism
    contract: equal seeds give element-wise identical sequences.
    """
    lapse = rng.random() < p_lapse(p, elapsed_since_proofread)
    swap = rng.random() < p_swap(p, speed)
    touch = sample_touch(p, target, movement_time, rng)
    bounce = rng.random() < p_bounce(p, speed)
    return MechanismDraws(lapse_occurred=lapse, swap_occurred=swap,
                          bounce_occurred=bounce, touch_point=touch)
