"""Stochastic simulator of touchscreen transcription typing.

Given a phrase, a keyboard layout, and user-capability parameters, the
simulator rolls episodes of eye and finger movement that produce and
correct human-like typing errors (insertions, omissions, substitutions,
transpositions).  The package also ships the metrics for scoring typed
output, a benchmark against published human aggregates, and a two-loop
Bayesian-optimization fit of the parameters to target distributions.
"""

__version__ = "0.1.0"

from .env import (Action, AutocorrectDictionary, EnvConfig, Observation,
                  RewardParams, TimeConstants, apply_autocorrect, reset,
                  reward, step)
from .keyboard import (KeyboardLayout, Key, Point, builtin_layout_names,
                       load_builtin_layout, load_layout, load_layout_file)
from .mechanisms import (MechanismDraws, UserParams, endpoint_spread,
                         p_bounce, p_lapse, p_miss_slip, p_miss_typo, p_swap,
                         sample_touch)
from .metrics import (EditOpCounts, MetricsReport, Tap, aggregate, align,
                      classify_keystrokes, report)
from .optimizer import (Budget, ObjectiveSpec, ParamSpace, SimSetup,
                        TargetDist, bo_minimize, evaluate, fit_inner,
                        fit_joint, js_divergence)
from .supervisor import PolicyParams, WorkingMemory, decide, run_episode, update_belief
from .traces import Event, Trace, dumps_trace, read_jsonl, replay_final_text, write_jsonl

__all__ = [name for name in dir() if not name.startswith("_")]
