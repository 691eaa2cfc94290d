"""Episode traces: the timestamped event record every other module consumes.

Traces serialize to one JSON object per line (JSONL).  The serializer is
the single source of truth for trace bytes so the CLI and the HTTP service
emit identical output for identical inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

TRACE_SCHEMA = "typesim/trace/1"

EVENT_KINDS = ("touch", "keypress", "bounce", "swap", "lapse", "fixation",
               "proofread", "backspace", "autocorrect", "submit")


class SchemaError(ValueError):
    """Unknown or incompatible schema version."""


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    char: str | None = None          # keypress: committed char; lapse: forgotten char
    position: tuple[float, float] | None = None
    target: str | None = None        # fixation: key label or "text-field"
    duration: float | None = None    # proofread reading time
    missed: bool | None = None       # proofread: typo overlooked
    first: str | None = None         # swap: originally intended first key
    second: str | None = None        # swap: the key that jumped the queue
    before: str | None = None        # autocorrect: replaced word
    after: str | None = None         # autocorrect: replacement word

    def to_dict(self) -> dict:
        d: dict = {"t": round(self.time, 9), "kind": self.kind}
        for key, value in (("char", self.char), ("target", self.target),
                           ("duration", self.duration), ("missed", self.missed),
                           ("first", self.first), ("second", self.second),
                           ("before", self.before), ("after", self.after)):
            if value is not None:
                d[key] = value
        if self.position is not None:
            d["pos"] = [round(self.position[0], 9), round(self.position[1], 9)]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        pos = d.get("pos")
        return cls(time=d["t"], kind=d["kind"], char=d.get("char"),
                   position=tuple(pos) if pos is not None else None,
                   target=d.get("target"), duration=d.get("duration"),
                   missed=d.get("missed"), first=d.get("first"),
                   second=d.get("second"), before=d.get("before"),
                   after=d.get("after"))


@dataclass
class Trace:
    phrase: str
    level: int
    layout_name: str
    seed: int
    user_params: dict
    policy_params: dict
    reward_params: dict
    events: list[Event] = field(default_factory=list)
    final_text: str = ""
    total_time: float = 0.0
    reward: float = 0.0
    truncated: bool = False
    time_constants: dict = field(default_factory=dict)
    max_steps: int = 0

    def to_dict(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "phrase": self.phrase,
            "level": self.level,
            "layout": self.layout_name,
            "time_constants": self.time_constants,
            "max_steps": self.max_steps,
            "seed": self.seed,
            "user_params": self.user_params,
            "policy_params": self.policy_params,
            "reward_params": self.reward_params,
            "events": [e.to_dict() for e in self.events],
            "final_text": self.final_text,
            "total_time": round(self.total_time, 9),
            "reward": round(self.reward, 9),
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trace":
        check_schema(d.get("schema", ""), TRACE_SCHEMA)
        return cls(phrase=d["phrase"], level=d["level"], layout_name=d["layout"],
                   seed=d["seed"], user_params=d["user_params"],
                   policy_params=d["policy_params"],
                   reward_params=d["reward_params"],
                   events=[Event.from_dict(e) for e in d["events"]],
                   final_text=d["final_text"], total_time=d["total_time"],
                   reward=d["reward"], truncated=d.get("truncated", False),
                   time_constants=d.get("time_constants", {}),
                   max_steps=d.get("max_steps", 0))


def check_schema(found: str, expected: str) -> None:
    """Reject documents whose major schema version differs."""
    exp_base = expected.rsplit("/", 1)[0]
    if not found.startswith(exp_base + "/"):
        raise SchemaError(f"expected schema {expected!r}, found {found!r}")
    major = found.rsplit("/", 1)[1]
    if major != expected.rsplit("/", 1)[1]:
        raise SchemaError(f"unsupported major version in {found!r}")


def dumps_trace(trace: Trace) -> str:
    """Canonical single-line JSON for a trace (no trailing newline)."""
    return json.dumps(trace.to_dict(), separators=(",", ":"),
                      ensure_ascii=False, sort_keys=False)


def write_jsonl(traces: list[Trace], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tr in traces:
            fh.write(dumps_trace(tr) + "\n")


def read_jsonl(path) -> list[Trace]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Trace.from_dict(json.loads(line)))
    return out


def replay_final_text(trace: Trace) -> str:
    """Fold keypress/backspace/autocorrect events over an empty buffer.

    Byte-equality with trace.final_text is the replay-soundness invariant.
    """
    buf: list[str] = []
    for ev in trace.events:
        if ev.kind == "keypress":
            buf.append(ev.char)
        elif ev.kind == "backspace":
            if buf:
                buf.pop()
        elif ev.kind == "autocorrect":
            tail = len(ev.before) + 1
            assert "".join(buf[-tail:-1]) == ev.before
            buf[-tail:-1] = list(ev.after)
    return "".join(buf)
