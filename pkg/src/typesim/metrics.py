"""Character-level error classification and the ten-metric typing report.

The alignment distinguishes four edit operations: insertions (an extra
character was typed), omissions (an expected character is missing),
substitutions (a different character was typed), and transpositions (two
adjacent characters swapped, counted as a single operation).

Among cost-equal alignments the canonical one is chosen by a documented
preference: substitutions beat insertion+omission pairs, then
transpositions beat remaining insertion+omission pairs, then the alignment
with the leftmost lowest-ranked edits wins.  This makes the reported
counts deterministic and lets an exhaustive test oracle pin them exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class EditOpCounts:
    insertions: int = 0
    omissions: int = 0
    substitutions: int = 0
    transpositions: int = 0

    @property
    def distance(self) -> int:
        return (self.insertions + self.omissions
                + self.substitutions + self.transpositions)

    def to_dict(self) -> dict[str, int]:
        return {"insertions": self.insertions, "omissions": self.omissions,
                "substitutions": self.substitutions,
                "transpositions": self.transpositions,
                "distance": self.distance}


# Ranks order op types inside the canonical preference ("leftmost" compares
# the presented index first, then this rank, then the transcribed index).
OP_RANK = {"sub": 0, "tra": 1, "omi": 2, "ins": 3}


def script_sort_key(cand):
    """Preference key for (cost, -subs, -tras, ops) suffix candidates."""
    cost, negsub, negtra, ops = cand
    return (cost, negsub, negtra,
            tuple((i, OP_RANK[op], j) for op, i, j in ops))


def _align_script(presented: str, transcribed: str) -> tuple:
    """Canonical minimal edit script from presented to transcribed.

    Returns a tuple of (op, i, j) entries in left-to-right order, where i
    indexes presented and j indexes transcribed at the point the edit
    applies.  Matches are not part of the script.
    """
    n, m = len(presented), len(transcribed)
    table: dict[tuple[int, int], tuple] = {}
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i == n and j == m:
                table[i, j] = (0, 0, 0, ())
                continue
            cands = []
            if i < n and j < m and presented[i] == transcribed[j]:
                c, s, t, ops = table[i + 1, j + 1]
                cands.append((c, s, t, ops))
            if i < n and j < m and presented[i] != transcribed[j]:
                c, s, t, ops = table[i + 1, j + 1]
                cands.append((c + 1, s - 1, t, (("sub", i, j),) + ops))
            if (i + 1 < n and j + 1 < m and presented[i] == transcribed[j + 1]
                    and presented[i + 1] == transcribed[j]):
                c, s, t, ops = table[i + 2, j + 2]
                cands.append((c + 1, s, t - 1, (("tra", i, j),) + ops))
            if i < n:
                c, s, t, ops = table[i + 1, j]
                cands.append((c + 1, s, t, (("omi", i, j),) + ops))
            if j < m:
                c, s, t, ops = table[i, j + 1]
                cands.append((c + 1, s, t, (("ins", i, j),) + ops))
            table[i, j] = min(cands, key=script_sort_key)
    return table[0, 0][3]


def align(presented: str, transcribed: str) -> EditOpCounts:
    """Edit-operation counts of the canonical optimal alignment."""
    counts = {"ins": 0, "omi": 0, "sub": 0, "tra": 0}
    for op, _, _ in _align_script(presented, transcribed):
        counts[op] += 1
    return EditOpCounts(insertions=counts["ins"], omissions=counts["omi"],
                        substitutions=counts["sub"],
                        transpositions=counts["tra"])


def _transcribed_error_positions(presented: str, transcribed: str) -> set[int]:
    """Transcribed indices the canonical alignment marks as erroneous.

    Substituted and inserted characters are errors.  For a transposition
    the first typed character of the swapped pair counts as the single
    erroneous keystroke, mirroring the one-operation cost.
    """
    errors: set[int] = set()
    for op, _, j in _align_script(presented, transcribed):
        if op in ("sub", "ins", "tra"):
            errors.add(j)
    return errors


# -- keystroke logs ---------------------------------------------------------

BACKSPACE = "\b"


@dataclass(frozen=True)
class Tap:
    char: str  # a committed character, or BACKSPACE
    time: float


@dataclass(frozen=True)
class KeystrokeClasses:
    correct: int
    incorrect_not_fixed: int
    incorrect_fixed: int
    fixes: int

    @property
    def total(self) -> int:
        return (self.correct + self.incorrect_not_fixed
                + self.incorrect_fixed + self.fixes)


def taps_from_trace(trace) -> list[Tap]:
    """Keypress and backspace events of a trace as a keystroke log."""
    taps = []
    for ev in trace.events:
        if ev.kind == "keypress":
            taps.append(Tap(ev.char, ev.time))
        elif ev.kind == "backspace":
            taps.append(Tap(BACKSPACE, ev.time))
    return taps


def _rebuild_word_slots(word_slots, before, after):
    """Map a word's buffer slots onto its autocorrected replacement.

    Characters the alignment keeps retain their originating tap; taps the
    correction removed or overwrote are returned as fixed.  For a
    transposition, the out-of-place first character's tap counts as fixed
    and its surviving slot becomes machine-produced.
    """
    script = list(_align_script(before, after))
    new_slots: list[tuple[str, int | None]] = []
    fixed: list[int] = []

    def fix(tap_idx):
        if tap_idx is not None:
            fixed.append(tap_idx)

    i = j = k = 0
    while i < len(before) or j < len(after):
        if k < len(script) and script[k][1] == i and script[k][2] == j:
            op = script[k][0]
            k += 1
            if op == "sub":
                fix(word_slots[i][1])
                new_slots.append((after[j], None))
                i += 1
                j += 1
            elif op == "omi":
                fix(word_slots[i][1])
                i += 1
            elif op == "ins":
                new_slots.append((after[j], None))
                j += 1
            else:  # tra
                new_slots.append((after[j], word_slots[i + 1][1]))
                fix(word_slots[i][1])
                new_slots.append((after[j + 1], None))
                i += 2
                j += 2
        else:  # match
            new_slots.append((after[j], word_slots[i][1]))
            i += 1
            j += 1
    return new_slots, fixed


def _apply_autocorrect_to_slots(slots, before, after, erased):
    """Replace the word before the trailing space, reassigning tap slots."""
    if not slots or slots[-1][0] != " ":
        return
    start = len(slots) - 1 - len(before)
    if start < 0 or "".join(c for c, _ in slots[start:len(slots) - 1]) != before:
        return
    new_slots, fixed = _rebuild_word_slots(slots[start:len(slots) - 1],
                                           before, after)
    for tap_idx in fixed:
        erased.add(tap_idx)
    slots[start:len(slots) - 1] = new_slots


def _fold_log(taps: list[Tap], autocorrects=()):
    """Replay a keystroke log, tracking which tap produced each buffer slot.

    autocorrects is an iterable of (log_position, before, after) applied
    right after the tap at that log position (a space press).  Returns
    (buffer slots, erased tap indices): a slot is (char, tap index or None
    for machine-produced characters).
    """
    ac_at: dict[int, list[tuple[str, str]]] = {}
    for pos, before, after in autocorrects:
        ac_at.setdefault(pos, []).append((before, after))
    slots: list[tuple[str, int | None]] = []
    erased: set[int] = set()
    for idx, tap in enumerate(taps):
        if tap.char == BACKSPACE:
            if slots:
                _, popped = slots.pop()
                if popped is not None:
                    erased.add(popped)
        else:
            slots.append((tap.char, idx))
        for before, after in ac_at.get(idx, ()):
            _apply_autocorrect_to_slots(slots, before, after, erased)
    return slots, erased


def classify_keystrokes(taps: list[Tap], presented: str,
                        autocorrects=()) -> KeystrokeClasses:
    """Wobbrock-style keystroke classes: C, INF, IF, F.

    Backspaces count as fixes; characters erased by a backspace or removed
    by an autocorrection count as incorrect-fixed; surviving characters are
    classified against the presented text through the alignment.  The four
    classes always sum to the number of taps.
    """
    slots, erased = _fold_log(taps, autocorrects)
    fixes = sum(1 for t in taps if t.char == BACKSPACE)
    transcribed = "".join(c for c, _ in slots)
    error_pos = _transcribed_error_positions(presented, transcribed)
    correct = incorrect_not_fixed = 0
    for pos, (_char, tap_idx) in enumerate(slots):
        if tap_idx is None:
            continue  # machine-produced character, not a keystroke
        if pos in error_pos:
            incorrect_not_fixed += 1
        else:
            correct += 1
    return KeystrokeClasses(correct=correct,
                            incorrect_not_fixed=incorrect_not_fixed,
                            incorrect_fixed=len(erased), fixes=fixes)


def _backspace_runs(taps: list[Tap]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive backspace taps as (start, length)."""
    runs = []
    i = 0
    while i < len(taps):
        if taps[i].char == BACKSPACE:
            start = i
            while i < len(taps) and taps[i].char == BACKSPACE:
                i += 1
            runs.append((start, i - start))
        else:
            i += 1
    return runs


def _buffer_error_positions(presented: str, buffer: str) -> set[int]:
    """Buffer indices the alignment marks erroneous, for run triage.

    Unlike the keystroke classification, both halves of a transposed pair
    count here: erasing a noticed swap starts on its second character.
    Trailing omissions (the still-untyped phrase tail) mark nothing.
    """
    errors: set[int] = set()
    for op, _, j in _align_script(presented, buffer):
        if op in ("sub", "ins"):
            errors.add(j)
        elif op == "tra":
            errors.add(j)
            errors.add(j + 1)
    return errors


def _correction_kinds(taps: list[Tap], presented: str,
                      autocorrects=()) -> tuple[int, int]:
    """(immediate, delayed) correction counts.

    A maximal backspace run is an immediate correction when it starts
    right after the erroneous keystroke: the last buffer character at run
    start is erroneous under the alignment against the presented text.
    Every other run is delayed, so immediate + delayed = number of runs.
    """
    ac_at: dict[int, list[tuple[str, str]]] = {}
    for pos, before, after in autocorrects:
        ac_at.setdefault(pos, []).append((before, after))
    buf: list[str] = []
    immediate = delayed = 0
    for idx, tap in enumerate(taps):
        if tap.char == BACKSPACE:
            starts_run = idx == 0 or taps[idx - 1].char != BACKSPACE
            if starts_run:
                text = "".join(buf)
                if buf and len(buf) - 1 in _buffer_error_positions(presented,
                                                                   text):
                    immediate += 1
                else:
                    delayed += 1
            if buf:
                buf.pop()
        else:
            buf.append(tap.char)
        for before, after in ac_at.get(idx, ()):
            tail = len(before) + 1
            if (buf and buf[-1] == " "
                    and "".join(buf[-tail:-1]) == before):
                buf[-tail:-1] = list(after)
    return immediate, delayed


# -- the report --------------------------------------------------------------

METRIC_NAMES = (
    "WPM",
    "Uncorrected error (%)",
    "Corrected error (%)",
    "KSPC",
    "Backspaces",
    "Immediate corrections",
    "Delayed corrections",
    "Insertion errors (%)",
    "Omission errors (%)",
    "Substitution errors (%)",
    "Transposition errors (%)",
)


@dataclass(frozen=True)
class MetricsReport:
    wpm: float | None
    uncorrected_error_rate: float
    corrected_error_rate: float
    kspc: float | None
    backspaces: int
    immediate_corrections: int
    delayed_corrections: int
    insertion_rate: float
    omission_rate: float
    substitution_rate: float
    transposition_rate: float

    def to_dict(self) -> dict[str, float | None]:
        return dict(zip(METRIC_NAMES, (
            self.wpm, self.uncorrected_error_rate, self.corrected_error_rate,
            self.kspc, float(self.backspaces),
            float(self.immediate_corrections),
            float(self.delayed_corrections), self.insertion_rate,
            self.omission_rate, self.substitution_rate,
            self.transposition_rate)))


def report_from_log(taps: list[Tap], presented: str, total_time: float,
                    transcribed: str | None = None,
                    autocorrects=()) -> MetricsReport:
    """Build the full metrics report from a keystroke log.

    WPM uses the 5-characters-per-word convention over the transcribed
    length.  KSPC is keystrokes over transcribed length and is reported as
    absent when the transcription is empty; WPM is absent at zero time.
    """
    if transcribed is None:
        slots, _ = _fold_log(taps, autocorrects)
        transcribed = "".join(c for c, _ in slots)
    classes = classify_keystrokes(taps, presented, autocorrects)
    classified = (classes.correct + classes.incorrect_not_fixed
                  + classes.incorrect_fixed)
    uncorrected = (100.0 * classes.incorrect_not_fixed / classified
                   if classified else 0.0)
    corrected = (100.0 * classes.incorrect_fixed / classified
                 if classified else 0.0)
    wpm = (len(transcribed) / 5.0) / (total_time / 60.0) if total_time > 0 else None
    kspc = len(taps) / len(transcribed) if transcribed else None
    counts = align(presented, transcribed)
    denom = max(1, len(presented))
    immediate, delayed = _correction_kinds(taps, presented, autocorrects)
    return MetricsReport(
        wpm=wpm,
        uncorrected_error_rate=uncorrected,
        corrected_error_rate=corrected,
        kspc=kspc,
        backspaces=sum(1 for t in taps if t.char == BACKSPACE),
        immediate_corrections=immediate,
        delayed_corrections=delayed,
        insertion_rate=100.0 * counts.insertions / denom,
        omission_rate=100.0 * counts.omissions / denom,
        substitution_rate=100.0 * counts.substitutions / denom,
        transposition_rate=100.0 * counts.transpositions / denom,
    )


def report(trace, presented: str | None = None) -> MetricsReport:
    """Metrics report for one completed trace."""
    if presented is None:
        presented = trace.phrase
    taps = taps_from_trace(trace)
    autocorrects = _autocorrects_from_trace(trace)
    return report_from_log(taps, presented, trace.total_time,
                           transcribed=trace.final_text,
                           autocorrects=autocorrects)


def _autocorrects_from_trace(trace):
    """(log position, before, after) triples for a trace's autocorrections.

    The log position is the index of the space tap that triggered the
    replacement, so folding the log reproduces the final text.
    """
    out = []
    tap_idx = -1
    for ev in trace.events:
        if ev.kind in ("keypress", "backspace"):
            tap_idx += 1
        elif ev.kind == "autocorrect":
            out.append((tap_idx, ev.before, ev.after))
    return out


def aggregate(reports: list[MetricsReport]) -> dict[str, tuple[float, float]]:
    """Per-metric sample mean and SD (n-1 denominator; SD 0 for n=1).

    Metrics that are absent in a report (undefined WPM or KSPC) are
    skipped for that report.
    """
    if not reports:
        raise ValueError("aggregate needs at least one report")
    out: dict[str, tuple[float, float]] = {}
    dicts = [r.to_dict() for r in reports]
    for name in METRIC_NAMES:
        values = [d[name] for d in dicts if d[name] is not None]
        if not values:
            out[name] = (float("nan"), float("nan"))
            continue
        mean = sum(values) / len(values)
        if len(values) > 1:
            var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
            sd = math.sqrt(var)
        else:
            sd = 0.0
        out[name] = (mean, sd)
    return out


def reports_to_csv(reports: list[MetricsReport]) -> str:
    """CSV export, one row per trace, columns named as in the report."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(METRIC_NAMES)
    for r in reports:
        d = r.to_dict()
        writer.writerow(["" if d[name] is None else f"{d[name]:.6g}"
                         for name in METRIC_NAMES])
    return buf.getvalue()
