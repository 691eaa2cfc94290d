"""Keyboard layout geometry: key rectangles, hit-testing, and screen regions.

All coordinates are normalized to [0,1] x [0,1] for the whole screen, so
motor-noise parameters stay device independent.  Layouts are immutable once
loaded and safe to share across concurrent episodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class LayoutError(ValueError):
    """Malformed layout document or a geometry invariant violation."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_list(self) -> list[float]:
        return [self.x, self.y]


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, p: Point) -> bool:
        return self.x0 <= p.x <= self.x1 and self.y0 <= p.y <= self.y1

    def center(self) -> Point:
        return Point((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def area(self) -> float:
        return max(0.0, self.x1 - self.x0) * max(0.0, self.y1 - self.y0)

    def overlaps(self, other: "Rect") -> bool:
        return (self.x0 < other.x1 and other.x0 < self.x1
                and self.y0 < other.y1 and other.y0 < self.y1)

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass(frozen=True)
class Key:
    label: str
    bounds: Rect
    center: Point


# Function keys present on every bundled layout.  "enter" commits no
# character in this simulator; a slip onto it is effectively an omission.
FUNCTION_KEYS = ("space", "backspace", "enter")

TEXT_FIELD = "text-field"


class KeyboardLayout:
    """Immutable keyboard geometry with hit-testing."""

    def __init__(self, name: str, keys: list[Key], keyboard_region: Rect,
                 text_field_region: Rect):
        self.name = name
        self.keys = tuple(keys)
        self.keyboard_region = keyboard_region
        self.text_field_region = text_field_region
        self._by_label = {k.label: k for k in self.keys}
        self._validate()

    def _validate(self) -> None:
        if not self.keys:
            raise LayoutError("layout has no keys")
        seen: set[str] = set()
        for k in self.keys:
            if k.label in seen:
                raise LayoutError(f"duplicate key label: {k.label!r}")
            seen.add(k.label)
            if k.bounds.area() <= 0:
                raise LayoutError(f"key {k.label!r} has non-positive area")
            if not k.bounds.contains(k.center):
                raise LayoutError(f"key {k.label!r} center outside its bounds")
            if not _rect_inside(k.bounds, self.keyboard_region):
                raise LayoutError(f"key {k.label!r} outside the keyboard region")
        for i, a in enumerate(self.keys):
            for b in self.keys[i + 1:]:
                if a.bounds.overlaps(b.bounds):
                    raise LayoutError(
                        f"keys {a.label!r} and {b.label!r} overlap")
        if self.keyboard_region.overlaps(self.text_field_region):
            raise LayoutError("keyboard region overlaps the text field region")

    # -- queries ---------------------------------------------------------

    def key_at(self, p: Point) -> Key | None:
        """Key whose bounds contain p, or None (gap / off-keyboard).

        None is a valid outcome: it is the omission pathway for a finger
        slip that taps no key, not an error.
        """
        if not self.keyboard_region.contains(p):
            return None
        for k in self.keys:
            if k.bounds.contains(p):
                return k
        return None

    def key(self, label: str) -> Key:
        try:
            return self._by_label[label]
        except KeyError:
            raise LayoutError(f"unknown key label: {label!r}") from None

    def center_of(self, label: str) -> Point:
        return self.key(label).center

    def has_label(self, label: str) -> bool:
        return label in self._by_label

    def neighbors(self, label: str, k: int) -> list[Key]:
        """The k nearest keys by center distance, excluding the key itself.

        Ties break by label order; k larger than the key count returns all
        other keys.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        me = self.key(label)
        others = sorted(
            (key for key in self.keys if key.label != label),
            key=lambda key: (me.center.dist(key.center), key.label))
        return others[:k]

    @property
    def labels(self) -> list[str]:
        return [k.label for k in self.keys]

    def char_labels(self) -> list[str]:
        return [k.label for k in self.keys if k.label not in ("backspace", "enter")]

    def supports_phrase(self, phrase: str) -> bool:
        return all(self.has_label(label_for_char(c)) for c in phrase)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "keyboard_region": self.keyboard_region.as_list(),
            "text_field_region": self.text_field_region.as_list(),
            "keys": [{"label": k.label, "bounds": k.bounds.as_list()}
                     for k in self.keys],
        }


def label_for_char(c: str) -> str:
    """Map a phrase character to its key label (' ' -> 'space')."""
    return "space" if c == " " else c


def char_for_label(label: str) -> str | None:
    """Inverse of label_for_char; None for keys that commit no character."""
    if label == "space":
        return " "
    if label in ("backspace", "enter"):
        return None
    return label


def _rect_inside(inner: Rect, outer: Rect) -> bool:
    return (inner.x0 >= outer.x0 and inner.y0 >= outer.y0
            and inner.x1 <= outer.x1 and inner.y1 <= outer.y1)


def _parse_rect(raw, what: str) -> Rect:
    if (not isinstance(raw, (list, tuple)) or len(raw) != 4
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in raw)):
        raise LayoutError(f"{what}: expected [x0, y0, x1, y1] with finite numbers")
    x0, y0, x1, y1 = map(float, raw)
    if not (x0 < x1 and y0 < y1):
        raise LayoutError(f"{what}: degenerate rectangle {raw}")
    return Rect(x0, y0, x1, y1)


def load_layout(doc: dict) -> KeyboardLayout:
    """Build a KeyboardLayout from a parsed layout document.

    Schema: {"name": str, "keyboard_region": [x0,y0,x1,y1],
    "text_field_region": [...], "keys": [{"label": str, "bounds": [...]}]}
    with all coordinates normalized.
    """
    if not isinstance(doc, dict):
        raise LayoutError("layout document must be a JSON object")
    for field in ("name", "keyboard_region", "text_field_region", "keys"):
        if field not in doc:
            raise LayoutError(f"layout document missing field {field!r}")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise LayoutError("layout name must be a non-empty string")
    kb = _parse_rect(doc["keyboard_region"], "keyboard_region")
    tf = _parse_rect(doc["text_field_region"], "text_field_region")
    raw_keys = doc["keys"]
    if not isinstance(raw_keys, list) or not raw_keys:
        raise LayoutError("layout has no keys")
    keys = []
    for raw in raw_keys:
        if not isinstance(raw, dict) or "label" not in raw or "bounds" not in raw:
            raise LayoutError(f"malformed key entry: {raw!r}")
        label = raw["label"]
        if not isinstance(label, str) or not label:
            raise LayoutError(f"malformed key label: {label!r}")
        bounds = _parse_rect(raw["bounds"], f"key {label!r} bounds")
        keys.append(Key(label=label, bounds=bounds, center=bounds.center()))
    return KeyboardLayout(name, keys, kb, tf)


def load_layout_file(path: str | Path) -> KeyboardLayout:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LayoutError(f"layout file {path}: invalid JSON ({exc})") from None
    return load_layout(doc)


def builtin_layout_names() -> list[str]:
    root = resources.files("typesim.data").joinpath("layouts")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_builtin_layout(name: str) -> KeyboardLayout:
    ref = resources.files("typesim.data").joinpath(f"layouts/{name}.json")
    if not ref.is_file():
        raise LayoutError(
            f"unknown builtin layout {name!r}; available: {builtin_layout_names()}")
    return load_layout(json.loads(ref.read_text(encoding="utf-8")))
