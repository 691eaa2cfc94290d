"""Regenerate the bundled keyboard layout JSON files.

Geometry: a 4-row touchscreen keyboard in the lower 55% of a normalized
screen, text field near the top.  Keys are shrunk inside their grid cells
by 8% of the key pitch so that gaps between keys exist (taps can land on
no key).
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "typesim" / "data" / "layouts"

KEYBOARD = (0.0, 0.45, 1.0, 1.0)
TEXT_FIELD = (0.03, 0.03, 0.97, 0.20)
N_ROWS = 4


def cell(col0, col1, row, pitch):
    """Key bounds for a cell spanning [col0, col1) columns in a given row."""
    y_top, y_bot = KEYBOARD[1], KEYBOARD[3]
    rh = (y_bot - y_top) / N_ROWS
    gap = 0.08 * pitch / 2.0  # half-gap inset on every side
    x0 = col0 * pitch + gap
    x1 = col1 * pitch - gap
    y0 = y_top + row * rh + gap
    y1 = y_top + (row + 1) * rh - gap
    return [round(v, 6) for v in (x0, y0, x1, y1)]


def build(name, rows, pitch):
    keys = []
    for row_idx, row in enumerate(rows):
        for label, col0, col1 in row:
            keys.append({"label": label, "bounds": cell(col0, col1, row_idx, pitch)})
    return {
        "name": name,
        "keyboard_region": list(KEYBOARD),
        "text_field_region": list(TEXT_FIELD),
        "keys": keys,
    }


def letter_row(letters, offset):
    return [(ch, offset + i, offset + i + 1) for i, ch in enumerate(letters)]


def english():
    pitch = 0.1
    rows = [
        letter_row("qwertyuiop", 0.0),
        letter_row("asdfghjkl", 0.5),
        letter_row("zxcvbnm", 1.5) + [("backspace", 8.5, 10.0)],
        [("enter", 0.0, 2.0), ("space", 2.0, 8.0), ("enter2", None, None)],
    ]
    # single enter key on the right instead of the placeholder
    rows[3] = [("space", 2.0, 8.0), ("enter", 8.0, 10.0)]
    return build("qwerty_en", rows, pitch)


def finnish():
    # Nordic QWERTY: 11-column top rows with a-ring/o-umlaut/a-umlaut keys.
    pitch = 1.0 / 11.0
    rows = [
        letter_row("qwertyuiopå", 0.0),
        letter_row("asdfghjklöä", 0.0),
        letter_row("zxcvbnm", 1.5) + [("backspace", 9.0, 11.0)],
        [("space", 2.0, 9.0), ("enter", 9.0, 11.0)],
    ]
    return build("qwerty_fi", rows, pitch)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for doc in (english(), finnish()):
        path = OUT / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
        print(f"wrote {path} ({len(doc['keys'])} keys)")


if __name__ == "__main__":
    main()
