"""Layout JSON round-tripping and content digests.

The on-disk form is indented for humans; digests hash a canonical compact
encoding (sorted keys, no whitespace) of the same document, so a layout's
digest is identical whether computed before saving or after loading.
"""

from __future__ import annotations

import hashlib
import json

from .errors import LayoutParseError, VersionMismatchError
from .geometry import DieOutline, FloorplanLayout, IoPin, MacroPlacement, Rect, RegionPlacement

__all__ = [
    "SCHEMA_VERSION",
    "layout_to_doc",
    "layout_from_doc",
    "dumps_layout",
    "loads_layout",
    "save_layout",
    "load_layout",
    "layout_digest",
]

SCHEMA_VERSION = 1


def layout_to_doc(layout: FloorplanLayout) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "style": layout.style,
        "die": {
            "width_um": layout.die.width_um,
            "height_um": layout.die.height_um,
            "aspect": layout.die.aspect,
        },
        "halo_um": layout.halo_um,
        "macros": [
            {
                "id": m.macro_id,
                "x": m.rect.x,
                "y": m.rect.y,
                "w": m.rect.w,
                "h": m.rect.h,
                "orientation": m.orientation,
            }
            for m in layout.macros
        ],
        "io_pins": [{"name": p.name, "x": p.x, "y": p.y} for p in layout.io_pins],
        "regions": [
            {"module_id": r.module_id, "rects": [[c.x, c.y, c.w, c.h] for c in r.rects]}
            for r in layout.regions
        ],
    }


def _need(doc: dict, key: str, path: str):
    if not isinstance(doc, dict) or key not in doc:
        raise LayoutParseError(f"{path}: missing key {key!r}")
    return doc[key]


def _num(doc: dict, key: str, path: str) -> float:
    val = _need(doc, key, path)
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise LayoutParseError(f"{path}/{key}: expected a number")
    return float(val)


def layout_from_doc(doc: dict) -> FloorplanLayout:
    if not isinstance(doc, dict):
        raise LayoutParseError("/: document must be a JSON object")
    version = _need(doc, "schema_version", "/")
    if not isinstance(version, int):
        raise LayoutParseError("/schema_version: expected an integer")
    if version > SCHEMA_VERSION:
        raise VersionMismatchError(
            f"layout schema version {version} is newer than the supported {SCHEMA_VERSION}"
        )
    die_doc = _need(doc, "die", "/")
    die = DieOutline(
        width_um=_num(die_doc, "width_um", "/die"),
        height_um=_num(die_doc, "height_um", "/die"),
        aspect=_num(die_doc, "aspect", "/die"),
    )
    style = _need(doc, "style", "/")
    if not isinstance(style, str):
        raise LayoutParseError("/style: expected a string")
    macros = []
    for i, m in enumerate(_need(doc, "macros", "/")):
        path = f"/macros/{i}"
        rect = Rect(_num(m, "x", path), _num(m, "y", path), _num(m, "w", path), _num(m, "h", path))
        orientation = m.get("orientation", "R0")
        macros.append(MacroPlacement(_need(m, "id", path), rect, orientation))
    pins = []
    for i, p in enumerate(_need(doc, "io_pins", "/")):
        path = f"/io_pins/{i}"
        pins.append(IoPin(_need(p, "name", path), _num(p, "x", path), _num(p, "y", path)))
    regions = []
    for i, r in enumerate(doc.get("regions", [])):
        path = f"/regions/{i}"
        rects = [Rect(*map(float, quad)) for quad in _need(r, "rects", path)]
        regions.append(RegionPlacement(_need(r, "module_id", path), rects))
    return FloorplanLayout(die, macros, pins, style, _num(doc, "halo_um", "/"), regions)


def dumps_layout(layout: FloorplanLayout) -> str:
    return json.dumps(layout_to_doc(layout), indent=2) + "\n"


def loads_layout(text: str) -> FloorplanLayout:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutParseError(f"/: invalid JSON: {exc}") from exc
    return layout_from_doc(doc)


def save_layout(layout: FloorplanLayout, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_layout(layout))


def load_layout(path) -> FloorplanLayout:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise LayoutParseError(f"{path}: {exc}") from exc
    try:
        return loads_layout(text)
    except LayoutParseError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def layout_digest(layout: FloorplanLayout) -> str:
    """sha256 over the canonical compact encoding of the layout document."""
    blob = json.dumps(layout_to_doc(layout), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
