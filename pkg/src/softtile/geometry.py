"""Planar geometry for fixed-outline floorplans.

Everything lives in micrometres with the die's lower-left corner at the
origin. Macro placements carry a keepout halo: two macros are considered
overlapping when their halo-dilated rectangles have intersecting open
interiors, so abutting dilated footprints are legal. Free space is the die
minus the dilated macro footprints, decomposed into disjoint rectangles by
vertical guillotine cuts at macro x-boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "Rect",
    "DieOutline",
    "IoPin",
    "MacroPlacement",
    "RegionPlacement",
    "FloorplanLayout",
    "rects_overlap",
    "within_die",
    "free_space",
    "vertical_symmetry_error",
    "macro_pin_position",
    "default_io_pins",
]

# Coordinates are compared with a small absolute slack so flush placements
# survive floating-point accumulation.
COORD_TOL = 1e-6


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + 0.5 * self.w

    @property
    def cy(self) -> float:
        return self.y + 0.5 * self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def dilated(self, margin: float) -> "Rect":
        """Rect grown by `margin` on all four sides (negative shrinks)."""
        return Rect(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)

    def intersection_area(self, other: "Rect") -> float:
        dx = min(self.x2, other.x2) - max(self.x, other.x)
        dy = min(self.y2, other.y2) - max(self.y, other.y)
        if dx <= 0.0 or dy <= 0.0:
            return 0.0
        return dx * dy


def rects_overlap(a: Rect, b: Rect, tol: float = COORD_TOL) -> bool:
    """True when the open interiors intersect; shared edges do not count.

    Penetration up to `tol` is treated as abutment so flush slot grids
    survive floating-point accumulation.
    """
    return (
        a.x < b.x2 - tol
        and b.x < a.x2 - tol
        and a.y < b.y2 - tol
        and b.y < a.y2 - tol
    )


@dataclass(frozen=True)
class DieOutline:
    """Fixed outline of one cluster tile."""

    width_um: float
    height_um: float
    aspect: float  # width / height

    @property
    def area_um2(self) -> float:
        return self.width_um * self.height_um

    def as_rect(self) -> Rect:
        return Rect(0.0, 0.0, self.width_um, self.height_um)


@dataclass(frozen=True)
class IoPin:
    name: str
    x: float
    y: float


@dataclass(frozen=True)
class MacroPlacement:
    macro_id: str
    rect: Rect
    orientation: str = "R0"  # R0 or MY (mirror about the vertical axis)


@dataclass
class RegionPlacement:
    """Soft-module region: a union of disjoint axis-aligned rectangles."""

    module_id: str
    rects: list[Rect]

    @property
    def area_um2(self) -> float:
        return sum(r.area for r in self.rects)

    def bbox(self) -> Rect:
        if not self.rects:
            return Rect(0.0, 0.0, 0.0, 0.0)
        x1 = min(r.x for r in self.rects)
        y1 = min(r.y for r in self.rects)
        x2 = max(r.x2 for r in self.rects)
        y2 = max(r.y2 for r in self.rects)
        return Rect(x1, y1, x2 - x1, y2 - y1)


@dataclass
class FloorplanLayout:
    """A placed tile: die, macros, io pins and (once legalized) regions."""

    die: DieOutline
    macros: list[MacroPlacement]
    io_pins: list[IoPin]
    style: str
    halo_um: float = 2.0
    regions: list[RegionPlacement] = field(default_factory=list)

    def macro_by_id(self, macro_id: str) -> MacroPlacement:
        for m in self.macros:
            if m.macro_id == macro_id:
                return m
        raise KeyError(macro_id)

    def translated(self, dx: float, dy: float) -> "FloorplanLayout":
        """Layout with every fixed position shifted; die outline unchanged."""
        macros = [replace(m, rect=Rect(m.rect.x + dx, m.rect.y + dy, m.rect.w, m.rect.h)) for m in self.macros]
        pins = [IoPin(p.name, p.x + dx, p.y + dy) for p in self.io_pins]
        return FloorplanLayout(self.die, macros, pins, self.style, self.halo_um, list(self.regions))


def within_die(rect: Rect, die: DieOutline, tol: float = COORD_TOL) -> bool:
    """Boundary-inclusive containment: a rect flush with an edge is inside."""
    return (
        rect.x >= -tol
        and rect.y >= -tol
        and rect.x2 <= die.width_um + tol
        and rect.y2 <= die.height_um + tol
    )


def free_space(layout: FloorplanLayout, halo_um: float | None = None) -> list[Rect]:
    """Die minus halo-dilated macros, as disjoint guillotine rectangles.

    Vertical cuts run at every dilated-macro x boundary; inside each vertical
    slab the free y-intervals are the complement of the dilated macros that
    cross it. Rectangles below a sliver threshold are dropped.
    """
    if halo_um is None:
        halo_um = layout.halo_um
    die = layout.die
    w, h = die.width_um, die.height_um
    blocks = []
    for m in layout.macros:
        d = m.rect.dilated(halo_um)
        x1 = max(0.0, d.x)
        y1 = max(0.0, d.y)
        x2 = min(w, d.x2)
        y2 = min(h, d.y2)
        if x2 - x1 > COORD_TOL and y2 - y1 > COORD_TOL:
            blocks.append((x1, y1, x2, y2))

    cuts = {0.0, w}
    for x1, _, x2, _ in blocks:
        cuts.add(x1)
        cuts.add(x2)
    xs = sorted(cuts)

    out: list[Rect] = []
    for xa, xb in zip(xs[:-1], xs[1:]):
        if xb - xa <= COORD_TOL:
            continue
        xm = 0.5 * (xa + xb)
        spans = sorted((y1, y2) for x1, y1, x2, y2 in blocks if x1 < xm < x2)
        cursor = 0.0
        for y1, y2 in spans:
            if y1 - cursor > COORD_TOL:
                out.append(Rect(xa, cursor, xb - xa, y1 - cursor))
            cursor = max(cursor, y2)
        if h - cursor > COORD_TOL:
            out.append(Rect(xa, cursor, xb - xa, h - cursor))
    return out


def _mirror_distance(a: Rect, b: Rect, die_h: float) -> float:
    """L-inf distance between a's reflection (about y = H/2) and b, symmetrized."""
    ar = Rect(a.x, die_h - a.y - a.h, a.w, a.h)
    br = Rect(b.x, die_h - b.y - b.h, b.w, b.h)
    d_ab = max(abs(ar.x - b.x), abs(ar.y - b.y), abs(ar.w - b.w), abs(ar.h - b.h))
    d_ba = max(abs(br.x - a.x), abs(br.y - a.y), abs(br.w - a.w), abs(br.h - a.h))
    return max(d_ab, d_ba)


def vertical_symmetry_error(layout: FloorplanLayout) -> float:
    """Worst distance from any macro to its mirror partner about y = H/2.

    Partners are chosen greedily by smallest mirror distance; a macro may be
    its own partner (a rect straddling the midline self-mirrors). With an odd
    unmatched remainder the macro is scored against its own reflection.
    """
    rects = [m.rect for m in layout.macros]
    n = len(rects)
    if n == 0:
        return 0.0
    die_h = layout.die.height_um
    pairs = []
    for i in range(n):
        for j in range(i, n):
            pairs.append((_mirror_distance(rects[i], rects[j], die_h), i, j))
    pairs.sort()
    matched = [False] * n
    worst = 0.0
    remaining = n
    for d, i, j in pairs:
        if matched[i] or matched[j]:
            continue
        matched[i] = True
        matched[j] = True
        worst = max(worst, d)
        remaining -= 1 if i == j else 2
        if remaining <= 0:
            break
    return worst


def macro_pin_position(placement: MacroPlacement, port_side: str) -> tuple[float, float]:
    """Midpoint of the pin edge after applying the placement orientation."""
    side = port_side
    if placement.orientation == "MY":
        side = {"left": "right", "right": "left"}.get(side, side)
    r = placement.rect
    if side == "left":
        return (r.x, r.cy)
    if side == "right":
        return (r.x2, r.cy)
    if side == "top":
        return (r.cx, r.y2)
    if side == "bottom":
        return (r.cx, r.y)
    raise ValueError(f"unknown port side {port_side!r}")


def default_io_pins(die: DieOutline, count: int = 64) -> list[IoPin]:
    """Uniformly spaced pin sites along the left die edge, bottom to top."""
    if count <= 0:
        return []
    pitch = die.height_um / count
    return [IoPin(f"io_{k:02d}", 0.0, (k + 0.5) * pitch) for k in range(count)]


def manhattan(a: tuple[float, float], b: tuple[float, float]) -> float:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def die_diagonal(die: DieOutline) -> float:
    return math.hypot(die.width_um, die.height_um)
