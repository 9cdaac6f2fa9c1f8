"""Macro placement styles: compact block, edge rows, and tapered U.

All three styles share conventions: SPM macros pack against the right die
edge on a uniform slot grid (macro plus keepout halo on every side), the
four instruction-cache macros stack at the left edge centered on the
horizontal midline, and every layout is vertically symmetric. Macros are
emitted in slot order so each superbank's eight banks occupy consecutive
slots.

The u-shape generator samples f[n] = (n/HH)^(-p) per column n (heights in
macro rows per half-die, n = 1 rightmost). The exponent search returns the
largest p whose rounded column set still fits: tall exponents starve the
arm tails to zero height before all banks are placed, and any column that
would round above the available half-height rows is rejected rather than
clipped, which keeps the U an actual U instead of a flattened block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cluster import ClusterSpec, MacroSpec
from .config import FloorplanConfig
from .errors import InfeasibleOutlineError, OddMacroCountError
from .geometry import DieOutline, FloorplanLayout, MacroPlacement, Rect, default_io_pins

__all__ = [
    "UShapeParams",
    "ushape_heights",
    "select_exponent_p",
    "place_one_sided",
    "place_two_sided",
    "place_u_shape",
    "generate_layout",
    "STYLE_NAMES",
]

STYLE_NAMES = ("1-sided", "2-sided", "u-shape")

# Exponent search window for the u-shape generator.
P_MIN = 0.05
P_MAX = 8.0
# Scan pitch for the exponent search. The selector is specified at this
# resolution: bands of distinct column profiles narrower than one step are
# out of scope. The winning band's upper boundary is then bisected, which
# moves the result by less than one step.
P_STEP = 0.01

_TOL = 1e-9


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class UShapeParams:
    p: float
    hh: float  # half die height in macro-row units (may be fractional)
    column_heights: tuple[int, ...]  # rows per column, per half, n=1 first


def _slot_pitch(spec: ClusterSpec, halo_um: float) -> tuple[float, float]:
    spm = spec.spm_macros()
    ref = spm if spm else spec.macros
    if not ref:
        return (0.0, 0.0)
    w = max(m.width_um for m in ref)
    h = max(m.height_um for m in ref)
    return (w + 2 * halo_um, h + 2 * halo_um)


def _place_icache(
    spec: ClusterSpec, die: DieOutline, halo_um: float
) -> list[MacroPlacement]:
    """Instruction-cache macros in one left-edge column, two per half."""
    icache = spec.icache_macros()
    if not icache:
        return []
    _, sh = _slot_pitch(spec, halo_um)
    n = len(icache)
    stack = n * sh
    if stack > die.height_um + _TOL:
        raise InfeasibleOutlineError(
            f"die height {die.height_um:.1f} um cannot hold the "
            f"{n}-macro instruction-cache stack ({stack:.1f} um)"
        )
    y0 = 0.5 * (die.height_um - stack)
    out = []
    for k, m in enumerate(icache):
        rect = Rect(halo_um, y0 + k * sh + halo_um, m.width_um, m.height_um)
        out.append(MacroPlacement(m.id, rect, "R0"))
    return out


def _finish(
    spec: ClusterSpec,
    die: DieOutline,
    spm_placements: list[MacroPlacement],
    style: str,
    cfg: FloorplanConfig,
) -> FloorplanLayout:
    macros = spm_placements + _place_icache(spec, die, cfg.halo_um)
    pins = default_io_pins(die, cfg.io_pin_count)
    return FloorplanLayout(die=die, macros=macros, io_pins=pins, style=style, halo_um=cfg.halo_um)


# --- 1-sided ----------------------------------------------------------------


def place_one_sided(
    spec: ClusterSpec, die: DieOutline, cfg: FloorplanConfig | None = None
) -> FloorplanLayout:
    """All SPM macros in the fewest right-edge columns, each column centered."""
    cfg = cfg or FloorplanConfig()
    spm = spec.spm_macros()
    if not spm:
        return _finish(spec, die, [], "1-sided", cfg)
    sw, sh = _slot_pitch(spec, cfg.halo_um)
    rows_max = int(math.floor(die.height_um / sh + _TOL))
    if rows_max < 1:
        raise InfeasibleOutlineError(
            f"die height {die.height_um:.1f} um is shorter than one macro slot ({sh:.1f} um)"
        )
    ncols = -(-len(spm) // rows_max)
    if ncols * sw > die.width_um + _TOL:
        raise InfeasibleOutlineError(
            f"die width {die.width_um:.1f} um cannot hold {ncols} macro columns "
            f"({ncols * sw:.1f} um)"
        )
    placements: list[MacroPlacement] = []
    remaining = list(spm)
    col = 0
    while remaining:
        batch = remaining[:rows_max]
        remaining = remaining[rows_max:]
        x = die.width_um - (col + 1) * sw + cfg.halo_um
        y0 = 0.5 * (die.height_um - len(batch) * sh)
        for r, m in enumerate(batch):
            placements.append(MacroPlacement(m.id, Rect(x, y0 + r * sh + cfg.halo_um, m.width_um, m.height_um), "R0"))
        col += 1
    return _finish(spec, die, placements, "1-sided", cfg)


# --- 2-sided ----------------------------------------------------------------


def place_two_sided(
    spec: ClusterSpec, die: DieOutline, cfg: FloorplanConfig | None = None
) -> FloorplanLayout:
    """Widest right-anchored rows along the top and bottom edges, in pairs."""
    cfg = cfg or FloorplanConfig()
    spm = spec.spm_macros()
    if not spm:
        return _finish(spec, die, [], "2-sided", cfg)
    sw, sh = _slot_pitch(spec, cfg.halo_um)
    cols_max = int(math.floor(die.width_um / sw + _TOL))
    if cols_max < 1:
        raise InfeasibleOutlineError(
            f"die width {die.width_um:.1f} um is narrower than one macro slot ({sw:.1f} um)"
        )
    n = len(spm)
    pairs = -(-(n // 2) // cols_max) if n > 1 else 0
    # Row pairs stack inward from the edges; both rows of a pair must fit
    # above/below the midline without meeting.
    if pairs * 2 * sh > die.height_um + _TOL:
        raise InfeasibleOutlineError(
            f"die height {die.height_um:.1f} um cannot stack {pairs} row pairs "
            f"({pairs * 2 * sh:.1f} um)"
        )

    placements: list[MacroPlacement] = []

    def emit_row(batch: list[MacroSpec], y: float) -> None:
        x0 = die.width_um - len(batch) * sw
        for j, m in enumerate(batch):
            placements.append(
                MacroPlacement(m.id, Rect(x0 + j * sw + cfg.halo_um, y + cfg.halo_um, m.width_um, m.height_um), "R0")
            )

    remaining = list(spm)
    pair = 0
    while len(remaining) > 1:
        take = min(len(remaining) - (len(remaining) % 2), 2 * cols_max)
        half = take // 2
        top, bottom = remaining[:half], remaining[half : 2 * half]
        remaining = remaining[2 * half :]
        emit_row(top, die.height_um - (pair + 1) * sh)
        emit_row(bottom, pair * sh)
        pair += 1
    if remaining:
        # Odd leftover: centered on the midline in the next free right slot.
        m = remaining[0]
        x = die.width_um - sw + cfg.halo_um
        y = 0.5 * (die.height_um - sh) + cfg.halo_um
        placements.append(MacroPlacement(m.id, Rect(x, y, m.width_um, m.height_um), "R0"))
    return _finish(spec, die, placements, "2-sided", cfg)


# --- u-shape ----------------------------------------------------------------


def ushape_heights(hh: float, p: float, macro_count: int) -> UShapeParams:
    """Sample the column generator until the per-half bank budget is spent.

    Heights are rounded half-up to whole rows and clamped to the rows that
    fit in one half ([0, HH]); the final column is truncated to the budget
    remainder. Raises when the budget cannot be completed (a zero-height
    column appears while banks remain unplaced).
    """
    if hh < 1:
        raise InfeasibleOutlineError(f"half-height {hh:.3f} rows is below one macro row")
    if p <= 0:
        raise ValueError("generator exponent must be positive")
    if macro_count % 2:
        raise OddMacroCountError(
            f"u-shape needs an even bank count for a symmetric split, got {macro_count}"
        )
    budget = macro_count // 2
    cap = int(math.floor(hh + _TOL))
    heights: list[int] = []
    n = 1
    while budget > 0:
        raw = (n / hh) ** (-p)
        rows = min(_round_half_up(raw), cap)
        if rows <= 0:
            raise InfeasibleOutlineError(
                f"generator tail reaches zero height at column {n} with "
                f"{budget} banks per half unplaced (p={p:.4f})"
            )
        rows = min(rows, budget)
        heights.append(rows)
        budget -= rows
        n += 1
    return UShapeParams(p=p, hh=hh, column_heights=tuple(heights))


def _emit_columns(hh: float, p: float, budget: int, cap: int) -> tuple[int, ...] | None:
    """Column heights for one half, or None when p is infeasible.

    Infeasible means: a column would round above the half-height row
    capacity (the U would have to be clipped flat), or the tail dies before
    the budget completes.
    """
    heights: list[int] = []
    n = 1
    while budget > 0:
        raw = (n / hh) ** (-p)
        rows = _round_half_up(raw)
        if rows > cap:
            return None
        if rows <= 0:
            return None
        rows = min(rows, budget)
        heights.append(rows)
        budget -= rows
        n += 1
    return tuple(heights)


def _ushape_feasible(
    p: float, hh: float, budget: int, cap: int, max_cols: int
) -> tuple[int, ...] | None:
    heights = _emit_columns(hh, p, budget, cap)
    if heights is None or len(heights) > max_cols:
        return None
    return heights


def select_exponent_p(
    spec: ClusterSpec, die: DieOutline, cfg: FloorplanConfig | None = None
) -> float:
    """Largest feasible generator exponent for this die.

    Candidates are ranked by (first-column height desc, column count asc,
    p desc); a coarse descending lattice scan finds the winning band and a
    bisection sharpens its upper boundary. Within a feasible band the first
    column height is non-decreasing and the column count non-increasing in
    p, so the band's upper edge is the optimum.
    """
    cfg = cfg or FloorplanConfig()
    spm = spec.spm_macros()
    if not spm:
        return P_MIN
    if len(spm) % 2:
        raise OddMacroCountError(
            f"u-shape needs an even bank count for a symmetric split, got {len(spm)}"
        )
    sw, sh = _slot_pitch(spec, cfg.halo_um)
    hh = die.height_um / (2.0 * sh)
    if hh < 1:
        raise InfeasibleOutlineError(
            f"die height {die.height_um:.1f} um is shorter than two macro rows"
        )
    budget = len(spm) // 2
    cap = int(math.floor(hh + _TOL))
    # Arm columns must stay clear of the left-edge instruction-cache column.
    max_cols = int(math.floor(die.width_um / sw + _TOL)) - (1 if spec.icache_macros() else 0)

    def key_at(p: float):
        heights = _ushape_feasible(p, hh, budget, cap, max_cols)
        if heights is None:
            return None
        return (heights[0], -len(heights), p)

    best_p = None
    best_key = None
    steps = int(round((P_MAX - P_MIN) / P_STEP))
    for i in range(steps + 1):
        p = P_MAX - i * P_STEP
        if p < P_MIN:
            p = P_MIN
        key = key_at(p)
        if key is not None and (best_key is None or key > best_key):
            best_key = key
            best_p = p
    if best_p is None:
        raise InfeasibleOutlineError(
            "no generator exponent places all banks within this outline"
        )

    # Sharpen the upper boundary of the winning band.
    lo = best_p
    hi = min(best_p + P_STEP, P_MAX)
    if hi > lo:
        f1, neg_cols, _ = best_key
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            key = key_at(mid)
            if key is not None and key[0] == f1 and key[1] == neg_cols:
                lo = mid
            else:
                hi = mid
    return lo


def place_u_shape(
    spec: ClusterSpec, die: DieOutline, cfg: FloorplanConfig | None = None
) -> FloorplanLayout:
    """Tapered symmetric U: columns right-to-left, arms hugging both edges."""
    cfg = cfg or FloorplanConfig()
    spm = spec.spm_macros()
    if not spm:
        return _finish(spec, die, [], "u-shape", cfg)
    sw, sh = _slot_pitch(spec, cfg.halo_um)
    p = select_exponent_p(spec, die, cfg)
    hh = die.height_um / (2.0 * sh)
    budget = len(spm) // 2
    cap = int(math.floor(hh + _TOL))
    max_cols = int(math.floor(die.width_um / sw + _TOL)) - (1 if spec.icache_macros() else 0)
    heights = _ushape_feasible(p, hh, budget, cap, max_cols)
    if heights is None:
        raise InfeasibleOutlineError(
            "no generator exponent places all banks within this outline"
        )

    # Slot order: the whole top half (columns right-to-left, rows from the
    # top edge inward), then the bottom half mirrored, so superbanks fill
    # consecutive slots within one arm.
    placements: list[MacroPlacement] = []
    macros = list(spm)
    idx = 0
    for half in ("top", "bottom"):
        for col, rows in enumerate(heights):
            x = die.width_um - (col + 1) * sw + cfg.halo_um
            for r in range(rows):
                m = macros[idx]
                idx += 1
                if half == "top":
                    y = die.height_um - (r + 1) * sh + cfg.halo_um
                else:
                    y = r * sh + cfg.halo_um
                placements.append(MacroPlacement(m.id, Rect(x, y, m.width_um, m.height_um), "R0"))
    return _finish(spec, die, placements, "u-shape", cfg)


_STYLE_FUNCS = {
    "1-sided": place_one_sided,
    "2-sided": place_two_sided,
    "u-shape": place_u_shape,
}


def generate_layout(
    spec: ClusterSpec, die: DieOutline, style: str, cfg: FloorplanConfig | None = None
) -> FloorplanLayout:
    try:
        fn = _STYLE_FUNCS[style]
    except KeyError:
        raise ValueError(f"unknown style {style!r}; expected one of {', '.join(STYLE_NAMES)}") from None
    return fn(spec, die, cfg)
