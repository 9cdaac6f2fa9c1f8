"""Deterministic SVG pictures of layouts, maps, and die plans.

Output is restricted to `rect`, `line`, `text`, and `g` elements, every
coordinate is printed as %.3f, and document dimensions are the die
dimensions divided by the scale, so two renders of different aspect ratios
compare visually at a glance and identical inputs produce identical bytes.

Map bins are colored on a dark-blue to red ramp over an absolute scale:
standard-cell density is already a fraction, congestion is normalized by
bin capacity, so a bin at or past capacity is pure red and an empty map is
uniformly dark blue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import FloorplanLayout
from .placer import DensityMap
from .qor import CongestionMap
from .tiler import TopLevelPlan

__all__ = ["RenderSpec", "RENDER_TARGETS", "COLOR_SCALES", "render_svg"]

RENDER_TARGETS = ("layout", "density", "congestion", "toplevel")
COLOR_SCALES = ("linear", "log")

_RAMP_LOW = (0, 0, 139)  # dark blue
_RAMP_HIGH = (255, 0, 0)  # red
_LOG_SPREAD = 99.0  # two decades between the first visible step and full scale

_MACRO_FILL = "#000000"
_REGION_FILL = "#dce6f2"
_CACHE_FILL = "#f2d8a0"
_MANAGER_FILL = "#bfe3bf"
_IO_FILL = "#e3bfbf"
_CLUSTER_FILL = "#ccd6eb"


@dataclass(frozen=True)
class RenderSpec:
    target: str = "layout"
    color_scale: str = "linear"
    scale_um_per_px: float = 2.0


def _f(v: float) -> str:
    return f"{v:.3f}"


def _ramp(norm: float, color_scale: str) -> str:
    norm = min(max(norm, 0.0), 1.0)
    if color_scale == "log" and norm > 0.0:
        norm = math.log1p(_LOG_SPREAD * norm) / math.log1p(_LOG_SPREAD)
    chans = (round(lo + norm * (hi - lo)) for lo, hi in zip(_RAMP_LOW, _RAMP_HIGH))
    return "#" + "".join(f"{c:02x}" for c in chans)


class _Canvas:
    """Collects SVG elements in die coordinates (y up) and serializes them."""

    def __init__(self, die_w_um: float, die_h_um: float, scale: float):
        self.die_h = die_h_um
        self.scale = scale
        self.w_px = die_w_um / scale
        self.h_px = die_h_um / scale
        self.lines: list[str] = []

    def rect(self, x, y, w, h, fill, stroke=None, stroke_width_px=1.0):
        px = x / self.scale
        py = (self.die_h - y - h) / self.scale
        attrs = f'x="{_f(px)}" y="{_f(py)}" width="{_f(w / self.scale)}" height="{_f(h / self.scale)}"'
        paint = f'fill="{fill}"'
        if stroke:
            paint += f' stroke="{stroke}" stroke-width="{_f(stroke_width_px)}"'
        self.lines.append(f"  <rect {attrs} {paint}/>")

    def line(self, x1, y1, x2, y2, stroke, width_px=1.0):
        pts = (
            f'x1="{_f(x1 / self.scale)}" y1="{_f((self.die_h - y1) / self.scale)}" '
            f'x2="{_f(x2 / self.scale)}" y2="{_f((self.die_h - y2) / self.scale)}"'
        )
        self.lines.append(f'  <line {pts} stroke="{stroke}" stroke-width="{_f(width_px)}"/>')

    def text(self, x_px, y_px, content, size_px=12.0):
        self.lines.append(
            f'  <text x="{_f(x_px)}" y="{_f(y_px)}" font-size="{_f(size_px)}">{content}</text>'
        )

    def group(self, gid: str):
        self.lines.append(f'  <g id="{gid}">')

    def end_group(self):
        self.lines.append("  </g>")

    def document(self) -> str:
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.w_px)}" '
            f'height="{_f(self.h_px)}" viewBox="0 0 {_f(self.w_px)} {_f(self.h_px)}">',
        ]
        return "\n".join(head + self.lines + ["</svg>"]) + "\n"


def _die_frame(canvas: _Canvas, w_um: float, h_um: float):
    canvas.rect(0.0, 0.0, w_um, h_um, "none", stroke="#000000")


def _render_layout(layout: FloorplanLayout, spec: RenderSpec) -> str:
    die = layout.die
    canvas = _Canvas(die.width_um, die.height_um, spec.scale_um_per_px)
    _die_frame(canvas, die.width_um, die.height_um)
    if layout.regions:
        canvas.group("regions")
        for region in layout.regions:
            for r in region.rects:
                canvas.rect(r.x, r.y, r.w, r.h, _REGION_FILL)
        canvas.end_group()
    if layout.macros:
        canvas.group("macros")
        for m in layout.macros:
            canvas.rect(m.rect.x, m.rect.y, m.rect.w, m.rect.h, _MACRO_FILL)
        canvas.end_group()
    if layout.io_pins:
        canvas.group("io-pins")
        tick = 3.0 * spec.scale_um_per_px
        for p in layout.io_pins:
            canvas.line(p.x, p.y, p.x + tick, p.y, "#444444")
        canvas.end_group()
    return canvas.document()


def _render_grid(grid, bin_um: float, norm_den: float, spec: RenderSpec) -> str:
    ny, nx = grid.shape
    canvas = _Canvas(nx * bin_um, ny * bin_um, spec.scale_um_per_px)
    canvas.group("bins")
    for iy in range(ny):
        for ix in range(nx):
            value = float(grid[iy, ix]) / norm_den if norm_den > 0.0 else 0.0
            canvas.rect(ix * bin_um, iy * bin_um, bin_um, bin_um, _ramp(value, spec.color_scale))
    canvas.end_group()
    _die_frame(canvas, nx * bin_um, ny * bin_um)
    return canvas.document()


def _render_plan(plan: TopLevelPlan, spec: RenderSpec) -> str:
    canvas = _Canvas(plan.die.w, plan.die.h, spec.scale_um_per_px)
    _die_frame(canvas, plan.die.w, plan.die.h)
    canvas.group("clusters")
    for r in plan.cluster_rects:
        canvas.rect(r.x, r.y, r.w, r.h, _CLUSTER_FILL, stroke="#555555")
    canvas.end_group()
    if plan.cache_rects:
        canvas.group("cache-strips")
        for r in plan.cache_rects:
            canvas.rect(r.x, r.y, r.w, r.h, _CACHE_FILL, stroke="#555555")
        canvas.end_group()
    if plan.manager_rect:
        canvas.group("manager")
        r = plan.manager_rect
        canvas.rect(r.x, r.y, r.w, r.h, _MANAGER_FILL, stroke="#555555")
        canvas.end_group()
    if plan.io_rect:
        canvas.group("io-strip")
        r = plan.io_rect
        canvas.rect(r.x, r.y, r.w, r.h, _IO_FILL, stroke="#555555")
        canvas.end_group()
    style = plan.selected_style or "unselected"
    label = f"{plan.template_name}: {style} Q={plan.demanded_q:g} util={plan.utilization:.3f}"
    canvas.text(4.0, 16.0, label)
    return canvas.document()


def render_svg(input, spec: RenderSpec) -> str:
    """Draw the input as an SVG document string.

    The input type must match spec.target: a layout, a density map, a
    congestion map, or a top-level plan. Anything else is the caller
    holding the tool wrong, reported as ValueError.
    """
    if spec.target not in RENDER_TARGETS:
        raise ValueError(f"unknown render target {spec.target!r}; use one of {RENDER_TARGETS}")
    if spec.color_scale not in COLOR_SCALES:
        raise ValueError(f"unknown color scale {spec.color_scale!r}; use one of {COLOR_SCALES}")
    if not spec.scale_um_per_px > 0:
        raise ValueError("render scale must be positive")
    expected = {
        "layout": FloorplanLayout,
        "density": DensityMap,
        "congestion": CongestionMap,
        "toplevel": TopLevelPlan,
    }[spec.target]
    if not isinstance(input, expected):
        raise ValueError(
            f"render target {spec.target!r} expects a {expected.__name__}, got {type(input).__name__}"
        )
    if spec.target == "layout":
        return _render_layout(input, spec)
    if spec.target == "density":
        return _render_grid(input.grid, input.bin_um, 1.0, spec)
    if spec.target == "congestion":
        return _render_grid(input.demand, input.bin_um, input.capacity_per_bin, spec)
    return _render_plan(input, spec)
