"""Hierarchical die composition from characterized cluster tiles.

Four cluster tiles plus a shared-cache strip form a quadrant; eight
quadrants, a manager-core strip and an io strip form a die. Templates fix
the arrangement and the demanded tile aspect ratio; the characterization
database supplies which placement style delivers that tile best. Strips
hold real logic, so utilization only drops where routing channels insert
dead space between tiles.

Strip sizing defaults (cache 15% of a quadrant's cluster area, manager one
cluster-equivalent, io strip 5% of the die along one edge, 20 um channels)
are engineering placeholders, overridable per template and per call.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import MissingCharacterizationError
from .geometry import Rect
from .sweep import CharacterizationDB, CharacterizationRecord

__all__ = [
    "QuadrantTemplate",
    "QuadrantPlan",
    "TopLevelTemplate",
    "PlanConstraints",
    "TopLevelPlan",
    "compose_quadrant",
    "default_quadrant",
    "evaluate_plan",
    "rank_plans",
    "builtin_templates",
    "load_template",
    "dump_template",
]

ARRANGEMENTS = ("2x2", "1x4", "4x1")
CACHE_SIDES = ("left", "right", "top", "bottom")


@dataclass(frozen=True)
class QuadrantTemplate:
    """Four clusters in a fixed arrangement plus one shared-cache strip.

    The arrangement is columns x rows: "1x4" stacks four tiles vertically,
    "4x1" lines them up horizontally.
    """

    arrangement: str = "2x2"
    cache_area_um2: float = 0.0
    cache_side: str = "top"
    channel_um: float = 20.0

    def grid(self) -> tuple[int, int]:
        try:
            cols, rows = (int(p) for p in self.arrangement.split("x"))
        except ValueError:
            raise ValueError(f"unknown arrangement {self.arrangement!r}; use one of {ARRANGEMENTS}") from None
        if cols * rows != 4 or self.arrangement not in ARRANGEMENTS:
            raise ValueError(f"unknown arrangement {self.arrangement!r}; use one of {ARRANGEMENTS}")
        return cols, rows


@dataclass(frozen=True)
class QuadrantPlan:
    outline: Rect
    cluster_rects: tuple[Rect, ...]
    cache_rect: Rect | None


@dataclass(frozen=True)
class TopLevelTemplate:
    """Eight quadrants in a rows x cols grid plus manager and io strips."""

    name: str
    grid_rows: int
    grid_cols: int
    demanded_q: float
    channel_um: float = 20.0
    cache_frac: float = 0.15  # of one quadrant's cluster area
    io_frac: float = 0.05  # of the die, as one full-width edge strip


@dataclass(frozen=True)
class PlanConstraints:
    min_freq_mhz: float = 0.0
    q_tolerance: float = 0.05
    tile_area_mm2: float = 0.9
    manager_clusters: float = 1.0  # manager strip size in cluster-equivalents


@dataclass(frozen=True)
class TopLevelPlan:
    template_name: str
    die: Rect
    cluster_rects: tuple[Rect, ...]
    cache_rects: tuple[Rect, ...]
    manager_rect: Rect | None
    io_rect: Rect | None
    utilization: float
    demanded_q: float
    accepted: bool
    reason: str
    selected_style: str | None
    selected_record: CharacterizationRecord | None


def default_quadrant(
    tile_area_um2: float = 0.9e6,
    arrangement: str = "2x2",
    cache_frac: float = 0.15,
    cache_side: str = "top",
    channel_um: float = 20.0,
) -> QuadrantTemplate:
    return QuadrantTemplate(arrangement, cache_frac * 4.0 * tile_area_um2, cache_side, channel_um)


def compose_quadrant(tile_shape: tuple[float, float], template: QuadrantTemplate) -> QuadrantPlan:
    """Lay out four tiles of the given (width, height) plus the cache strip.

    Tiles are separated by the intra-quadrant channel; a nonzero cache
    strip sits one channel away on its configured side. The outline is the
    bounding box of everything placed.
    """
    w, h = tile_shape
    if not (w > 0 and h > 0):
        raise ValueError("tile dimensions must be positive")
    if template.channel_um < 0:
        raise ValueError("channel width must be nonnegative")
    if template.cache_side not in CACHE_SIDES:
        raise ValueError(f"unknown cache side {template.cache_side!r}")
    cols, rows = template.grid()
    ch = template.channel_um
    block_w = cols * w + (cols - 1) * ch
    block_h = rows * h + (rows - 1) * ch
    clusters = tuple(
        Rect(c * (w + ch), r * (h + ch), w, h) for r in range(rows) for c in range(cols)
    )
    cache = None
    out_w, out_h = block_w, block_h
    area = template.cache_area_um2
    if area > 0.0:
        if template.cache_side in ("top", "bottom"):
            strip = Rect(0.0, block_h + ch, block_w, area / block_w)
            if template.cache_side == "bottom":
                dy = strip.h + ch
                clusters = tuple(Rect(r.x, r.y + dy, r.w, r.h) for r in clusters)
                strip = Rect(0.0, 0.0, block_w, area / block_w)
            out_h = block_h + ch + strip.h
        else:
            strip = Rect(block_w + ch, 0.0, area / block_h, block_h)
            if template.cache_side == "left":
                dx = strip.w + ch
                clusters = tuple(Rect(r.x + dx, r.y, r.w, r.h) for r in clusters)
                strip = Rect(0.0, 0.0, area / block_h, block_h)
            out_w = block_w + ch + strip.w
        cache = strip
    return QuadrantPlan(Rect(0.0, 0.0, out_w, out_h), clusters, cache)


def _shift(rect: Rect, dx: float, dy: float) -> Rect:
    return Rect(rect.x + dx, rect.y + dy, rect.w, rect.h)


def _select(
    db: CharacterizationDB, demanded_q: float, cons: PlanConstraints
) -> tuple[CharacterizationRecord | None, str]:
    near = [
        rec
        for (_, q), rec in db.records.items()
        if abs(q - demanded_q) <= cons.q_tolerance + 1e-12
    ]
    if not near:
        raise MissingCharacterizationError(
            f"no characterization within {cons.q_tolerance:g} of aspect ratio {demanded_q:g}"
        )
    feasible = [r for r in near if r.feasible]
    if not feasible:
        return None, f"no feasible style at aspect ratio {demanded_q:g}"
    fast = [r for r in feasible if r.estimate.est_freq_mhz >= cons.min_freq_mhz]
    if not fast:
        best = max(r.estimate.est_freq_mhz for r in feasible)
        return None, (
            f"minimum frequency {cons.min_freq_mhz:g} MHz exceeds the best "
            f"feasible estimate {best:.4g} MHz at aspect ratio {demanded_q:g}"
        )
    winner = min(
        fast, key=lambda r: (-r.estimate.est_freq_mhz, r.estimate.overflow_bins, r.style)
    )
    return winner, ""


def evaluate_plan(
    template: TopLevelTemplate,
    quadrant: QuadrantTemplate,
    db: CharacterizationDB,
    constraints: PlanConstraints | None = None,
) -> TopLevelPlan:
    """Compose the die for one template and pick the tile style from db.

    The geometry depends only on the demanded aspect ratio, so it is
    computed even for rejected plans; acceptance requires a feasible record
    within the aspect tolerance that meets the frequency floor. An aspect
    ratio the database knows nothing about raises instead: the sweep needs
    rerunning, silence would hide that.
    """
    cons = constraints or PlanConstraints()
    if template.grid_rows * template.grid_cols != 8:
        raise ValueError("top-level grid must hold 8 quadrants")
    if not template.demanded_q > 0:
        raise ValueError("demanded aspect ratio must be positive")
    tile_area = cons.tile_area_mm2 * 1e6
    tw = (tile_area * template.demanded_q) ** 0.5
    th = (tile_area / template.demanded_q) ** 0.5
    qplan = compose_quadrant((tw, th), quadrant)
    qw, qh = qplan.outline.w, qplan.outline.h
    rows, cols, ch = template.grid_rows, template.grid_cols, template.channel_um
    grid_w = cols * qw + (cols - 1) * ch
    grid_h = rows * qh + (rows - 1) * ch

    clusters: list[Rect] = []
    caches: list[Rect] = []
    for r in range(rows):
        for c in range(cols):
            dx, dy = c * (qw + ch), r * (qh + ch)
            clusters.extend(_shift(t, dx, dy) for t in qplan.cluster_rects)
            if qplan.cache_rect is not None:
                caches.append(_shift(qplan.cache_rect, dx, dy))

    manager_area = cons.manager_clusters * tile_area
    manager_h = manager_area / grid_w if manager_area > 0.0 else 0.0
    content_h = grid_h + manager_h
    if not 0.0 <= template.io_frac < 1.0:
        raise ValueError("io strip fraction must be in [0, 1)")
    die_h = content_h / (1.0 - template.io_frac)
    io_h = die_h - content_h

    # Stack from the bottom edge: io strip, manager strip, quadrant grid.
    io_rect = Rect(0.0, 0.0, grid_w, io_h) if io_h > 0.0 else None
    manager_rect = Rect(0.0, io_h, grid_w, manager_h) if manager_h > 0.0 else None
    dy = io_h + manager_h
    clusters = [_shift(t, 0.0, dy) for t in clusters]
    caches = [_shift(t, 0.0, dy) for t in caches]
    die = Rect(0.0, 0.0, grid_w, die_h)

    active = (
        sum(t.area for t in clusters)
        + sum(t.area for t in caches)
        + (manager_rect.area if manager_rect else 0.0)
        + (io_rect.area if io_rect else 0.0)
    )
    utilization = active / die.area

    record, reason = _select(db, template.demanded_q, cons)
    return TopLevelPlan(
        template_name=template.name,
        die=die,
        cluster_rects=tuple(clusters),
        cache_rects=tuple(caches),
        manager_rect=manager_rect,
        io_rect=io_rect,
        utilization=utilization,
        demanded_q=template.demanded_q,
        accepted=record is not None,
        reason=reason,
        selected_style=record.style if record else None,
        selected_record=record,
    )


def rank_plans(
    templates,
    quadrant: QuadrantTemplate,
    db: CharacterizationDB,
    constraints: PlanConstraints | None = None,
) -> list[TopLevelPlan]:
    """Evaluate every template; accepted plans first.

    Accepted plans sort by utilization, then selected tile frequency, both
    descending, then template name. Rejected plans follow in name order,
    carrying their reasons; an uncharacterized aspect ratio becomes a
    rejection here rather than an error, since a survey over templates
    should not die on its least-covered entry.
    """
    plans = []
    for t in templates:
        try:
            plans.append(evaluate_plan(t, quadrant, db, constraints))
        except MissingCharacterizationError as exc:
            cons = constraints or PlanConstraints()
            geom = evaluate_plan(
                t,
                quadrant,
                _single_record_db(db, t, cons),
                replace(cons, min_freq_mhz=float("inf")),
            )
            plans.append(replace(geom, reason=str(exc)))
    accepted = [p for p in plans if p.accepted]
    rejected = [p for p in plans if not p.accepted]
    accepted.sort(
        key=lambda p: (
            -p.utilization,
            -p.selected_record.estimate.est_freq_mhz,
            p.template_name,
        )
    )
    rejected.sort(key=lambda p: p.template_name)
    return accepted + rejected


def _single_record_db(db: CharacterizationDB, template, cons) -> CharacterizationDB:
    """A stand-in db whose only key matches the template, for geometry-only
    evaluation of templates the real db has no records for."""
    any_rec = CharacterizationRecord(style="none", q=template.demanded_q, estimate=None, layout_digest=None)
    return CharacterizationDB({("none", template.demanded_q): any_rec}, db.meta)


def builtin_templates() -> tuple[TopLevelTemplate, ...]:
    """The three shipped die proportions.

    Names describe the die, not the tile: a tall die stacks wide (Q=2.5)
    tiles, a wide die tiles square clusters two rows high, and the
    squarest achievable die uses narrow (Q=0.4) tiles in the same grid.
    """
    return (
        TopLevelTemplate("wide", grid_rows=2, grid_cols=4, demanded_q=1.0),
        TopLevelTemplate("square", grid_rows=2, grid_cols=4, demanded_q=0.4),
        TopLevelTemplate("tall", grid_rows=8, grid_cols=1, demanded_q=2.5),
    )


_TEMPLATE_KEYS = {"name", "grid_rows", "grid_cols", "demanded_q", "channel_um", "cache_frac", "io_frac"}
_REQUIRED_KEYS = {"name", "grid_rows", "grid_cols", "demanded_q"}


def load_template(text: str) -> TopLevelTemplate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid template JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("template document must be a JSON object")
    unknown = set(doc) - _TEMPLATE_KEYS
    if unknown:
        raise ValueError(f"unknown template keys: {', '.join(sorted(unknown))}")
    missing = _REQUIRED_KEYS - set(doc)
    if missing:
        raise ValueError(f"missing template keys: {', '.join(sorted(missing))}")
    return TopLevelTemplate(
        name=str(doc["name"]),
        grid_rows=int(doc["grid_rows"]),
        grid_cols=int(doc["grid_cols"]),
        demanded_q=float(doc["demanded_q"]),
        channel_um=float(doc.get("channel_um", 20.0)),
        cache_frac=float(doc.get("cache_frac", 0.15)),
        io_frac=float(doc.get("io_frac", 0.05)),
    )


def dump_template(template: TopLevelTemplate) -> str:
    doc = {
        "name": template.name,
        "grid_rows": template.grid_rows,
        "grid_cols": template.grid_cols,
        "demanded_q": template.demanded_q,
        "channel_um": template.channel_um,
        "cache_frac": template.cache_frac,
        "io_frac": template.io_frac,
    }
    return json.dumps(doc, indent=2) + "\n"
