"""Proxy quality-of-results estimators for placed tile layouts.

Absolute post-route numbers need a commercial flow and a real PDK; these
estimators only claim orderings and calibrated operating points. Wirelength
is bit-width-weighted HPWL over net endpoint positions, congestion spreads
each net's demand over its bounding box and counts overflowing bins, and
frequency comes from a linear buffered-wire delay model fitted to known
operating points.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cluster import ClusterSpec
from .config import FloorplanConfig
from .errors import CalibrationError, UnresolvedEndpointError
from .geometry import (
    FloorplanLayout,
    RegionPlacement,
    free_space,
    macro_pin_position,
    manhattan,
)
from .placer import CentroidSolution, legalize_regions, quadratic_centroids

__all__ = [
    "NetModel",
    "CongestionMap",
    "CalibrationParams",
    "QorEstimate",
    "estimate_wirelength",
    "expected_wirelength",
    "congestion",
    "expected_congestion",
    "calibrate",
    "critical_path_length",
    "effective_frequency",
    "assess",
    "default_capacity_per_bin",
]


class NetModel(str, enum.Enum):
    BOUNDING_BOX = "bounding-box"
    STAR = "star"


@dataclass(frozen=True)
class CongestionMap:
    demand: np.ndarray  # (ny, nx) wire-um per bin
    bin_um: float
    capacity_per_bin: float
    overflow_count: int
    overflow_total: float  # wire-um above capacity, summed


@dataclass(frozen=True)
class CalibrationParams:
    """1000/f_mhz = d0_ns + k_ns_per_mm * critical_path_mm."""

    d0_ns: float
    k_ns_per_mm: float


@dataclass(frozen=True)
class QorEstimate:
    style: str
    q: float
    est_freq_mhz: float
    est_wl_m: float
    overflow_bins: int
    overflow_total: float
    mean_density: float
    peak_density: float
    feasible: bool


def _endpoint_positions(
    spec: ClusterSpec, layout: FloorplanLayout, centroids: CentroidSolution
) -> dict[str, tuple[float, float]]:
    pos: dict[str, tuple[float, float]] = dict(centroids.positions)
    for mp in layout.macros:
        side = spec.macro_by_id(mp.macro_id).port_side
        pos[mp.macro_id] = macro_pin_position(mp, side)
    for p in layout.io_pins:
        pos.setdefault(p.name, (p.x, p.y))
    return pos


def _net_points(spec, positions):
    """Flattened endpoint coordinates (CSR) plus per-net weights."""
    offsets = [0]
    xs: list[float] = []
    ys: list[float] = []
    weights = []
    for net in spec.nets:
        for ep in net.endpoints:
            try:
                x, y = positions[ep]
            except KeyError:
                raise UnresolvedEndpointError(
                    f"net {net.id!r} endpoint {ep!r} has no position in this layout"
                ) from None
            xs.append(x)
            ys.append(y)
        offsets.append(len(xs))
        weights.append(float(net.bit_width))
    return (
        np.asarray(offsets, dtype=np.intp),
        np.asarray(xs),
        np.asarray(ys),
        np.asarray(weights),
    )


def estimate_wirelength(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    regions: list[RegionPlacement],
    centroids: CentroidSolution,
    model: NetModel = NetModel.BOUNDING_BOX,
) -> float:
    """Bit-width-weighted net length in meters.

    Soft-module endpoints sit at their centroids (regions are accepted for
    interface parity but carry no extra information here); macros and io
    pins at their placed positions. The bounding-box model charges each net
    its half-perimeter; the star model the Manhattan sum from the endpoint
    barycenter.
    """
    positions = _endpoint_positions(spec, layout, centroids)
    offsets, xs, ys, weights = _net_points(spec, positions)
    if model is NetModel.BOUNDING_BOX or model == NetModel.BOUNDING_BOX.value:
        lengths = kernels.hpwl_batch(offsets, xs, ys)
    else:
        lengths = np.zeros(len(weights))
        for n in range(len(weights)):
            lo, hi = offsets[n], offsets[n + 1]
            sx = xs[lo:hi].mean()
            sy = ys[lo:hi].mean()
            lengths[n] = np.abs(xs[lo:hi] - sx).sum() + np.abs(ys[lo:hi] - sy).sum()
    return float(np.dot(weights, lengths)) * 1e-6  # um -> m


class _AxisCdf:
    """Piecewise-linear CDF of a rect union projected onto one axis.

    Sampling a point uniformly over the rects and projecting it onto the
    axis gives this distribution; extrema expectations over several such
    variables reduce to integrals of piecewise-polynomial products.
    """

    def __init__(self, edges: list[float], cum: list[float]):
        self.edges = edges
        self.cum = cum  # cum[i] = F(edges[i]); cum[0] = 0, cum[-1] = 1

    @classmethod
    def from_rects(cls, rects, axis: str) -> "_AxisCdf":
        if not rects:
            raise ValueError("empty rectangle set has no axis distribution")
        if axis == "x":
            spans = [(r.x, r.x2, r.y2 - r.y) for r in rects]
        else:
            spans = [(r.y, r.y2, r.x2 - r.x) for r in rects]
        edges = sorted({a for a, _, _ in spans} | {b for _, b, _ in spans})
        mass = []
        for lo, hi in zip(edges, edges[1:]):
            mid = 0.5 * (lo + hi)
            depth = sum(w for a, b, w in spans if a <= mid < b)
            mass.append(depth * (hi - lo))
        total = sum(mass)
        if total <= 0.0:
            raise ValueError("rectangle set has zero area")
        cum = [0.0]
        for m in mass:
            cum.append(cum[-1] + m / total)
        cum[-1] = 1.0
        return cls(edges, cum)

    def value(self, t: float) -> float:
        edges, cum = self.edges, self.cum
        if t <= edges[0]:
            return 0.0
        if t >= edges[-1]:
            return 1.0
        i = bisect.bisect_right(edges, t) - 1
        lo, hi = edges[i], edges[i + 1]
        if hi == lo:
            return cum[i + 1]
        frac = (t - lo) / (hi - lo)
        return cum[i] + frac * (cum[i + 1] - cum[i])


def _segments(cdfs: list[_AxisCdf], lo: float, hi: float):
    cuts = {lo, hi}
    for c in cdfs:
        cuts.update(e for e in c.edges if lo < e < hi)
    return sorted(cuts)


def _e_max(cdfs: list[_AxisCdf], fixed: float | None) -> float:
    """E[max of one point per CDF and an optional fixed coordinate].

    Between breakpoints every CDF is linear, so the product has degree
    len(cdfs) and Simpson's rule per segment integrates it exactly (the
    rule is exact through cubics; nets here carry at most two modules).
    """
    if not cdfs:
        if fixed is None:
            raise ValueError("no endpoints")
        return fixed
    top = max(c.edges[-1] for c in cdfs)
    start = max(c.edges[0] for c in cdfs)
    if fixed is not None:
        if fixed >= top:
            return fixed
        start = max(start, fixed)
    # E[max] = top - integral of P(max <= t) over [start, top]
    acc = 0.0
    pts = _segments(cdfs, start, top)
    for a, b in zip(pts, pts[1:]):
        m = 0.5 * (a + b)
        pa = pb = pm = 1.0
        for c in cdfs:
            pa *= c.value(a)
            pm *= c.value(m)
            pb *= c.value(b)
        acc += (b - a) * (pa + 4.0 * pm + pb) / 6.0
    return top - acc


def _e_min(cdfs: list[_AxisCdf], fixed: float | None) -> float:
    if not cdfs:
        if fixed is None:
            raise ValueError("no endpoints")
        return fixed
    bottom = min(c.edges[0] for c in cdfs)
    stop = min(c.edges[-1] for c in cdfs)
    if fixed is not None:
        if fixed <= bottom:
            return fixed
        stop = min(stop, fixed)
    # E[min] = bottom + integral of P(min > t) over [bottom, stop]
    acc = 0.0
    pts = _segments(cdfs, bottom, stop)
    for a, b in zip(pts, pts[1:]):
        m = 0.5 * (a + b)
        pa = pb = pm = 1.0
        for c in cdfs:
            pa *= 1.0 - c.value(a)
            pm *= 1.0 - c.value(m)
            pb *= 1.0 - c.value(b)
        acc += (b - a) * (pa + 4.0 * pm + pb) / 6.0
    return bottom + acc


def _expected_net_boxes(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    regions: list[RegionPlacement] | None = None,
):
    """Expected per-net bounding boxes under uniform cell-spread priors.

    Each soft-module endpoint is an independent uniform point; macro and io
    pins stay fixed. With regions given, the point spreads over that
    module's legalized region, which keeps the funnel through the
    crossbar's slab that every master-bank net shares. Without regions it
    spreads over the whole free area, which prices only the cell spread the
    target utilization forces. Converged centroids model neither: they
    collapse every module onto the net barycenter. Congestion needs the
    funnel, so it passes regions; wirelength orderings across aspect ratios
    match the routed reference under the area prior, so it does not.
    """
    if regions is None:
        fx = _AxisCdf.from_rects(free_space(layout), "x")
        fy = _AxisCdf.from_rects(free_space(layout), "y")
        cdfs = {m.id: (fx, fy) for m in spec.modules}
    else:
        cdfs = {
            reg.module_id: (
                _AxisCdf.from_rects(reg.rects, "x"),
                _AxisCdf.from_rects(reg.rects, "y"),
            )
            for reg in regions
        }
    pin: dict[str, tuple[float, float]] = {}
    for mp in layout.macros:
        side = spec.macro_by_id(mp.macro_id).port_side
        pin[mp.macro_id] = macro_pin_position(mp, side)
    for p in layout.io_pins:
        pin.setdefault(p.name, (p.x, p.y))
    module_ids = {m.id for m in spec.modules}
    boxes = np.empty((len(spec.nets), 4))
    weights = np.empty(len(spec.nets))
    for n, net in enumerate(spec.nets):
        xcdfs = []
        ycdfs = []
        fixed = []
        for e in set(net.endpoints):
            if e in module_ids:
                try:
                    cx, cy = cdfs[e]
                except KeyError:
                    raise UnresolvedEndpointError(
                        f"net {net.id!r} endpoint {e!r} has no legalized region"
                    ) from None
                xcdfs.append(cx)
                ycdfs.append(cy)
            else:
                try:
                    fixed.append(pin[e])
                except KeyError:
                    raise UnresolvedEndpointError(
                        f"net {net.id!r} endpoint {e!r} has no position in this layout"
                    ) from None
        fxs = [p[0] for p in fixed]
        fys = [p[1] for p in fixed]
        boxes[n, 0] = _e_min(xcdfs, min(fxs) if fxs else None)
        boxes[n, 1] = _e_min(ycdfs, min(fys) if fys else None)
        boxes[n, 2] = _e_max(xcdfs, max(fxs) if fxs else None)
        boxes[n, 3] = _e_max(ycdfs, max(fys) if fys else None)
        weights[n] = float(net.bit_width)
    return boxes, weights


def expected_wirelength(spec: ClusterSpec, layout: FloorplanLayout) -> float:
    """Bit-width-weighted expected HPWL in meters, area-spread prior.

    See _expected_net_boxes for the model. This is the variant recorded by
    assess and the sweep: unlike estimate_wirelength on converged centroids
    it prices the cell spread a real placement pays, which makes the square
    die the per-style minimum, as routed results have it.
    """
    boxes, weights = _expected_net_boxes(spec, layout)
    spans = (boxes[:, 2] - boxes[:, 0]) + (boxes[:, 3] - boxes[:, 1])
    return float(np.dot(weights, spans)) * 1e-6


def expected_congestion(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    regions: list[RegionPlacement],
    bin_um: float,
    capacity_per_bin: float | None = None,
    horizontal_share: float | None = None,
) -> CongestionMap:
    """Directional congestion under the region-spread expectation model.

    Each net spreads bit-width × expected x-span of horizontal wire and
    bit-width × expected y-span of vertical wire over its expected bounding
    box. Supply is split between the two directions by horizontal_share:
    routing stacks are anisotropic (power straps and pin escapes eat more
    of one direction), and the split is what separates a layout whose long
    hauls run with the scarce direction from its 90-degree mirror image.
    The stored demand grid is the direction sum; overflow is counted per
    direction against that direction's share of capacity_per_bin.
    """
    cfg = FloorplanConfig()
    if capacity_per_bin is None:
        capacity_per_bin = default_capacity_per_bin(bin_um, cfg.tracks_per_um)
    if horizontal_share is None:
        horizontal_share = cfg.horizontal_track_share
    if not 0.0 < horizontal_share < 1.0:
        raise ValueError("horizontal_share must be strictly between 0 and 1")
    boxes, weights = _expected_net_boxes(spec, layout, regions)
    die = layout.die
    nx = max(1, math.ceil(die.width_um / bin_um - 1e-9))
    ny = max(1, math.ceil(die.height_um / bin_um - 1e-9))
    args = (nx, ny, bin_um, boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3])
    grid_h = kernels.spread_demand(*args, weights * (boxes[:, 2] - boxes[:, 0]))
    grid_v = kernels.spread_demand(*args, weights * (boxes[:, 3] - boxes[:, 1]))
    cap_h = horizontal_share * capacity_per_bin
    cap_v = (1.0 - horizontal_share) * capacity_per_bin
    over_h = np.maximum(grid_h - cap_h, 0.0)
    over_v = np.maximum(grid_v - cap_v, 0.0)
    over = (over_h > 0.0) | (over_v > 0.0)
    return CongestionMap(
        demand=grid_h + grid_v,
        bin_um=bin_um,
        capacity_per_bin=capacity_per_bin,
        overflow_count=int(np.count_nonzero(over)),
        overflow_total=float(over_h.sum() + over_v.sum()),
    )


def default_capacity_per_bin(bin_um: float, tracks_per_um: float) -> float:
    """Routing supply of one bin: tracks/um × bin width, both directions."""
    return 2.0 * tracks_per_um * bin_um * bin_um


def congestion(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    regions: list[RegionPlacement],
    centroids: CentroidSolution,
    bin_um: float,
    capacity_per_bin: float | None = None,
) -> CongestionMap:
    """Bin-level routing demand vs a uniform per-bin capacity.

    Each net contributes bit-width × HPWL wire-um, spread over its bounding
    box area-proportionally, so the grid total equals the total demand.
    """
    if capacity_per_bin is None:
        cfg = FloorplanConfig()
        capacity_per_bin = default_capacity_per_bin(bin_um, cfg.tracks_per_um)
    positions = _endpoint_positions(spec, layout, centroids)
    offsets, xs, ys, weights = _net_points(spec, positions)
    die = layout.die
    nx = max(1, math.ceil(die.width_um / bin_um - 1e-9))
    ny = max(1, math.ceil(die.height_um / bin_um - 1e-9))
    if len(weights):
        starts = offsets[:-1]
        bx0 = np.minimum.reduceat(xs, starts)
        bx1 = np.maximum.reduceat(xs, starts)
        by0 = np.minimum.reduceat(ys, starts)
        by1 = np.maximum.reduceat(ys, starts)
        demand_per_net = weights * ((bx1 - bx0) + (by1 - by0))
        grid = kernels.spread_demand(nx, ny, bin_um, bx0, by0, bx1, by1, demand_per_net)
    else:
        grid = np.zeros((ny, nx))
    excess = grid - capacity_per_bin
    over = excess > 0.0
    return CongestionMap(
        demand=grid,
        bin_um=bin_um,
        capacity_per_bin=capacity_per_bin,
        overflow_count=int(np.count_nonzero(over)),
        overflow_total=float(excess[over].sum()) if over.any() else 0.0,
    )


FETCH_RETURN_WEIGHT = 0.5
"""Fraction of the instruction-return flight charged to the critical cycle.

The fetch interface runs ahead of execution, so only part of the cache-to-
core distance lands in the cycle that limits frequency. Half is a modeling
assumption; the bank access leg below carries no such discount.
"""


def _far_corner(rects, p: tuple[float, float]) -> float:
    """Largest Manhattan distance from p to any point of a rect union."""
    best = 0.0
    for r in rects:
        d = max(abs(r.x - p[0]), abs(r.x2 - p[0])) + max(abs(r.y - p[1]), abs(r.y2 - p[1]))
        if d > best:
            best = d
    return best


def critical_path_length(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    centroids: CentroidSolution,
    regions: list[RegionPlacement] | None = None,
) -> float:
    """Worst L1 access path in mm.

    The bank leg takes the maximum over single-cycle crossbar nets of the
    distance from the master's legalized region to the net's bank pin,
    measured at the region's far corner: the path must close from wherever
    inside the region the launching register ends up, so the centroid alone
    is optimistic (it hides that a tall die forces masters to spread along
    its full height). The instruction-return leg is the worst core-centroid
    to icache-pin distance, charged at FETCH_RETURN_WEIGHT.

    Regions are derived from the centroids when not supplied.
    """
    if regions is None:
        regions = legalize_regions(centroids, layout, spec)
    rects_by = {r.module_id: r.rects for r in regions}
    positions = _endpoint_positions(spec, layout, centroids)
    spm_ids = {m.id for m in spec.spm_macros()}

    worst_xbar = 0.0
    for net in spec.nets:
        if net.latency_class != "single-cycle":
            continue
        banks = [positions[e] for e in net.endpoints if e in spm_ids]
        if not banks:
            continue
        for ep in net.endpoints:
            rects = rects_by.get(ep)
            if not rects:
                continue
            for bp in banks:
                d = _far_corner(rects, bp)
                if d > worst_xbar:
                    worst_xbar = d

    worst_fetch = 0.0
    icache_pins = [positions[m.id] for m in spec.icache_macros() if m.id in positions]
    if icache_pins:
        for mod in spec.modules:
            if mod.kind != "compute-core":
                continue
            cp = positions[mod.id]
            for ip in icache_pins:
                d = manhattan(cp, ip)
                if d > worst_fetch:
                    worst_fetch = d
    return (worst_xbar + FETCH_RETURN_WEIGHT * worst_fetch) / 1000.0


def calibrate(
    spec: ClusterSpec, anchors: list[tuple[FloorplanLayout, float]]
) -> CalibrationParams:
    """Fit the linear delay model to (layout, measured MHz) operating points.

    Two anchors give an exact fit; more are fitted least-squares. Anchors
    whose critical paths coincide cannot identify the wire slope.
    """
    if len(anchors) < 2:
        raise CalibrationError("need at least two anchor operating points")
    ls = []
    ds = []
    for layout, mhz in anchors:
        cent = quadratic_centroids(spec, layout)
        ls.append(critical_path_length(spec, layout, cent))
        ds.append(1000.0 / mhz)
    spread = max(ls) - min(ls)
    if spread < 1e-9:
        raise CalibrationError(
            f"anchor critical paths all equal ({ls[0]:.6f} mm); slope is unidentifiable"
        )
    k, d0 = np.polyfit(np.asarray(ls), np.asarray(ds), 1)
    if d0 <= 0.0 or k < 0.0:
        raise CalibrationError(
            f"fit gave non-physical delay parameters d0={d0:.4f} ns, k={k:.4f} ns/mm"
        )
    return CalibrationParams(d0_ns=float(d0), k_ns_per_mm=float(k))


def effective_frequency(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    centroids: CentroidSolution,
    cal: CalibrationParams,
    regions: list[RegionPlacement] | None = None,
) -> float:
    """Delay-model frequency, capped at the spec target."""
    path = critical_path_length(spec, layout, centroids, regions)
    period = cal.d0_ns + cal.k_ns_per_mm * path
    return min(spec.target_freq_mhz, 1000.0 / period)


def assess(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    regions: list[RegionPlacement],
    centroids: CentroidSolution,
    cal: CalibrationParams,
    cfg: FloorplanConfig | None = None,
    geometry_ok: bool = True,
) -> QorEstimate:
    """Bundle all proxy metrics for one placed instance.

    Wirelength and congestion are recorded under the area-spread expectation
    model (see _expected_net_boxes); frequency uses the legalized regions and
    converged centroids. Feasibility means the congestion overflow stays
    within the configured bin budget and the geometric placement succeeded.
    """
    from .placer import density_map  # local import to keep module load light

    cfg = cfg or FloorplanConfig()
    wl = expected_wirelength(spec, layout)
    cong = expected_congestion(
        spec,
        layout,
        regions,
        cfg.congestion_bin_um,
        default_capacity_per_bin(cfg.congestion_bin_um, cfg.tracks_per_um),
        cfg.horizontal_track_share,
    )
    dm = density_map(regions, layout, cfg.density_bin_um, spec.target_utilization)
    freq = effective_frequency(spec, layout, centroids, cal, regions)
    feasible = geometry_ok and cong.overflow_count <= cfg.max_overflow_bins
    return QorEstimate(
        style=layout.style,
        q=layout.die.aspect,
        est_freq_mhz=freq,
        est_wl_m=wl,
        overflow_bins=cong.overflow_count,
        overflow_total=cong.overflow_total,
        mean_density=dm.mean_density,
        peak_density=dm.peak_density,
        feasible=feasible,
    )
