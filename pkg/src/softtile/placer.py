"""Quadratic centroid placement and region legalization for soft modules.

Centroids minimize the star-decomposed quadratic wirelength: every net
contributes w · Σ_endpoints ‖c_e − s‖² where s is the barycenter of all its
endpoints and w the bit width. Macro pins and io pins are fixed anchors;
soft modules move. The normal equations are relaxed with Jacobi updates
from a deterministic die-center start, so results are reproducible and
translation-equivariant.

Legalization carves vertical slabs out of the layout's free space, nearest
each module's centroid, until every module holds area / target-utilization.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cluster import ClusterSpec
from .errors import OverUtilizationError, UnresolvedEndpointError
from .geometry import (
    COORD_TOL,
    FloorplanLayout,
    Rect,
    RegionPlacement,
    free_space,
    macro_pin_position,
)

__all__ = [
    "CentroidSolution",
    "DensityMap",
    "quadratic_centroids",
    "legalize_regions",
    "density_map",
    "star_objective",
    "star_gradient",
]

# Residual area below which a module's demand counts as satisfied (um^2).
_AREA_TOL = 1e-6


@dataclass(frozen=True)
class CentroidSolution:
    """Converged module centroids plus solver diagnostics."""

    positions: dict[str, tuple[float, float]]
    residual: float  # gradient norm at the returned centroids
    initial_residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class DensityMap:
    """Per-bin standard-cell utilization of the placeable (non-macro) area."""

    grid: np.ndarray  # (ny, nx), row 0 at the south edge
    bin_um: float
    mean_density: float  # area-weighted over placeable bins
    peak_density: float


class _StarSystem:
    """Flattened star-model arrays for one spec/layout pair."""

    def __init__(self, spec: ClusterSpec, layout: FloorplanLayout):
        self.module_ids = [m.id for m in spec.modules]
        index = {mid: i for i, mid in enumerate(self.module_ids)}
        pins = {p.name: (p.x, p.y) for p in layout.io_pins}
        macro_pin = {}
        for mp in layout.macros:
            side = spec.macro_by_id(mp.macro_id).port_side
            macro_pin[mp.macro_id] = macro_pin_position(mp, side)

        ep_net: list[int] = []
        ep_mod: list[int] = []
        net_w: list[float] = []
        net_inv_k: list[float] = []
        net_fx: list[float] = []
        net_fy: list[float] = []
        for n, net in enumerate(spec.nets):
            fx = fy = 0.0
            for ep in net.endpoints:
                if ep in index:
                    ep_net.append(n)
                    ep_mod.append(index[ep])
                elif ep in macro_pin:
                    px, py = macro_pin[ep]
                    fx += px
                    fy += py
                elif ep in pins:
                    px, py = pins[ep]
                    fx += px
                    fy += py
                else:
                    raise UnresolvedEndpointError(
                        f"net {net.id!r} endpoint {ep!r} is neither a module, "
                        f"a placed macro, nor an io pin of this layout"
                    )
            net_w.append(float(net.bit_width))
            net_inv_k.append(1.0 / len(net.endpoints))
            net_fx.append(fx)
            net_fy.append(fy)

        self.ep_net = np.asarray(ep_net, dtype=np.intp)
        self.ep_mod = np.asarray(ep_mod, dtype=np.intp)
        self.net_w = np.asarray(net_w, dtype=np.float64)
        self.net_inv_k = np.asarray(net_inv_k, dtype=np.float64)
        self.net_fx = np.asarray(net_fx, dtype=np.float64)
        self.net_fy = np.asarray(net_fy, dtype=np.float64)

        n_mods = len(self.module_ids)
        mult = Counter(zip(ep_net, ep_mod))
        wsum = np.zeros(n_mods)
        self_c = np.zeros(n_mods)
        for (n, a), m in mult.items():
            wsum[a] += self.net_w[n] * m
            self_c[a] += self.net_w[n] * m * m * self.net_inv_k[n]
        self.mod_wsum = wsum
        self.mod_self = self_c
        self.isolated = [mid for i, mid in enumerate(self.module_ids) if wsum[i] == 0.0]

    def movable_mask(self) -> np.ndarray:
        return self.mod_wsum > 0.0


def _positions_arrays(system: _StarSystem, positions: dict[str, tuple[float, float]]):
    x = np.array([positions[mid][0] for mid in system.module_ids])
    y = np.array([positions[mid][1] for mid in system.module_ids])
    return x, y


def star_objective(
    spec: ClusterSpec, layout: FloorplanLayout, positions: dict[str, tuple[float, float]]
) -> float:
    """Quadratic star wirelength of the given centroid assignment."""
    s = _StarSystem(spec, layout)
    x, y = _positions_arrays(s, positions)
    n_nets = s.net_w.shape[0]
    sx = np.bincount(s.ep_net, weights=x[s.ep_mod], minlength=n_nets)
    sy = np.bincount(s.ep_net, weights=y[s.ep_mod], minlength=n_nets)
    star_x = (sx + s.net_fx) * s.net_inv_k
    star_y = (sy + s.net_fy) * s.net_inv_k
    # movable endpoint terms
    dxm = x[s.ep_mod] - star_x[s.ep_net]
    dym = y[s.ep_mod] - star_y[s.ep_net]
    total = float(np.sum(s.net_w[s.ep_net] * (dxm * dxm + dym * dym)))
    # fixed endpoint terms, recomputed per net
    pins = {p.name: (p.x, p.y) for p in layout.io_pins}
    macro_pin = {
        mp.macro_id: macro_pin_position(mp, spec.macro_by_id(mp.macro_id).port_side)
        for mp in layout.macros
    }
    module_ids = set(s.module_ids)
    for n, net in enumerate(spec.nets):
        for ep in net.endpoints:
            if ep in module_ids:
                continue
            px, py = macro_pin[ep] if ep in macro_pin else pins[ep]
            total += s.net_w[n] * ((px - star_x[n]) ** 2 + (py - star_y[n]) ** 2)
    return total


def star_gradient(
    spec: ClusterSpec, layout: FloorplanLayout, positions: dict[str, tuple[float, float]]
) -> dict[str, tuple[float, float]]:
    """Analytic gradient of star_objective w.r.t. each module centroid."""
    s = _StarSystem(spec, layout)
    x, y = _positions_arrays(s, positions)
    n_nets = s.net_w.shape[0]
    n_mods = x.shape[0]
    sx = np.bincount(s.ep_net, weights=x[s.ep_mod], minlength=n_nets)
    sy = np.bincount(s.ep_net, weights=y[s.ep_mod], minlength=n_nets)
    star_x = (sx + s.net_fx) * s.net_inv_k
    star_y = (sy + s.net_fy) * s.net_inv_k
    ep_w = s.net_w[s.ep_net]
    # Difference-first form; see kernels.reference.solve_star.
    gx = 2.0 * np.bincount(s.ep_mod, weights=ep_w * (x[s.ep_mod] - star_x[s.ep_net]), minlength=n_mods)
    gy = 2.0 * np.bincount(s.ep_mod, weights=ep_w * (y[s.ep_mod] - star_y[s.ep_net]), minlength=n_mods)
    return {mid: (float(gx[i]), float(gy[i])) for i, mid in enumerate(s.module_ids)}


def quadratic_centroids(
    spec: ClusterSpec,
    layout: FloorplanLayout,
    rtol: float = 1e-9,
    max_iters: int = 10_000,
) -> CentroidSolution:
    """Relax module centroids from the die center until the gradient norm
    falls to `rtol` times its initial value (or the iteration cap).

    Modules touched by no net cannot move the objective; they stay at the
    die center and a warning names them.
    """
    system = _StarSystem(spec, layout)
    die = layout.die
    cx0, cy0 = die.width_um / 2.0, die.height_um / 2.0
    if system.isolated:
        warnings.warn(
            "modules with no nets stay at the die center: "
            + ", ".join(sorted(system.isolated)),
            stacklevel=2,
        )

    mask = system.movable_mask()
    n_mods = len(system.module_ids)
    x = np.full(n_mods, cx0)
    y = np.full(n_mods, cy0)
    if mask.any():
        sub = np.flatnonzero(mask)
        remap = -np.ones(n_mods, dtype=np.intp)
        remap[sub] = np.arange(sub.shape[0])
        keep = mask[system.ep_mod]
        xs, ys, iters, g0, gfin = kernels.solve_star(
            x[sub],
            y[sub],
            system.ep_net[keep],
            remap[system.ep_mod[keep]],
            system.net_w,
            system.net_inv_k,
            system.net_fx,
            system.net_fy,
            system.mod_wsum[sub],
            system.mod_self[sub],
            rtol,
            max_iters,
        )
        x[sub] = xs
        y[sub] = ys
    else:
        iters, g0, gfin = 0, 0.0, 0.0

    np.clip(x, 0.0, die.width_um, out=x)
    np.clip(y, 0.0, die.height_um, out=y)
    positions = {mid: (float(x[i]), float(y[i])) for i, mid in enumerate(system.module_ids)}
    converged = g0 == 0.0 or gfin <= rtol * g0
    return CentroidSolution(
        positions=positions,
        residual=gfin,
        initial_residual=g0,
        iterations=iters,
        converged=converged,
    )


def legalize_regions(
    centroids: CentroidSolution, layout: FloorplanLayout, spec: ClusterSpec
) -> list[RegionPlacement]:
    """Carve per-module regions out of the layout's free space.

    Modules are visited in (centroid x, id) order. Each claims the free
    rectangle nearest its centroid and cuts a full-height vertical slab,
    centered on its centroid where the rectangle allows, until it holds
    area / target-utilization; remainders return to the pool.
    """
    util = spec.target_utilization
    pool = sorted(free_space(layout), key=lambda r: (r.x, r.y))
    available = sum(r.area for r in pool)
    demands = {m.id: m.area_um2 / util for m in spec.modules}
    total_demand = sum(demands.values())
    if total_demand > available + _AREA_TOL:
        raise OverUtilizationError(
            f"soft modules demand {total_demand:.1f} um^2 of placeable area "
            f"but the layout offers {available:.1f} um^2"
        )

    order = sorted(spec.modules, key=lambda m: (centroids.positions[m.id][0], m.id))
    regions: list[RegionPlacement] = []
    for module in order:
        cx, cy = centroids.positions[module.id]
        need = demands[module.id]
        rects: list[Rect] = []
        while need > _AREA_TOL:
            if not pool:
                raise OverUtilizationError(
                    f"free space exhausted while placing {module.id!r}; "
                    f"{need:.1f} um^2 still unassigned"
                )
            best = min(
                range(len(pool)),
                key=lambda i: (math.hypot(pool[i].cx - cx, pool[i].cy - cy), pool[i].x, pool[i].y),
            )
            r = pool.pop(best)
            if need >= r.area - _AREA_TOL:
                rects.append(r)
                need -= r.area
                continue
            width = need / r.h
            x0 = min(max(cx - width / 2.0, r.x), r.x2 - width)
            slab = Rect(x0, r.y, width, r.h)
            rects.append(slab)
            need = 0.0
            if x0 - r.x > COORD_TOL:
                pool.append(Rect(r.x, r.y, x0 - r.x, r.h))
            if r.x2 - (x0 + width) > COORD_TOL:
                pool.append(Rect(x0 + width, r.y, r.x2 - (x0 + width), r.h))
        regions.append(RegionPlacement(module.id, rects))
    return regions


def density_map(
    regions: list[RegionPlacement],
    layout: FloorplanLayout,
    bin_um: float,
    utilization: float = 0.575,
) -> DensityMap:
    """Rasterize region cell area over the placeable area per bin.

    `utilization` is the fraction of region area occupied by standard
    cells (pass the spec's target utilization). Placeable bin area is the
    die minus halo-dilated macro coverage; bins fully under macros report
    zero.
    """
    die = layout.die
    nx = max(1, math.ceil(die.width_um / bin_um - COORD_TOL))
    ny = max(1, math.ceil(die.height_um / bin_um - COORD_TOL))

    def clip(r: Rect) -> tuple[float, float, float, float]:
        return (
            max(r.x, 0.0),
            max(r.y, 0.0),
            min(r.x2, die.width_um),
            min(r.y2, die.height_um),
        )

    die_cov = kernels.raster_area(
        nx,
        ny,
        bin_um,
        np.array([0.0]),
        np.array([0.0]),
        np.array([die.width_um]),
        np.array([die.height_um]),
        np.array([1.0]),
    )
    if layout.macros:
        mx0, my0, mx1, my1 = (
            np.array(v)
            for v in zip(*(clip(m.rect.dilated(layout.halo_um)) for m in layout.macros))
        )
        macro_cov = kernels.raster_area(nx, ny, bin_um, mx0, my0, mx1, my1, np.ones(len(layout.macros)))
    else:
        macro_cov = np.zeros_like(die_cov)
    placeable = np.maximum(die_cov - macro_cov, 0.0)

    rect_list = [r for reg in regions for r in reg.rects]
    if rect_list:
        rx0, ry0, rx1, ry1 = (np.array(v) for v in zip(*(clip(r) for r in rect_list)))
        cell = kernels.raster_area(nx, ny, bin_um, rx0, ry0, rx1, ry1, np.full(len(rect_list), utilization))
    else:
        cell = np.zeros_like(die_cov)

    with np.errstate(invalid="ignore", divide="ignore"):
        grid = np.where(placeable > _AREA_TOL, cell / np.maximum(placeable, _AREA_TOL), 0.0)
    np.clip(grid, 0.0, 1.0, out=grid)
    placeable_total = float(placeable.sum())
    mean = float(cell.sum() / placeable_total) if placeable_total > 0 else 0.0
    peak = float(grid.max()) if grid.size else 0.0
    return DensityMap(grid=grid, bin_um=bin_um, mean_density=mean, peak_density=peak)
