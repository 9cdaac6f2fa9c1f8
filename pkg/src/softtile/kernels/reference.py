"""Pure-numpy reference implementations of the numeric kernels.

These are the semantic ground truth; the compiled backend must match them.
Shapes and conventions:

- Star systems are flattened: entry i couples net ``ep_net[i]`` to movable
  module ``ep_mod[i]``. Nets carry weight ``net_w``, reciprocal endpoint
  count ``net_inv_k`` and fixed-endpoint coordinate sums ``net_fx/fy``.
  Per-module ``mod_wsum`` is the total coupled weight and ``mod_self`` the
  self-coupling through net stars; ``mod_wsum - mod_self`` is the Jacobi
  diagonal and must be positive.
- Batched nets are flattened with an offsets array (CSR style).
- Grids are (ny, nx) float64, row 0 at the south edge.
"""

from __future__ import annotations

import math

import numpy as np


def solve_star(
    x0,
    y0,
    ep_net,
    ep_mod,
    net_w,
    net_inv_k,
    net_fx,
    net_fy,
    mod_wsum,
    mod_self,
    rtol,
    max_iters,
):
    """Jacobi relaxation on the star-model normal equations.

    Returns (x, y, iterations, initial_gradient_norm, final_gradient_norm).
    The gradient norm is measured at the returned positions; iteration stops
    at the first iterate whose norm falls to rtol times the initial norm.
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    y = np.array(y0, dtype=np.float64, copy=True)
    n_nets = net_w.shape[0]
    n_mods = x.shape[0]
    ep_w = net_w[ep_net]
    diag = mod_wsum - mod_self

    g0 = 0.0
    gnorm = 0.0
    iters = 0
    for it in range(max_iters + 1):
        sx = np.bincount(ep_net, weights=x[ep_mod], minlength=n_nets)
        sy = np.bincount(ep_net, weights=y[ep_mod], minlength=n_nets)
        star_x = (sx + net_fx) * net_inv_k
        star_y = (sy + net_fy) * net_inv_k
        pull_x = np.bincount(ep_mod, weights=ep_w * star_x[ep_net], minlength=n_mods)
        pull_y = np.bincount(ep_mod, weights=ep_w * star_y[ep_net], minlength=n_mods)
        # Difference-first gradient: summing w·(x_a − s_n) per endpoint stays
        # accurate near convergence, where x·Σw and the pull would cancel.
        gx = 2.0 * np.bincount(ep_mod, weights=ep_w * (x[ep_mod] - star_x[ep_net]), minlength=n_mods)
        gy = 2.0 * np.bincount(ep_mod, weights=ep_w * (y[ep_mod] - star_y[ep_net]), minlength=n_mods)
        gnorm = math.sqrt(float(np.dot(gx, gx) + np.dot(gy, gy)))
        if it == 0:
            g0 = gnorm
        iters = it
        if gnorm <= rtol * g0 or it == max_iters:
            break
        x = (pull_x - mod_self * x) / diag
        y = (pull_y - mod_self * y) / diag
    return x, y, iters, g0, gnorm


def hpwl_batch(offsets, xs, ys):
    """Half-perimeter wirelength per net; endpoints flattened CSR-style."""
    starts = offsets[:-1]
    if starts.shape[0] == 0:
        return np.zeros(0, dtype=np.float64)
    dx = np.maximum.reduceat(xs, starts) - np.minimum.reduceat(xs, starts)
    dy = np.maximum.reduceat(ys, starts) - np.minimum.reduceat(ys, starts)
    return dx + dy


def _axis_overlap(lo, hi, bin_um, count):
    """Per-bin overlap lengths of span [lo, hi] with a 1-D bin row."""
    b0 = min(max(int(lo / bin_um), 0), count - 1)
    b1 = min(max(int(math.ceil(hi / bin_um)) - 1, b0), count - 1)
    idx = np.arange(b0, b1 + 1)
    left = np.maximum(idx * bin_um, lo)
    right = np.minimum((idx + 1) * bin_um, hi)
    return b0, np.maximum(right - left, 0.0)


def raster_area(nx, ny, bin_um, rx0, ry0, rx1, ry1, scale):
    """Accumulate scaled rectangle area into a grid (area overlap × scale)."""
    grid = np.zeros((ny, nx), dtype=np.float64)
    for i in range(rx0.shape[0]):
        if rx1[i] <= rx0[i] or ry1[i] <= ry0[i]:
            continue
        cx0, wx = _axis_overlap(rx0[i], rx1[i], bin_um, nx)
        cy0, wy = _axis_overlap(ry0[i], ry1[i], bin_um, ny)
        grid[cy0 : cy0 + wy.shape[0], cx0 : cx0 + wx.shape[0]] += scale[i] * np.outer(wy, wx)
    return grid


def spread_demand(nx, ny, bin_um, bx0, by0, bx1, by1, demand):
    """Distribute each net's demand over its bounding box, area-proportional.

    Degenerate (zero-extent) axes collapse to the single bin row/column that
    contains the coordinate. Total grid sum equals the total demand.
    """
    grid = np.zeros((ny, nx), dtype=np.float64)
    for i in range(bx0.shape[0]):
        cx0, wx = _axis_overlap(bx0[i], max(bx1[i], bx0[i]), bin_um, nx)
        cy0, wy = _axis_overlap(by0[i], max(by1[i], by0[i]), bin_um, ny)
        tx = wx.sum()
        ty = wy.sum()
        fx = wx / tx if tx > 0.0 else np.ones_like(wx)
        fy = wy / ty if ty > 0.0 else np.ones_like(wy)
        grid[cy0 : cy0 + wy.shape[0], cx0 : cx0 + wx.shape[0]] += demand[i] * np.outer(fy, fx)
    return grid
