#!/usr/bin/env python3
"""Time each numeric kernel on both backends.

Run after an editable install (`pip install -e . --no-build-isolation`);
without the compiled extension only the numpy column appears. Sizes mirror
the real workload: the default cluster has ~2.6k endpoints over ~900 nets,
density rasters run at 10 um bins over a ~950 um die.

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from softtile import kernels
from softtile.kernels import reference

REPEATS = 5


def _best_of(fn, *args) -> float:
    best = float("inf")
    for _ in range(REPEATS):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _star_problem(rng, n_mods=200, n_nets=2000):
    ep_net, ep_mod, fanout = [], [], []
    net_fx = np.zeros(n_nets)
    net_fy = np.zeros(n_nets)
    for n in range(n_nets):
        k_mov = int(rng.integers(1, 4))
        k_fix = max(2 - k_mov, int(rng.integers(0, 3)))
        for m in rng.integers(0, n_mods, k_mov):
            ep_net.append(n)
            ep_mod.append(int(m))
        net_fx[n] = k_fix * rng.uniform(0.0, 900.0)
        net_fy[n] = k_fix * rng.uniform(0.0, 900.0)
        fanout.append(k_mov + k_fix)
    net_w = rng.uniform(0.5, 64.0, n_nets)
    net_inv_k = 1.0 / np.array(fanout, dtype=np.float64)
    ep_net = np.array(ep_net, dtype=np.int64)
    ep_mod = np.array(ep_mod, dtype=np.int64)
    mod_wsum = np.bincount(ep_mod, weights=net_w[ep_net], minlength=n_mods)
    mod_self = np.bincount(ep_mod, weights=net_w[ep_net] * net_inv_k[ep_net], minlength=n_mods)
    x0 = rng.uniform(0.0, 900.0, n_mods)
    y0 = rng.uniform(0.0, 900.0, n_mods)
    return (x0, y0, ep_net, ep_mod, net_w, net_inv_k, net_fx, net_fy, mod_wsum, mod_self, 1e-9, 2000)


def _net_batch(rng, n_nets=20000):
    counts = rng.integers(2, 9, n_nets)
    offsets = np.zeros(n_nets + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    total = int(offsets[-1])
    return offsets, rng.uniform(0.0, 950.0, total), rng.uniform(0.0, 950.0, total)


def _rect_batch(rng, n=5000, extent=950.0):
    x0 = rng.uniform(0.0, extent * 0.9, n)
    y0 = rng.uniform(0.0, extent * 0.9, n)
    x1 = np.minimum(x0 + rng.uniform(1.0, extent * 0.2, n), extent)
    y1 = np.minimum(y0 + rng.uniform(1.0, extent * 0.2, n), extent)
    return x0, y0, x1, y1


def main() -> None:
    rng = np.random.default_rng(20260815)
    star = _star_problem(rng)
    offsets, xs, ys = _net_batch(rng)
    rx0, ry0, rx1, ry1 = _rect_batch(rng)
    scale = rng.uniform(0.1, 2.0, rx0.shape[0])
    demand = rng.uniform(1.0, 512.0, rx0.shape[0])

    cases = [
        ("solve_star (200 mod, 2k nets)", "solve_star", star),
        ("hpwl_batch (20k nets)", "hpwl_batch", (offsets, xs, ys)),
        ("raster_area (5k rects, 95x95)", "raster_area", (95, 95, 10.0, rx0, ry0, rx1, ry1, scale)),
        ("spread_demand (5k boxes, 48x48)", "spread_demand", (48, 48, 20.0, rx0, ry0, rx1, ry1, demand)),
    ]

    compiled = None
    if "compiled" in kernels.available_backends():
        from softtile.kernels import _core

        compiled = _core

    print(f"{'kernel':36} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for label, name, args in cases:
        t_ref = _best_of(getattr(reference, name), *args)
        if compiled is None:
            print(f"{label:36} {t_ref * 1e3:8.2f} ms {'-':>10} {'-':>8}")
            continue
        t_fast = _best_of(getattr(compiled, name), *args)
        print(f"{label:36} {t_ref * 1e3:8.2f} ms {t_fast * 1e3:7.2f} ms {t_ref / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
