"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the package's own numeric paths: the
placer is checked against a dense linear solve and exact rational finite
differences, the exponent selector against an exhaustive grid sweep.
"""

import math
from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np

from softtile.geometry import macro_pin_position
from softtile.placer import _StarSystem


def grid_select_p(spec, die, cfg, step=0.01, p_min=0.05, p_max=8.0):
    """Exhaustive exponent sweep: best (f1, -ncols, p), None if nothing fits."""
    spm = spec.spm_macros()
    halo = cfg.halo_um
    sw = max(m.width_um for m in spm) + 2 * halo
    sh = max(m.height_um for m in spm) + 2 * halo
    hh = die.height_um / (2 * sh)
    cap = int(hh + 1e-9)
    max_cols = int(die.width_um / sw + 1e-9) - (1 if spec.icache_macros() else 0)
    budget = len(spm) // 2
    best = None
    k = 0
    while True:
        p = p_min + step * k
        k += 1
        if p > p_max + 1e-12:
            break
        left = budget
        heights = []
        ok = True
        n = 0
        while left > 0:
            n += 1
            rows = math.floor((n / hh) ** (-p) + 0.5)
            if not 1 <= rows <= cap:
                ok = False
                break
            heights.append(min(rows, left))
            left -= heights[-1]
        if not ok or len(heights) > max_cols:
            continue
        key = (heights[0], -len(heights), p)
        if best is None or key > best[0]:
            best = (key, p)
    return None if best is None else best[1]


def dense_star_solve(spec, layout):
    """Assemble the star-model normal equations densely and solve directly."""
    s = _StarSystem(spec, layout)
    n = len(s.module_ids)
    A = np.zeros((n, n))
    bx = np.zeros(n)
    by = np.zeros(n)
    per_net = defaultdict(list)
    for e in range(len(s.ep_net)):
        per_net[int(s.ep_net[e])].append(int(s.ep_mod[e]))
    for nn in range(len(s.net_w)):
        w = s.net_w[nn]
        invk = s.net_inv_k[nn]
        cnt = Counter(per_net.get(nn, []))
        for a, ma in cnt.items():
            A[a, a] += w * (ma - ma * ma * invk)
            for b, mb in cnt.items():
                if b != a:
                    A[a, b] -= w * ma * mb * invk
            bx[a] += w * ma * invk * s.net_fx[nn]
            by[a] += w * ma * invk * s.net_fy[nn]
    idx = np.flatnonzero(s.mod_wsum > 0)
    sub = np.ix_(idx, idx)
    xs = np.linalg.solve(A[sub], bx[idx])
    ys = np.linalg.solve(A[sub], by[idx])
    return {s.module_ids[i]: (xs[j], ys[j]) for j, i in enumerate(idx)}


def fraction_fd_gradient(spec, layout, positions, h=Fraction(1, 1000)):
    """Central finite differences of the star objective in exact arithmetic.

    The objective is quadratic, so the central difference equals the true
    gradient exactly. Only nets incident to the perturbed module enter each
    difference; the remaining terms cancel identically.
    """
    pins = {p.name: (Fraction(p.x), Fraction(p.y)) for p in layout.io_pins}
    mpin = {}
    for mp in layout.macros:
        side = spec.macro_by_id(mp.macro_id).port_side
        px, py = macro_pin_position(mp, side)
        mpin[mp.macro_id] = (Fraction(px), Fraction(py))
    pos = {k: (Fraction(v[0]), Fraction(v[1])) for k, v in positions.items()}
    incident = defaultdict(list)
    for net in spec.nets:
        for ep in net.endpoints:
            if ep in pos:
                incident[ep].append(net)

    def net_cost(net, p_over):
        pts = [
            p_over[ep] if ep in p_over else (mpin[ep] if ep in mpin else pins[ep])
            for ep in net.endpoints
        ]
        k = len(pts)
        sx = sum(p[0] for p in pts) / k
        sy = sum(p[1] for p in pts) / k
        return net.bit_width * sum((p[0] - sx) ** 2 + (p[1] - sy) ** 2 for p in pts)

    grad = {}
    for mid in positions:
        nets = incident.get(mid, [])
        comps = []
        for axis in (0, 1):
            bx, by = pos[mid]
            plus = dict(pos)
            minus = dict(pos)
            plus[mid] = (bx + h, by) if axis == 0 else (bx, by + h)
            minus[mid] = (bx - h, by) if axis == 0 else (bx, by - h)
            d = sum(net_cost(n, plus) - net_cost(n, minus) for n in nets)
            comps.append(d / (2 * h))
        grad[mid] = tuple(comps)
    return grad


def gradient_rel_error(grad_fd, grad_an):
    """L2-relative deviation of the analytic gradient from the exact one."""
    num = 0.0
    den = 0.0
    for k, (fx, fy) in grad_fd.items():
        ax, ay = grad_an[k]
        num += (float(fx) - ax) ** 2 + (float(fy) - ay) ** 2
        den += float(fx) ** 2 + float(fy) ** 2
    return math.sqrt(num) / math.sqrt(den) if den else 0.0


def brute_hpwl(points):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (max(xs) - min(xs)) + (max(ys) - min(ys))


def sample_rect_union(rng, rects, n):
    """n points uniform over a rect union: pick a rect by area, then inside."""
    areas = np.array([r.area for r in rects], dtype=float)
    pick = rng.choice(len(rects), size=n, p=areas / areas.sum())
    xs = np.empty(n)
    ys = np.empty(n)
    for i, r in enumerate(rects):
        m = pick == i
        k = int(m.sum())
        xs[m] = rng.uniform(r.x, r.x2, k)
        ys[m] = rng.uniform(r.y, r.y2, k)
    return xs, ys


def sampled_expected_box(rng, rect_sets, fixed, n=200_000):
    """Monte Carlo expected bounding box of one uniform point per rect union
    plus the given fixed points: (E min x, E min y, E max x, E max y)."""
    xs = [np.full(n, p[0]) for p in fixed]
    ys = [np.full(n, p[1]) for p in fixed]
    for rects in rect_sets:
        sx, sy = sample_rect_union(rng, rects, n)
        xs.append(sx)
        ys.append(sy)
    X = np.vstack(xs)
    Y = np.vstack(ys)
    return (
        float(X.min(axis=0).mean()),
        float(Y.min(axis=0).mean()),
        float(X.max(axis=0).mean()),
        float(Y.max(axis=0).mean()),
    )


def corner_far_distance(rects, p):
    """Largest Manhattan distance from p over all rect corners, exhaustively."""
    return max(
        abs(cx - p[0]) + abs(cy - p[1])
        for r in rects
        for cx in (r.x, r.x2)
        for cy in (r.y, r.y2)
    )


def brute_critical_path(spec, layout, centroids, regions, fetch_weight):
    """Plain-loop worst access path in mm.

    Far-corner distance from each single-cycle master region to its bank
    pins (corner enumeration, not the per-axis decomposition), plus
    fetch_weight times the worst core-centroid-to-icache-pin distance.
    """
    pin = {}
    for mp in layout.macros:
        side = spec.macro_by_id(mp.macro_id).port_side
        pin[mp.macro_id] = macro_pin_position(mp, side)
    rects_by = {r.module_id: r.rects for r in regions}
    spm = {m.id for m in spec.spm_macros()}
    worst = 0.0
    for net in spec.nets:
        if net.latency_class != "single-cycle":
            continue
        banks = [pin[e] for e in net.endpoints if e in spm]
        for e in net.endpoints:
            if e in rects_by and rects_by[e]:
                for bp in banks:
                    worst = max(worst, corner_far_distance(rects_by[e], bp))
    fetch = 0.0
    ic_pins = [pin[m.id] for m in spec.icache_macros() if m.id in pin]
    for mod in spec.modules:
        if mod.kind != "compute-core":
            continue
        cx, cy = centroids.positions[mod.id]
        for px, py in ic_pins:
            fetch = max(fetch, abs(cx - px) + abs(cy - py))
    return (worst + fetch_weight * fetch) / 1000.0
