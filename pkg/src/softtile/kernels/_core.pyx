# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled twins of the numpy reference kernels.

Same signatures, same conventions, same accumulation order wherever the
result feeds a digest or a stopping test; see reference.py for the
documented semantics. Loops are written against flat memoryviews so the
hot paths (the Jacobi sweep and the per-rectangle rasterizers) run without
Python object traffic.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, sqrt

cnp.import_array()


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
    double rtol,
    long max_iters,
):
    """Jacobi relaxation on the star-model normal equations.

    Returns (x, y, iterations, initial_gradient_norm, final_gradient_norm),
    matching the reference backend.
    """
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    y_arr = np.array(y0, dtype=np.float64, copy=True)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef cnp.int64_t[::1] enet = np.ascontiguousarray(ep_net, dtype=np.int64)
    cdef cnp.int64_t[::1] emod = np.ascontiguousarray(ep_mod, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(net_w, dtype=np.float64)
    cdef double[::1] inv_k = np.ascontiguousarray(net_inv_k, dtype=np.float64)
    cdef double[::1] fx = np.ascontiguousarray(net_fx, dtype=np.float64)
    cdef double[::1] fy = np.ascontiguousarray(net_fy, dtype=np.float64)
    cdef double[::1] wsum = np.ascontiguousarray(mod_wsum, dtype=np.float64)
    cdef double[::1] wself = np.ascontiguousarray(mod_self, dtype=np.float64)

    cdef Py_ssize_t n_eps = enet.shape[0]
    cdef Py_ssize_t n_nets = w.shape[0]
    cdef Py_ssize_t n_mods = x.shape[0]

    cdef double[::1] sx = np.empty(n_nets)
    cdef double[::1] sy = np.empty(n_nets)
    cdef double[::1] pull_x = np.empty(n_mods)
    cdef double[::1] pull_y = np.empty(n_mods)
    cdef double[::1] gx = np.empty(n_mods)
    cdef double[::1] gy = np.empty(n_mods)
    cdef double[::1] diag = np.empty(n_mods)

    cdef Py_ssize_t e, n, m, it
    cdef long iters = 0
    cdef double g0 = 0.0, gnorm = 0.0, acc, we, gm
    cdef cnp.int64_t nid, mid

    for m in range(n_mods):
        diag[m] = wsum[m] - wself[m]

    for it in range(max_iters + 1):
        for n in range(n_nets):
            sx[n] = 0.0
            sy[n] = 0.0
        for e in range(n_eps):
            nid = enet[e]
            mid = emod[e]
            sx[nid] += x[mid]
            sy[nid] += y[mid]
        for n in range(n_nets):
            sx[n] = (sx[n] + fx[n]) * inv_k[n]
            sy[n] = (sy[n] + fy[n]) * inv_k[n]
        for m in range(n_mods):
            pull_x[m] = 0.0
            pull_y[m] = 0.0
            gx[m] = 0.0
            gy[m] = 0.0
        # Difference-first gradient, as in the reference: w*(x_a - s_n) per
        # endpoint stays accurate near convergence.
        for e in range(n_eps):
            nid = enet[e]
            mid = emod[e]
            we = w[nid]
            pull_x[mid] += we * sx[nid]
            pull_y[mid] += we * sy[nid]
            gx[mid] += we * (x[mid] - sx[nid])
            gy[mid] += we * (y[mid] - sy[nid])
        acc = 0.0
        for m in range(n_mods):
            gm = 2.0 * gx[m]
            acc += gm * gm
            gm = 2.0 * gy[m]
            acc += gm * gm
        gnorm = sqrt(acc)
        if it == 0:
            g0 = gnorm
        iters = it
        if gnorm <= rtol * g0 or it == max_iters:
            break
        for m in range(n_mods):
            x[m] = (pull_x[m] - wself[m] * x[m]) / diag[m]
            y[m] = (pull_y[m] - wself[m] * y[m]) / diag[m]
    return x_arr, y_arr, iters, g0, gnorm


def hpwl_batch(offsets, xs, ys):
    """Half-perimeter wirelength per net; endpoints flattened CSR-style."""
    cdef cnp.int64_t[::1] offs = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] px = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] py = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n_nets = offs.shape[0] - 1
    if n_nets <= 0:
        return np.zeros(0, dtype=np.float64)
    out_arr = np.empty(n_nets, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double xmin, xmax, ymin, ymax, v
    for i in range(n_nets):
        j = offs[i]
        xmin = px[j]
        xmax = px[j]
        ymin = py[j]
        ymax = py[j]
        for j in range(offs[i] + 1, offs[i + 1]):
            v = px[j]
            if v < xmin:
                xmin = v
            elif v > xmax:
                xmax = v
            v = py[j]
            if v < ymin:
                ymin = v
            elif v > ymax:
                ymax = v
        out[i] = (xmax - xmin) + (ymax - ymin)
    return out_arr


cdef Py_ssize_t _axis_overlap(
    double lo, double hi, double bin_um, Py_ssize_t count, double[::1] w, Py_ssize_t* width
) :
    """Per-bin overlap lengths of [lo, hi]; returns the first bin index."""
    cdef Py_ssize_t b0 = <Py_ssize_t> (lo / bin_um)
    if b0 < 0:
        b0 = 0
    if b0 > count - 1:
        b0 = count - 1
    cdef Py_ssize_t b1 = <Py_ssize_t> ceil(hi / bin_um) - 1
    if b1 < b0:
        b1 = b0
    if b1 > count - 1:
        b1 = count - 1
    cdef Py_ssize_t k
    cdef double left, right, span
    for k in range(b0, b1 + 1):
        left = k * bin_um
        if lo > left:
            left = lo
        right = (k + 1) * bin_um
        if hi < right:
            right = hi
        span = right - left
        w[k - b0] = span if span > 0.0 else 0.0
    width[0] = b1 - b0 + 1
    return b0


def raster_area(Py_ssize_t nx, Py_ssize_t ny, double bin_um, rx0, ry0, rx1, ry1, scale):
    """Accumulate scaled rectangle area into a grid (area overlap x scale)."""
    cdef double[::1] x0 = np.ascontiguousarray(rx0, dtype=np.float64)
    cdef double[::1] y0 = np.ascontiguousarray(ry0, dtype=np.float64)
    cdef double[::1] x1 = np.ascontiguousarray(rx1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(ry1, dtype=np.float64)
    cdef double[::1] sc = np.ascontiguousarray(scale, dtype=np.float64)
    grid_arr = np.zeros((ny, nx), dtype=np.float64)
    cdef double[:, ::1] grid = grid_arr
    cdef double[::1] wx = np.empty(nx)
    cdef double[::1] wy = np.empty(ny)
    cdef Py_ssize_t i, j, k, cx0, cy0, nwx, nwy
    cdef double s
    for i in range(x0.shape[0]):
        if x1[i] <= x0[i] or y1[i] <= y0[i]:
            continue
        cx0 = _axis_overlap(x0[i], x1[i], bin_um, nx, wx, &nwx)
        cy0 = _axis_overlap(y0[i], y1[i], bin_um, ny, wy, &nwy)
        s = sc[i]
        for j in range(nwy):
            for k in range(nwx):
                grid[cy0 + j, cx0 + k] += s * (wy[j] * wx[k])
    return grid_arr


def spread_demand(Py_ssize_t nx, Py_ssize_t ny, double bin_um, bx0, by0, bx1, by1, demand):
    """Distribute each net's demand over its bounding box, area-proportional."""
    cdef double[::1] x0 = np.ascontiguousarray(bx0, dtype=np.float64)
    cdef double[::1] y0 = np.ascontiguousarray(by0, dtype=np.float64)
    cdef double[::1] x1 = np.ascontiguousarray(bx1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(by1, dtype=np.float64)
    cdef double[::1] dem = np.ascontiguousarray(demand, dtype=np.float64)
    grid_arr = np.zeros((ny, nx), dtype=np.float64)
    cdef double[:, ::1] grid = grid_arr
    cdef double[::1] wx = np.empty(nx)
    cdef double[::1] wy = np.empty(ny)
    cdef Py_ssize_t i, j, k, cx0, cy0, nwx, nwy
    cdef double hi, tx, ty, d
    for i in range(x0.shape[0]):
        hi = x1[i] if x1[i] > x0[i] else x0[i]
        cx0 = _axis_overlap(x0[i], hi, bin_um, nx, wx, &nwx)
        hi = y1[i] if y1[i] > y0[i] else y0[i]
        cy0 = _axis_overlap(y0[i], hi, bin_um, ny, wy, &nwy)
        tx = 0.0
        for k in range(nwx):
            tx += wx[k]
        ty = 0.0
        for j in range(nwy):
            ty += wy[j]
        if tx > 0.0:
            for k in range(nwx):
                wx[k] /= tx
        else:
            for k in range(nwx):
                wx[k] = 1.0
        if ty > 0.0:
            for j in range(nwy):
                wy[j] /= ty
        else:
            for j in range(nwy):
                wy[j] = 1.0
        d = dem[i]
        for j in range(nwy):
            for k in range(nwx):
                grid[cy0 + j, cx0 + k] += d * (wy[j] * wx[k])
    return grid_arr
