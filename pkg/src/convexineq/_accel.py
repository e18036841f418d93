"""Hot numerical kernels with a numba fast path and a pure-numpy fallback.

The numba path is used by default; set the environment variable
``CONVEXINEQ_NO_NUMBA=1`` (before import) to force the pure-numpy
implementations.  Both paths compute identical values: reductions are plain
min/max over identically evaluated terms, so results agree bit-for-bit.

Kernel conventions
------------------
* 1D passes operate on 2D arrays ``vals`` of shape (lines, N_in) and
  transform the last axis; callers reshape n-D data into lines.
* Source nodes are ``y_i = y0 + i*dy``, targets ``x_j = x0 + j*dy``
  (same spacing).  Differences ``x_j - y_i`` live on a uniform lattice,
  so kernels are precomputed as tables indexed by ``j - i``.
* Masked values are ``+inf`` and propagate naturally through min-plus
  reductions; an empty supremum is ``-inf``.
"""

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "legendre_pass",
    "minplus_pass",
    "maxplus_1d",
    "brute_minplus_2d",
    "brute_maxplus_2d",
    "IMPLS",
]

_DISABLED = os.environ.get("CONVEXINEQ_NO_NUMBA", "").strip() not in ("", "0")

REFINE_NONE = 0
REFINE_LINEAR = 1
REFINE_CUBIC = 2


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _legendre_pass_np(vals, xs, ys):
    L, n_in = vals.shape
    out = np.empty((L, ys.size))
    for j in range(ys.size):
        out[:, j] = np.max(xs * ys[j] - vals, axis=1)
    return out


def _ker_table(y0, dy, n_in, x0, n_out, hk, qexp, dmin):
    # kernel values on the difference lattice d = (x0-y0) + (j-i)*dy
    t = np.arange(-(n_in - 1), n_out, dtype=np.float64)
    d = (x0 - y0) + t * dy
    ker = hk * np.abs(d) ** qexp
    ker[d < dmin] = np.inf
    return ker


def _segment_min_linear(xj, vlo, vhi, ylo, dy, hk, qexp, ymax):
    """Min of  v_lin(y) + hk*|x-y|^q  over one segment, vectorized.

    ``ymax`` caps y (domain constraint x - y >= dmin); entries with
    ylo > ymax are invalid and return +inf.
    """
    sig = (vhi - vlo) / dy
    yhi = np.minimum(ylo + dy, ymax)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = (np.abs(sig) / (hk * qexp)) ** (1.0 / (qexp - 1.0))
    ystar = xj - np.sign(sig) * step
    ystar = np.clip(ystar, ylo, yhi)
    bad = ~np.isfinite(vlo) | ~np.isfinite(vhi) | (ylo > ymax)
    ystar = np.where(bad, ylo, ystar)
    vlin = vlo + sig * (ystar - ylo)
    jval = vlin + hk * np.abs(xj - ystar) ** qexp
    return np.where(bad, np.inf, jval)


def _segment_min_cubic(xj, v0, v1, v2, v3, ylo, dy, hk, qexp, ymax):
    """Min of Catmull-Rom cubic through (v0..v3) plus the kernel, on
    the middle segment [ylo, ylo+dy].  Newton iterations, vectorized."""
    a = 0.5 * (-v0 + 3.0 * v1 - 3.0 * v2 + v3)
    b = 0.5 * (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v3)
    c = 0.5 * (v2 - v0)
    dcoef = v1
    smax = np.clip((ymax - ylo) / dy, 0.0, 1.0)
    bad = (~np.isfinite(v0) | ~np.isfinite(v1) | ~np.isfinite(v2)
           | ~np.isfinite(v3) | (smax <= 0.0))
    a = np.where(bad, 0.0, a)
    b = np.where(bad, 0.0, b)
    c = np.where(bad, 0.0, c)
    dcoef = np.where(bad, 0.0, dcoef)
    s = np.full_like(v1, 0.5)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(6):
            y = ylo + s * dy
            diff = xj - y
            vp = (3.0 * a * s + 2.0 * b) * s + c
            kp = hk * qexp * np.abs(diff) ** (qexp - 1.0) * np.sign(diff)
            jp = vp - dy * kp
            jpp = (6.0 * a * s + 2.0 * b) + dy * dy * hk * qexp * (qexp - 1.0) * np.abs(diff) ** (qexp - 2.0)
            snew = s - jp / jpp
            snew = np.where(np.isfinite(snew), snew, s)
            s = np.clip(snew, 0.0, smax)
        cand = np.stack([np.zeros_like(s), s, smax])
        best = np.full_like(v1, np.inf)
        for k in range(3):
            sk = cand[k]
            y = ylo + sk * dy
            vv = ((a * sk + b) * sk + c) * sk + dcoef
            jv = vv + hk * np.abs(xj - y) ** qexp
            best = np.minimum(best, jv)
    return np.where(bad, np.inf, best)


def _minplus_pass_np(vals, y0, dy, x0, n_out, hk, qexp, dmin, mode):
    L, n_in = vals.shape
    ker = _ker_table(y0, dy, n_in, x0, n_out, hk, qexp, dmin)
    out = np.empty((L, n_out))
    arg = np.empty((L, n_out), dtype=np.int64)
    for j in range(n_out):
        row = ker[j:j + n_in][::-1]
        terms = vals + row
        out[:, j] = np.min(terms, axis=1)
        if mode != REFINE_NONE:
            arg[:, j] = np.argmin(terms, axis=1)
    if mode == REFINE_NONE:
        return out

    xj = x0 + dy * np.arange(n_out)
    xj = np.broadcast_to(xj, (L, n_out))
    ymax = np.full((L, n_out), np.inf) if not np.isfinite(dmin) else xj - dmin
    padded = np.pad(vals, ((0, 0), (2, 2)), constant_values=np.inf)
    for off in (-2, -1, 0, 1):
        i0 = np.clip(arg + off, 0, n_in - 2)
        ylo = y0 + dy * i0
        cols = i0 + 2
        rows = np.arange(L)[:, None]
        v1 = padded[rows, cols]
        v2 = padded[rows, cols + 1]
        if mode == REFINE_CUBIC and qexp >= 2.0:
            v0 = padded[rows, cols - 1]
            v3 = padded[rows, cols + 2]
            interior = (i0 >= 1) & (i0 <= n_in - 3)
            jc = _segment_min_cubic(xj, v0, v1, v2, v3, ylo, dy, hk, qexp, ymax)
            jl = _segment_min_linear(xj, v1, v2, ylo, dy, hk, qexp, ymax)
            jval = np.where(interior, jc, jl)
        else:
            jval = _segment_min_linear(xj, v1, v2, ylo, dy, hk, qexp, ymax)
        out = np.minimum(out, jval)
    return out


def _maxplus_1d_np(gvals, ker, kvalid, n_out):
    n_in = gvals.size
    out = np.zeros(n_out)
    gpos = gvals > 0.0
    for j in range(n_out):
        row = ker[j:j + n_in][::-1]
        rowv = kvalid[j:j + n_in][::-1]
        ok = gpos & rowv
        if np.any(ok):
            out[j] = max(0.0, np.max(gvals[ok] + row[ok]))
    return out


def _brute_minplus_2d_np(vals, ker, n0, n1):
    m0, m1 = vals.shape
    out = np.empty((n0, n1))
    for j0 in range(n0):
        k0 = ker[j0:j0 + m0][::-1]
        for j1 in range(n1):
            k1 = k0[:, j1:j1 + m1][:, ::-1]
            out[j0, j1] = np.min(vals + k1)
    return out


def _brute_maxplus_2d_np(vals, ker, kvalid, n0, n1):
    m0, m1 = vals.shape
    out = np.zeros((n0, n1))
    gpos = vals > 0.0
    for j0 in range(n0):
        k0 = ker[j0:j0 + m0][::-1]
        v0 = kvalid[j0:j0 + m0][::-1]
        for j1 in range(n1):
            k1 = k0[:, j1:j1 + m1][:, ::-1]
            ok = gpos & v0[:, j1:j1 + m1][:, ::-1]
            if np.any(ok):
                out[j0, j1] = max(0.0, np.max(vals[ok] + k1[ok]))
    return out


_NUMPY_IMPLS = {
    "legendre_pass": _legendre_pass_np,
    "minplus_pass": _minplus_pass_np,
    "maxplus_1d": _maxplus_1d_np,
    "brute_minplus_2d": _brute_minplus_2d_np,
    "brute_maxplus_2d": _brute_maxplus_2d_np,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def legendre_pass(vals, xs, ys):
        L, n_in = vals.shape
        out = np.empty((L, ys.size))
        for l in range(L):
            for j in range(ys.size):
                best = -np.inf
                yj = ys[j]
                for i in range(n_in):
                    t = xs[i] * yj - vals[l, i]
                    if t > best:
                        best = t
                out[l, j] = best
        return out

    @njit(cache=True)
    def _seg_lin(xj, vlo, vhi, ylo, dy, hk, qexp, ymax):
        if not (np.isfinite(vlo) and np.isfinite(vhi)) or ylo > ymax:
            return np.inf
        yhi = min(ylo + dy, ymax)
        sig = (vhi - vlo) / dy
        if sig == 0.0:
            ystar = xj
        else:
            step = (abs(sig) / (hk * qexp)) ** (1.0 / (qexp - 1.0))
            ystar = xj - np.sign(sig) * step
        if ystar < ylo:
            ystar = ylo
        elif ystar > yhi:
            ystar = yhi
        vlin = vlo + sig * (ystar - ylo)
        return vlin + hk * abs(xj - ystar) ** qexp

    @njit(cache=True)
    def _seg_cub(xj, v0, v1, v2, v3, ylo, dy, hk, qexp, ymax):
        if not (np.isfinite(v0) and np.isfinite(v1) and np.isfinite(v2)
                and np.isfinite(v3)):
            return np.inf
        smax = (ymax - ylo) / dy
        if smax <= 0.0:
            return np.inf
        if smax > 1.0:
            smax = 1.0
        a = 0.5 * (-v0 + 3.0 * v1 - 3.0 * v2 + v3)
        b = 0.5 * (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v3)
        c = 0.5 * (v2 - v0)
        s = 0.5
        for _ in range(6):
            y = ylo + s * dy
            diff = xj - y
            vp = (3.0 * a * s + 2.0 * b) * s + c
            kp = hk * qexp * abs(diff) ** (qexp - 1.0) * np.sign(diff)
            jp = vp - dy * kp
            jpp = (6.0 * a * s + 2.0 * b) + dy * dy * hk * qexp * (qexp - 1.0) * abs(diff) ** (qexp - 2.0)
            if jpp <= 0.0 or not np.isfinite(jpp):
                break
            snew = s - jp / jpp
            if snew < 0.0:
                snew = 0.0
            elif snew > smax:
                snew = smax
            s = snew
        best = np.inf
        for sk in (0.0, s, smax):
            y = ylo + sk * dy
            vv = ((a * sk + b) * sk + c) * sk + v1
            jv = vv + hk * abs(xj - y) ** qexp
            if jv < best:
                best = jv
        return best

    @njit(cache=True)
    def minplus_pass(vals, y0, dy, x0, n_out, hk, qexp, dmin, mode):
        L, n_in = vals.shape
        nk = n_in + n_out - 1
        ker = np.empty(nk)
        for t in range(nk):
            d = (x0 - y0) + (t - (n_in - 1)) * dy
            if d < dmin:
                ker[t] = np.inf
            else:
                ker[t] = hk * abs(d) ** qexp
        out = np.empty((L, n_out))
        for l in range(L):
            for j in range(n_out):
                best = np.inf
                barg = 0
                for i in range(n_in):
                    t = vals[l, i] + ker[j - i + n_in - 1]
                    if t < best:
                        best = t
                        barg = i
                if mode != 0:
                    xj = x0 + dy * j
                    ymax = xj - dmin if np.isfinite(dmin) else np.inf
                    for off in range(-2, 2):
                        i0 = barg + off
                        if i0 < 0:
                            i0 = 0
                        elif i0 > n_in - 2:
                            i0 = n_in - 2
                        ylo = y0 + dy * i0
                        if mode == 2 and qexp >= 2.0 and 1 <= i0 <= n_in - 3:
                            jv = _seg_cub(xj, vals[l, i0 - 1], vals[l, i0],
                                          vals[l, i0 + 1], vals[l, i0 + 2],
                                          ylo, dy, hk, qexp, ymax)
                        else:
                            jv = _seg_lin(xj, vals[l, i0], vals[l, i0 + 1],
                                          ylo, dy, hk, qexp, ymax)
                        if jv < best:
                            best = jv
                out[l, j] = best
        return out

    @njit(cache=True)
    def maxplus_1d(gvals, ker, kvalid, n_out):
        n_in = gvals.size
        out = np.zeros(n_out)
        for j in range(n_out):
            best = -np.inf
            for i in range(n_in):
                if gvals[i] > 0.0 and kvalid[j - i + n_in - 1]:
                    t = gvals[i] + ker[j - i + n_in - 1]
                    if t > best:
                        best = t
            if best > 0.0:
                out[j] = best
        return out

    @njit(cache=True)
    def brute_minplus_2d(vals, ker, n0, n1):
        m0, m1 = vals.shape
        out = np.empty((n0, n1))
        for j0 in range(n0):
            for j1 in range(n1):
                best = np.inf
                for i0 in range(m0):
                    for i1 in range(m1):
                        t = vals[i0, i1] + ker[j0 - i0 + m0 - 1, j1 - i1 + m1 - 1]
                        if t < best:
                            best = t
                out[j0, j1] = best
        return out

    @njit(cache=True)
    def brute_maxplus_2d(vals, ker, kvalid, n0, n1):
        m0, m1 = vals.shape
        out = np.zeros((n0, n1))
        for j0 in range(n0):
            for j1 in range(n1):
                best = -np.inf
                for i0 in range(m0):
                    for i1 in range(m1):
                        if vals[i0, i1] > 0.0 and kvalid[j0 - i0 + m0 - 1, j1 - i1 + m1 - 1]:
                            t = vals[i0, i1] + ker[j0 - i0 + m0 - 1, j1 - i1 + m1 - 1]
                            if t > best:
                                best = t
                if best > 0.0:
                    out[j0, j1] = best
        return out

    return {
        "legendre_pass": legendre_pass,
        "minplus_pass": minplus_pass,
        "maxplus_1d": maxplus_1d,
        "brute_minplus_2d": brute_minplus_2d,
        "brute_maxplus_2d": brute_maxplus_2d,
    }


USING_NUMBA = False
IMPLS = dict(_NUMPY_IMPLS)
if not _DISABLED:
    try:
        IMPLS = _build_numba_impls()
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

legendre_pass = IMPLS["legendre_pass"]
minplus_pass = IMPLS["minplus_pass"]
maxplus_1d = IMPLS["maxplus_1d"]
brute_minplus_2d = IMPLS["brute_minplus_2d"]
brute_maxplus_2d = IMPLS["brute_maxplus_2d"]

NUMPY_IMPLS = _NUMPY_IMPLS
