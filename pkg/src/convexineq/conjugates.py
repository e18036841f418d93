"""Norms and dual norms, analytic power-law potentials and their Legendre
conjugates, and discrete (grid) convex/concave conjugates.

Analytic families
-----------------
``PowerPotential``   W(x) = scale * ||x + shift||^q / q + offset   (convex)
``ConcavePotential`` W(x) = (coeff/q) * (1 - ||x||^q)_+            (concave
on its support, the unit norm ball)
``PotPower``         f = base^expo, for extremal functions such as
(1 + ||x||^q)^m or ||z + e||^m.

The convex conjugate of  scale*||.||^q/q + C  is
scale^(1-p)*||.||_*^p/p - C  with 1/p + 1/q = 1 and the dual norm; the
concave conjugate of the compactly supported family has the two-branch
closed form implemented in :meth:`ConcavePotential.concave_conjugate`.

Discrete conjugates are computed dimension-by-dimension (the supremum over
a product node set factorizes), which reproduces the brute-force scan
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _accel
from .grids import Grid, GridFunction, Domain, make_grid

__all__ = [
    "Norm", "EUCLID", "PowerPotential", "ConcavePotential", "PotPower",
    "ExpOfPotential", "GaussCosBump", "RadialBump", "BumpSum",
    "PerturbedMult", "PerturbedAdd", "ConjugateResult", "dual_norm",
    "conjugate_analytic", "conjugate_discrete", "concave_conjugate",
    "conjugate_halfspace", "default_dual_grid",
]


@dataclass(frozen=True)
class Norm:
    """A p-norm, optionally with positive diagonal weights:
    ||x|| = ( sum_i (w_i |x_i|)^exponent )^(1/exponent)."""

    exponent: float
    weights: tuple | None = None

    def __post_init__(self):
        if not (self.exponent >= 1.0):
            raise ValueError("norm exponent must be >= 1")
        if self.weights is not None:
            object.__setattr__(self, "weights",
                               tuple(float(w) for w in self.weights))
            if any(w <= 0 for w in self.weights):
                raise ValueError("norm weights must be positive")

    def _w(self, n):
        return np.ones(n) if self.weights is None else np.asarray(self.weights)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        w = self._w(pts.shape[-1])
        z = np.abs(pts) * w
        if np.isinf(self.exponent):
            return np.max(z, axis=-1)
        if self.exponent == 1.0:
            return np.sum(z, axis=-1)
        return np.sum(z ** self.exponent, axis=-1) ** (1.0 / self.exponent)

    def dual(self) -> "Norm":
        q = self.exponent
        if np.isinf(q):
            p = 1.0
        elif q == 1.0:
            p = np.inf
        else:
            p = q / (q - 1.0)
        w = None if self.weights is None else tuple(1.0 / x for x in self.weights)
        return Norm(p, w)

    def grad(self, pts):
        """Gradient of x -> ||x|| away from the origin (finite exponent)."""
        if np.isinf(self.exponent) or self.exponent == 1.0:
            raise NotImplementedError("gradient implemented for 1 < exponent < inf")
        pts = np.asarray(pts, dtype=np.float64)
        w = self._w(pts.shape[-1])
        q = self.exponent
        r = self(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (w ** q) * np.abs(pts) ** (q - 1.0) * np.sign(pts) \
                / r[..., None] ** (q - 1.0)
        return np.where(r[..., None] > 0, g, 0.0)

    def ball_volume(self, n: int) -> float:
        q = self.exponent
        w = self._w(n)
        if np.isinf(q):
            base = 2.0 ** n
        else:
            base = (2.0 * math.gamma(1.0 + 1.0 / q)) ** n / math.gamma(1.0 + n / q)
        return base / float(np.prod(w))

    def split_first_axis(self):
        """(weight of axis 0, norm acting on the remaining axes)."""
        if np.isinf(self.exponent):
            raise NotImplementedError("axis split needs a finite exponent")
        if self.weights is None:
            return 1.0, Norm(self.exponent)
        return self.weights[0], Norm(self.exponent, self.weights[1:])

    def euclidean_bounds(self, n: int):
        """(c_lo, c_hi) with c_lo*|x|_2 <= ||x|| <= c_hi*|x|_2."""
        q = self.exponent
        if np.isinf(q):
            lo_q, hi_q = n ** (-0.5), 1.0
        else:
            s = n ** (1.0 / q - 0.5)
            lo_q, hi_q = min(1.0, s), max(1.0, s)
        w = self._w(n)
        return lo_q * float(np.min(w)), hi_q * float(np.max(w))


def dual_norm(norm: Norm) -> Norm:
    return norm.dual()


EUCLID = Norm(2.0)


def _conj_exponent(q: float) -> float:
    return q / (q - 1.0)


@dataclass(frozen=True)
class PowerPotential:
    """W(x) = scale * ||x + shift||^q / q + offset, convex for q > 1."""

    norm: Norm
    power: float
    scale: float = 1.0
    offset: float = 0.0
    shift: tuple | None = None

    def __post_init__(self):
        if self.power <= 1.0:
            raise ValueError("power potentials need q > 1")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.shift is not None:
            object.__setattr__(self, "shift",
                               tuple(float(s) for s in self.shift))

    convex = True

    def _arg(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        if self.shift is not None:
            pts = pts + np.asarray(self.shift)
        return pts

    def __call__(self, pts):
        z = self._arg(pts)
        return self.scale * self.norm(z) ** self.power / self.power + self.offset

    def grad(self, pts):
        z = self._arg(pts)
        q, qn = self.power, self.norm.exponent
        w = self.norm._w(z.shape[-1])
        r = self.norm(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            core = (w ** qn) * np.abs(z) ** (qn - 1.0) * np.sign(z)
            g = self.scale * r[..., None] ** (q - qn) * core
        return np.where(r[..., None] > 0, g, 0.0)

    @property
    def separable(self) -> bool:
        return abs(self.norm.exponent - self.power) <= 1e-12 * max(1.0, self.power)

    def axis_terms(self, n: int):
        """Per-axis coefficients A_i with W(x) = sum_i A_i|x_i + v_i|^q + offset
        (only for separable potentials)."""
        if not self.separable:
            raise ValueError("potential is not separable")
        w = self.norm._w(n)
        return self.scale * w ** self.power / self.power

    def conjugate(self) -> "PowerPotential":
        if self.shift is not None:
            raise ValueError("analytic conjugate implemented for unshifted potentials")
        p = _conj_exponent(self.power)
        return PowerPotential(self.norm.dual(), p,
                              scale=self.scale ** (1.0 - p),
                              offset=-self.offset)

    def radial_profile(self):
        """Profile r -> value at ||x + shift|| = r (radial about -shift)."""
        return lambda r: self.scale * np.asarray(r) ** self.power / self.power + self.offset

    def radial_dprofile(self):
        return lambda r: self.scale * np.asarray(r) ** (self.power - 1.0)

    def tail_exponent(self) -> float:
        return self.power


@dataclass(frozen=True)
class ConcavePotential:
    """W(x) = (coeff/q) * (1 - ||x||^q)_+, concave on the unit norm ball."""

    norm: Norm
    power: float
    coeff: float = 1.0

    convex = False

    def __post_init__(self):
        if self.power <= 1.0 or self.coeff <= 0.0:
            raise ValueError("need power > 1 and positive coeff")

    def __call__(self, pts):
        r = self.norm(np.asarray(pts, dtype=np.float64))
        return (self.coeff / self.power) * np.clip(1.0 - r ** self.power, 0.0, None)

    def grad(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        q, qn = self.power, self.norm.exponent
        w = self.norm._w(pts.shape[-1])
        r = self.norm(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            core = (w ** qn) * np.abs(pts) ** (qn - 1.0) * np.sign(pts)
            g = -self.coeff * r[..., None] ** (q - qn) * core
        inside = (r[..., None] > 0) & (r[..., None] < 1.0)
        return np.where(inside, g, 0.0)

    def radial_profile(self):
        return lambda r: (self.coeff / self.power) * np.clip(1.0 - np.asarray(r) ** self.power, 0.0, None)

    def radial_dprofile(self):
        def dp(r):
            r = np.asarray(r, dtype=np.float64)
            return np.where(r < 1.0, -self.coeff * r ** (self.power - 1.0), 0.0)
        return dp

    def concave_conjugate(self):
        """The two-branch closed form of inf over the support of x.y - W."""
        C, q = self.coeff, self.power
        p = _conj_exponent(q)
        dual = self.norm.dual()

        def star(y):
            ys = dual(np.asarray(y, dtype=np.float64))
            inner = -(C ** (1.0 - p) / p) * ys ** p - C / q
            return np.where(ys <= C, inner, -ys)

        return star


@dataclass(frozen=True)
class PotPower:
    """f = base^expo for a positive analytic base (extremal profiles)."""

    base: object
    expo: float

    def __call__(self, pts):
        b = self.base(pts)
        if self.expo > 0:
            return np.where(b > 0, b, 0.0) ** self.expo
        with np.errstate(divide="ignore"):
            return np.asarray(b, dtype=np.float64) ** self.expo

    def grad(self, pts):
        b = np.asarray(self.base(pts), dtype=np.float64)
        gb = self.base.grad(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = self.expo * b ** (self.expo - 1.0)
        fac = np.where(b > 0, fac, 0.0)
        return fac[..., None] * gb

    def radial_profile(self):
        bp = self.base.radial_profile()
        if self.expo > 0:
            return lambda r: np.clip(bp(r), 0.0, None) ** self.expo
        return lambda r: bp(r) ** self.expo

    def radial_dprofile(self):
        bp = self.base.radial_profile()
        bdp = self.base.radial_dprofile()

        def dp(r):
            b = np.asarray(bp(r), dtype=np.float64)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.expo * b ** (self.expo - 1.0) * np.asarray(bdp(r))
            return np.where(b > 0, out, 0.0)

        return dp


@dataclass(frozen=True)
class ExpOfPotential:
    """f = exp(coef * base), e.g. the Gaussian-type extremals exp(-W/p)."""

    base: object
    coef: float

    def __call__(self, pts):
        return np.exp(self.coef * np.asarray(self.base(pts), dtype=np.float64))

    def grad(self, pts):
        v = self(pts)
        return self.coef * v[..., None] * np.asarray(self.base.grad(pts))

    def radial_profile(self):
        bp = self.base.radial_profile()
        return lambda r: np.exp(self.coef * np.asarray(bp(r)))

    def radial_dprofile(self):
        bp = self.base.radial_profile()
        bdp = self.base.radial_dprofile()
        return lambda r: self.coef * np.asarray(bdp(r)) * np.exp(self.coef * np.asarray(bp(r)))


# ---------------------------------------------------------------------------
# smooth perturbations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussCosBump:
    """amp * cos(k.x + phase) * exp(-|x - x0|^2 / (2 s^2))"""

    amp: float
    center: tuple
    width: float
    wavevec: tuple
    phase: float = 0.0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        x0 = np.asarray(self.center)
        k = np.asarray(self.wavevec)
        d = pts - x0
        env = np.exp(-np.sum(d * d, axis=-1) / (2.0 * self.width ** 2))
        return self.amp * np.cos(pts @ k + self.phase) * env

    def grad(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        x0 = np.asarray(self.center)
        k = np.asarray(self.wavevec)
        d = pts - x0
        env = np.exp(-np.sum(d * d, axis=-1) / (2.0 * self.width ** 2))
        c = np.cos(pts @ k + self.phase)
        s = np.sin(pts @ k + self.phase)
        g = (-s[..., None] * k - c[..., None] * d / self.width ** 2) * env[..., None]
        return self.amp * g

    def max_abs(self) -> float:
        return abs(self.amp)


@dataclass(frozen=True)
class RadialBump:
    """amp * cos(k r + phase) * exp(-(r - r0)^2 / (2 w^2)) with r = ||x + shift||;
    radial perturbations keep the whole radial quadrature pipeline usable."""

    amp: float
    r0: float
    width: float
    wavenum: float
    phase: float = 0.0
    norm: Norm = EUCLID
    shift: tuple | None = None

    def _r(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        if self.shift is not None:
            pts = pts + np.asarray(self.shift)
        return self.norm(pts), pts

    def _prof(self, r):
        r = np.asarray(r, dtype=np.float64)
        env = np.exp(-((r - self.r0) ** 2) / (2.0 * self.width ** 2))
        return self.amp * np.cos(self.wavenum * r + self.phase) * env

    def _dprof(self, r):
        r = np.asarray(r, dtype=np.float64)
        env = np.exp(-((r - self.r0) ** 2) / (2.0 * self.width ** 2))
        c = np.cos(self.wavenum * r + self.phase)
        s = np.sin(self.wavenum * r + self.phase)
        return self.amp * env * (-self.wavenum * s - c * (r - self.r0) / self.width ** 2)

    def __call__(self, pts):
        r, _ = self._r(pts)
        return self._prof(r)

    def grad(self, pts):
        r, shifted = self._r(pts)
        dp = self._dprof(r)
        g = self.norm.grad(shifted)
        return dp[..., None] * g

    def radial_profile(self):
        return self._prof

    def radial_dprofile(self):
        return self._dprof

    def max_abs(self) -> float:
        return abs(self.amp)


@dataclass(frozen=True)
class BumpSum:
    bumps: tuple

    def __call__(self, pts):
        return sum(b(pts) for b in self.bumps)

    def grad(self, pts):
        return sum(b.grad(pts) for b in self.bumps)

    def max_abs(self) -> float:
        return sum(b.max_abs() for b in self.bumps)

    def radial_profile(self):
        profs = [b.radial_profile() for b in self.bumps]
        return lambda r: sum(p(r) for p in profs)

    def radial_dprofile(self):
        dprofs = [b.radial_dprofile() for b in self.bumps]
        return lambda r: sum(p(r) for p in dprofs)


@dataclass(frozen=True)
class PerturbedMult:
    """f = scale * base * (1 + eps*sigma); keeps the growth class of base."""

    base: object
    sigma: object
    eps: float
    scale: float = 1.0

    def __post_init__(self):
        if self.eps * self.sigma.max_abs() >= 1.0:
            raise ValueError("perturbation amplitude destroys positivity")

    def __call__(self, pts):
        return self.scale * self.base(pts) * (1.0 + self.eps * self.sigma(pts))

    def grad(self, pts):
        b = np.asarray(self.base(pts), dtype=np.float64)
        s = np.asarray(self.sigma(pts), dtype=np.float64)
        return self.scale * (self.base.grad(pts) * (1.0 + self.eps * s)[..., None]
                             + self.eps * b[..., None] * self.sigma.grad(pts))

    def rescaled(self, factor: float) -> "PerturbedMult":
        return replace(self, scale=self.scale * factor)

    def radial_profile(self):
        bp = self.base.radial_profile()
        sp = self.sigma.radial_profile()
        return lambda r: self.scale * np.asarray(bp(r)) * (1.0 + self.eps * np.asarray(sp(r)))

    def radial_dprofile(self):
        bp, bdp = self.base.radial_profile(), self.base.radial_dprofile()
        sp, sdp = self.sigma.radial_profile(), self.sigma.radial_dprofile()
        return lambda r: self.scale * (
            np.asarray(bdp(r)) * (1.0 + self.eps * np.asarray(sp(r)))
            + np.asarray(bp(r)) * self.eps * np.asarray(sdp(r)))


@dataclass(frozen=True)
class PerturbedAdd:
    """g = base + eps*sigma + const (for exponential-weight statements)."""

    base: object
    sigma: object
    eps: float
    const: float = 0.0

    def __call__(self, pts):
        return self.base(pts) + self.eps * self.sigma(pts) + self.const

    def grad(self, pts):
        return self.base.grad(pts) + self.eps * self.sigma.grad(pts)

    def shifted(self, c: float) -> "PerturbedAdd":
        return replace(self, const=self.const + c)

    def radial_profile(self):
        bp = self.base.radial_profile()
        sp = self.sigma.radial_profile()
        return lambda r: np.asarray(bp(r)) + self.eps * np.asarray(sp(r)) + self.const

    def radial_dprofile(self):
        bdp = self.base.radial_dprofile()
        sdp = self.sigma.radial_dprofile()
        return lambda r: np.asarray(bdp(r)) + self.eps * np.asarray(sdp(r))


# ---------------------------------------------------------------------------
# discrete conjugates
# ---------------------------------------------------------------------------

@dataclass
class ConjugateResult:
    """Either an analytic family or grid data, with an exactness tag."""

    analytic: object | None = None
    grid_function: GridFunction | None = None
    exactness: str = "exact"
    source_spacing: tuple | None = None

    def __call__(self, pts):
        if self.analytic is None:
            raise ValueError("grid-approximate result is not callable; use .grid_function")
        return self.analytic(pts)


def conjugate_analytic(W: PowerPotential) -> ConjugateResult:
    if isinstance(W, ConcavePotential) or not getattr(W, "convex", False):
        raise ValueError("conjugate_analytic needs a convex potential; "
                         "use concave_conjugate for the concave family")
    return ConjugateResult(analytic=W.conjugate(), exactness="exact")


def default_dual_grid(u: GridFunction, shape=None) -> Grid:
    """Dual box [-L, L]^n with L the largest finite slope of u per axis."""
    rad = []
    v = u.values
    for ax, d in enumerate(u.grid.spacing):
        vm = np.moveaxis(v, ax, 0)
        diffs = np.abs(vm[1:] - vm[:-1]) / d
        diffs = diffs[np.isfinite(diffs)]
        L = float(np.max(diffs)) if diffs.size else 1.0
        rad.append(max(L, 1e-8))
    if shape is None:
        shape = u.grid.shape
    return make_grid(Domain("full", (0.0,) * u.grid.dim, tuple(rad)), shape)


def conjugate_discrete(u: GridFunction, dual_grid: Grid | None = None) -> ConjugateResult:
    """Discrete convex conjugate over the source node set, computed by
    dimension-wise 1D transforms; equals the brute-force node scan exactly."""
    if not np.isfinite(u.values).any():
        raise ValueError("all nodes are masked")
    if dual_grid is None:
        dual_grid = default_dual_grid(u)
    vals = u.values
    n = u.grid.dim
    src_axes = u.grid.axes
    dual_axes = dual_grid.axes
    for ax in range(n):
        if ax > 0:
            vals = -vals
        moved = np.moveaxis(vals, ax, -1)
        lead = moved.shape[:-1]
        flat = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
        out = _accel.legendre_pass(flat, np.ascontiguousarray(src_axes[ax]),
                                   np.ascontiguousarray(dual_axes[ax]))
        vals = np.moveaxis(out.reshape(*lead, -1), -1, ax)
    gf = GridFunction(dual_grid, vals)
    return ConjugateResult(grid_function=gf, exactness="grid-approximate",
                           source_spacing=u.grid.spacing)


def concave_conjugate(W):
    """Concave conjugate: analytic branch for the compactly supported family,
    discrete infimum over support nodes for grid data."""
    if isinstance(W, ConcavePotential):
        return ConjugateResult(analytic=W.concave_conjugate(), exactness="exact")
    if isinstance(W, PowerPotential):
        raise ValueError("potential is convex; use conjugate_analytic")
    if not isinstance(W, GridFunction):
        raise TypeError("expected ConcavePotential or GridFunction")
    pts = W.grid.points().reshape(-1, W.grid.dim)
    vals = W.values.reshape(-1)
    sup = np.isfinite(vals) & (vals > 0.0)
    if not sup.any():
        raise ValueError("empty support")
    P, V = pts[sup], vals[sup]

    def star(y):
        y = np.asarray(y, dtype=np.float64)
        single = y.ndim == 1
        ys = np.atleast_2d(y)
        out = np.min(ys @ P.T - V[None, :], axis=1)
        return float(out[0]) if single else out.reshape(y.shape[:-1])

    return ConjugateResult(analytic=star, exactness="grid-approximate",
                           source_spacing=W.grid.spacing)


def _halfspace_conj_separable(W: PowerPotential, y: np.ndarray):
    """sup over {x_0 >= 1} of x.y - scale*||x||^q/q - offset, per coordinate,
    for separable potentials (norm exponent equals the power)."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[-1]
    q = W.power
    p = _conj_exponent(q)
    A = W.axis_terms(n)  # W = sum_i A_i |x_i|^q + offset
    # free coordinates: Legendre of A|t|^q is (qA)^(1-p)/p * ... in closed form:
    # sup_t (t*s - A|t|^q) = (p-1)/p * (|s|^p / (q*A)^(p-1))^(1/(p-1))...
    # use: sup_t (ts - A|t|^q) = B |s|^p with B = (qA)^(1-p)/p * q^{p-1}...
    # simpler: A|t|^q = (qA)|t|^q/q, whose conjugate is (qA)^(1-p)|s|^p/p.
    qa = q * A
    free = (qa ** (1.0 - p)) * np.abs(y) ** p / p
    # constrained first coordinate: sup_{t>=1} (t*s - A0 t^q)
    s0 = y[..., 0]
    a0 = qa[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        tstar = np.where(s0 > 0, (np.abs(s0) / a0) ** (1.0 / (q - 1.0)), 0.0)
    interior = (a0 ** (1.0 - p)) * np.abs(s0) ** p / p
    boundary = s0 - a0 / q
    first = np.where((s0 > 0) & (tstar >= 1.0), interior, boundary)
    return first + np.sum(free[..., 1:], axis=-1) - W.offset


def conjugate_halfspace(W: PowerPotential, y, *, method: str = "auto",
                        scan_points: int = 2001):
    """Restricted conjugate  sup over {x_0 >= 1}  of  x.y - W(x).

    Separable potentials get the exact per-coordinate reduction; otherwise a
    two-stage grid scan over the coercivity box is used.
    """
    y = np.asarray(y, dtype=np.float64)
    if W.shift is not None:
        raise ValueError("pass the domain-restricted potential, not a shifted one")
    if method == "auto" and W.separable:
        out = _halfspace_conj_separable(W, y)
        return float(out) if np.ndim(out) == 0 else out
    if y.ndim != 1:
        raise ValueError("scan path takes a single point")
    n = y.size
    ynorm = float(np.linalg.norm(y)) + 1.0
    c_lo, _ = W.norm.euclidean_bounds(n)
    R = max(2.0, (2.0 * ynorm * W.power / (W.scale * c_lo ** W.power))
            ** (1.0 / (W.power - 1.0)) + 2.0)

    def scan(lo, hi, m):
        axes = [np.linspace(max(1.0, lo[0]), hi[0], m)]
        axes += [np.linspace(lo[i], hi[i], m) for i in range(1, n)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        obj = mesh @ y - W(mesh)
        k = np.unravel_index(np.argmax(obj), obj.shape)
        best = mesh[k]
        return best, float(obj[k]), [ax[1] - ax[0] for ax in axes]

    lo = np.array([1.0] + [-R] * (n - 1))
    hi = np.full(n, R)
    best, val, steps = scan(lo, hi, min(scan_points, 121))
    for _ in range(3):
        steps = [2.5 * s for s in steps]
        lo = best - steps
        hi = best + steps
        lo[0] = max(1.0, lo[0])
        best, val, steps = scan(lo, hi, 41)
    return val
