"""Integral functionals: power integrals, gradient (Dirichlet-type)
integrals of conjugates, entropies, boundary traces, and
normalization-constant solvers.

Every functional can be evaluated through two pipelines:

* a *grid* pipeline (tensor trapezoid on a box, masked nodes dropped), and
* a *radial* pipeline (adaptive or fixed double-exponential quadrature of a
  radial profile), used for the high-accuracy constants.

Values carry a quadrature error estimate and a truncation bound so that
verifier tolerance budgets can be assembled from stated error bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize as _opt

from .grids import (Grid, GridFunction, integrate, integrate_trace,
                    integrate_radial, sample, gradient_fd)
from .conjugates import (Norm, PowerPotential, ConcavePotential,
                         conjugate_analytic, conjugate_halfspace)

__all__ = [
    "FunctionalValue", "GridRule", "RadialRule", "ShiftedRadialRule",
    "power_functional", "dirichlet_functional", "entropy_functional",
    "trace_functional", "normalize", "NormalizationProblem",
]


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    quad_error: float = 0.0
    trunc_bound: float = 0.0

    def __float__(self):
        return float(self.value)

    @property
    def budget(self) -> float:
        return self.quad_error + self.trunc_bound


@dataclass(frozen=True)
class GridRule:
    grid: Grid


@dataclass(frozen=True)
class RadialRule:
    n: int
    norm: Norm | None = None
    method: str = "adaptive"
    resolution: int = 512


@dataclass(frozen=True)
class ShiftedRadialRule:
    """Half-space integrals of profiles radial about -e, i.e.
    integrands F(||z + e||) integrated over {z_0 >= 0}."""

    n: int
    norm: Norm | None = None
    method: str = "adaptive"
    resolution: int = 512


def _coarse_grid(grid: Grid) -> Grid | None:
    if any((n - 1) % 2 for n in grid.shape):
        return None
    return Grid(grid.domain, tuple((n - 1) // 2 + 1 for n in grid.shape))


def _grid_integral_with_error(vals: np.ndarray, grid: Grid) -> FunctionalValue:
    gf = GridFunction(grid, vals)
    val = integrate(gf)
    err = 0.0
    cg = _coarse_grid(grid)
    if cg is not None:
        stride = tuple(slice(None, None, 2) for _ in grid.shape)
        err = abs(val - integrate(GridFunction(cg, vals[stride])))
    return FunctionalValue(val, err, 0.0)


def _as_values(g, grid: Grid) -> np.ndarray:
    if isinstance(g, GridFunction):
        if g.grid is not grid and g.grid.shape != grid.shape:
            raise ValueError("grid mismatch")
        return g.values
    return np.asarray(g(grid.points()), dtype=np.float64)


def _power_vals(vals: np.ndarray, r: float) -> np.ndarray:
    finite = np.isfinite(vals)
    if r < 0 and np.any(finite & (vals <= 0.0)):
        raise ValueError("negative-exponent functional needs strictly positive values")
    out = np.full_like(vals, np.inf)
    base = vals[finite]
    if r > 0:
        out[finite] = np.where(base > 0, base, 0.0) ** r
    else:
        out[finite] = base ** r
    return out


def radial_tail_bound(profile, n: int, R: float, norm: Norm | None = None) -> float:
    """Bound on the integral of |profile(||x||)| outside the ball of radius R,
    assuming power decay (exponent estimated from two samples)."""
    y1 = abs(float(np.asarray(profile(R), dtype=np.float64)))
    y2 = abs(float(np.asarray(profile(2.0 * R), dtype=np.float64)))
    if y1 <= 0.0 or y2 <= 0.0:
        return 0.0
    m = -math.log(y2 / y1) / math.log(2.0)
    if m <= n + 0.01:
        return math.inf
    from .grids import euclidean_ball_volume
    vol = euclidean_ball_volume(n) if norm is None else norm.ball_volume(n)
    # integral of y1*(r/R)^(-m) * n*vol*r^(n-1) over r > R
    return n * vol * y1 * R ** n / (m - n)


def power_functional(g, r: float, rule) -> FunctionalValue:
    """Integral of g^r over the rule's domain."""
    if isinstance(rule, GridRule):
        vals = _power_vals(_as_values(g, rule.grid), r)
        return _grid_integral_with_error(vals, rule.grid)
    if isinstance(rule, RadialRule):
        prof = g.radial_profile()
        val, err = integrate_radial(lambda x: _power_vals(np.asarray(prof(x)), r),
                                    rule.n, "full", norm=rule.norm,
                                    method=rule.method, resolution=rule.resolution,
                                    full_output=True)
        return FunctionalValue(val, err, 0.0)
    if isinstance(rule, ShiftedRadialRule):
        prof = g.radial_profile()
        val, err = integrate_radial(lambda x: _power_vals(np.asarray(prof(x)), r),
                                    rule.n, "shifted-half", norm=rule.norm,
                                    method=rule.method, resolution=rule.resolution,
                                    full_output=True)
        return FunctionalValue(val, err, 0.0)
    raise TypeError(f"unknown rule {rule!r}")


def _wstar_fn(W, halfspace: bool):
    if halfspace:
        if not (isinstance(W, PowerPotential) and W.separable):
            raise ValueError("half-space conjugate needs a separable power potential")
        return lambda y: conjugate_halfspace(W, y)
    return conjugate_analytic(W).analytic


def dirichlet_functional(g, W, a: float, rule, *, halfspace: bool = False,
                         grad_mode: str = "analytic") -> FunctionalValue:
    """Integral of W*(grad g) * g^(-a).

    ``halfspace`` switches to the restricted conjugate (supremum over the
    shifted domain).  Grid inputs may use finite-difference gradients
    (``grad_mode="fd"``); analytic families use exact gradients.
    """
    wstar = _wstar_fn(W, halfspace)
    if isinstance(rule, GridRule):
        grid = rule.grid
        if isinstance(g, GridFunction) or grad_mode == "fd":
            gf = g if isinstance(g, GridFunction) else sample(g, grid)
            comps = gradient_fd(gf)
            grads = np.stack([c.values for c in comps], axis=-1)
            vals = gf.values
            ok = np.all(np.isfinite(grads), axis=-1) & np.isfinite(vals)
            integrand = np.full(grid.shape, np.inf)
            integrand[ok] = wstar(grads[ok]) * vals[ok] ** (-a)
        else:
            pts = grid.points()
            vals = np.asarray(g(pts), dtype=np.float64)
            grads = np.asarray(g.grad(pts), dtype=np.float64)
            integrand = wstar(grads) * vals ** (-a)
        return _grid_integral_with_error(integrand, grid)

    # radial pipelines: g = phi(||x + shift||) and W shares the norm, so
    # ||grad g||_* = |phi'(r)| (the norm gradient has unit dual norm) and the
    # conjugate evaluates through its own radial profile.  For the half-space
    # rule this uses the unrestricted conjugate, valid when the restricted
    # supremum is attained inside the shifted domain (the equality families).
    dprof = g.radial_dprofile()
    prof = g.radial_profile()
    Wc = W.conjugate()

    def profile(rr):
        rr = np.asarray(rr, dtype=np.float64)
        gp = np.abs(np.asarray(dprof(rr)))
        wsval = Wc.scale * gp ** Wc.power / Wc.power + Wc.offset
        return wsval * np.asarray(prof(rr)) ** (-a)

    if isinstance(rule, RadialRule):
        val, err = integrate_radial(profile, rule.n, "full", norm=rule.norm,
                                    method=rule.method, resolution=rule.resolution,
                                    full_output=True)
        return FunctionalValue(val, err, 0.0)
    if isinstance(rule, ShiftedRadialRule):
        val, err = integrate_radial(profile, rule.n, "shifted-half", norm=rule.norm,
                                    method=rule.method, resolution=rule.resolution,
                                    full_output=True)
        return FunctionalValue(val, err, 0.0)
    raise TypeError(f"unknown rule {rule!r}")


def entropy_functional(f, p: float, rule) -> FunctionalValue:
    """Ent(f^p) = int f^p log(f^p / int f^p), with 0 log 0 = 0."""
    def xlogx(v):
        v = np.asarray(v, dtype=np.float64)
        out = np.zeros_like(v)
        pos = v > 0
        out[pos] = v[pos] * np.log(v[pos])
        return out

    if isinstance(rule, GridRule):
        vals = _power_vals(_as_values(f, rule.grid), p)
        mass = _grid_integral_with_error(vals, rule.grid)
        ent = _grid_integral_with_error(
            np.where(np.isfinite(vals), xlogx(np.where(np.isfinite(vals), vals, 0.0)), np.inf),
            rule.grid)
    else:
        prof = f.radial_profile()
        mass = power_functional(f, p, rule)
        mode = "full" if isinstance(rule, RadialRule) else "shifted-half"
        val, err = integrate_radial(lambda r: xlogx(np.asarray(prof(r)) ** p),
                                    rule.n, mode, norm=rule.norm,
                                    method=rule.method, resolution=rule.resolution,
                                    full_output=True)
        ent = FunctionalValue(val, err, 0.0)
    if mass.value <= 0:
        raise ValueError("zero total mass")
    value = ent.value - mass.value * math.log(mass.value)
    return FunctionalValue(value, ent.quad_error + mass.quad_error * (1 + abs(math.log(mass.value))), 0.0)


def trace_functional(g, r: float, grid: Grid) -> FunctionalValue:
    """(n-1)-dimensional boundary integral of g^r over the face x_0 = 0."""
    if grid.domain.kind != "half":
        raise ValueError("trace integral requires a half-space grid")
    vals = _power_vals(_as_values(g, grid), r)
    gf = GridFunction(grid, vals)
    val = integrate_trace(gf)
    err = 0.0
    cg = _coarse_grid(grid)
    if cg is not None:
        stride = tuple(slice(None, None, 2) for _ in grid.shape)
        err = abs(val - integrate_trace(GridFunction(cg, vals[stride])))
    return FunctionalValue(val, err, 0.0)


# ---------------------------------------------------------------------------
# normalization constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalizationProblem:
    """Find c > 0 with functional(family(c)) = target, the map being
    strictly monotone in c."""

    family: object          # callable c -> analytic family
    functional: object      # callable family -> float
    target: float = 1.0
    bracket: tuple = (1e-8, 1e8)


def normalize(problem: NormalizationProblem, *, tol: float = 1e-12,
              max_expand: int = 60) -> float:
    def res(logc):
        return problem.functional(problem.family(math.exp(logc))) - problem.target

    lo, hi = math.log(problem.bracket[0]), math.log(problem.bracket[1])
    flo, fhi = res(lo), res(hi)
    k = 0
    while flo * fhi > 0 and k < max_expand:
        lo -= 2.0
        hi += 2.0
        flo, fhi = res(lo), res(hi)
        k += 1
    if flo * fhi > 0:
        raise ValueError("bracketing failure: is the integral divergent for these parameters?")
    sol = _opt.brentq(res, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=300)
    c = math.exp(sol)
    resid = abs(problem.functional(problem.family(c)) - problem.target)
    if resid > tol:
        # one clean-up bisection sweep in c-space
        c1, c2 = c * (1 - 1e-9), c * (1 + 1e-9)
        f1 = problem.functional(problem.family(c1)) - problem.target
        for _ in range(100):
            cm = 0.5 * (c1 + c2)
            fm = problem.functional(problem.family(cm)) - problem.target
            if abs(fm) <= tol:
                return cm
            if f1 * fm <= 0:
                c2 = cm
            else:
                c1, f1 = cm, fm
        if abs(fm) > max(tol, 1e-11):
            raise ValueError(f"bisection stalled at residual {fm:.3e}")
        return cm
    return c


def normalize_offset(norm: Norm, power: float, a: float, n: int, *,
                     scale: float = 1.0, halfspace: bool = False,
                     method: str = "adaptive") -> float:
    """Offset C with  int (scale*||x||^q/q + C)^(-a) = 1  (full space or the
    e-shifted half space)."""
    rule = ShiftedRadialRule(n, norm, method) if halfspace else RadialRule(n, norm, method)
    prob = NormalizationProblem(
        family=lambda c: PowerPotential(norm, power, scale=scale, offset=c),
        functional=lambda W: power_functional(W, -a, rule).value,
    )
    return normalize(prob)


def normalize_scale_halfspace(norm: Norm, power: float, a: float, n: int,
                              method: str = "adaptive") -> float:
    """Scale C with  int over the e-shifted half space of (C||z||^q/q)^(-a) = 1."""
    rule = ShiftedRadialRule(n, norm, method)
    prob = NormalizationProblem(
        family=lambda c: PowerPotential(norm, power, scale=c),
        functional=lambda W: power_functional(W, -a, rule).value,
    )
    return normalize(prob)


def normalize_concave_coeff(norm: Norm, power: float, a: float, n: int,
                            method: str = "adaptive") -> float:
    """Coefficient C with  int ((C/q)(1 - ||x||^q)_+)^a = 1."""
    rule = RadialRule(n, norm, method)
    prob = NormalizationProblem(
        family=lambda c: ConcavePotential(norm, power, coeff=c),
        functional=lambda W: power_functional(W, a, rule).value,
    )
    return normalize(prob)


def normalize_exp_offset(norm: Norm, power: float, n: int, *,
                         scale: float = 1.0) -> float:
    """Offset c with  int exp(-(scale*||x||^q/q + c)) = 1."""
    base = PowerPotential(norm, power, scale=scale)
    prof = base.radial_profile()
    total = integrate_radial(lambda r: np.exp(-np.asarray(prof(r))), n, "full", norm=norm)
    return math.log(total)


def normalize_exp_scale_halfspace(norm: Norm, power: float, n: int) -> float:
    """Scale C with  int over the e-shifted half space of exp(-C||z||^q/q) = 1."""
    def total(c):
        return integrate_radial(lambda r: np.exp(-c * np.asarray(r) ** power / power),
                                n, "shifted-half", norm=norm)
    prob = NormalizationProblem(family=lambda c: c, functional=total)
    return normalize(prob)
