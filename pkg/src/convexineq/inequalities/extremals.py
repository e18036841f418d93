"""Extremal functions, sharp constants, scaling optimization, and seeded
admissible perturbations of the extremals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..conjugates import (Norm, EUCLID, PowerPotential, ConcavePotential,
                          PotPower, ExpOfPotential, GaussCosBump, RadialBump,
                          BumpSum, PerturbedMult, PerturbedAdd)
from ..functionals import (RadialRule, ShiftedRadialRule, power_functional,
                           entropy_functional, normalize_offset,
                           normalize_concave_coeff, normalize_scale_halfspace,
                           normalize_exp_offset, normalize_exp_scale_halfspace)
from ..grids import integrate_radial, cross_section_integral, ialpha
from .params import ParamSet, InadmissibleParams, theta_solve, param_region

__all__ = ["PhiSpec", "extremal", "sharp_constant", "scaling_optimize",
           "golden_min", "make_bumps", "make_radial_bumps", "grad_dual_power_radial"]


@dataclass(frozen=True)
class PhiSpec:
    """Concave power nonlinearity phi(x) = x^beta, beta in (0, 1]."""

    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")

    def __call__(self, x):
        return np.asarray(x, dtype=np.float64) ** self.beta

    def deriv(self, x):
        return self.beta * np.asarray(x, dtype=np.float64) ** (self.beta - 1.0)


def _euclid_e(n: int) -> tuple:
    return (1.0,) + (0.0,) * (n - 1)


def extremal(kind: str, ps: ParamSet, norm: Norm = EUCLID):
    """The optimizer of the chosen sharp inequality, as an analytic family
    with exact gradient."""
    n, a, p, q = ps.n, ps.a, ps.p, ps.q
    if kind == "sobolev":
        if not (n >= 2 and 1 < p < n):
            raise InadmissibleParams("sobolev needs n >= 2 and p in (1, n)")
        return PotPower(PowerPotential(norm, q, scale=q, offset=1.0), (p - n) / p)
    if kind in ("gn+", "gn-"):
        if kind == "gn+" and not (a > n and 1 < p < a):
            raise InadmissibleParams("gn+ needs a > n and 1 < p < a")
        if kind == "gn-" and not (p > a and param_region(n, a, p)):
            raise InadmissibleParams("gn- needs p > a inside the admissible region")
        return PotPower(PowerPotential(norm, q, scale=q, offset=1.0), (p - a) / p)
    if kind == "gn-concave":
        if not (a > 0 and p > 1):
            raise InadmissibleParams("gn-concave needs a > 0 and p > 1")
        return PotPower(ConcavePotential(norm, q, coeff=q), (a + p) / p)
    if kind == "sobolev-trace":
        if not (n >= 2 and 1 < p < n):
            raise InadmissibleParams("trace sobolev needs n >= 2 and p in (1, n)")
        base = PowerPotential(norm, 2.0, scale=2.0, shift=_euclid_e(n))
        return PotPower(base, -0.5 * (n - p) / (p - 1.0))
    if kind == "gn-trace":
        if not (a >= n > p > 1):
            raise InadmissibleParams("trace gn needs a >= n > p > 1")
        base = PowerPotential(norm, 2.0, scale=2.0, shift=_euclid_e(n))
        return PotPower(base, -0.5 * (a - p) / (p - 1.0))
    raise ValueError(f"unknown extremal kind {kind!r}")


def grad_dual_power_radial(f, p: float):
    """Radial profile of ||grad f||_*^p for a norm-radial family f:
    the norm gradient has unit dual norm, so this is |profile'(r)|^p."""
    dp = f.radial_dprofile()
    return lambda r: np.abs(np.asarray(dp(r))) ** p


def golden_min(fun, lo: float, hi: float, tol: float = 1e-12):
    """Golden-section minimizer of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def scaling_optimize(A: float, B: float, alpha: float):
    """Minimum over lam > 0 of  lam^alpha * A + B / lam:
    closed-form stationary point, with value."""
    if A <= 0 or B <= 0 or alpha <= 0:
        raise ValueError("scaling optimization needs positive A, B, alpha")
    lam = (B / (alpha * A)) ** (1.0 / (alpha + 1.0))
    return lam, lam ** alpha * A + B / lam


# ---------------------------------------------------------------------------
# sharp constants
# ---------------------------------------------------------------------------

def _rule(ps: ParamSet, norm, method, resolution):
    return RadialRule(ps.n, norm, method, resolution)


def sharp_constant(kind: str, ps: ParamSet, norm: Norm = EUCLID, *,
                   method: str = "adaptive", resolution: int = 512) -> float:
    """Best constant of the chosen inequality, computed as the ratio of the
    relevant functionals at the extremal function."""
    n, a, p, q = ps.n, ps.a, ps.p, ps.q
    if kind == "sobolev":
        f = extremal(kind, ps, norm)
        rule = _rule(ps, norm, method, resolution)
        pstar = n * p / (n - p)
        M = power_functional(f, pstar, rule).value
        G = integrate_radial(grad_dual_power_radial(f, p), n, "full",
                             norm=norm, method=method, resolution=resolution)
        return M ** (1.0 / pstar) / G ** (1.0 / p)
    if kind in ("gn+", "gn-"):
        f = extremal(kind, ps, norm)
        rule = _rule(ps, norm, method, resolution)
        theta = theta_solve(kind, n, p, a)
        alpha = a * p / (a - p)
        beta = p * (a - 1.0) / (a - p)
        M1 = power_functional(f, alpha, rule).value
        M2 = power_functional(f, beta, rule).value
        G = integrate_radial(grad_dual_power_radial(f, p), n, "full",
                             norm=norm, method=method, resolution=resolution)
        if kind == "gn+":
            lhs = M1 ** ((a - p) / (a * p))
            return lhs / (G ** (theta / p) * M2 ** ((1.0 - theta) * (a - p) / (p * (a - 1.0))))
        lhs = M2 ** ((a - p) / (p * (a - 1.0)))
        return lhs / (G ** (theta / p) * M1 ** ((1.0 - theta) * (a - p) / (a * p)))
    if kind == "gn-concave":
        f = extremal(kind, ps, norm)
        rule = _rule(ps, norm, method, resolution)
        theta = theta_solve(kind, n, p, a)
        e1 = p * (1.0 + a) / (a + p)
        e2 = a * p / (a + p)
        M1 = power_functional(f, e1, rule).value
        M2 = power_functional(f, e2, rule).value
        G = integrate_radial(grad_dual_power_radial(f, p), n, "full",
                             norm=norm, method=method, resolution=resolution)
        return M1 ** (1.0 / e1) / (G ** (theta / p) * M2 ** ((1.0 - theta) / e2))
    if kind == "sobolev-trace":
        f = extremal(kind, ps, norm)
        ptilde = p * (n - 1.0) / (n - p)
        prof = f.radial_profile()
        Tr = cross_section_integral(lambda s: np.asarray(prof(s)) ** ptilde, n, norm=norm)
        G = integrate_radial(grad_dual_power_radial(f, p), n, "shifted-half",
                             norm=norm, method=method, resolution=resolution)
        return Tr ** (1.0 / ptilde) / G ** (1.0 / p)
    if kind == "gn-trace":
        f = extremal(kind, ps, norm)
        theta = theta_solve("gn-trace", n, p, a)
        beta = p * (a - 1.0) / (a - p)
        prof = f.radial_profile()
        Tr = cross_section_integral(lambda s: np.asarray(prof(s)) ** beta, n, norm=norm)
        Mb = integrate_radial(lambda s: np.asarray(prof(s)) ** beta, n, "shifted-half",
                              norm=norm, method=method, resolution=resolution)
        G = integrate_radial(grad_dual_power_radial(f, p), n, "shifted-half",
                             norm=norm, method=method, resolution=resolution)
        ex1 = (a - p) / (p * (a - 1.0))
        return Tr ** ex1 / (G ** (theta / p) * Mb ** ((1.0 - theta) * ex1))
    if kind == "lp-logsob":
        return lp_logsob_constant(ps, norm, method=method, resolution=resolution)
    raise ValueError(f"unknown constant kind {kind!r}")


def lp_logsob_constant(ps: ParamSet, norm: Norm = EUCLID, *,
                       method: str = "adaptive", resolution: int = 512) -> float:
    """Optimal constant L_p of the L^p entropy--gradient inequality

        Ent(f^p) <= (n/p) int f^p log( L_p int ||grad f||_*^p / int f^p ).

    The linear-in-gradient bound coming from the convex inequality with
    W = ||x||^q + C (C making exp(-W) a probability density) is

        Ent(f^p) <= q^(1-p) p^(p-1) lam^p G - n log(lam) - C - n

    for every dilation parameter lam; optimizing over lam and evaluating at
    the exponential extremal (where the bound is tight and the optimum sits
    at lam = 1) yields the constant.  The optimization is done numerically
    by golden section, cross-checkable against the stationary point."""
    n, p, q = ps.n, ps.p, ps.q
    C = normalize_exp_offset(norm, q, n, scale=q)  # W = ||x||^q + C
    W = PowerPotential(norm, q, scale=q, offset=C)
    f0 = ExpOfPotential(W, -1.0 / p)
    K = q ** (1.0 - p) * p ** (p - 1.0)
    G0 = integrate_radial(grad_dual_power_radial(f0, p), n, "full",
                          norm=norm, method=method, resolution=resolution)
    _, minval = golden_min(lambda t: math.exp(t * p) * K * G0 - n * t, -3.0, 3.0)
    logL = (p / n) * (minval - C - n) - math.log(G0)
    return math.exp(logL)


# ---------------------------------------------------------------------------
# seeded perturbations
# ---------------------------------------------------------------------------

def make_bumps(rng, n: int, *, count: int = 2, spread: float = 1.5,
               halfspace: bool = False) -> BumpSum:
    """A sum of localized cosine-modulated Gaussian bumps with unit-scale
    features; total amplitude normalized to 1."""
    bumps = []
    for _ in range(count):
        center = rng.uniform(-spread, spread, size=n)
        if halfspace:
            center[0] = rng.uniform(0.2, spread)
        k = rng.uniform(0.5, 2.0, size=n) * rng.choice([-1.0, 1.0], size=n)
        bumps.append(GaussCosBump(
            amp=1.0 / count,
            center=tuple(center),
            width=rng.uniform(0.5, 1.2),
            wavevec=tuple(k),
            phase=rng.uniform(0.0, 2.0 * math.pi),
        ))
    return BumpSum(tuple(bumps))


def make_radial_bumps(rng, norm: Norm = EUCLID, *, count: int = 2,
                      shift: tuple | None = None, rmax: float = 2.5) -> BumpSum:
    bumps = []
    for _ in range(count):
        bumps.append(RadialBump(
            amp=1.0 / count,
            r0=rng.uniform(0.3, rmax),
            width=rng.uniform(0.4, 1.2),
            wavenum=rng.uniform(0.3, 1.5),
            phase=rng.uniform(0.0, 2.0 * math.pi),
            norm=norm,
            shift=shift,
        ))
    return BumpSum(tuple(bumps))
