"""Executable verifiers for the inequality catalog.

Every inequality is oriented so that  gap = lhs - rhs >= 0  is the theorem.
A verdict is produced from two resolutions: the tolerance budget is twice
the resolution-to-resolution movement of the gap plus accumulated
quadrature error estimates and a floating-point floor.

Verifier inputs are analytic families (exact gradients); the designated
equality configuration for each inequality is available with
``equality=True`` and seeded admissible perturbations otherwise.  For
perturbation runs a control-variate estimator is used by default: every
integral F(g) is evaluated as F_grid(g) - F_grid(base) + F_exact(base)
with the exact base value from the radial pipeline, which cancels both the
grid discretization of the base and its truncated tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from ..grids import (Grid, GridFunction, Domain, make_grid, sample, integrate,
                     integrate_radial, cross_section_integral)
from ..conjugates import (Norm, EUCLID, PowerPotential, ConcavePotential,
                          PotPower, ExpOfPotential, PerturbedMult,
                          PerturbedAdd, conjugate_analytic, conjugate_halfspace)
from ..functionals import (GridRule, RadialRule, ShiftedRadialRule,
                           power_functional, normalize_offset,
                           normalize_concave_coeff, normalize_scale_halfspace,
                           normalize_exp_offset, normalize_exp_scale_halfspace)
from ..hopflax import inf_convolution, inf_convolution_halfspace, sup_convolution, scaled_grid
from .params import ParamSet, InadmissibleParams, theta_solve, param_region
from .extremals import (PhiSpec, extremal, sharp_constant, lp_logsob_constant,
                        make_bumps, make_radial_bumps, grad_dual_power_radial)

__all__ = ["INEQUALITY_IDS", "InequalityReport", "verify", "default_params",
           "equality_claimed", "needs_h"]


INEQUALITY_IDS = (
    "IC2", "CASE1", "CASE2", "BBL2-DYN", "BBLPHI-DYN", "BBL-CONCAVE-DYN",
    "GN1", "SOBOLEV", "GN-PLUS", "GN-MINUS", "GN-CONCAVE", "BBL-TRACE",
    "IC-TRACE", "SOBOLEV-TRACE", "GN-TRACE", "BBL-CLASSIC-DYN", "IC-NPLUS1",
    "PL-DYN", "LOGSOB", "LP-LOGSOB", "LOGSOB-TRACE",
)


@dataclass
class _IdSpec:
    params: ParamSet
    norm_exp: float | None      # None -> Euclidean
    radius: object              # box half-width, scalar or per-axis tuple
    resolution: int             # baseline per-axis nodes / DE points
    battery_resolution: int
    pipeline: str               # grid | half-grid | radial | shifted-radial
    needs_h: bool = False
    equality_claim: bool = True
    force_cv: bool = False      # slow tails need analytic completion
    beta: float | None = None   # Phi exponent where relevant


_SPECS = {
    "IC2": _IdSpec(ParamSet(2, 2.0, 6.0 / 5.0), 6.0, 30.0, 513, 129, "grid"),
    "CASE1": _IdSpec(ParamSet(1, 3.0, 2.0), None, 60.0, 4097, 1025, "grid"),
    "CASE2": _IdSpec(ParamSet(1, 2.0, 2.0), None, 1.0, 4097, 1025, "grid"),
    "GN1": _IdSpec(ParamSet(1, 3.0, 2.0), None, 60.0, 4097, 1025, "grid"),
    "BBL2-DYN": _IdSpec(ParamSet(2, 2.0, 6.0 / 5.0), 6.0, 30.0, 513, 129, "grid",
                        needs_h=True),
    "BBLPHI-DYN": _IdSpec(ParamSet(1, 3.0, 2.0), None, 40.0, 4097, 1025, "grid",
                          needs_h=True, beta=0.5),
    "BBL-CONCAVE-DYN": _IdSpec(ParamSet(1, 2.0, 2.0), None, 1.0, 4097, 1025,
                               "grid", needs_h=True, equality_claim=False),
    "SOBOLEV": _IdSpec(ParamSet(3, 3.0, 2.0), None, 0.0, 512, 192, "radial"),
    "GN-PLUS": _IdSpec(ParamSet(1, 3.0, 2.0), None, 50.0, 4097, 1025, "grid"),
    "GN-MINUS": _IdSpec(ParamSet(1, 6.0, 8.0), None, 30.0, 4097, 1025, "grid"),
    "GN-CONCAVE": _IdSpec(ParamSet(1, 2.0, 2.0), None, 1.0, 4097, 1025, "grid"),
    "BBL-TRACE": _IdSpec(ParamSet(2, 4.0, 2.0), None, (8.0, 20.0), 513, 129,
                         "half-grid", needs_h=True),
    "IC-TRACE": _IdSpec(ParamSet(2, 4.0, 2.0), None, (8.0, 20.0), 513, 129, "half-grid"),
    "SOBOLEV-TRACE": _IdSpec(ParamSet(3, 3.0, 2.0), None, 0.0, 512, 96,
                             "shifted-radial"),
    "GN-TRACE": _IdSpec(ParamSet(2, 3.0, 1.5), None, 0.0, 512, 96,
                        "shifted-radial"),
    "BBL-CLASSIC-DYN": _IdSpec(ParamSet(1, 1.0, 1.5), 3.0, 40.0, 4097, 1025,
                               "grid", needs_h=True),
    "IC-NPLUS1": _IdSpec(ParamSet(1, 2.0, 2.0), None, 60.0, 4097, 1025, "grid",
                         force_cv=True),
    "PL-DYN": _IdSpec(ParamSet(1, 1.0, 2.0), None, 12.0, 4097, 1025, "grid",
                      needs_h=True),
    "LOGSOB": _IdSpec(ParamSet(2, 1.0, 2.0), None, 10.0, 513, 129, "grid"),
    "LP-LOGSOB": _IdSpec(ParamSet(1, 1.0, 2.0), None, 15.0, 4097, 1025, "grid"),
    "LOGSOB-TRACE": _IdSpec(ParamSet(2, 1.0, 2.0), None, 12.0, 513, 129,
                            "half-grid", equality_claim=False),
}


def default_params(ineq_id: str) -> ParamSet:
    return _spec(ineq_id).params


def equality_claimed(ineq_id: str) -> bool:
    return _spec(ineq_id).equality_claim


def needs_h(ineq_id: str) -> bool:
    return _spec(ineq_id).needs_h


def _spec(ineq_id: str) -> _IdSpec:
    try:
        return _SPECS[ineq_id]
    except KeyError:
        raise KeyError(f"unknown inequality id {ineq_id!r}; "
                       f"known: {', '.join(INEQUALITY_IDS)}") from None


@dataclass
class InequalityReport:
    ineq_id: str
    params: dict
    lhs: float
    rhs: float
    gap: float
    rel_gap: float
    budget: float
    verdict: str
    equality_expected: bool
    h: float | None = None
    seed: int | None = None
    eps: float | None = None
    resolution: int = 0
    resolution_low: int = 0
    control_variate: bool = False
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _verdict(gap: float, budget: float, equality_expected: bool) -> str:
    if gap < -budget:
        return "violated"
    if equality_expected and abs(gap) <= budget:
        return "equality"
    if gap < 0:
        return "violated-within-tolerance"
    return "holds"


# ---------------------------------------------------------------------------
# grids and shared helpers
# ---------------------------------------------------------------------------

def _norm_for(spec: _IdSpec, ps: ParamSet) -> Norm:
    if spec.norm_exp is None:
        return EUCLID
    return Norm(spec.norm_exp)


def _radius_tuple(R, n: int) -> tuple:
    if np.isscalar(R):
        return (float(R),) * n
    return tuple(float(r) for r in R)


def _grid_full(n: int, R, N: int) -> Grid:
    return make_grid(Domain("full", (0.0,) * n, _radius_tuple(R, n)), (N,) * n)


def _grid_half(n: int, R, N: int) -> Grid:
    return make_grid(Domain("half", (0.0,) * n, _radius_tuple(R, n)), (N,) * n)


def _grid_shift_e(grid: Grid) -> Grid:
    """The grid translated by +e along axis 0 (for kernel-side samples)."""
    lo, hi = grid.domain.bounds()
    lo, hi = list(lo), list(hi)
    lo[0] += 1.0
    hi[0] += 1.0
    center = tuple(0.5 * (l + h) for l, h in zip(lo, hi))
    radius = tuple(0.5 * (h - l) for l, h in zip(lo, hi))
    return make_grid(Domain("full", center, radius), grid.shape)


def _int_grid(vals: np.ndarray, grid: Grid) -> float:
    return integrate(GridFunction(grid, vals))


def _trace_int(vals_face: np.ndarray, grid: Grid) -> float:
    v = vals_face
    for d in reversed(grid.spacing[1:]):
        w = np.full(v.shape[-1], d)
        w[0] = w[-1] = 0.5 * d
        v = v @ w
    return float(v)


class _Acc:
    """Collects quadrature-error and truncation contributions for the
    tolerance budget."""

    def __init__(self):
        self.err = 0.0
        self.trunc = 0.0

    def add(self, e: float):
        self.err += abs(e)

    def add_tail(self, profile, n: int, R: float, norm: Norm | None,
                 coef: float = 1.0, shifted: bool = False):
        """Bound the mass of |profile| outside the box of half-width R by the
        radial integral outside the inscribed ball (for shifted half-space
        integrands the full-space tail is a valid upper bound)."""
        if R <= 0:
            return
        from scipy import integrate as _sci
        from ..grids import euclidean_ball_volume
        vol = euclidean_ball_volume(n) if norm is None else norm.ball_volume(n)
        val, _ = _sci.quad(lambda r: abs(float(np.asarray(profile(r))))
                           * r ** (n - 1.0), R, np.inf, limit=200)
        self.trunc += abs(coef) * n * vol * val


def _power_grid(f, r_exp: float, grid: Grid) -> float:
    pts = grid.points()
    vals = np.asarray(f(pts), dtype=np.float64)
    if r_exp < 0 and np.any(vals <= 0.0):
        raise ValueError("nonpositive values under a negative exponent")
    out = np.where(vals > 0, vals, 0.0) ** r_exp if r_exp > 0 else vals ** r_exp
    return _int_grid(out, grid)


def _grad_dual_pow_grid(f, p: float, dual: Norm, grid: Grid) -> float:
    pts = grid.points()
    g = np.asarray(f.grad(pts), dtype=np.float64)
    return _int_grid(dual(g) ** p, grid)


def _cv3(val_g: float, val_base: float, exact_base: float, use_cv: bool) -> float:
    return val_g - val_base + exact_base if use_cv else val_g


# ---------------------------------------------------------------------------
# input construction
# ---------------------------------------------------------------------------

def _potential_W(spec: _IdSpec, ps: ParamSet, norm: Norm):
    """The normalized kernel potential for the convex g-space inequalities."""
    q = ps.q
    a_norm = ps.a if spec.params.a > 0 else ps.n
    C = normalize_offset(norm, q, a_norm, ps.n)
    return PowerPotential(norm, q, scale=1.0, offset=C)


def _build_base(ineq_id: str, ps: ParamSet, norm: Norm):
    """Equality-configuration input and the auxiliary objects each verifier
    needs (kernel potential, normalization constants)."""
    q = ps.q
    n, a, p = ps.n, ps.a, ps.p
    if ineq_id in ("CASE1", "GN1"):
        C = normalize_offset(norm, q, a, n)
        W = PowerPotential(norm, q, scale=1.0, offset=C)
        return W, {"W": W, "C": C}
    if ineq_id == "IC2":
        C = normalize_offset(norm, q, float(n), n)
        W = PowerPotential(norm, q, scale=1.0, offset=C)
        return W, {"W": W, "C": C}
    if ineq_id in ("BBL2-DYN", "BBL-CLASSIC-DYN"):
        C = normalize_offset(norm, q, float(n), n)
        W = PowerPotential(norm, q, scale=1.0, offset=C)
        return W, {"W": W, "C": C}
    if ineq_id == "BBLPHI-DYN":
        C = normalize_offset(norm, q, a, n)
        W = PowerPotential(norm, q, scale=1.0, offset=C)
        return W, {"W": W, "C": C}
    if ineq_id == "IC-NPLUS1":
        C = normalize_offset(norm, q, float(n), n)
        W = PowerPotential(norm, q, scale=1.0, offset=C)
        return W, {"W": W, "C": C}
    if ineq_id in ("CASE2", "BBL-CONCAVE-DYN"):
        C = normalize_concave_coeff(norm, q, a, n)
        W = ConcavePotential(norm, q, coeff=C)
        return W, {"W": W, "C": C}
    if ineq_id == "SOBOLEV":
        f = extremal("sobolev", ps, norm)
        return f, {"constant": sharp_constant("sobolev", ps, norm)}
    if ineq_id == "GN-PLUS":
        f = extremal("gn+", ps, norm)
        return f, {"constant": sharp_constant("gn+", ps, norm),
                   "theta": theta_solve("gn+", n, p, a)}
    if ineq_id == "GN-MINUS":
        f = extremal("gn-", ps, norm)
        return f, {"constant": sharp_constant("gn-", ps, norm),
                   "theta": theta_solve("gn-", n, p, a)}
    if ineq_id == "GN-CONCAVE":
        f = extremal("gn-concave", ps, norm)
        return f, {"constant": sharp_constant("gn-concave", ps, norm),
                   "theta": theta_solve("gn-concave", n, p, a)}
    if ineq_id == "SOBOLEV-TRACE":
        f = extremal("sobolev-trace", ps, norm)
        return f, {"constant": sharp_constant("sobolev-trace", ps, norm)}
    if ineq_id == "GN-TRACE":
        f = extremal("gn-trace", ps, norm)
        return f, {"constant": sharp_constant("gn-trace", ps, norm),
                   "theta": theta_solve("gn-trace", n, p, a)}
    if ineq_id in ("BBL-TRACE", "IC-TRACE"):
        C = normalize_scale_halfspace(norm, q, a, n)
        W = PowerPotential(norm, q, scale=C)
        g = PowerPotential(norm, q, scale=C, shift=(1.0,) + (0.0,) * (n - 1))
        return g, {"W": W, "C": C}
    if ineq_id in ("PL-DYN", "LOGSOB"):
        c = normalize_exp_offset(norm, q, n)
        W = PowerPotential(norm, q, scale=1.0, offset=c)
        return W, {"W": W, "C": c}
    if ineq_id == "LP-LOGSOB":
        c = normalize_exp_offset(norm, q, n, scale=q)
        W = PowerPotential(norm, q, scale=q, offset=c)
        f = ExpOfPotential(W, -1.0 / p)
        return f, {"W": W, "C": c,
                   "constant": lp_logsob_constant(ps, norm)}
    if ineq_id == "LOGSOB-TRACE":
        C = normalize_exp_scale_halfspace(norm, q, n)
        W = PowerPotential(norm, q, scale=C)
        g = PowerPotential(norm, q, scale=C, shift=(1.0,) + (0.0,) * (n - 1))
        f = ExpOfPotential(g, -1.0 / p)
        return f, {"W": W, "C": C, "g_base": g}
    raise KeyError(ineq_id)


def _perturb(ineq_id: str, base, ps: ParamSet, norm: Norm, seed: int, eps: float):
    """base * (1 + eps * sigma) with a seeded smooth bump; radial pipelines
    get radial bumps so the whole run stays one-dimensional."""
    rng = np.random.default_rng(seed)
    spec = _spec(ineq_id)
    if spec.pipeline == "radial":
        sig = make_radial_bumps(rng, norm)
    elif spec.pipeline == "shifted-radial":
        sig = make_radial_bumps(rng, norm, shift=(1.0,) + (0.0,) * (ps.n - 1))
    else:
        half = spec.pipeline == "half-grid"
        sig = make_bumps(rng, ps.n, halfspace=half)
    if ineq_id in ("PL-DYN", "LOGSOB"):
        return PerturbedAdd(base, sig, eps)
    return PerturbedMult(base, sig, eps)


# ---------------------------------------------------------------------------
# evaluators: each returns (lhs, rhs, extras)
# ---------------------------------------------------------------------------

def _eval_gradient_family(ineq_id, g, aux, ps, norm, res, use_cv, acc):
    """CASE1 / IC2 / GN1 / IC-NPLUS1: functional inequalities built from
    int W*(grad g) g^(-a'), int g^(1-a) and int W^(1-a)."""
    spec = aux["spec"]
    n, a, q = ps.n, ps.a, ps.q
    W = aux["W"]
    base = aux.get("base", W)
    grid = _grid_full(n, spec.radius, res)
    pts = grid.points()
    wstar = conjugate_analytic(W).analytic

    def dirichlet_grid(fam, a_int):
        vals = np.asarray(fam(pts), dtype=np.float64)
        grads = np.asarray(fam.grad(pts), dtype=np.float64)
        return _int_grid(wstar(grads) * vals ** (-a_int), grid)

    def dirichlet_exact(a_int):
        prof, dprof = W.radial_profile(), W.radial_dprofile()
        Wc = W.conjugate()

        def ip(rr):
            gp = np.abs(np.asarray(dprof(rr)))
            ws = Wc.scale * gp ** Wc.power / Wc.power + Wc.offset
            return ws * np.asarray(prof(rr)) ** (-a_int)

        val, err = integrate_radial(ip, n, "full", norm=norm, full_output=True)
        acc.add(err)
        return val

    def power_pair(fam, r_exp):
        val = _power_grid(fam, r_exp, grid)
        if not use_cv:
            return val
        base_grid = _power_grid(base, r_exp, grid)
        prof = base.radial_profile() if hasattr(base, "radial_profile") else W.radial_profile()
        exact, err = integrate_radial(lambda rr: np.asarray(prof(rr)) ** r_exp,
                                      n, "full", norm=norm, full_output=True)
        acc.add(err)
        return val - base_grid + exact

    def dirichlet_profile(a_int):
        prof, dprof = W.radial_profile(), W.radial_dprofile()
        Wc = W.conjugate()

        def ip(rr):
            gp = np.abs(np.asarray(dprof(rr)))
            ws = Wc.scale * gp ** Wc.power / Wc.power + Wc.offset
            return ws * np.asarray(prof(rr)) ** (-a_int)

        return ip

    wprof = W.radial_profile()

    if ineq_id == "IC2":
        a_int = float(n)
        lhs = _cv3(dirichlet_grid(g, a_int), dirichlet_grid(base, a_int),
                   dirichlet_exact(a_int), use_cv)
        if use_cv:
            rhs_int, err = integrate_radial(lambda rr: np.asarray(wprof(rr)) ** (1.0 - n),
                                            n, "full", norm=norm, full_output=True)
            acc.add(err)
        else:
            rhs_int = power_pair(W, 1.0 - n)
            acc.add_tail(dirichlet_profile(a_int), n, spec.radius, norm, 2.0)
            acc.add_tail(lambda rr: np.asarray(wprof(rr)) ** (1.0 - n), n,
                         spec.radius, norm, 2.0 / (n - 1.0))
        rhs = rhs_int / (n - 1.0)
        return lhs, rhs, {}
    if ineq_id == "CASE1":
        lhs = (a - 1.0) * _cv3(dirichlet_grid(g, a), dirichlet_grid(base, a),
                               dirichlet_exact(a), use_cv) \
            + (a - n) * power_pair(g, 1.0 - a)
        rhs = power_pair(W, 1.0 - a)
        if not use_cv:
            acc.add_tail(dirichlet_profile(a), n, spec.radius, norm, 2.0 * (a - 1.0))
            acc.add_tail(lambda rr: np.asarray(wprof(rr)) ** (1.0 - a), n,
                         spec.radius, norm, 2.0 * (abs(a - n) + 1.0))
        return lhs, rhs, {}
    if ineq_id == "GN1":
        dual = norm.dual()
        C = aux["C"]

        def grad_term(fam):
            vals = np.asarray(fam(pts), dtype=np.float64)
            grads = np.asarray(fam.grad(pts), dtype=np.float64)
            return _int_grid(dual(grads) ** ps.p * vals ** (-a), grid)

        def grad_exact():
            prof, dprof = W.radial_profile(), W.radial_dprofile()
            val, err = integrate_radial(
                lambda rr: np.abs(np.asarray(dprof(rr))) ** ps.p
                * np.asarray(prof(rr)) ** (-a),
                n, "full", norm=norm, full_output=True)
            acc.add(err)
            return val

        gradI = _cv3(grad_term(g), grad_term(base), grad_exact(), use_cv)
        BW, err = integrate_radial(lambda rr: np.asarray(wprof(rr)) ** (1.0 - a),
                                   n, "full", norm=norm, full_output=True)
        acc.add(err)
        lhs = (a - 1.0) / ps.p * gradI + (a - n) * power_pair(g, 1.0 - a)
        rhs = (a - 1.0) * C + BW
        if not use_cv:
            dprof = W.radial_dprofile()
            acc.add_tail(lambda rr: np.abs(np.asarray(dprof(rr))) ** ps.p
                         * np.asarray(wprof(rr)) ** (-a),
                         n, spec.radius, norm, 2.0 * (a - 1.0) / ps.p)
            acc.add_tail(lambda rr: np.asarray(wprof(rr)) ** (1.0 - a), n,
                         spec.radius, norm, 2.0 * (abs(a - n) + 1.0))
        return lhs, rhs, {"D": rhs}
    if ineq_id == "IC-NPLUS1":
        a_int = n + 1.0
        lhs = _cv3(dirichlet_grid(g, a_int), dirichlet_grid(base, a_int),
                   dirichlet_exact(a_int), use_cv)
        return lhs, 0.0, {}
    raise KeyError(ineq_id)


def _eval_case2(g, aux, ps, norm, res, use_cv, acc):
    n, a, q = ps.n, ps.a, ps.q
    W = aux["W"]
    base = aux.get("base", W)
    grid = _grid_full(n, 1.0, res)
    pts = grid.points()
    wstar = W.concave_conjugate()
    C = W.coeff
    p = ps.p

    def conc_dirichlet(fam):
        vals = np.asarray(fam(pts), dtype=np.float64)
        grads = np.asarray(fam.grad(pts), dtype=np.float64)
        return _int_grid(np.asarray(wstar(grads)) * vals ** a, grid)

    def conc_dirichlet_exact():
        prof, dprof = W.radial_profile(), W.radial_dprofile()

        def ip(rr):
            gp = np.abs(np.asarray(dprof(rr)))
            ws = np.where(gp <= C, -(C ** (1.0 - p) / p) * gp ** p - C / q, -gp)
            return ws * np.asarray(prof(rr)) ** a

        val, err = integrate_radial(lambda rr: np.where(np.asarray(rr) < 1.0, ip(rr), 0.0),
                                    n, "full", norm=norm, full_output=True)
        acc.add(err)
        return val

    def pw(fam, r_exp):
        val = _power_grid(fam, r_exp, grid)
        if not use_cv:
            return val
        prof = base.radial_profile()
        exact, err = integrate_radial(
            lambda rr: np.clip(np.asarray(prof(rr)), 0.0, None) ** r_exp,
            n, "full", norm=norm, full_output=True)
        acc.add(err)
        return val - _power_grid(base, r_exp, grid) + exact

    dterm = _cv3(conc_dirichlet(g), conc_dirichlet(base), conc_dirichlet_exact(), use_cv)
    wprof = W.radial_profile()
    BW, err = integrate_radial(lambda rr: np.clip(np.asarray(wprof(rr)), 0.0, None) ** (1.0 + a),
                               n, "full", norm=norm, full_output=True)
    acc.add(err)
    lhs = -BW
    rhs = (a + 1.0) * dterm + (a + n) * pw(g, 1.0 + a)
    return lhs, rhs, {}


def _eval_q_dyn(ineq_id, g, aux, ps, norm, h, res, use_cv, acc, beta=None):
    """The full-space dynamical inequalities driven by Q_h."""
    spec = aux["spec"]
    n, a = ps.n, (ps.n if ineq_id in ("BBL2-DYN", "BBL-CLASSIC-DYN") else ps.a)
    W = aux["W"]
    base = aux.get("base", W)
    grid = _grid_full(n, spec.radius, res)
    target = scaled_grid(grid, 1.0 + h)
    gs = sample(g, grid)
    Q = inf_convolution(gs, W, h, target, refine="cubic")

    def base_Q_vals():
        bs = sample(base, grid)
        return inf_convolution(bs, W, h, target, refine="cubic")

    prof = W.radial_profile()

    if ineq_id == "BBL2-DYN":
        lhs = _int_grid(Q.values ** (1.0 - n), target)
        B1, err = integrate_radial(lambda rr: np.asarray(prof(rr)) ** (1.0 - n),
                                   n, "full", norm=norm, full_output=True)
        acc.add(err)
        if use_cv:
            lhs = lhs - _int_grid(base_Q_vals().values ** (1.0 - n), target) + (1.0 + h) * B1
            mg = _power_grid(g, 1.0 - n, grid) - _power_grid(base, 1.0 - n, grid) + B1
            rhs = mg + h * B1
        else:
            rhs = _power_grid(g, 1.0 - n, grid) + h * _power_grid(W, 1.0 - n, grid)
        return lhs, rhs, {}
    if ineq_id == "BBL-CLASSIC-DYN":
        lhs = _int_grid(Q.values ** (-float(n)), target)
        if use_cv:
            lhs = lhs - _int_grid(base_Q_vals().values ** (-float(n)), target) + 1.0
            rhs = _power_grid(g, -float(n), grid) - _power_grid(base, -float(n), grid) + 1.0
        else:
            rhs = _power_grid(g, -float(n), grid)
        return lhs, rhs, {"lambda": lhs / rhs if rhs != 0 else math.inf}
    if ineq_id == "BBLPHI-DYN":
        phi = PhiSpec(beta if beta is not None else 0.5)
        fac = (1.0 + h) ** (a - n)
        lhs = fac * _int_grid(np.asarray(phi(Q.values / (1.0 + h))) * Q.values ** (-a), target)
        BPhi, err = integrate_radial(
            lambda rr: np.asarray(phi(np.asarray(prof(rr)))) * np.asarray(prof(rr)) ** (-a),
            n, "full", norm=norm, full_output=True)
        acc.add(err)

        def phi_mass(fam):
            pts = grid.points()
            v = np.asarray(fam(pts), dtype=np.float64)
            return _int_grid(np.asarray(phi(v)) * v ** (-a), grid)

        if use_cv:
            bQ = base_Q_vals()
            lhs = lhs - fac * _int_grid(np.asarray(phi(bQ.values / (1.0 + h)))
                                        * bQ.values ** (-a), target) + BPhi
            mg = phi_mass(g) - phi_mass(base) + BPhi
            rhs = mg / (1.0 + h) + h / (1.0 + h) * BPhi
        else:
            rhs = phi_mass(g) / (1.0 + h) + h / (1.0 + h) * phi_mass(W)
        return lhs, rhs, {"beta": phi.beta}
    if ineq_id == "PL-DYN":
        lhs = _int_grid(np.exp(-Q.values / (1.0 + h)), target)
        pts = grid.points()
        mass_g = _int_grid(np.exp(-np.asarray(g(pts), dtype=np.float64)), grid)
        if use_cv:
            bQ = base_Q_vals()
            lhs = lhs - _int_grid(np.exp(-bQ.values / (1.0 + h)), target) + (1.0 + h) ** n
            mass_b = _int_grid(np.exp(-np.asarray(base(pts), dtype=np.float64)), grid)
            mass_g = mass_g - mass_b + 1.0
        rhs = (1.0 + h) ** n * mass_g
        return lhs, rhs, {}
    raise KeyError(ineq_id)


def _eval_concave_dyn(g, aux, ps, norm, h, res, use_cv, acc):
    n, a = ps.n, ps.a  # unit-radius support; targets scale with 1 + h
    W = aux["W"]
    base = aux.get("base", W)
    grid = _grid_full(n, 1.0, res)
    target = scaled_grid(grid, 1.0 + h)
    gs = sample(g, grid)
    R = sup_convolution(gs, W, h, target)
    lhs = _int_grid(R.values ** (1.0 + a), target)
    prof = W.radial_profile()
    B1, err = integrate_radial(
        lambda rr: np.clip(np.asarray(prof(rr)), 0.0, None) ** (1.0 + a),
        n, "full", norm=norm, full_output=True)
    acc.add(err)

    def pw(fam):
        return _power_grid(fam, 1.0 + a, grid)

    if use_cv:
        bs = sample(base, grid)
        bR = sup_convolution(bs, W, h, target)
        lhs = lhs - _int_grid(bR.values ** (1.0 + a), target) + (1.0 + h) ** (n + a + 1.0) * B1
        mg = pw(g) - pw(base) + B1
    else:
        mg = pw(g)
        B1 = pw(W)
    rhs = mg + h * B1 + (n + a) * h * mg
    return lhs, rhs, {}


def _eval_gn_family(ineq_id, f, aux, ps, norm, res, use_cv, acc):
    """The scale-invariant sharp-constant inequalities in f-space."""
    spec = aux["spec"]
    n, a, p = ps.n, ps.a, ps.p
    D = aux["constant"]
    base = aux.get("base", f)
    dual = norm.dual()

    if spec.pipeline == "radial":
        rule_hi = RadialRule(n, norm, "de", res)

        def pint(fam, r_exp):
            return power_functional(fam, r_exp, rule_hi).value

        def gint(fam):
            return integrate_radial(grad_dual_power_radial(fam, p), n, "full",
                                    norm=norm, method="de", resolution=res)
    else:
        grid = _grid_full(n, spec.radius if spec.radius > 0 else 1.0, res)
        profb = base.radial_profile()

        def pint(fam, r_exp):
            val = _power_grid(fam, r_exp, grid)
            if not use_cv:
                acc.add_tail(lambda rr: np.clip(np.asarray(profb(rr)),
                                                1e-300 if r_exp < 0 else 0.0,
                                                None) ** r_exp,
                             n, spec.radius, norm, 2.0)
                return val
            exact, err = integrate_radial(
                lambda rr: np.clip(np.asarray(profb(rr)), 1e-300 if r_exp < 0 else 0.0,
                                   None) ** r_exp,
                n, "full", norm=norm, full_output=True)
            acc.add(err)
            return val - _power_grid(base, r_exp, grid) + exact

        def gint(fam):
            val = _grad_dual_pow_grid(fam, p, dual, grid)
            if not use_cv:
                acc.add_tail(grad_dual_power_radial(base, p), n, spec.radius, norm, 2.0)
                return val
            exact, err = integrate_radial(grad_dual_power_radial(base, p), n, "full",
                                          norm=norm, full_output=True)
            acc.add(err)
            return val - _grad_dual_pow_grid(base, p, dual, grid) + exact

    G = gint(f)
    if ineq_id == "SOBOLEV":
        pstar = n * p / (n - p)
        M = pint(f, pstar)
        return D * G ** (1.0 / p), M ** (1.0 / pstar), {"G": G, "M": M}
    if ineq_id == "GN-PLUS":
        theta = aux["theta"]
        alpha = a * p / (a - p)
        betae = p * (a - 1.0) / (a - p)
        M1, M2 = pint(f, alpha), pint(f, betae)
        lhs = D * G ** (theta / p) * M2 ** ((1.0 - theta) * (a - p) / (p * (a - 1.0)))
        rhs = M1 ** ((a - p) / (a * p))
        return lhs, rhs, {"G": G}
    if ineq_id == "GN-MINUS":
        theta = aux["theta"]
        alpha = a * p / (a - p)
        betae = p * (a - 1.0) / (a - p)
        M1, M2 = pint(f, betae), pint(f, alpha)
        lhs = D * G ** (theta / p) * M2 ** ((1.0 - theta) * (a - p) / (a * p))
        rhs = M1 ** ((a - p) / (p * (a - 1.0)))
        return lhs, rhs, {"G": G}
    if ineq_id == "GN-CONCAVE":
        theta = aux["theta"]
        e1 = p * (1.0 + a) / (a + p)
        e2 = a * p / (a + p)
        M1, M2 = pint(f, e1), pint(f, e2)
        lhs = D * G ** (theta / p) * M2 ** ((1.0 - theta) / e2)
        rhs = M1 ** (1.0 / e1)
        return lhs, rhs, {"G": G}
    raise KeyError(ineq_id)


def _eval_trace_gn(ineq_id, f, aux, ps, norm, res, use_cv, acc):
    n, a, p = ps.n, ps.a, ps.p
    D = aux["constant"]
    prof = f.radial_profile()

    def shifted_int(profile):
        return integrate_radial(profile, n, "shifted-half", norm=norm,
                                method="de", resolution=res)

    def trace_int(r_exp):
        return cross_section_integral(lambda ss: np.asarray(prof(ss)) ** r_exp,
                                      n, norm=norm)

    G = shifted_int(grad_dual_power_radial(f, p))
    if ineq_id == "SOBOLEV-TRACE":
        ptilde = p * (n - 1.0) / (n - p)
        Tr = trace_int(ptilde)
        return D * G ** (1.0 / p), Tr ** (1.0 / ptilde), {"G": G, "Tr": Tr}
    theta = aux["theta"]
    betae = p * (a - 1.0) / (a - p)
    Tr = trace_int(betae)
    Mb = shifted_int(lambda ss: np.asarray(prof(ss)) ** betae)
    ex1 = (a - p) / (p * (a - 1.0))
    lhs = D * G ** (theta / p) * Mb ** ((1.0 - theta) * ex1)
    rhs = Tr ** ex1
    return lhs, rhs, {"G": G, "Tr": Tr}


def _eval_bbl_trace(g, aux, ps, norm, h, res, use_cv, acc):
    spec = aux["spec"]
    n, a = ps.n, ps.a
    W = aux["W"]
    base = aux.get("base", g)
    grid = _grid_half(n, spec.radius, res)
    wgrid = _grid_shift_e(grid)
    target = scaled_grid(grid, 1.0 + h, axis0_offset=h)
    gs = sample(g, grid)
    Q = inf_convolution_halfspace(gs, W, h, target, refine="cubic")
    fac = (1.0 + h) ** (a - n)
    lhs = fac * _int_grid(Q.values ** (1.0 - a), target)
    BW = _power_grid(W, 1.0 - a, wgrid)
    mg = _power_grid(g, 1.0 - a, grid)
    if use_cv:
        bs = sample(base, grid)
        bQ = inf_convolution_halfspace(bs, W, h, target, refine="cubic")
        profw = W.radial_profile()
        B1, err = integrate_radial(lambda rr: np.asarray(profw(rr)) ** (1.0 - a),
                                   n, "shifted-half", norm=norm, full_output=True)
        acc.add(err)
        lhs = lhs - fac * _int_grid(bQ.values ** (1.0 - a), target) + (1.0 + h) * B1
        mg = mg - _power_grid(base, 1.0 - a, grid) + B1
        BW = B1
    rhs = mg + h * BW
    return lhs, rhs, {}


def _eval_ic_trace(g, aux, ps, norm, res, use_cv, acc):
    spec = aux["spec"]
    n, a, p = ps.n, ps.a, ps.p
    W = aux["W"]
    base = aux.get("base", g)
    grid = _grid_half(n, spec.radius, res)
    wgrid = _grid_shift_e(grid)
    pts = grid.points()

    def dir_half(fam):
        vals = np.asarray(fam(pts), dtype=np.float64)
        grads = np.asarray(fam.grad(pts), dtype=np.float64)
        ws = conjugate_halfspace(W, grads)
        return _int_grid(ws * vals ** (-a), grid)

    def dir_exact():
        # at the shifted base the restricted supremum is attained inside the
        # domain, so the Legendre identity applies along the profile
        prof, dprof = base.radial_profile(), base.radial_dprofile()

        def ip(rr):
            rr = np.asarray(rr)
            ws = rr * np.asarray(dprof(rr)) - np.asarray(prof(rr))
            return ws * np.asarray(prof(rr)) ** (-a)

        val, err = integrate_radial(ip, n, "shifted-half", norm=norm, full_output=True)
        acc.add(err)
        return val

    def bulk(fam, r_exp):
        val = _power_grid(fam, r_exp, grid)
        if not use_cv:
            return val
        prof = base.radial_profile()
        exact, err = integrate_radial(lambda rr: np.asarray(prof(rr)) ** r_exp,
                                      n, "shifted-half", norm=norm, full_output=True)
        acc.add(err)
        return val - _power_grid(base, r_exp, grid) + exact

    dterm = _cv3(dir_half(g), dir_half(base), dir_exact(), use_cv)
    lhs = (a - 1.0) * dterm + (a - n) * bulk(g, 1.0 - a)

    BW = _power_grid(W, 1.0 - a, wgrid)
    if use_cv:
        profw = W.radial_profile()
        BW, err = integrate_radial(lambda rr: np.asarray(profw(rr)) ** (1.0 - a),
                                   n, "shifted-half", norm=norm, full_output=True)
        acc.add(err)

    face = grid.points()[0]
    gface = np.asarray(g(face), dtype=np.float64) ** (1.0 - a)
    tr = _trace_int(gface, grid)
    if use_cv:
        bface = np.asarray(base(face), dtype=np.float64) ** (1.0 - a)
        profb = base.radial_profile()
        tr_exact = cross_section_integral(
            lambda ss: np.asarray(profb(ss)) ** (1.0 - a), n, norm=norm)
        tr = tr - _trace_int(bface, grid) + tr_exact
    else:
        profb = base.radial_profile()
        dprofb = base.radial_dprofile()
        # the integrands live at ||z + e|| >= R_ins - 1 outside the box
        r_eff = max(min(_radius_tuple(spec.radius, n)) - 1.0, 1.0)
        acc.add_tail(lambda rr: np.asarray(rr) * np.abs(np.asarray(dprofb(rr)))
                     * np.asarray(profb(rr)) ** (-a),
                     n, r_eff, norm, a - 1.0)
        acc.add_tail(lambda rr: np.asarray(profb(rr)) ** (1.0 - a),
                     n, r_eff, norm, abs(a - n) + 1.0)
        # boundary-face tail, one dimension lower
        acc.add_tail(lambda rr: np.asarray(profb(rr)) ** (1.0 - a),
                     n - 1, _radius_tuple(spec.radius, n)[-1], None, 1.0)
    rhs = BW + tr
    return lhs, rhs, {}


def _eval_logsob(g, aux, ps, norm, res, use_cv, acc):
    spec = aux["spec"]
    n = ps.n
    W = aux["W"]
    base = aux.get("base", W)
    wstar = conjugate_analytic(W).analytic
    if n <= 2:
        grid = _grid_full(n, spec.radius, res)
        pts = grid.points()

        def terms(fam):
            v = np.asarray(fam(pts), dtype=np.float64)
            gr = np.asarray(fam.grad(pts), dtype=np.float64)
            ev = np.exp(-v)
            return (_int_grid((v + wstar(gr)) * ev, grid), _int_grid(ev, grid))

        lhs, mass = terms(g)
        if use_cv:
            lb, mb = terms(base)
            le, me = _logsob_exact(W, norm, n, acc)
            lhs = lhs - lb + le
            mass = mass - mb + me
        return lhs, n * mass, {}
    lhs, mass = _logsob_exact_for(g, W, norm, n, acc, res)
    return lhs, n * mass, {}


def _logsob_exact(W, norm, n, acc):
    prof, dprof = W.radial_profile(), W.radial_dprofile()
    Wc = W.conjugate()

    def ip(rr):
        v = np.asarray(prof(rr))
        gp = np.abs(np.asarray(dprof(rr)))
        ws = Wc.scale * gp ** Wc.power / Wc.power + Wc.offset
        return (v + ws) * np.exp(-v)

    val, err = integrate_radial(ip, n, "full", norm=norm, full_output=True)
    acc.add(err)
    mass, err2 = integrate_radial(lambda rr: np.exp(-np.asarray(prof(rr))),
                                  n, "full", norm=norm, full_output=True)
    acc.add(err2)
    return val, mass


def _logsob_exact_for(g, W, norm, n, acc, res):
    prof, dprof = g.radial_profile(), g.radial_dprofile()
    Wc = W.conjugate()

    def ip(rr):
        v = np.asarray(prof(rr))
        gp = np.abs(np.asarray(dprof(rr)))
        ws = Wc.scale * gp ** Wc.power / Wc.power + Wc.offset
        return (v + ws) * np.exp(-v)

    val = integrate_radial(ip, n, "full", norm=norm, method="de", resolution=res)
    mass = integrate_radial(lambda rr: np.exp(-np.asarray(prof(rr))), n, "full",
                            norm=norm, method="de", resolution=res)
    return val, mass


def _eval_lp_logsob(f, aux, ps, norm, res, use_cv, acc):
    spec = aux["spec"]
    n, p = ps.n, ps.p
    L = aux["constant"]
    base = aux.get("base", f)
    dual = norm.dual()
    grid = _grid_full(n, spec.radius, res)
    pts = grid.points()

    def raw(fam):
        v = np.asarray(fam(pts), dtype=np.float64) ** p
        gr = np.asarray(fam.grad(pts), dtype=np.float64)
        xlog = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
        return (_int_grid(v, grid), _int_grid(xlog, grid),
                _int_grid(dual(gr) ** p, grid))

    M, XL, G = raw(f)
    if use_cv:
        Mb, XLb, Gb = raw(base)
        profb = base.radial_profile()
        Me, e1 = integrate_radial(lambda rr: np.asarray(profb(rr)) ** p, n, "full",
                                  norm=norm, full_output=True)

        def xlog_prof(rr):
            v = np.asarray(profb(rr)) ** p
            return np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)

        XLe, e2 = integrate_radial(xlog_prof, n, "full", norm=norm, full_output=True)
        Ge, e3 = integrate_radial(grad_dual_power_radial(base, p), n, "full",
                                  norm=norm, full_output=True)
        for e in (e1, e2, e3):
            acc.add(e)
        M, XL, G = M - Mb + Me, XL - XLb + XLe, G - Gb + Ge
    ent = XL - M * math.log(M)
    lhs = (n / p) * M * math.log(L * G / M)
    return lhs, ent, {"mass": M, "G": G}


def _eval_logsob_trace(f, aux, ps, norm, res, use_cv, acc):
    spec = aux["spec"]
    n, p = ps.n, ps.p
    C = aux["C"]
    base = aux.get("base", f)
    dual = norm.dual()
    grid = _grid_half(n, spec.radius, res)
    pts = grid.points()

    def raw(fam):
        v = np.asarray(fam(pts), dtype=np.float64) ** p
        gr = np.asarray(fam.grad(pts), dtype=np.float64)
        xlog = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
        face_v = v[0]
        return (_int_grid(v, grid), _int_grid(xlog, grid),
                _int_grid(dual(gr) ** p, grid), _trace_int(face_v, grid))

    M, XL, G, Tr = raw(f)
    if use_cv:
        Mb, XLb, Gb, Trb = raw(base)
        prof = base.radial_profile()
        Me, e1 = integrate_radial(lambda rr: np.asarray(prof(rr)) ** p, n,
                                  "shifted-half", norm=norm, full_output=True)

        def xlog_prof(rr):
            v = np.asarray(prof(rr)) ** p
            return np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)

        XLe, e2 = integrate_radial(xlog_prof, n, "shifted-half", norm=norm,
                                   full_output=True)
        Ge, e3 = integrate_radial(grad_dual_power_radial(base, p), n,
                                  "shifted-half", norm=norm, full_output=True)
        Tre = cross_section_integral(lambda ss: np.asarray(prof(ss)) ** p, n, norm=norm)
        for e in (e1, e2, e3):
            acc.add(e)
        M, XL, G, Tr = M - Mb + Me, XL - XLb + XLe, G - Gb + Ge, Tr - Trb + Tre
    ent = XL - M * math.log(M)
    lhs = (C / p) ** (1.0 - p) * G - n * M - Tr
    return lhs, ent, {"mass": M, "G": G, "Tr": Tr}


# ---------------------------------------------------------------------------
# normalization of perturbed inputs
# ---------------------------------------------------------------------------

def _renormalize(ineq_id, inp, base, ps, norm, res, spec):
    """Rescale or shift a perturbed input so the statement's normalization
    holds, using the control-variate mass estimate."""
    n, a = ps.n, ps.a
    if ineq_id in ("CASE1", "GN1", "BBLPHI-DYN"):
        r_exp, power = -a, "mult"
    elif ineq_id in ("IC2", "BBL2-DYN", "BBL-CLASSIC-DYN", "IC-NPLUS1"):
        r_exp, power = -float(n), "mult"
    elif ineq_id in ("CASE2", "BBL-CONCAVE-DYN"):
        r_exp, power = a, "mult"
    elif ineq_id in ("BBL-TRACE", "IC-TRACE"):
        r_exp, power = -a, "mult"
    elif ineq_id in ("PL-DYN", "LOGSOB"):
        r_exp, power = None, "exp"
    else:
        return inp

    if power == "exp":
        grid = _grid_full(n, spec.radius, res)
        pts = grid.points()
        mass = _int_grid(np.exp(-np.asarray(inp(pts), dtype=np.float64)), grid)
        mass_b = _int_grid(np.exp(-np.asarray(base(pts), dtype=np.float64)), grid)
        return inp.shifted(math.log(mass - mass_b + 1.0))

    half = spec.pipeline == "half-grid"
    grid = _grid_half(n, spec.radius, res) if half else _grid_full(n, spec.radius, res)
    mass = _power_grid(inp, r_exp, grid)
    mass_b = _power_grid(base, r_exp, grid)
    mass_hat = mass - mass_b + 1.0
    c = mass_hat ** (-1.0 / r_exp)
    return inp.rescaled(c)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _evaluate(ineq_id, inp, aux, ps, norm, h, res, use_cv, beta):
    acc = _Acc()
    out = _evaluate_inner(ineq_id, inp, aux, ps, norm, h, res, use_cv, beta, acc)
    lhs, rhs, ex = out
    return lhs, rhs, ex, acc.err, acc.trunc


def _evaluate_inner(ineq_id, inp, aux, ps, norm, h, res, use_cv, beta, acc):
    if ineq_id in ("CASE1", "IC2", "GN1", "IC-NPLUS1"):
        lhs, rhs, ex = _eval_gradient_family(ineq_id, inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id == "CASE2":
        lhs, rhs, ex = _eval_case2(inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id in ("BBL2-DYN", "BBLPHI-DYN", "PL-DYN", "BBL-CLASSIC-DYN"):
        lhs, rhs, ex = _eval_q_dyn(ineq_id, inp, aux, ps, norm, h, res, use_cv, acc, beta)
    elif ineq_id == "BBL-CONCAVE-DYN":
        lhs, rhs, ex = _eval_concave_dyn(inp, aux, ps, norm, h, res, use_cv, acc)
    elif ineq_id in ("SOBOLEV", "GN-PLUS", "GN-MINUS", "GN-CONCAVE"):
        lhs, rhs, ex = _eval_gn_family(ineq_id, inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id in ("SOBOLEV-TRACE", "GN-TRACE"):
        lhs, rhs, ex = _eval_trace_gn(ineq_id, inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id == "BBL-TRACE":
        lhs, rhs, ex = _eval_bbl_trace(inp, aux, ps, norm, h, res, use_cv, acc)
    elif ineq_id == "IC-TRACE":
        lhs, rhs, ex = _eval_ic_trace(inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id == "LOGSOB":
        lhs, rhs, ex = _eval_logsob(inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id == "LP-LOGSOB":
        lhs, rhs, ex = _eval_lp_logsob(inp, aux, ps, norm, res, use_cv, acc)
    elif ineq_id == "LOGSOB-TRACE":
        lhs, rhs, ex = _eval_logsob_trace(inp, aux, ps, norm, res, use_cv, acc)
    else:
        raise KeyError(ineq_id)
    return lhs, rhs, ex


def _validate_params(ineq_id, ps):
    n, a, p = ps.n, ps.a, ps.p
    if ineq_id in ("CASE1", "GN1"):
        if not ((a >= n or (n == 1 and a > 1)) and param_region(n, a, p)):
            raise InadmissibleParams(f"{ineq_id}: (n,a,p)=({n},{a},{p}) inadmissible")
    elif ineq_id in ("IC2", "BBL2-DYN"):
        if n < 2:
            raise InadmissibleParams(f"{ineq_id} needs n >= 2")
        if not param_region(n, float(n), p):
            raise InadmissibleParams(f"{ineq_id}: p={p} outside (1, n/(n+1-a)) at a=n")
    elif ineq_id == "BBLPHI-DYN":
        if not (a >= n or (n == 1 and a > 1)) or not param_region(n, a, p):
            raise InadmissibleParams(f"{ineq_id}: inadmissible (n,a,p)")
    elif ineq_id in ("CASE2", "BBL-CONCAVE-DYN", "GN-CONCAVE"):
        if a <= 0:
            raise InadmissibleParams(f"{ineq_id} needs a > 0")
    elif ineq_id == "SOBOLEV":
        if not (n >= 2 and 1 < p < n):
            raise InadmissibleParams("SOBOLEV needs n >= 2 and p in (1, n)")
    elif ineq_id == "GN-PLUS":
        if not (a > n and 1 < p < a):
            raise InadmissibleParams("GN-PLUS needs a > n and 1 < p < a")
    elif ineq_id == "GN-MINUS":
        if not (p > a and param_region(n, a, p)):
            raise InadmissibleParams("GN-MINUS needs p > a inside the admissible region")
    elif ineq_id in ("BBL-TRACE", "IC-TRACE"):
        if not (n >= 2 and a >= n):
            raise InadmissibleParams(f"{ineq_id} needs n >= 2 and a >= n")
    elif ineq_id == "SOBOLEV-TRACE":
        if not (n >= 2 and 1 < p < n):
            raise InadmissibleParams("SOBOLEV-TRACE needs n >= 2 and p in (1, n)")
    elif ineq_id == "GN-TRACE":
        if not (a >= n > p > 1):
            raise InadmissibleParams("GN-TRACE needs a >= n > p > 1")
    elif ineq_id == "LOGSOB-TRACE":
        if n < 2:
            raise InadmissibleParams("LOGSOB-TRACE needs n >= 2")


def verify(ineq_id: str, params: ParamSet | None = None, *, h: float | None = None,
           seed: int | None = None, eps: float = 0.1, equality: bool = False,
           resolution: int | None = None, control_variate: bool | None = None,
           beta: float | None = None, norm: Norm | None = None,
           radius=None) -> InequalityReport:
    """Run one verifier and produce a report with an oriented gap, a
    two-resolution tolerance budget and a verdict."""
    spec = _spec(ineq_id)
    if radius is not None:
        from dataclasses import replace as _dat_replace
        spec = _dat_replace(spec, radius=radius)
    ps = params if params is not None else spec.params
    _validate_params(ineq_id, ps)
    if norm is None:
        norm = _norm_for(spec, ps)
    if spec.needs_h:
        h = 0.5 if h is None else float(h)
        if h < 0:
            raise ValueError("h must be nonnegative")
    else:
        h = None
    res = resolution if resolution is not None else spec.resolution
    if res < 8:
        raise ValueError("resolution too small")
    if beta is None:
        beta = spec.beta

    base, aux = _build_base(ineq_id, ps, norm)
    if equality:
        inp = base
        use_cv = False or spec.force_cv
        seed = None
    else:
        if seed is None:
            seed = 0
        inp = _perturb(ineq_id, base, ps, norm, seed, eps)
        use_cv = True if control_variate is None else control_variate
        use_cv = use_cv or spec.force_cv
        inp = _renormalize(ineq_id, inp, base, ps, norm, res, spec)
    aux = dict(aux)
    aux["base"] = base
    aux["spec"] = spec

    res_low = max(res // 2, 8)
    lhs, rhs, extras, err_hi, trunc = _evaluate(ineq_id, inp, aux, ps, norm, h,
                                                res, use_cv, beta)
    gap = lhs - rhs
    lhs2, rhs2, _, _, _ = _evaluate(ineq_id, inp, aux, ps, norm, h, res_low,
                                    use_cv, beta)
    gap_low = lhs2 - rhs2
    extras = dict(extras)
    extras["trunc_bound"] = trunc

    scale = max(abs(lhs), abs(rhs), 1e-30)
    budget = 2.0 * abs(gap - gap_low) + err_hi + trunc + 1e-9 * scale
    verdict = _verdict(gap, budget, equality and spec.equality_claim)
    return InequalityReport(
        ineq_id=ineq_id,
        params=ps.as_dict(),
        lhs=lhs, rhs=rhs, gap=gap,
        rel_gap=gap / scale,
        budget=budget,
        verdict=verdict,
        equality_expected=bool(equality and spec.equality_claim),
        h=h, seed=seed,
        eps=None if equality else eps,
        resolution=res, resolution_low=res_low,
        control_variate=use_cv,
        extras=extras,
    )
