"""Parameter bookkeeping: admissible (a, p) regions, conjugate exponents,
and the interpolation-exponent (theta) solvers for the four
Gagliardo-Nirenberg families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ParamSet", "InadmissibleParams", "theta_solve", "theta_residual",
           "param_region", "region_boundary"]


class InadmissibleParams(ValueError):
    """Raised when (n, a, p) lie outside the admissible region."""


@dataclass(frozen=True)
class ParamSet:
    n: int
    a: float
    p: float
    gamma: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InadmissibleParams("dimension must be >= 1")
        if self.p <= 1.0:
            raise InadmissibleParams("p must exceed 1")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    def as_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "p": self.p, "q": self.q,
                "gamma": self.gamma}


def param_region(n: int, a: float, p: float) -> bool:
    """Admissibility of (a, p) for the convex power family: the offset
    normalization and the integral of W^(1-a) are finite iff

        a >= n+1 and p > 1,  or  a in [n, n+1) and 1 < p < n/(n+1-a).
    """
    if n < 1 or p <= 1.0:
        return False
    if a >= n + 1:
        return True
    if a >= n:
        return p < n / (n + 1.0 - a)
    return False


def region_boundary(n: int, a_values) -> np.ndarray:
    """Upper boundary p = n/(n+1-a) for a in [n, n+1); +inf past a = n+1."""
    a_values = np.asarray(a_values, dtype=np.float64)
    out = np.full_like(a_values, np.inf)
    strip = (a_values >= n) & (a_values < n + 1)
    out[strip] = n / (n + 1.0 - a_values[strip])
    out[a_values < n] = np.nan
    return out


_THETA_KINDS = ("gn+", "gn-", "gn-concave", "gn-trace")


def _theta_coeffs(kind: str, n: int, p: float, a: float):
    """Return (lhs, slope_A, slope_B) for the affine equation
    lhs = theta*A + (1-theta)*B."""
    if kind == "gn+":
        return (a - p) / a, (n - p) / n, (a - p) / (a - 1.0)
    if kind == "gn-":
        return (p - a) / (a - 1.0), (p - n) / n, (p - a) / a
    if kind == "gn-concave":
        return (a + p) / (a + 1.0), (n - p) / n, (a + p) / a
    if kind == "gn-trace":
        return (n - 1.0) / n * (a - p) / (a - 1.0), (n - p) / n, (a - p) / (a - 1.0)
    raise ValueError(f"unknown theta family {kind!r}; pick one of {_THETA_KINDS}")


def theta_solve(kind: str, n: int, p: float, a: float) -> float:
    """Unique solution of the scaling identity for the chosen family;
    raises if it falls outside [0, 1] (inadmissible parameters)."""
    lhs, A, B = _theta_coeffs(kind, n, p, a)
    if A == B:
        raise InadmissibleParams("degenerate scaling identity")
    theta = (lhs - B) / (A - B)
    if not -1e-12 <= theta <= 1.0 + 1e-12:
        raise InadmissibleParams(
            f"theta={theta} outside [0,1] for {kind} at (n,p,a)=({n},{p},{a})")
    return min(max(theta, 0.0), 1.0)


def theta_residual(kind: str, n: int, p: float, a: float, theta: float) -> float:
    lhs, A, B = _theta_coeffs(kind, n, p, a)
    return lhs - (theta * A + (1.0 - theta) * B)
