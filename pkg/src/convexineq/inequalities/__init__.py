"""Inequality catalog: parameters, extremals, sharp constants, verifiers."""

from .params import (ParamSet, InadmissibleParams, theta_solve, theta_residual,
                     param_region, region_boundary)
from .extremals import (PhiSpec, extremal, sharp_constant, lp_logsob_constant,
                        scaling_optimize, golden_min, make_bumps,
                        make_radial_bumps, grad_dual_power_radial)
from .verify import (INEQUALITY_IDS, InequalityReport, verify, default_params,
                     equality_claimed, needs_h)

__all__ = [
    "ParamSet", "InadmissibleParams", "theta_solve", "theta_residual",
    "param_region", "region_boundary", "PhiSpec", "extremal",
    "sharp_constant", "lp_logsob_constant", "scaling_optimize", "golden_min",
    "make_bumps", "make_radial_bumps", "grad_dual_power_radial",
    "INEQUALITY_IDS", "InequalityReport", "verify", "default_params",
    "equality_claimed", "needs_h",
]
