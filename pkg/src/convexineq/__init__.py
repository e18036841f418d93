"""convexineq: numerical convex analysis (Legendre conjugates, Hopf-Lax
inf/sup-convolutions, 1D optimal transport) and a verification harness for
the sharp Sobolev / Gagliardo-Nirenberg family of inequalities on R^n and
the half-space."""

from ._accel import USING_NUMBA
from .grids import (Domain, Grid, GridFunction, make_grid, sample,
                    gradient_fd, integrate, integrate_radial, ialpha)
from .conjugates import (Norm, EUCLID, PowerPotential, ConcavePotential,
                         PotPower, ExpOfPotential, dual_norm,
                         conjugate_analytic, conjugate_discrete,
                         concave_conjugate, conjugate_halfspace)
from .hopflax import (inf_convolution, inf_convolution_halfspace,
                      sup_convolution, check_admissible, hj_derivative_at_zero)
from .transport import (Density1D, monotone_map, monge_ampere_residual,
                        displacement_interpolation, det_lemma_check,
                        bbl_transport_check_1d)
from .inequalities import (ParamSet, InadmissibleParams, theta_solve,
                           param_region, extremal, sharp_constant,
                           scaling_optimize, INEQUALITY_IDS, verify)

__version__ = "0.1.0"
