"""Certified and estimated first zero-resonance couplings of radial potentials.

Three independent routes to the first resonant coupling ``kappa*`` of
``-Delta - kappa V``:

* the Yukawa series path (``n = 3``, ``V = exp(-r)/r``): exact rational
  interior coefficients and exponential-integral exterior terms give
  certified Wronskian signs and a certified bracket;
* Volterra integral solvers for any admissible radial potential in any
  dimension ``n >= 3``;
* a finite-element Rayleigh quotient that bounds ``kappa*`` from above.
"""

__version__ = "0.1.0"

from .enclosure import Enclosure, from_rational
from .errors import (AdmissibilityError, CertificationError, ConvergenceError, DomainError,
                     PrecisionError, ResonanceError)
from .potentials import AdmissibilityReport, RadialPotential, check_admissible, load_tabulated
from .radial_solver import (VolterraGrid, WronskianEstimate, find_first_resonance_general,
                            general_wronskian, solve_exterior, solve_interior)
from .specfun import exp_integral, exp_integral_bounds
from .variational import (RadialDiscretization, VariationalResult, classify_state,
                          comparison_bound, hardy_quotient, hardy_variational_J, variational_J)
from .wronskian import (ResonanceReport, WronskianSample, ZeroBracket, bracket_first_zero,
                        certified_sign, resonance_free_sweep, wronskian_enclosure)
from .yukawa_exterior import OmegaValue, omega, omega_bound, u_ext_at, u_ext_trace
from .yukawa_interior import (AlphaTable, BoundaryTrace, RationalPolynomial, build_alpha_table,
                              u_int_trace, verify_monotone_from)

__all__ = [name for name in dir() if not name.startswith("_")]
