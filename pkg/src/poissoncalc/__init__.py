"""Stochastic calculus and isoperimetry on Poisson configuration spaces.

Simulates finite Poisson configurations on a box, implements the one-point
finite-difference gradient with its divergences, kernels, boundaries and
surface measures, and verifies the calculus' identities and inequalities by
seeded Monte Carlo with exact Poisson-law oracles.
"""

from .calculus import (carre_du_champ, diff, divergence, grad_norm,
                       grad_norm_power, laplacian)
from .clark import (PathGrid, clark_residual, compensated_integral,
                    poincare_from_clark, predictable_projection)
from .configuration import (Configuration, configuration_from_points, count,
                            perturb, sample_configuration,
                            sample_configurations)
from .estimates import Estimate, IdentityReport, McSpec
from .events import (EventSet, boundary_membership, boundary_probability,
                     complement, count_event, indicator, linear_event,
                     monotonicity_probe, surface_measure)
from .functionals import (Functional, TwoVariableProcess, constant_functional,
                          exp_count, linear_sum, region_count, total_count)
from .gaussian import GaussianKit, gaussian
from .identities import coarea_check, verify_identity
from .inequalities import (YoungFunction, cheeger_check, gaussian_iso_check,
                           mod_lsi_check, orlicz_norm, poincare_ratio)
from .intensity import deviation_profile, margulis_russo
from .kernels import (apply_kernel, kernel_measure, reversibility_check,
                      stationarity_check)
from .montecarlo import expect, median, paired_run
from .profiles import isoperimetric_profile, lsi_constant_witness
from .space import (EvaluationError, PointSpace, QuadSpec, Region,
                    build_box_space, integrate_sigma, sample_sigma,
                    sigma_measure)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
