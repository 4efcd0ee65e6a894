"""Numerical laboratory for bilinear spherical maximal functions and
bilinear Bochner-Riesz means on uniform periodic grids."""
from .grid import (CommensurabilityError, GridFunction, WrapAroundError, apply_fourier_multiplier,
                   fourier_transform, inverse_fourier_transform, load_snapshot, lorentz_norm,
                   lp_norm, rescale, sample, sample_many, save_snapshot)
from .kernels import BACKEND
from .quadrature import BallRule, SphereRule, ball_rule, sphere_rule
from .spherical import (direct_bilinear_average, linear_spherical_average,
                        multilinear_average, sliced_bilinear_average)
from .maximal import (RadiusGrid, bilinear_maximal, hl_maximal, pointwise_domination_report,
                      spherical_maximal, strong_bilinear_maximal)
from .counterexamples import (ScanRecord, annulus_family, fit_scaling_exponent,
                              knapp_family, run_scan)
from .profiles import BumpProfile, profile_corpus
from .bochner_riesz import (annular_bilinear, br_bilinear, br_bilinear_maximal, br_linear,
                            dyadic_profile_decomposition, kernel_decay_check,
                            lo_square_function, mixed_square_function,
                            multiplier_partition_check, s_op)
from .exponents import (ExponentPoint, RegionVerdict, alpha_critical, alpha_star,
                        global_region, localized_region, p_s)

__version__ = "0.1.0"
