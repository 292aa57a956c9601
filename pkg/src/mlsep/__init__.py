"""Mittag-Leffler zeros, fractional IVPs of order 1 < alpha < 2, and separation bounds."""

from .bounds import (
    CoeffPair,
    Envelope,
    HorizonReport,
    gronwall_envelope,
    horizon_Tstar,
    linear_envelope,
    nonlinear_coeffs,
    nonlinear_envelope,
    separation_check,
    shifted_coeffs,
    shifted_envelope,
)
from .fode import IVProblem, SolutionGrid, linear_closed_form, richardson_error, solve_ivp, voc_eval
from .ml_core import MLAccuracy, MLQuery, mittag_leffler, ml_deriv_neg_axis, ml_eval, ml_neg_axis
from .zeros import (
    NewtonOptions,
    ZeroRecord,
    fit_asymptote,
    has_real_zero,
    smallest_zero,
    sweep,
    threshold_alpha0,
)

__version__ = "0.1.0"
