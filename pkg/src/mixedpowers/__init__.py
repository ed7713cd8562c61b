"""Exact and asymptotic coefficients of products of powers of power series.

The central quantity is ``[z^{n_0}] f_1(z)^{n_1} ... f_m(z)^{n_m}``, exact via
:mod:`mixedpowers.exact_series` and asymptotic via the saddle-point circle
integral in :mod:`mixedpowers.saddle_engine`.
"""

from .errors import (
    CoalescenceError,
    ConstraintViolation,
    ConvergenceError,
    DomainError,
    InternalInconsistency,
    MixedPowersError,
    NoCriticalPoint,
    NonConvergence,
    NoSolution,
    PoleError,
    RegimeError,
    ToleranceViolation,
)
from .exact_series import BigCoefficient, RationalPoly, binomial, coeff_of_product, poly_mul, poly_pow
from .function_system import (
    AnalyticFactor,
    Direction,
    ExponentVector,
    FunctionSystem,
    NormSpec,
    direction_of,
    exponential_factor,
    reduce_vanishing,
)
from .critical_locus import (
    CriticalPoint,
    solve_critical,
    verify_strict_minimality,
    z_formula_planar,
    z_formula_trivariate,
)
from .phase_term import PhaseExpansion, check_phase_properties, eval_F, eval_G, taylor_F
from .saddle_engine import (
    AsymptoticEstimate,
    choose_epsilon,
    estimate,
    gaussian_leading,
    integral_large,
    integral_small,
    small_exponent_limit,
)
from .precision import get_precision, set_precision, working_precision

__version__ = "0.1.0"
