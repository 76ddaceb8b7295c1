"""Binomial transforms L_{n,lambda} of classical positive linear operators.

The transform of an operator sequence (L_n) is

    L_{n,lambda}(f)(x) = sum_p C(n,p) lambda^p (1-lambda)^(n-p) L_p(f_{p/n,x})(x),

with f_{alpha,x}(t) = f(alpha t + (1-alpha) x).  The package evaluates it for
seven built-in families and checks its moments, error bounds, asymptotics
and shape preservation numerically.
"""
from .errors import *  # noqa: F401,F403
from .functions import (
    HALF_LINE,
    REAL_LINE,
    UNIT,
    FUNCTION_NAMES,
    Interval,
    ScalarFunction,
    closed,
    constant,
    cosine,
    exponential,
    make_function,
    monomial,
    polynomial,
    psi,
    sine,
)
from .operators import (
    FAMILY_NAMES,
    ExponentialCoefficient,
    Family,
    OperatorInstance,
    apply,
    compose_alpha,
    exponential_coefficient,
    make_operator,
)
from .transform import LambdaSchedule, TransformedOperator, phi_derivative, phi_profile, transform_apply
from .moments import (
    GrowthConstants,
    WeightFunctionG,
    central_moment,
    estimate_growth,
    estimate_Mg,
    known_growth,
    lemma2_sum_identity,
    sat_bound,
    transformed_moment,
)
from .estimates import (
    BoundKind,
    ErrorBoundReport,
    ModulusEstimate,
    calibrate_constant,
    ditzian_totik_bound,
    dt_modulus,
    error_bound_pointwise,
    error_bound_weighted,
    exp_cosh_bound,
    modulus,
)
from .asymptotics import RateReport, VoronovskajaSpec, rate_check, residual_sequence, voronovskaja_spec, voronovskaja_target
from .shape import (
    NOT_APPLICABLE,
    ShapeVerdict,
    check_convex,
    check_decreasing_in_n,
    check_increasing,
    estimate_lipschitz,
    lambda_monotonicity_check,
    sandwich_check,
)

__version__ = "0.1.0"
