"""Function spaces on (0, 1]: variable, grand, small and Musielak-Orlicz norms with embedding checks."""
__version__ = "0.1.0"

from .errors import (
    DomainError,
    GridError,
    IntegrationError,
    LebesgueKitError,
    ParameterError,
    SpecFormatError,
    UnsupportedRepresentation,
)
from .funcrep import (
    FunctionSpec,
    GeometricSteps,
    PowerLogLog,
    SampledFunction,
    StepFunction,
    build_example_no_rearrange,
    build_example_no_var_small,
    constant,
    function_from_spec,
    indicator,
)
from .quadrature import GrowthReport, QuadratureResult, classify_growth, integrate_graded, series_partial_sums
from .rearrange import decreasing_rearrangement, distribution, equimeasurability_check, increasing_rearrangement
from .exponents import (
    ConditionKind,
    ConditionParams,
    ConditionReport,
    ExponentSpec,
    check_condition,
    conjugate,
    exponent_for_theta,
    exponent_from_spec,
    rearrange_exponent,
)
from .norms import (
    GrandParams,
    MusielakParams,
    NormResult,
    grand_norm_def,
    grand_norm_rearr,
    holder_pairing,
    lp_norm,
    luxemburg_norm,
    musielak_modular,
    musielak_norm,
    small_norm,
    variable_modular,
)
