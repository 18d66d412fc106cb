from .budget import (
    CI_FACTOR,
    DENOMINATOR_NOTE,
    BudgetRow,
    ErrorBudget,
    Estimate,
    SbbErrors,
    ZetaSensitivity,
    budget_with_ci,
    extract_errors,
    extract_errors_sbb,
    sbb_input_error,
    weighted_multi_error,
    zeta_sensitivity,
)
from .correlators import (
    QUANTITIES,
    CorrelatorSamples,
    CorrelatorSet,
    Protocol,
    SampleStats,
    correlator_from_counts,
    error_values,
    raw_visibility,
    sample_stats,
    visibility_in_range,
)
from .uncertainty import (
    PropagatedErrors,
    monte_carlo_uncertainty,
    numerical_uncertainty,
    propagate_uncertainty,
)
