from .qec import (
    GAMMA_SCHEMES,
    IsolineRow,
    LossBudget,
    OptimalSize,
    RegimeBoundaries,
    ResourceCurve,
    ResourceParams,
    SourceMarker,
    cost_multiplier,
    cost_ratio,
    crossover_point,
    gamma_cost,
    ghz_photon_cost,
    isoline_data,
    linear_validity_ratio,
    logical_cost,
    loss_budget_adjust,
    optimal_scheme_size,
    pauli_error,
    regime_boundaries,
    regime_of,
    required_distance,
)
from .sources import SourceEntry, default_sources, get_source, load_sources_csv
