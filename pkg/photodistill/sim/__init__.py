from .distill import (
    DistillationReport,
    HeraldSpec,
    LossPipelineReport,
    OptimalityScan,
    PhiPlusCheck,
    SpeciesContribution,
    combine_total_error,
    default_herald,
    effective_unitary_error,
    error_scan,
    extrapolate_unitary_error,
    fourier_slope_check,
    heralded_distillation,
    hom_coincidence,
    hom_visibility,
    nonuniform_loss_pipeline,
    optimality_scan,
    phi_plus_herald_check,
)
from .events import event_probability, labelled_outcome_probabilities, outcome_distribution
from .species import NoiseModel, PhotonSourceModel, SpeciesTerm, expand_species
