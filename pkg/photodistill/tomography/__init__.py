from .characterize import CharacterizationResult, characterize, ideal_distillation_matrix
from .decompose import (
    CountMatrix,
    LossDecomposition,
    TransmissionMap,
    amplitudes_from_counts,
    decompose_losses,
    eta_db,
    extract_reflectivity,
    mc_reflectivity_uncertainty,
    sinkhorn_scaling,
    transmission_map,
)
from .fit import ConcatenatedFit, concatenated_amplitudes, fit_concatenated_model
from .phases import PhaseReconstruction, reconstruct_phases_3mode
