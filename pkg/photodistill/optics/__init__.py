from .matrices import (
    ComplexMatrix,
    DiagonalLoss,
    MatrixKind,
    beam_splitter,
    compose_lossy,
    dilate,
    direct_sum_and_chain,
    fourier_matrix,
    haar_unitary,
    hadamard_matrix,
    is_sub_unitary,
    is_unitary,
    max_over_conjugation_fidelity,
    trace_fidelity,
    trace_overlap,
)
from .permanent import MAX_PERMANENT_SIZE, naive_permanent, permanent
