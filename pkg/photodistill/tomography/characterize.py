from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from photodistill.optics.matrices import fourier_matrix, trace_overlap
from photodistill.schemas import MatrixPayload
from photodistill.tomography.decompose import (
    CountMatrix,
    amplitudes_from_counts,
    decompose_losses,
    extract_reflectivity,
    mc_reflectivity_uncertainty,
    transmission_map,
)
from photodistill.tomography.fit import fit_concatenated_model
from photodistill.tomography.phases import reconstruct_phases_3mode

logger = logging.getLogger(__name__)


class CharacterizationResult(BaseModel):
    t_amplitudes: List[List[float]]
    d_in: List[float]
    d_out: List[float]
    u_abs: List[List[float]]
    gauge: str
    sinkhorn_iterations: int
    sinkhorn_residual: float
    u_phased: Optional[MatrixPayload] = None
    unitarity_residual: Optional[float] = None
    r_fit: Optional[float] = None
    model_abs: Optional[List[List[float]]] = None
    fidelity_fit: Optional[float] = None
    fidelity_full: Optional[float] = None
    fidelity_full_re: Optional[float] = None
    reflectivity: Optional[float] = None
    reflectivity_rel_se: Optional[float] = None
    eta_map: List[List[float]]
    eta_mean: float
    eta_sd: float
    warnings: List[str] = []


def ideal_distillation_matrix() -> np.ndarray:
    """3-mode Fourier matrix in the reconstruction gauge."""
    return np.asarray(reconstruct_phases_3mode(np.abs(np.asarray(fourier_matrix(3)))).matrix)


def characterize(
    counts: CountMatrix,
    fit_model: bool = True,
    phases: bool = True,
    anchor: float | None = None,
    mc_draws: int = 0,
    seed: int = 0,
) -> CharacterizationResult:
    """Counts -> amplitudes -> loss decomposition, then whatever the mode count allows.

    4 modes: concatenated fit and, from its 3x3 block, phases and full fidelity.
    3 modes: phases directly. 2 modes: splitter reflectivity.
    """
    t = amplitudes_from_counts(counts)
    dec = decompose_losses(t, anchor=anchor)
    tmap = transmission_map(dec.d_in, dec.d_out)
    warnings = list(dec.warnings)
    n = dec.u_abs.shape[0]

    extra: dict = {}
    block = None
    if n == 4 and fit_model:
        fit = fit_concatenated_model(dec.u_abs)
        extra.update(r_fit=fit.r2, model_abs=fit.model_abs, fidelity_fit=fit.fidelity_fit)
        if fit.degenerate:
            warnings.append(f"splitter reflectivity fit is degenerate (R2 = {fit.r2:.6f})")
        block = np.asarray(fit.block_abs)
    elif n == 3:
        block = dec.u_abs

    if phases and block is not None:
        rec = reconstruct_phases_3mode(block)
        ideal = ideal_distillation_matrix()
        # conjugation branch closest to the ideal; modulus drops the global phase
        overlap = max((trace_overlap(ideal, m, 3) for m in (rec.matrix, rec.conjugate)), key=lambda z: z.real)
        extra.update(
            u_phased=MatrixPayload.from_array(np.asarray(rec.matrix)),
            unitarity_residual=rec.unitarity_residual,
            fidelity_full=abs(overlap),
            fidelity_full_re=overlap.real,
        )

    if n == 2:
        extra["reflectivity"] = extract_reflectivity(dec.u_abs)
        if mc_draws > 0:
            extra["reflectivity_rel_se"] = mc_reflectivity_uncertainty(counts, mc_draws, seed)

    logger.info("characterised %dx%d network (gauge %s)", n, n, dec.gauge)
    return CharacterizationResult(
        t_amplitudes=np.asarray(t).real.tolist(),
        d_in=dec.d_in.amplitudes.tolist(),
        d_out=dec.d_out.amplitudes.tolist(),
        u_abs=dec.u_abs.tolist(),
        gauge=dec.gauge,
        sinkhorn_iterations=dec.iterations,
        sinkhorn_residual=dec.residual,
        eta_map=tmap.eta,
        eta_mean=tmap.mean,
        eta_sd=tmap.sd,
        warnings=warnings,
        **extra,
    )
