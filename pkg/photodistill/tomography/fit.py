"""Concatenated-network model fitted to a 4x4 amplitude matrix.

Model (rows = inputs): a 3-mode block on modes 0-2 followed by a splitter of
reflectivity R on modes 2 and 3. Mode 3 only reaches the splitter.
"""

from __future__ import annotations

import logging
from typing import List

import numpy as np
from pydantic import BaseModel
from scipy.optimize import minimize_scalar

from photodistill.errors import InvalidInputError
from photodistill.optics.matrices import trace_fidelity
from photodistill.tomography.decompose import sinkhorn_scaling

logger = logging.getLogger(__name__)

DEGENERATE_R = 1e-6


class ConcatenatedFit(BaseModel):
    r2: float
    model_abs: List[List[float]]
    block_abs: List[List[float]]
    fidelity_fit: float
    residual: float
    degenerate: bool


def concatenated_amplitudes(block_abs, reflectivity: float) -> np.ndarray:
    """|(U_block + 1) (1 + BS(R))| for a 3x3 block amplitude matrix."""
    b = np.abs(np.asarray(block_abs, dtype=float))
    r = reflectivity
    m = np.zeros((4, 4))
    m[:3, :2] = b[:, :2]
    m[:3, 2] = b[:, 2] * np.sqrt(r)
    m[:3, 3] = b[:, 2] * np.sqrt(1.0 - r)
    m[3, 2] = np.sqrt(1.0 - r)
    m[3, 3] = np.sqrt(r)
    return m


def fit_concatenated_model(u_abs) -> ConcatenatedFit:
    u = np.abs(np.asarray(u_abs, dtype=complex))
    if u.shape != (4, 4):
        raise InvalidInputError(f"concatenated fit needs 4x4 amplitudes, got shape {u.shape}")

    # amplitude each input row sends into the splitter
    feed = np.sqrt(u[:3, 2] ** 2 + u[:3, 3] ** 2)

    def cost(r: float) -> float:
        return float(
            (u[3, 2] - np.sqrt(1.0 - r)) ** 2
            + (u[3, 3] - np.sqrt(r)) ** 2
            + np.sum((u[:3, 2] - feed * np.sqrt(r)) ** 2)
            + np.sum((u[:3, 3] - feed * np.sqrt(1.0 - r)) ** 2)
        )

    res = minimize_scalar(cost, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    r2 = float(np.clip(res.x, 0.0, 1.0))
    degenerate = r2 < DEGENERATE_R or r2 > 1.0 - DEGENERATE_R
    if degenerate:
        logger.warning("splitter reflectivity fit is degenerate (R = %.6f)", r2)

    # leakage into row 4, columns 1-2 is dropped; the 3x3 block is renormalised
    block = np.column_stack([u[:3, 0], u[:3, 1], feed])
    r, c, _, _ = sinkhorn_scaling(block ** 2)
    block = np.sqrt(r[:, None] * block ** 2 * c[None, :])

    model = concatenated_amplitudes(block, r2)
    return ConcatenatedFit(
        r2=r2,
        model_abs=model.tolist(),
        block_abs=block.tolist(),
        fidelity_fit=trace_fidelity(u, model, 4),
        residual=float(res.fun),
        degenerate=degenerate,
    )
