"""Transfer-matrix amplitudes from single-photon counts, and their loss decomposition.

|T| = D_in |U| D_out, with |U|^2 doubly stochastic. The split of the losses
between D_in and D_out is fixed only up to one scale factor (the gauge).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, field_validator

from photodistill.errors import ConvergenceError, InvalidInputError
from photodistill.optics.matrices import ComplexMatrix, DiagonalLoss, MatrixKind, is_sub_unitary

logger = logging.getLogger(__name__)

SINKHORN_TOL = 1e-12
SINKHORN_MAX_ITER = 10_000


class CountMatrix(BaseModel):
    """Single-photon counts S_ij, row i = injected input, column j = detected output."""

    counts: List[List[int]]
    s_norm: int
    duration_s: Optional[float] = None

    @field_validator("counts")
    @classmethod
    def _grid(cls, v: List[List[int]]) -> List[List[int]]:
        if not v or any(len(row) != len(v[0]) for row in v) or not v[0]:
            raise ValueError("counts must form a non-empty rectangular grid")
        if any(x < 0 for row in v for x in row):
            raise ValueError("counts must be nonnegative")
        return v

    @field_validator("s_norm")
    @classmethod
    def _norm(cls, v: int) -> int:
        if v < 0:
            raise ValueError("s_norm must be nonnegative")
        return v

    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)


def amplitudes_from_counts(c: CountMatrix) -> ComplexMatrix:
    if c.s_norm <= 0:
        raise InvalidInputError("s_norm must be positive")
    s = c.array()
    if np.any(s > c.s_norm):
        raise InvalidInputError("a count exceeds the normalisation s_norm")
    t = np.sqrt(s / c.s_norm)
    kind = MatrixKind.SUB_UNITARY if is_sub_unitary(t) else MatrixKind.GENERAL
    return ComplexMatrix(t, kind)


def sinkhorn_scaling(a2: np.ndarray, tol: float = SINKHORN_TOL, max_iter: int = SINKHORN_MAX_ITER):
    """Row/column scalings ``r, c`` making ``diag(r) a2 diag(c)`` doubly stochastic.

    Zero entries stay zero. Returns ``(r, c, iterations, residual)``.
    """
    a2 = np.asarray(a2, dtype=float)
    if a2.ndim != 2 or a2.shape[0] != a2.shape[1]:
        raise InvalidInputError(f"Sinkhorn scaling needs a square matrix, got shape {a2.shape}")
    if np.any(a2 < 0) or not np.all(np.isfinite(a2)):
        raise InvalidInputError("Sinkhorn scaling needs finite nonnegative entries")
    if np.any(a2.sum(axis=1) == 0) or np.any(a2.sum(axis=0) == 0):
        raise InvalidInputError("a row or column carries no transmission")

    n = a2.shape[0]
    r = np.ones(n)
    c = np.ones(n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        r = 1.0 / (a2 @ c)
        c = 1.0 / (a2.T @ r)
        b = r[:, None] * a2 * c[None, :]
        residual = float(max(np.max(np.abs(b.sum(axis=1) - 1.0)), np.max(np.abs(b.sum(axis=0) - 1.0))))
        if residual <= tol:
            logger.debug("Sinkhorn converged after %d iterations, residual %.3e", it, residual)
            return r, c, it, residual
    raise ConvergenceError(f"Sinkhorn scaling did not converge in {max_iter} iterations", residual)


@dataclass(frozen=True)
class LossDecomposition:
    d_in: DiagonalLoss
    u_abs: np.ndarray
    d_out: DiagonalLoss
    iterations: int
    residual: float
    gauge: str
    warnings: list[str] = field(default_factory=list)


def decompose_losses(
    t,
    anchor: float | None = None,
    anchor_side: str = "in",
    anchor_index: int = 0,
    tol: float = SINKHORN_TOL,
    max_iter: int = SINKHORN_MAX_ITER,
) -> LossDecomposition:
    """Split |T| into input losses, a doubly stochastic |U| and output losses.

    Gauge: by default the geometric means of D_in and D_out are equal. With
    ``anchor`` the entry ``anchor_index`` of D_in (or D_out) is pinned to that
    value instead. Either way D_in |U| D_out reproduces |T|.
    """
    a = np.abs(np.asarray(t))
    r, c, iterations, residual = sinkhorn_scaling(a ** 2, tol, max_iter)
    u_abs = np.sqrt(r[:, None] * a ** 2 * c[None, :])
    d_in0 = 1.0 / np.sqrt(r)
    d_out0 = 1.0 / np.sqrt(c)

    warnings: list[str] = []
    if anchor is None:
        gauge = "balanced"
        k = np.sqrt(np.exp(np.mean(np.log(d_out0))) / np.exp(np.mean(np.log(d_in0))))
    else:
        if not 0.0 < anchor <= 1.0:
            raise InvalidInputError(f"gauge anchor must lie in (0, 1], got {anchor}")
        if anchor_side == "in":
            k = anchor / d_in0[anchor_index]
        elif anchor_side == "out":
            k = d_out0[anchor_index] / anchor
        else:
            raise InvalidInputError(f"anchor side must be 'in' or 'out', got {anchor_side!r}")
        gauge = f"anchored d_{anchor_side}[{anchor_index}]={anchor}"

    d_in = d_in0 * k
    d_out = d_out0 / k
    if np.max(d_in) > 1.0:
        scale = np.max(d_in)
        d_in, d_out = d_in / scale, d_out * scale
        warnings.append("gauge shifted so that no input transmission exceeds 1")
    elif np.max(d_out) > 1.0:
        scale = np.max(d_out)
        d_in, d_out = d_in * scale, d_out / scale
        warnings.append("gauge shifted so that no output transmission exceeds 1")
    if np.max(d_in) > 1.0 + 1e-12 or np.max(d_out) > 1.0 + 1e-12:
        raise InvalidInputError("transfer amplitudes cannot be explained by passive losses")
    for w in warnings:
        logger.warning(w)

    return LossDecomposition(
        d_in=DiagonalLoss(np.minimum(d_in, 1.0)),
        u_abs=u_abs,
        d_out=DiagonalLoss(np.minimum(d_out, 1.0)),
        iterations=iterations,
        residual=residual,
        gauge=gauge,
        warnings=warnings,
    )


def extract_reflectivity(u_abs) -> float:
    """R = |u_11|^2 of a 2x2 splitter block."""
    b = np.abs(np.asarray(u_abs, dtype=complex))
    if b.shape != (2, 2):
        raise InvalidInputError(f"reflectivity needs a 2x2 block, got shape {b.shape}")
    sq = b ** 2
    if np.max(np.abs(sq.sum(axis=0) - 1.0)) > 1e-6 or np.max(np.abs(sq.sum(axis=1) - 1.0)) > 1e-6:
        raise InvalidInputError("2x2 block is not doubly stochastic")
    return float(sq[0, 0])


class TransmissionMap(BaseModel):
    eta: List[List[float]]
    mean: float
    sd: float

    def loss_db(self) -> List[List[float]]:
        return [[eta_db(x) for x in row] for row in self.eta]


def eta_db(eta: float) -> float:
    if eta <= 0.0:
        raise InvalidInputError("loss in dB is undefined for zero transmission")
    return float(-10.0 * np.log10(eta))


def transmission_map(d_in: DiagonalLoss, d_out: DiagonalLoss) -> TransmissionMap:
    """End-to-end transmission eta_ij = d_in,i^2 d_out,j^2 for every input/output pair."""
    eta = np.outer(d_in.amplitudes ** 2, d_out.amplitudes ** 2)
    sd = float(np.std(eta, ddof=1)) if eta.size > 1 else 0.0
    return TransmissionMap(eta=eta.tolist(), mean=float(np.mean(eta)), sd=sd)


def mc_reflectivity_uncertainty(c: CountMatrix, draws: int = 1000, seed: int = 0) -> float:
    """Relative spread of R under Poisson resampling of every count."""
    s = c.array()
    if s.shape != (2, 2):
        raise InvalidInputError(f"reflectivity resampling needs 2x2 counts, got shape {s.shape}")
    if np.any(s <= 0):
        raise InvalidInputError("reflectivity resampling needs strictly positive counts")
    if c.s_norm <= 0:
        raise InvalidInputError("s_norm must be positive")
    rng = np.random.default_rng(seed)
    values = np.empty(draws)
    for k in range(draws):
        resampled = rng.poisson(s)
        dec = decompose_losses(np.sqrt(resampled / c.s_norm))
        values[k] = dec.u_abs[0, 0] ** 2
    logger.debug("reflectivity resampled %d times", draws)
    return float(np.std(values, ddof=1) / np.mean(values))
