"""Phases of a 3-mode unitary from its amplitudes alone.

With the first row and column fixed real, orthogonality of column 1 with
columns 2 and 3 closes two triangles whose side lengths are products of
amplitudes; the law of cosines gives the remaining phases up to one overall
complex conjugation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from photodistill.errors import InvalidInputError, ReconstructionError
from photodistill.optics.matrices import ComplexMatrix, MatrixKind

logger = logging.getLogger(__name__)

DOUBLY_STOCHASTIC_TOL = 1e-6
TRIANGLE_TOL = 1e-9


@dataclass(frozen=True)
class PhaseReconstruction:
    matrix: ComplexMatrix
    conjugate: ComplexMatrix
    unitarity_residual: float


def _triangle_angle(p: float, q: float, r: float) -> float:
    """Angle t in [0, pi] with |p + q e^{it}| = r."""
    if p == 0.0 or q == 0.0:
        return 0.0
    x = (r * r - p * p - q * q) / (2.0 * p * q)
    if abs(x) > 1.0 + TRIANGLE_TOL:
        raise ReconstructionError(
            f"amplitude triangle ({p:.6f}, {q:.6f}, {r:.6f}) does not close", triple=(p, q, r)
        )
    return float(np.arccos(np.clip(x, -1.0, 1.0)))


def _closing_phase(p: float, q: float, t: float) -> float:
    z = -(p + q * np.exp(1j * t))
    return float(np.angle(z)) if abs(z) > 0.0 else 0.0


def _build(b: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    gamma = _closing_phase(b[0, 0] * b[0, 1], b[1, 0] * b[1, 1], alpha)
    delta = _closing_phase(b[0, 0] * b[0, 2], b[1, 0] * b[1, 2], beta)
    u = b.astype(complex)
    u[1, 1] *= np.exp(1j * alpha)
    u[1, 2] *= np.exp(1j * beta)
    u[2, 1] *= np.exp(1j * gamma)
    u[2, 2] *= np.exp(1j * delta)
    return u


def _residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def reconstruct_phases_3mode(u_abs) -> PhaseReconstruction:
    """Gauge: first row and column real and nonnegative, Im(u[1, 2]) >= 0."""
    b = np.abs(np.asarray(u_abs, dtype=complex))
    if b.shape != (3, 3):
        raise InvalidInputError(f"phase reconstruction needs 3x3 amplitudes, got shape {b.shape}")
    sq = b ** 2
    off = max(np.max(np.abs(sq.sum(axis=0) - 1.0)), np.max(np.abs(sq.sum(axis=1) - 1.0)))
    if off > DOUBLY_STOCHASTIC_TOL:
        raise InvalidInputError(f"squared amplitudes are not doubly stochastic (off by {off:.2e})")

    alpha0 = _triangle_angle(b[0, 0] * b[0, 1], b[1, 0] * b[1, 1], b[2, 0] * b[2, 1])
    beta = _triangle_angle(b[0, 0] * b[0, 2], b[1, 0] * b[1, 2], b[2, 0] * b[2, 2])

    # column 2 branch: the one keeping columns 2 and 3 orthogonal
    candidates = [_build(b, s * alpha0, beta) for s in (1.0, -1.0)]
    overlaps = [abs(np.vdot(u[:, 1], u[:, 2])) for u in candidates]
    u = candidates[int(np.argmin(overlaps))]

    residual = _residual(u)
    logger.debug("3-mode phase reconstruction residual %.3e", residual)
    return PhaseReconstruction(
        matrix=ComplexMatrix(u, MatrixKind.GENERAL),
        conjugate=ComplexMatrix(u.conj(), MatrixKind.GENERAL),
        unitarity_residual=residual,
    )
