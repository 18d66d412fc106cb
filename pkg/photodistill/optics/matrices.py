"""Complex matrices for linear-optical networks.

Convention everywhere in the package: rows index input modes, columns index
output modes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from photodistill.errors import InvalidInputError

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-10
SUB_UNITARY_TOL = 1e-10


class MatrixKind(str, Enum):
    UNITARY = "unitary"
    SUB_UNITARY = "sub-unitary"
    GENERAL = "general"


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))) <= tol


def is_sub_unitary(m, tol: float = SUB_UNITARY_TOL) -> bool:
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return True
    return float(np.linalg.norm(a, 2)) <= 1.0 + tol


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Dense complex matrix, rows = inputs, columns = outputs.

    The ``kind`` label is checked on construction, so a ComplexMatrix labelled
    unitary is always unitary to ``UNITARY_TOL``.
    """

    entries: np.ndarray
    kind: MatrixKind = MatrixKind.GENERAL

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2:
            raise InvalidInputError(f"matrix must be 2-D, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("matrix has non-finite entries")
        kind = MatrixKind(self.kind)
        if kind is MatrixKind.UNITARY and not is_unitary(a):
            raise InvalidInputError("matrix labelled unitary fails the unitarity check")
        if kind is MatrixKind.SUB_UNITARY and not is_sub_unitary(a):
            raise InvalidInputError("matrix labelled sub-unitary has a singular value above 1")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "kind", kind)

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def abs(self) -> "ComplexMatrix":
        kind = MatrixKind.SUB_UNITARY if is_sub_unitary(np.abs(self.entries)) else MatrixKind.GENERAL
        return ComplexMatrix(np.abs(self.entries), kind)

    def conj(self) -> "ComplexMatrix":
        return ComplexMatrix(self.entries.conj(), self.kind)

    @classmethod
    def labelled(cls, entries) -> "ComplexMatrix":
        """Wrap ``entries`` with the strongest label it satisfies."""
        a = np.asarray(entries, dtype=complex)
        if is_unitary(a):
            return cls(a, MatrixKind.UNITARY)
        if is_sub_unitary(a):
            return cls(a, MatrixKind.SUB_UNITARY)
        return cls(a, MatrixKind.GENERAL)


@dataclass(frozen=True, eq=False)
class DiagonalLoss:
    """Per-mode amplitude transmissions in [0, 1]."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("loss amplitudes must be finite")
        if np.any(a < 0.0) or np.any(a > 1.0):
            raise InvalidInputError(f"loss amplitudes must lie in [0, 1], got {a.tolist()}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_modes(self) -> int:
        return self.amplitudes.shape[0]

    def matrix(self) -> np.ndarray:
        return np.diag(self.amplitudes).astype(complex)

    @classmethod
    def lossless(cls, n: int) -> "DiagonalLoss":
        return cls(np.ones(n))


# ---------------- Structured unitaries ----------------

def fourier_matrix(n: int) -> ComplexMatrix:
    if n < 1:
        raise InvalidInputError(f"Fourier matrix needs n >= 1, got {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    a = np.exp(2j * np.pi * j * k / n) / np.sqrt(n)
    return ComplexMatrix(a, MatrixKind.UNITARY)


def hadamard_matrix(n: int) -> ComplexMatrix:
    if n < 1 or n & (n - 1):
        raise InvalidInputError(f"Hadamard matrix needs a power of two, got {n}")
    h = np.array([[1.0]])
    base = np.array([[1.0, 1.0], [1.0, -1.0]])
    while h.shape[0] < n:
        h = np.kron(h, base)
    return ComplexMatrix(h / np.sqrt(n), MatrixKind.UNITARY)


def beam_splitter(reflectivity: float) -> ComplexMatrix:
    """2x2 splitter [[sqrt(R), sqrt(1-R)], [sqrt(1-R), -sqrt(R)]].

    Real gauge; only the moduli are ever compared against measured data.
    """
    r = float(reflectivity)
    if not 0.0 <= r <= 1.0:
        raise InvalidInputError(f"reflectivity must lie in [0, 1], got {r}")
    a = np.array([[np.sqrt(r), np.sqrt(1.0 - r)], [np.sqrt(1.0 - r), -np.sqrt(r)]])
    return ComplexMatrix(a, MatrixKind.UNITARY)


def haar_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-random unitary: QR of a complex Ginibre matrix, R diagonal made positive."""
    if n < 1:
        raise InvalidInputError(f"unitary dimension must be >= 1, got {n}")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return ComplexMatrix(q, MatrixKind.UNITARY)


# ---------------- Composition ----------------

def compose_lossy(d_in: DiagonalLoss, u, d_out: DiagonalLoss) -> ComplexMatrix:
    a = np.asarray(u, dtype=complex)
    if a.ndim != 2 or d_in.n_modes != a.shape[0] or d_out.n_modes != a.shape[1]:
        raise InvalidInputError(
            f"cannot compose losses {d_in.n_modes}/{d_out.n_modes} with matrix of shape {a.shape}"
        )
    t = d_in.amplitudes[:, None] * a * d_out.amplitudes[None, :]
    if is_sub_unitary(t):
        return ComplexMatrix(t, MatrixKind.SUB_UNITARY)
    logger.warning("composed transfer matrix is not sub-unitary; labelling it general")
    return ComplexMatrix(t, MatrixKind.GENERAL)


def direct_sum_and_chain(stages: Sequence[tuple[object, Sequence[int]]], n_modes: int | None = None) -> ComplexMatrix:
    """Embed each stage on its modes and chain the stages in application order.

    A stage is ``(matrix, modes)`` where ``modes`` lists the zero-based modes the
    matrix acts on. With rows = inputs the network matrix is the left-to-right
    product of the embedded stages.
    """
    if not stages:
        raise InvalidInputError("at least one stage is required")
    if n_modes is None:
        n_modes = 1 + max(max(modes) for _, modes in stages)
    total = np.eye(n_modes, dtype=complex)
    for matrix, modes in stages:
        a = np.asarray(matrix, dtype=complex)
        modes = [int(m) for m in modes]
        if len(set(modes)) != len(modes):
            raise InvalidInputError(f"overlapping placement {modes}")
        if any(m < 0 or m >= n_modes for m in modes):
            raise InvalidInputError(f"placement {modes} outside {n_modes} modes")
        if a.shape != (len(modes), len(modes)):
            raise InvalidInputError(f"stage of shape {a.shape} does not fit modes {modes}")
        embedded = np.eye(n_modes, dtype=complex)
        embedded[np.ix_(modes, modes)] = a
        total = total @ embedded
    return ComplexMatrix.labelled(total)


def dilate(t) -> ComplexMatrix:
    """Unitary dilation of a square sub-unitary matrix.

    Physical modes come first, then one loss mode per physical mode:
    ``[[T, sqrt(I - T T^dag)], [sqrt(I - T^dag T), -T^dag]]``.
    """
    a = np.asarray(t, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"dilation needs a square matrix, got shape {a.shape}")
    if not is_sub_unitary(a):
        raise InvalidInputError("dilation needs a sub-unitary matrix")
    n = a.shape[0]
    eye = np.eye(n)
    w = np.block([
        [a, _psd_sqrt(eye - a @ a.conj().T)],
        [_psd_sqrt(eye - a.conj().T @ a), -a.conj().T],
    ])
    return ComplexMatrix(w, MatrixKind.UNITARY)


def _psd_sqrt(h: np.ndarray) -> np.ndarray:
    h = (h + h.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


# ---------------- Fidelities ----------------

def trace_overlap(a, b, n: int | None = None) -> complex:
    """``tr(a^dag b) / n``; the imaginary part is the residue dropped by trace_fidelity."""
    x = np.asarray(a, dtype=complex)
    y = np.asarray(b, dtype=complex)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidInputError(f"fidelity needs equal square shapes, got {x.shape} and {y.shape}")
    n = x.shape[0] if n is None else n
    if n <= 0:
        raise InvalidInputError("normalisation count must be positive")
    return complex(np.trace(x.conj().T @ y) / n)


def trace_fidelity(a, b, n: int | None = None) -> float:
    """Re[tr(a^dag b) / n]. Gauge-sensitive: row or column phases change the value."""
    return trace_overlap(a, b, n).real


def max_over_conjugation_fidelity(a, b, n: int | None = None) -> float:
    """Fidelity against ``b`` or ``conj(b)``, whichever is larger."""
    plain = trace_fidelity(a, b, n)
    conj = trace_fidelity(a, np.conj(np.asarray(b, dtype=complex)), n)
    return max(plain, conj)
