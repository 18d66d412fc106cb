from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, model_validator

from photodistill import __version__
from photodistill.extraction.correlators import CorrelatorSamples, CorrelatorSet, Protocol, SampleStats
from photodistill.resources.sources import SourceEntry
from photodistill.sim.species import NoiseModel


class MatrixPayload(BaseModel):
    """Complex matrix as separate real and imaginary grids (rows = inputs)."""

    real: List[List[float]]
    imag: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _shape(self) -> "MatrixPayload":
        rows = len(self.real)
        if rows == 0 or any(len(r) != len(self.real[0]) for r in self.real):
            raise ValueError("matrix must be a non-empty rectangular grid")
        if self.imag is not None and (len(self.imag) != rows or any(len(r) != len(self.real[0]) for r in self.imag)):
            raise ValueError("real and imaginary parts differ in shape")
        return self

    def to_array(self) -> np.ndarray:
        a = np.asarray(self.real, dtype=complex)
        if self.imag is not None:
            a = a + 1j * np.asarray(self.imag, dtype=float)
        return a

    @classmethod
    def from_array(cls, a) -> "MatrixPayload":
        a = np.asarray(a, dtype=complex)
        return cls(real=a.real.tolist(), imag=a.imag.tolist())


class LossSpec(BaseModel):
    """Characterised chip for the loss pipeline: losses, distillation block, reference splitter."""

    d_in: List[float]
    d_out: List[float]
    u_d: Optional[MatrixPayload] = None
    splitter_reflectivity: float = 0.5


class SimulateRequest(BaseModel):
    n: int = 3
    unitary: Optional[str] = None
    unitary_file: Optional[str] = None
    model: NoiseModel = NoiseModel.OBB
    eps: List[float] = [1e-4]
    herald_modes: Optional[List[int]] = None
    herald_counts: Optional[List[int]] = None
    output_mode: Optional[int] = None
    losses: Optional[LossSpec] = None
    scan_optimality: bool = False
    include_fourier: bool = False
    trials: int = 200
    eps_scan: Optional[List[float]] = None
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "SimulateRequest":
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.eps) not in (1, self.n):
            raise ValueError(f"give one eps or {self.n} values, got {len(self.eps)}")
        if (self.herald_modes is None) != (self.herald_counts is None):
            raise ValueError("herald modes and herald counts go together")
        return self


class CharacterizeRequest(BaseModel):
    counts: List[List[int]]
    s_norm: int
    duration_s: Optional[float] = None
    fit_model: bool = True
    phases: bool = True
    d_in_anchor: Optional[float] = None
    mc_draws: int = 0
    seed: int = 0


class ExtractRequest(BaseModel):
    samples: Optional[CorrelatorSamples] = None
    stats: Optional[Dict[Protocol, SampleStats]] = None
    correlators: Optional[CorrelatorSet] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    model: Literal["obb", "sbb", "both"] = "obb"
    mc_draws: int = 0
    printed_total_se: bool = False
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "ExtractRequest":
        given = [x for x in (self.samples, self.stats, self.correlators) if x is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of samples, stats or correlators")
        if self.correlators is None and (self.r1 is None or self.r2 is None):
            raise ValueError("r1 and r2 are required with samples or stats")
        return self


class ResourcesRequest(BaseModel):
    eps: Optional[float] = None
    source: Optional[str] = None
    n_max: int = 64
    ceil_distance: bool = False
    isolines: bool = False
    isoline_ns: List[int] = [1, 2, 4, 8, 12, 16, 24, 32]
    boundaries: bool = False
    sources: Optional[List[SourceEntry]] = None
    loss: Optional[float] = None
    gates_per_photon: float = 6.0
    b: Optional[int] = None
    p_th: Optional[float] = None
    p_l_target: Optional[float] = None

    @model_validator(mode="after")
    def _check(self) -> "ResourcesRequest":
        if self.eps is not None and self.source is not None:
            raise ValueError("give either eps or source, not both")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        return self


class RunReport(BaseModel):
    command: str
    tool_version: str = __version__
    parameters: Dict[str, Any]
    input_digests: Dict[str, str] = {}
    results: Dict[str, Any]
    warnings: List[str] = []
