"""Photon source models and their expansion into distinguishability species.

Each photon is either good (species 0) or bad. Under the orthogonal-bad-bit
model (OBB) every bad photon is distinguishable from every other photon; under
the similar-bad-bit model (SBB) all bad photons share one error state.
"""

from __future__ import annotations

import math
from enum import Enum
from itertools import product
from typing import List, Optional

from pydantic import BaseModel, field_validator

from photodistill.errors import InvalidInputError

MAX_EXPANSION_PHOTONS = 12


class NoiseModel(str, Enum):
    OBB = "obb"
    SBB = "sbb"


class PhotonSourceModel(BaseModel):
    model: NoiseModel = NoiseModel.OBB
    eps_per_input: List[float]
    eps_multi: Optional[float] = None

    @field_validator("eps_per_input")
    @classmethod
    def _check_eps(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one photon is required")
        for e in v:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"indistinguishability error {e} outside [0, 1]")
        return v

    @field_validator("eps_multi")
    @classmethod
    def _check_multi(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f"multiphoton error {v} outside [0, 1]")
        return v

    @property
    def n_photons(self) -> int:
        return len(self.eps_per_input)

    @property
    def mean_eps(self) -> float:
        return sum(self.eps_per_input) / self.n_photons

    @classmethod
    def uniform(cls, n: int, eps: float, model: NoiseModel = NoiseModel.OBB) -> "PhotonSourceModel":
        return cls(model=model, eps_per_input=[eps] * n)


class SpeciesTerm(BaseModel):
    weight: float
    species_of_photon: List[int]

    @property
    def bad_photons(self) -> int:
        return sum(1 for s in self.species_of_photon if s != 0)


def expand_species(source: PhotonSourceModel) -> list[SpeciesTerm]:
    """Exact 2^N expansion of the product state into species assignments.

    Terms of zero weight are dropped; the remaining weights sum to one.
    """
    n = source.n_photons
    if n > MAX_EXPANSION_PHOTONS:
        raise InvalidInputError(f"species expansion limited to {MAX_EXPANSION_PHOTONS} photons, got {n}")

    terms: list[SpeciesTerm] = []
    for pattern in product((False, True), repeat=n):
        weight = math.prod(e if bad else 1.0 - e for bad, e in zip(pattern, source.eps_per_input))
        if weight == 0.0:
            continue
        labels: list[int] = []
        next_label = 1
        for bad in pattern:
            if not bad:
                labels.append(0)
            elif source.model is NoiseModel.SBB:
                labels.append(1)
            else:
                labels.append(next_label)
                next_label += 1
        terms.append(SpeciesTerm(weight=weight, species_of_photon=labels))
    return terms
