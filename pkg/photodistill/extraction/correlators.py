"""Correlators of the four calibration protocols and the quantities derived from them.

Protocols A and B are HBT / HOM measurements on undistilled photons, C and D
the same measurements on the distilled output, heralded by coincidences in
modes 1 and 2.
"""

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, field_validator

from photodistill.errors import InvalidInputError

logger = logging.getLogger(__name__)


class Protocol(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


_COUNT_KEYS = {
    Protocol.A: ("n3", "n4", "n34", "nt"),
    Protocol.B: ("n3", "n4", "n34", "nt"),
    Protocol.C: ("n12", "n123", "n124", "n1234"),
    Protocol.D: ("n12", "n123", "n124", "n1234"),
}


def correlator_from_counts(protocol: Protocol, counts: Mapping[str, float], trigger_scale: float = 1.0) -> float:
    """Zero-delay correlator from raw counts.

    A/B: ``n34 * nt / (n3 * n4)`` with ``nt`` multiplied by ``trigger_scale``
    to undo trigger undersampling. C/D: ``n1234 * n12 / (n123 * n124)``.
    """
    protocol = Protocol(protocol)
    missing = [k for k in _COUNT_KEYS[protocol] if k not in counts]
    if missing:
        raise InvalidInputError(f"protocol {protocol.value} counts lack {missing}")
    if protocol in (Protocol.A, Protocol.B):
        num = counts["n34"] * counts["nt"] * trigger_scale
        den = counts["n3"] * counts["n4"]
    else:
        num = counts["n1234"] * counts["n12"]
        den = counts["n123"] * counts["n124"]
    if den <= 0:
        raise InvalidInputError(f"protocol {protocol.value} correlator has a zero denominator")
    return float(num / den)


class SampleStats(BaseModel):
    n: int
    mean: float
    sd: float
    se: float


def sample_stats(samples: Sequence[float]) -> SampleStats:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InvalidInputError(f"statistics need at least 2 samples, got {x.size}")
    sd = float(np.std(x, ddof=1))
    return SampleStats(n=int(x.size), mean=float(np.mean(x)), sd=sd, se=sd / math.sqrt(x.size))


def raw_visibility(g: float, reflectivity: float) -> float:
    """HOM visibility from a zero-delay correlator at splitter reflectivity R.

    Not clamped; out-of-range values are logged.
    """
    r = float(reflectivity)
    if not 0.0 < r < 1.0:
        raise InvalidInputError(f"reflectivity must lie strictly inside (0, 1), got {r}")
    v = (r * r + (1.0 - r) ** 2 - g) / (2.0 * r * (1.0 - r))
    if not 0.0 <= v <= 1.0:
        logger.warning("visibility %.6f outside [0, 1] (g=%.6f, R=%.4f)", v, g, r)
    return v


def visibility_in_range(v: float) -> bool:
    return 0.0 <= v <= 1.0


class CorrelatorSamples(BaseModel):
    """Per-run correlator values by protocol, with measurement metadata."""

    values: Dict[Protocol, List[float]]
    delta_t_ns: float = 2.0
    duration_s: Dict[Protocol, float] = {}
    raw_counts: Dict[Protocol, List[Dict[str, float]]] = {}

    @field_validator("values")
    @classmethod
    def _nonnegative(cls, v: Dict[Protocol, List[float]]) -> Dict[Protocol, List[float]]:
        for protocol, xs in v.items():
            if any(x < 0 for x in xs):
                raise ValueError(f"protocol {protocol.value} has negative correlator values")
        return v

    def stats(self) -> Dict[Protocol, SampleStats]:
        missing = [p.value for p in Protocol if len(self.values.get(p, [])) < 2]
        if missing:
            raise InvalidInputError(f"protocols {missing} have fewer than 2 samples")
        return {p: sample_stats(self.values[p]) for p in Protocol}


class CorrelatorSet(BaseModel):
    g_a: float
    g_b: float
    g_c: float
    g_d: float
    se_a: float = 0.0
    se_b: float = 0.0
    se_c: float = 0.0
    se_d: float = 0.0
    r1: float
    r2: float

    @field_validator("se_a", "se_b", "se_c", "se_d")
    @classmethod
    def _se(cls, v: float) -> float:
        if v < 0:
            raise ValueError("standard errors must be nonnegative")
        return v

    @field_validator("r1", "r2")
    @classmethod
    def _reflectivity(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"reflectivity {v} outside (0, 1)")
        return v

    @classmethod
    def from_stats(cls, stats: Mapping[Protocol, SampleStats], r1: float, r2: float) -> "CorrelatorSet":
        return cls(
            g_a=stats[Protocol.A].mean, g_b=stats[Protocol.B].mean,
            g_c=stats[Protocol.C].mean, g_d=stats[Protocol.D].mean,
            se_a=stats[Protocol.A].se, se_b=stats[Protocol.B].se,
            se_c=stats[Protocol.C].se, se_d=stats[Protocol.D].se,
            r1=r1, r2=r2,
        )

    def means(self) -> np.ndarray:
        return np.array([self.g_a, self.g_b, self.g_c, self.g_d])

    def errors(self) -> np.ndarray:
        return np.array([self.se_a, self.se_b, self.se_c, self.se_d])


QUANTITIES = (
    "v0", "v1",
    "eps_multi", "eps_multi_out",
    "eps_tot", "eps_tot_out",
    "eps_indist", "eps_indist_out",
)


def error_values(g_a: float, g_b: float, g_c: float, g_d: float, r1: float, r2: float) -> Dict[str, float]:
    """Visibilities and errors before and after distillation.

    Accepts scalars or equally shaped arrays.
    Both output errors are normalised by sqrt(V0 + g_A), the input purity.
    """
    v0 = (r1 * r1 + (1.0 - r1) ** 2 - g_b) / (2.0 * r1 * (1.0 - r1))
    v1 = (r2 * r2 + (1.0 - r2) ** 2 - g_d) / (2.0 * r2 * (1.0 - r2))
    radicand = v0 + g_a
    if np.any(np.asarray(radicand) <= 0.0):
        raise InvalidInputError(f"V0 + g_A = {np.min(radicand):.6f} is not positive")
    s = np.sqrt(radicand)
    out = v1 + g_a / 2.0 + g_c / 2.0
    return {
        "v0": v0,
        "v1": v1,
        "eps_multi": g_a / 2.0,
        "eps_multi_out": g_c / 2.0,
        "eps_tot": 1.0 - s,
        "eps_tot_out": 1.0 - out / s,
        "eps_indist": 1.0 - s / (1.0 - g_a / 2.0),
        "eps_indist_out": 1.0 - out / ((1.0 - g_c / 2.0) * s),
    }
