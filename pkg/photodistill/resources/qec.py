"""Hybrid error-correction + distillation resource model.

A photon with indistinguishability error eps contributes a Pauli error of about
eps/2. Surface-code logical error scales as (p / p_th)^(d/2); a logical qubit
costs b * d^3 photons. Distilling N photons into one divides the Pauli error
by N and multiplies the photon overhead by 4N.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.optimize import brentq

from photodistill.errors import AboveThresholdError, InvalidInputError
from photodistill.resources.sources import SourceEntry

logger = logging.getLogger(__name__)

GHZ_STATES_PER_RESOURCE = 20
PHOTONS_PER_GHZ = 324
LINEAR_VALIDITY_LEVEL = 0.02
DEFAULT_ISOLINE_NS = (1, 2, 4, 8, 12, 16, 24, 32)

GAMMA_SCHEMES: Dict[str, int] = {
    "concatenated-two-photon": 3,
    "concatenated-three-photon": 2,
    "fourier": 1,
}


def ghz_photon_cost() -> int:
    """Photons per resource state: 20 three-qubit GHZ states at 324 photons each."""
    return GHZ_STATES_PER_RESOURCE * PHOTONS_PER_GHZ


class ResourceParams(BaseModel):
    b: int = ghz_photon_cost()
    p_th: float = 2.1e-3
    p_l_target: float = 1e-10
    n_grid: List[int] = list(range(1, 65))
    ceil_distance: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ResourceParams":
        if not 0.0 < self.p_th < 1.0:
            raise ValueError("p_th must lie in (0, 1)")
        if not 0.0 < self.p_l_target < self.p_th:
            raise ValueError("p_l_target must lie in (0, p_th)")
        if self.b < 1:
            raise ValueError("b must be at least 1")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid must hold positive integers")
        return self


def pauli_error(eps_indist: float) -> float:
    """First-order Pauli error of a photon with indistinguishability error eps."""
    if not 0.0 <= eps_indist <= 1.0:
        raise InvalidInputError(f"eps_indist={eps_indist} outside [0, 1]")
    return eps_indist / 2.0


def required_distance(p_error: float, params: ResourceParams) -> float:
    if p_error >= params.p_th:
        raise AboveThresholdError(f"p_error={p_error:.3e} is not below p_th={params.p_th:.3e}")
    if p_error <= 0.0:
        return 0.0
    d = 2.0 * math.log(params.p_l_target) / math.log(p_error / params.p_th)
    return float(math.ceil(d)) if params.ceil_distance else d


def cost_multiplier(n: int) -> int:
    return 1 if n == 1 else 4 * n


def logical_cost(eps: float, n: int, params: ResourceParams) -> float:
    if n < 1:
        raise InvalidInputError(f"distillation size must be >= 1, got {n}")
    d = required_distance(pauli_error(eps) / n, params)
    return cost_multiplier(n) * params.b * d ** 3


def cost_ratio(eps: float, n: int, params: ResourceParams) -> float:
    if eps == 0.0:
        return 1.0
    return logical_cost(eps, n, params) / logical_cost(eps, 1, params)


class OptimalSize(BaseModel):
    eps: float
    n_star: int
    cost: float
    ratio: Optional[float] = None
    feasible: List[int]


def optimal_scheme_size(eps: float, params: ResourceParams) -> OptimalSize:
    """Cheapest distillation size on the grid; the smallest N wins ties."""
    if eps == 0.0:
        return OptimalSize(eps=eps, n_star=1, cost=0.0, ratio=1.0, feasible=sorted(params.n_grid))
    costs: dict[int, float] = {}
    for n in sorted(set(params.n_grid)):
        try:
            costs[n] = logical_cost(eps, n, params)
        except AboveThresholdError:
            continue
    if not costs:
        logger.warning("eps=%g is above threshold for every N on the grid", eps)
        raise AboveThresholdError(f"eps={eps} is above the distillation-extended threshold for all N")
    n_star = min(costs, key=lambda n: (costs[n], n))
    ratio = costs[n_star] / costs[1] if 1 in costs and costs[1] > 0 else None
    if 1 not in costs:
        logger.warning("eps=%g needs distillation: N=1 is above threshold", eps)
    return OptimalSize(eps=eps, n_star=n_star, cost=costs[n_star], ratio=ratio, feasible=sorted(costs))


def crossover_point(n: int) -> float:
    """p/p_th at which distillation of size N costs the same as none at all."""
    if n < 2:
        raise InvalidInputError("crossover needs N >= 2")
    log_n = math.log(n)
    m = cost_multiplier(n)

    # in a = -ln(x): m * (a / (a + ln N))^3 = 1
    def f(a: float) -> float:
        return m * (a / (a + log_n)) ** 3 - 1.0

    a = brentq(f, 1e-12, 1e6, xtol=1e-15, rtol=1e-14, maxiter=500)
    return math.exp(-a)


class RegimeBoundaries(BaseModel):
    p_cross_over_pth: float
    crossing_n: int
    crossovers: Dict[int, float]
    thresholds: Dict[int, float]
    note: str


def regime_boundaries(params: ResourceParams) -> RegimeBoundaries:
    """Smallest p_error (in units of p_th) at which some N >= 2 beats N = 1."""
    ns = sorted(n for n in set(params.n_grid) if n >= 2)
    if not ns:
        raise InvalidInputError("grid has no distillation sizes N >= 2")
    crossovers = {n: crossover_point(n) for n in ns}
    n_cross = min(crossovers, key=lambda n: (crossovers[n], n))
    return RegimeBoundaries(
        p_cross_over_pth=crossovers[n_cross],
        crossing_n=n_cross,
        crossovers=crossovers,
        thresholds={n: n * params.p_th for n in sorted(set(params.n_grid))},
        note="boundary expressed in units of p_th",
    )


def regime_of(p_error: float, params: ResourceParams, boundaries: RegimeBoundaries | None = None) -> str:
    boundaries = boundaries or regime_boundaries(params)
    x = p_error / params.p_th
    if x < boundaries.p_cross_over_pth:
        return "error-correction-only"
    if x < 1.0:
        return "distillation-reduces-cost"
    if x < max(params.n_grid):
        return "distillation-required"
    return "infeasible"


def linear_validity_ratio(eps: float, n: int) -> float:
    """P(two or more bad photons) / P(exactly one) among N photons."""
    if eps == 0.0:
        return 0.0
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps={eps} outside (0, 1)")
    if n < 1:
        raise InvalidInputError("N must be >= 1")
    single = n * eps * math.exp((n - 1) * math.log1p(-eps))
    multiple = -math.expm1(n * math.log1p(-eps)) - single
    return max(0.0, multiple) / single


class LossBudget(BaseModel):
    loss: float
    gates_per_photon: float
    loss_after: float
    reduction_pct: float


def loss_budget_adjust(loss: float, gates: float) -> LossBudget:
    """Tolerable component loss once the distillation stage is added to each photon's path."""
    if not 0.0 <= loss <= 1.0:
        raise InvalidInputError(f"loss={loss} outside [0, 1]")
    if gates < 1:
        raise InvalidInputError("gates per photon must be >= 1")
    return LossBudget(
        loss=loss,
        gates_per_photon=gates,
        loss_after=gates / (gates + 1.0) * loss,
        reduction_pct=100.0 / (gates + 1.0),
    )


def gamma_cost(eps: float, eps_out: float, gamma: int) -> float:
    if gamma not in GAMMA_SCHEMES.values():
        raise InvalidInputError(f"gamma must be one of {sorted(set(GAMMA_SCHEMES.values()))}, got {gamma}")
    if eps_out <= 0.0 or eps_out > eps:
        raise InvalidInputError(f"need 0 < eps_out <= eps, got eps={eps}, eps_out={eps_out}")
    return (eps / eps_out) ** gamma


class IsolineRow(BaseModel):
    N: int
    p_over_pth: float
    cost_ratio: float
    valid_linear: bool


class SourceMarker(BaseModel):
    label: str
    p_over_pth: float
    n_star: Optional[int] = None
    cost_n1: Optional[float] = None
    cost_n_star: Optional[float] = None


class ResourceCurve(BaseModel):
    normalisation_source: str
    normalisation_n: int
    normalisation_cost: float
    rows: List[IsolineRow]
    markers: List[SourceMarker]


def isoline_data(
    params: ResourceParams,
    sources: Sequence[SourceEntry],
    n_values: Sequence[int] = DEFAULT_ISOLINE_NS,
    points: int = 121,
    normalise_to: str | None = None,
) -> ResourceCurve:
    """Photon cost per N over a log grid of p/p_th, relative to the best source at its optimum.

    The best source is the one with the lowest error unless ``normalise_to``
    names another.
    """
    if not sources:
        raise InvalidInputError("isolines need at least one source")
    ref = min(sources, key=lambda s: s.eps_indist) if normalise_to is None else _find(sources, normalise_to)
    ref_opt = optimal_scheme_size(ref.eps_indist, params)
    norm = ref_opt.cost

    grid = np.logspace(-2.0, math.log10(max(n_values)), points)
    rows: list[IsolineRow] = []
    for n in sorted(n_values):
        for x in grid.tolist():
            if x / n >= 1.0 - 1e-12:
                continue
            eps = 2.0 * x * params.p_th
            rows.append(IsolineRow(
                N=int(n),
                p_over_pth=x,
                cost_ratio=logical_cost(eps, n, params) / norm,
                valid_linear=bool(n == 1 or linear_validity_ratio(eps, n) <= LINEAR_VALIDITY_LEVEL),
            ))

    markers = []
    for s in sources:
        x = pauli_error(s.eps_indist) / params.p_th
        marker = SourceMarker(label=s.label, p_over_pth=x)
        try:
            opt = optimal_scheme_size(s.eps_indist, params)
            marker.n_star = opt.n_star
            marker.cost_n_star = opt.cost / norm
            if 1 in opt.feasible:
                marker.cost_n1 = logical_cost(s.eps_indist, 1, params) / norm
        except AboveThresholdError:
            pass
        markers.append(marker)

    return ResourceCurve(
        normalisation_source=ref.label,
        normalisation_n=ref_opt.n_star,
        normalisation_cost=norm,
        rows=rows,
        markers=markers,
    )


def _find(sources: Sequence[SourceEntry], label: str) -> SourceEntry:
    for s in sources:
        if s.label == label:
            return s
    raise InvalidInputError(f"unknown source {label!r}")
