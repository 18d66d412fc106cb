"""Heralded photon distillation on linear-optical networks.

Everything here is exact enumeration over species terms and herald-compatible
outcomes; nothing is sampled except the random unitaries of the optimality scan.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, model_validator

from photodistill.errors import InvalidInputError, NoHeraldError
from photodistill.extraction.correlators import raw_visibility
from photodistill.optics.matrices import (
    DiagonalLoss,
    beam_splitter,
    compose_lossy,
    direct_sum_and_chain,
    fourier_matrix,
    haar_unitary,
    is_sub_unitary,
    is_unitary,
)
from photodistill.optics.permanent import permanent
from photodistill.sim.events import (
    Occupation,
    compositions,
    event_probability,
    labelled_outcome_probabilities,
)
from photodistill.sim.species import NoiseModel, PhotonSourceModel, SpeciesTerm, expand_species

logger = logging.getLogger(__name__)

HERALD_FLOOR = 1e-15
DEGENERATE_HERALD = 1e-12


class HeraldSpec(BaseModel):
    measured_modes: List[int]
    required_counts: List[int]
    output_mode: int

    @model_validator(mode="after")
    def _check(self) -> "HeraldSpec":
        if len(self.measured_modes) != len(self.required_counts):
            raise ValueError("one required count per measured mode")
        if len(set(self.measured_modes)) != len(self.measured_modes):
            raise ValueError("measured modes must be distinct")
        if self.output_mode in self.measured_modes:
            raise ValueError("output mode cannot also be measured")
        if any(c < 0 for c in self.required_counts) or any(m < 0 for m in self.measured_modes):
            raise ValueError("herald modes and counts must be nonnegative")
        if self.output_mode < 0:
            raise ValueError("output mode must be nonnegative")
        return self

    @classmethod
    def single_photons(cls, n: int, output_mode: int | None = None) -> "HeraldSpec":
        """One photon in every output except ``output_mode`` (default: the last)."""
        out = n - 1 if output_mode is None else output_mode
        measured = [m for m in range(n) if m != out]
        return cls(measured_modes=measured, required_counts=[1] * len(measured), output_mode=out)


class SpeciesContribution(BaseModel):
    bad_photons: int
    weight: float
    herald_probability: float
    bad_output_probability: float


class DistillationReport(BaseModel):
    herald_probability: float
    conditional_error: float
    input_error: float
    reduction_factor: Optional[float] = None
    per_species: List[SpeciesContribution]
    herald: HeraldSpec


class LossPipelineReport(BaseModel):
    eps_in: float
    eps_out: float
    visibility: float
    coincidence_fraction: float
    splitter_reflectivity: float
    postselection_probability: float


class OptimalityScan(BaseModel):
    n_photons: int
    trials: int
    eps: float
    seed: int
    min_ratio: float
    patterns_evaluated: int
    patterns_skipped: int
    fourier_ratio: Optional[float] = None


class PhiPlusCheck(BaseModel):
    p_mix: float
    p_plus: float
    p0: float
    p_minus_total: float
    residual: float


# ---------------- Herald handling ----------------

def _is_lossy(a: np.ndarray) -> bool:
    return a.shape[0] == a.shape[1] and not is_unitary(a) and is_sub_unitary(a)


def herald_outcomes(n_modes: int, n_photons: int, herald: HeraldSpec, lossy: bool = False) -> list[Occupation]:
    """Outcomes matching the herald with exactly one photon in the output mode.

    Unconstrained modes take any occupation. For a lossy network the total may
    fall short of ``n_photons``.
    """
    fixed = dict(zip(herald.measured_modes, herald.required_counts))
    fixed[herald.output_mode] = 1
    if any(m >= n_modes for m in fixed):
        raise InvalidInputError(f"herald refers to modes outside {n_modes} outputs")
    free = [m for m in range(n_modes) if m not in fixed]
    budget = n_photons - sum(fixed.values())
    if budget < 0:
        return []
    totals = range(budget + 1) if lossy else [budget]

    outcomes: list[Occupation] = []
    for total in totals:
        if not free and total:
            continue
        for occ in compositions([total] * len(free), total):
            row = [0] * n_modes
            for m, c in fixed.items():
                row[m] = c
            for m, c in zip(free, occ):
                row[m] = c
            outcomes.append(tuple(row))
    return outcomes


def all_good_probability(u, herald: HeraldSpec, n_photons: int) -> float:
    """p0: herald probability for fully indistinguishable photons."""
    a = np.asarray(u, dtype=complex)
    term = SpeciesTerm(weight=1.0, species_of_photon=[0] * n_photons)
    inputs = list(range(n_photons))
    return float(sum(
        event_probability(a, inputs, term, outcome)
        for outcome in herald_outcomes(a.shape[1], n_photons, herald, _is_lossy(a))
    ))


def default_herald(u, n_photons: int) -> HeraldSpec:
    """Single photons on outputs 0..N-2, output N-1 distilled.

    When that pattern is suppressed by interference (even-N Fourier networks),
    fall back to the first pattern of N-1 photons on the measured modes that
    heralds with nonzero probability.
    """
    preferred = HeraldSpec.single_photons(n_photons)
    if n_photons == 1 or all_good_probability(u, preferred, n_photons) > HERALD_FLOOR:
        return preferred
    measured = preferred.measured_modes
    for counts in compositions([n_photons - 1] * len(measured), n_photons - 1):
        candidate = HeraldSpec(
            measured_modes=measured, required_counts=list(counts), output_mode=preferred.output_mode
        )
        if all_good_probability(u, candidate, n_photons) > HERALD_FLOOR:
            logger.info("single-photon herald suppressed; using counts %s", list(counts))
            return candidate
    raise NoHeraldError(f"no heralding pattern with one output photon exists for N={n_photons}")


# ---------------- Distillation ----------------

def heralded_distillation(u, source: PhotonSourceModel, herald: HeraldSpec | None = None) -> DistillationReport:
    a = np.asarray(u, dtype=complex)
    n = source.n_photons
    if a.ndim != 2 or a.shape[0] < n:
        raise InvalidInputError(f"{n} photons need at least {n} input modes, network has shape {a.shape}")
    if herald is None:
        herald = default_herald(a, n)
    outcomes = herald_outcomes(a.shape[1], n, herald, _is_lossy(a))
    if not outcomes:
        raise NoHeraldError(f"herald {herald.required_counts} is incompatible with {n} photons")

    inputs = list(range(n))
    out = herald.output_mode
    classes: dict[int, list[float]] = {}
    for term in expand_species(source):
        herald_p = 0.0
        bad_p = 0.0
        for outcome in outcomes:
            for occupations, p in labelled_outcome_probabilities(a, inputs, term, outcome):
                herald_p += p
                if any(label != 0 and occ[out] > 0 for label, occ in occupations.items()):
                    bad_p += p
        acc = classes.setdefault(term.bad_photons, [0.0, 0.0, 0.0])
        acc[0] += term.weight
        acc[1] += term.weight * herald_p
        acc[2] += term.weight * bad_p

    per_species = [
        SpeciesContribution(bad_photons=k, weight=w, herald_probability=h, bad_output_probability=b)
        for k, (w, h, b) in sorted(classes.items())
    ]
    p_herald = math.fsum(c.herald_probability for c in per_species)
    p_bad = math.fsum(c.bad_output_probability for c in per_species)
    if p_herald <= HERALD_FLOOR:
        raise NoHeraldError(f"herald probability {p_herald:.3e} is zero for this network")

    eps_out = min(1.0, max(0.0, p_bad / p_herald))
    eps_in = source.mean_eps
    return DistillationReport(
        herald_probability=min(1.0, p_herald),
        conditional_error=eps_out,
        input_error=eps_in,
        reduction_factor=eps_in / eps_out if eps_out > 0.0 else None,
        per_species=per_species,
        herald=herald,
    )


def fourier_slope_check(n: int, eps: float, model: NoiseModel = NoiseModel.OBB) -> float:
    """N * eps_out / eps for the N-mode Fourier network; tends to 1 as eps -> 0."""
    if eps <= 0.0:
        raise InvalidInputError("slope check needs eps > 0")
    if eps > 1e-2:
        logger.warning("slope check at eps=%g includes finite-size corrections", eps)
    report = heralded_distillation(fourier_matrix(n), PhotonSourceModel.uniform(n, eps, model))
    return report.conditional_error * n / eps


def error_scan(u, eps_grid: Sequence[float], model: NoiseModel = NoiseModel.OBB,
               herald: HeraldSpec | None = None) -> list[dict]:
    """Distilled error versus input error for a fixed network."""
    a = np.asarray(u, dtype=complex)
    n = a.shape[0]
    herald = herald or default_herald(a, n)
    rows = []
    for eps in eps_grid:
        report = heralded_distillation(a, PhotonSourceModel.uniform(n, eps, model), herald)
        rows.append({
            "eps": float(eps),
            "eps_out": report.conditional_error,
            "herald_probability": report.herald_probability,
        })
    return rows


# ---------------- Two-photon interference ----------------

def _pair_source(pair: Sequence[PhotonSourceModel]) -> PhotonSourceModel:
    if len(pair) != 2 or any(s.n_photons != 1 for s in pair):
        raise InvalidInputError("HOM test needs exactly two single-photon sources")
    if pair[0].model is not pair[1].model:
        raise InvalidInputError("both sources of a HOM pair must use the same noise model")
    return PhotonSourceModel(model=pair[0].model, eps_per_input=[pair[0].eps_per_input[0], pair[1].eps_per_input[0]])


def hom_coincidence(pair: Sequence[PhotonSourceModel], reflectivity: float) -> float:
    bs = beam_splitter(reflectivity)
    return float(math.fsum(
        term.weight * event_probability(bs, [0, 1], term, (1, 1))
        for term in expand_species(_pair_source(pair))
    ))


def hom_visibility(pair: Sequence[PhotonSourceModel], reflectivity: float = 0.5) -> float:
    return raw_visibility(hom_coincidence(pair, reflectivity), reflectivity)


def nonuniform_loss_pipeline(
    d_in: DiagonalLoss,
    u_d,
    d_out: DiagonalLoss,
    u_b,
    eps: float,
    model: NoiseModel = NoiseModel.OBB,
) -> LossPipelineReport:
    """Distil on modes 0-2, interfere the distilled photon with a reference photon.

    The 3-mode network ``u_d`` acts on modes 0-2, then ``u_b`` mixes modes 2 and 3,
    all sandwiched between the measured input and output losses. Events are
    postselected on single photons in modes 0 and 1 and two photons in modes
    2 and 3; the coincidence fraction gives the HOM visibility, which is
    referenced to the error ``eps`` of the reference photon.
    """
    if d_in.n_modes != 4 or d_out.n_modes != 4:
        raise InvalidInputError("loss pipeline needs 4-mode input and output losses")
    u4 = direct_sum_and_chain([(u_d, [0, 1, 2]), (u_b, [2, 3])], n_modes=4)
    t = np.asarray(compose_lossy(d_in, u4, d_out))
    source = PhotonSourceModel.uniform(4, eps, model)
    inputs = [0, 1, 2, 3]

    coinc = bunched = 0.0
    for term in expand_species(source):
        coinc += term.weight * event_probability(t, inputs, term, (1, 1, 1, 1))
        bunched += term.weight * (
            event_probability(t, inputs, term, (1, 1, 2, 0)) + event_probability(t, inputs, term, (1, 1, 0, 2))
        )
    total = coinc + bunched
    if total <= HERALD_FLOOR:
        raise NoHeraldError("no postselected events in the loss pipeline")

    r_b = float(abs(np.asarray(u_b)[0, 0]) ** 2)
    c = coinc / total
    v = raw_visibility(c, r_b)
    if model is NoiseModel.SBB:
        eps_out = ((1.0 - eps) - v) / (1.0 - 2.0 * eps)
    else:
        eps_out = 1.0 - v / (1.0 - eps)
    return LossPipelineReport(
        eps_in=eps,
        eps_out=eps_out,
        visibility=v,
        coincidence_fraction=c,
        splitter_reflectivity=r_b,
        postselection_probability=total,
    )


# ---------------- Imperfect unitaries ----------------

def effective_unitary_error(u_exp, eps_ref: float, model: NoiseModel = NoiseModel.OBB) -> float:
    """Excess distilled error of ``u_exp`` over the ideal Fourier network."""
    a = np.asarray(u_exp, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square network, got shape {a.shape}")
    n = a.shape[0]
    ideal = fourier_matrix(n)
    herald = default_herald(ideal, n)
    source = PhotonSourceModel.uniform(n, eps_ref, model)
    return (
        heralded_distillation(a, source, herald).conditional_error
        - heralded_distillation(ideal, source, herald).conditional_error
    )


def extrapolate_unitary_error(eps_unitary: float, n: int) -> float:
    if not 0.0 <= eps_unitary < 1.0:
        raise InvalidInputError(f"unitary error must lie in [0, 1), got {eps_unitary}")
    return 1.0 - (1.0 - eps_unitary) ** (n / 3.0)


def combine_total_error(eps_indist: float, eps_multi: float) -> float:
    for name, v in (("eps_indist", eps_indist), ("eps_multi", eps_multi)):
        if not 0.0 <= v <= 1.0:
            raise InvalidInputError(f"{name}={v} outside [0, 1]")
    return eps_indist + (1.0 - eps_indist) * eps_multi


# ---------------- Optimality ----------------

def _first_order_ratio(u, n: int, eps: float, herald: HeraldSpec) -> float | None:
    try:
        report = heralded_distillation(u, PhotonSourceModel.uniform(n, eps), herald)
    except NoHeraldError:
        return None
    if report.herald_probability < DEGENERATE_HERALD:
        return None
    return report.conditional_error * n / eps


def optimality_scan(n: int, trials: int, eps: float, seed: int, include_fourier: bool = False) -> OptimalityScan:
    """Minimum of N * eps_out / eps over Haar-random networks and output modes."""
    if not 1 <= n <= 5:
        raise InvalidInputError(f"optimality scan supports 1 <= N <= 5, got {n}")
    if not 0.0 < eps <= 1e-3:
        raise InvalidInputError(f"optimality scan needs 0 < eps <= 1e-3, got {eps}")
    if trials < 1:
        raise InvalidInputError("at least one trial is required")

    rng = np.random.default_rng(seed)
    heralds = [HeraldSpec.single_photons(n, out) for out in range(n)]
    best = math.inf
    evaluated = skipped = 0
    for _ in range(trials):
        u = haar_unitary(n, rng)
        for herald in heralds:
            ratio = _first_order_ratio(u, n, eps, herald)
            if ratio is None:
                skipped += 1
                continue
            evaluated += 1
            best = min(best, ratio)
    if skipped:
        logger.info("skipped %d degenerate herald patterns", skipped)

    fourier_ratio = None
    if include_fourier:
        fourier = fourier_matrix(n)
        fourier_ratio = _first_order_ratio(fourier, n, eps, default_herald(fourier, n))
        if fourier_ratio is not None:
            best = min(best, fourier_ratio)
    if not math.isfinite(best):
        raise NoHeraldError("every sampled herald pattern was degenerate")

    return OptimalityScan(
        n_photons=n, trials=trials, eps=eps, seed=seed, min_ratio=best,
        patterns_evaluated=evaluated, patterns_skipped=skipped, fourier_ratio=fourier_ratio,
    )


def phi_plus_herald_check(n: int, u, herald: HeraldSpec) -> PhiPlusCheck:
    """Split the exactly-one-bad-photon mixture into the symmetric state and the rest.

    The symmetric superposition of "photon k is bad" heralds like N
    indistinguishable photons, so its herald probability must equal p0.
    """
    if not 1 <= n <= 5:
        raise InvalidInputError(f"phi-plus check supports 1 <= N <= 5, got {n}")
    a = np.asarray(u, dtype=complex)
    outcomes = herald_outcomes(a.shape[1], n, herald)
    rows = list(range(n))

    p0 = all_good_probability(a, herald, n)
    plus = np.full(n, 1.0 / np.sqrt(n))
    projector = np.eye(n) - np.full((n, n), 1.0 / n)
    p_plus = p_minus = p_mix = 0.0
    for m in outcomes:
        for o in range(a.shape[1]):
            if m[o] == 0:
                continue
            rest = list(m)
            rest[o] -= 1
            cols = [j for j, c in enumerate(rest) for _ in range(c)]
            norm = math.sqrt(math.prod(math.factorial(c) for c in rest))
            amps = np.array([
                a[k, o] * permanent(a[np.ix_([r for r in rows if r != k], cols)]) / norm for k in rows
            ])
            p_mix += float(np.sum(np.abs(amps) ** 2)) / n
            p_plus += float(abs(plus @ amps) ** 2)
            p_minus += float(np.sum(np.abs(projector @ amps) ** 2)) / n
    return PhiPlusCheck(
        p_mix=p_mix,
        p_plus=p_plus,
        p0=p0,
        p_minus_total=p_minus,
        residual=abs(p_mix - (p0 / n + p_minus)),
    )
