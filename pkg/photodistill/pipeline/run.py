"""Pipelines shared by the CLI and the HTTP service.

Each ``run_*`` takes a validated request and returns a RunReport whose
``parameters`` are the request itself, so a report can be replayed.
"""

from __future__ import annotations

import logging
from typing import Mapping, Optional

from photodistill.errors import InvalidInputError
from photodistill.extraction import (
    CorrelatorSet,
    Protocol,
    budget_with_ci,
    extract_errors,
    extract_errors_sbb,
    monte_carlo_uncertainty,
    zeta_sensitivity,
)
from photodistill.optics.matrices import DiagonalLoss, beam_splitter
from photodistill.resources import (
    GAMMA_SCHEMES,
    ResourceParams,
    default_sources,
    gamma_cost,
    get_source,
    isoline_data,
    logical_cost,
    loss_budget_adjust,
    optimal_scheme_size,
    pauli_error,
    regime_boundaries,
    regime_of,
    required_distance,
)
from photodistill.schemas import (
    CharacterizeRequest,
    ExtractRequest,
    ResourcesRequest,
    RunReport,
    SimulateRequest,
)
from photodistill.sim import (
    HeraldSpec,
    PhotonSourceModel,
    error_scan,
    heralded_distillation,
    nonuniform_loss_pipeline,
    optimality_scan,
)
from photodistill.tomography import CountMatrix, characterize
from photodistill.unitary import get_unitary_source

logger = logging.getLogger(__name__)

BOUNDARY_NOTE = "error-correction-only boundary is reported in units of p_th"


def _report(command: str, req, results: dict, warnings: list[str], input_digests: Optional[Mapping[str, str]]) -> RunReport:
    return RunReport(
        command=command,
        parameters=req.model_dump(mode="json"),
        input_digests=dict(input_digests or {}),
        results=results,
        warnings=warnings,
    )


# ---------------- simulate ----------------

def _herald(req: SimulateRequest) -> HeraldSpec | None:
    if req.herald_modes is None:
        if req.output_mode is not None:
            return HeraldSpec.single_photons(req.n, req.output_mode)
        return None
    output = req.output_mode
    if output is None:
        free = [m for m in range(req.n) if m not in req.herald_modes]
        if not free:
            raise InvalidInputError("every mode is measured; no output mode left")
        output = free[-1]
    return HeraldSpec(measured_modes=req.herald_modes, required_counts=req.herald_counts, output_mode=output)


def run_simulate(req: SimulateRequest, default_source: str = "fourier",
                 input_digests: Optional[Mapping[str, str]] = None) -> RunReport:
    warnings: list[str] = []
    results: dict = {}
    source_name = req.unitary or default_source
    eps = req.eps if len(req.eps) == req.n else req.eps * req.n

    if req.scan_optimality:
        scan = optimality_scan(req.n, req.trials, req.eps[0], req.seed, include_fourier=req.include_fourier)
        results.update(min_ratio=scan.min_ratio, optimality_scan=scan.model_dump(mode="json"))
        if scan.patterns_skipped:
            warnings.append(f"{scan.patterns_skipped} degenerate herald patterns skipped")
        return _report("simulate", req, results, warnings, input_digests)

    if req.losses is not None:
        spec = req.losses
        if len(set(req.eps)) > 1:
            raise InvalidInputError("the loss pipeline takes a single eps shared by all photons")
        u_d = spec.u_d.to_array() if spec.u_d is not None else get_unitary_source(source_name, req.unitary_file).matrix(3)
        report = nonuniform_loss_pipeline(
            DiagonalLoss(spec.d_in),
            u_d,
            DiagonalLoss(spec.d_out),
            beam_splitter(spec.splitter_reflectivity),
            req.eps[0],
            req.model,
        )
        results.update(eps_out=report.eps_out, loss_pipeline=report.model_dump(mode="json"))
        return _report("simulate", req, results, warnings, input_digests)

    u = get_unitary_source(source_name, req.unitary_file).matrix(req.n)
    source = PhotonSourceModel(model=req.model, eps_per_input=eps)
    herald = _herald(req)
    report = heralded_distillation(u, source, herald)
    results.update(
        eps_out=report.conditional_error,
        herald_probability=report.herald_probability,
        reduction_factor=report.reduction_factor,
        distillation=report.model_dump(mode="json"),
    )
    if report.herald != HeraldSpec.single_photons(req.n) and herald is None:
        warnings.append(f"single-photon herald suppressed; using counts {report.herald.required_counts}")
    if req.eps_scan:
        results["error_scan"] = error_scan(u, req.eps_scan, req.model, report.herald)
    return _report("simulate", req, results, warnings, input_digests)


# ---------------- characterize ----------------

def run_characterize(req: CharacterizeRequest, input_digests: Optional[Mapping[str, str]] = None) -> RunReport:
    counts = CountMatrix(counts=req.counts, s_norm=req.s_norm, duration_s=req.duration_s)
    result = characterize(
        counts,
        fit_model=req.fit_model,
        phases=req.phases,
        anchor=req.d_in_anchor,
        mc_draws=req.mc_draws,
        seed=req.seed,
    )
    warnings = list(result.warnings)
    if req.d_in_anchor is None:
        warnings.append("loss split between inputs and outputs uses the balanced gauge")
    return _report("characterize", req, result.model_dump(mode="json"), warnings, input_digests)


# ---------------- extract ----------------

def _correlator_set(req: ExtractRequest) -> tuple[CorrelatorSet, dict]:
    if req.correlators is not None:
        return req.correlators, {}
    stats = req.stats if req.stats is not None else req.samples.stats()
    missing = [p.value for p in Protocol if p not in stats]
    if missing:
        raise InvalidInputError(f"no data for protocols {missing}")
    thin = [p.value for p, s in stats.items() if s.n < 2]
    if thin:
        raise InvalidInputError(f"protocols {thin} have fewer than 2 samples")
    return CorrelatorSet.from_stats(stats, req.r1, req.r2), {p.value: s.model_dump() for p, s in stats.items()}


def run_extract(req: ExtractRequest, input_digests: Optional[Mapping[str, str]] = None) -> RunReport:
    cs, stats = _correlator_set(req)
    budget = extract_errors(cs, printed_total_se=req.printed_total_se)
    results: dict = {
        "correlators": cs.model_dump(mode="json"),
        "statistics": stats,
        "budget": budget.model_dump(mode="json"),
        "table": [row.model_dump() for row in budget_with_ci(budget)],
    }
    if req.model in ("sbb", "both"):
        results["sbb"] = extract_errors_sbb(budget).model_dump()
    if req.mc_draws > 0:
        results["monte_carlo"] = monte_carlo_uncertainty(cs, req.mc_draws, req.seed).model_dump()
    if budget.eps_multi.value > 0 and budget.eps_multi_out.value > 0:
        results["zeta"] = zeta_sensitivity(budget.eps_multi.value, budget.eps_multi_out.value).model_dump()
    return _report("extract", req, results, list(budget.warnings), input_digests)


# ---------------- resources ----------------

def _params(req: ResourcesRequest) -> ResourceParams:
    overrides = {k: v for k, v in (("b", req.b), ("p_th", req.p_th), ("p_l_target", req.p_l_target)) if v is not None}
    return ResourceParams(n_grid=list(range(1, req.n_max + 1)), ceil_distance=req.ceil_distance, **overrides)


def _summary(label: str, eps: float, params: ResourceParams) -> dict:
    opt = optimal_scheme_size(eps, params)
    p = pauli_error(eps)
    out = {"label": label, "pauli_error": p, "regime": regime_of(p, params), **opt.model_dump()}
    out["distance_n_star"] = required_distance(p / opt.n_star, params)
    if 1 in opt.feasible:
        out["cost_n1"] = logical_cost(eps, 1, params)
    return out


def run_resources(req: ResourcesRequest, input_digests: Optional[Mapping[str, str]] = None) -> RunReport:
    params = _params(req)
    sources = req.sources or default_sources()
    results: dict = {"params": params.model_dump(mode="json")}
    warnings: list[str] = []

    if req.eps is not None:
        results["optimal"] = _summary("eps", req.eps, params)
    elif req.source is not None:
        s = get_source(req.source, sources)
        results["optimal"] = _summary(s.label, s.eps_indist, params)
    elif not (req.isolines or req.boundaries or req.loss is not None):
        results["sources"] = [_summary(s.label, s.eps_indist, params) for s in sources]

    if req.boundaries:
        results["boundaries"] = regime_boundaries(params).model_dump(mode="json")
        warnings.append(BOUNDARY_NOTE)
    if req.isolines:
        results["isolines"] = isoline_data(params, sources, n_values=req.isoline_ns).model_dump(mode="json")
    if req.loss is not None:
        results["loss_budget"] = loss_budget_adjust(req.loss, req.gates_per_photon).model_dump()
    n_star = results.get("optimal", {}).get("n_star", 1)
    if n_star > 1:
        # cost order of an n_star-fold error reduction for each scheme family
        results["gamma_costs"] = {name: gamma_cost(1.0, 1.0 / n_star, g) for name, g in GAMMA_SCHEMES.items()}
    if req.ceil_distance:
        warnings.append("code distance rounded up to an integer")
    logger.debug("resource query finished with %d result blocks", len(results))
    return _report("resources", req, results, warnings, input_digests)
