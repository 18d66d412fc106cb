"""Command-line front end: ``python -m photodistill <command> ...``.

Exit codes: 0 ok, 2 invalid input, 3 no herald, 4 solver did not converge,
5 above threshold.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from photodistill import __version__
from photodistill.errors import PhotodistillError
from photodistill.pipeline.run import run_characterize, run_extract, run_resources, run_simulate
from photodistill.render import eta_csv, to_csv, to_json, to_report_md
from photodistill.resources import load_sources_csv
from photodistill.schemas import (
    CharacterizeRequest,
    ExtractRequest,
    ResourcesRequest,
    RunReport,
    SimulateRequest,
)
from photodistill.utils import file_digest, read_correlator_csv, read_count_csv, read_loss_file

logger = logging.getLogger("photodistill")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for every stochastic step")
    p.add_argument("--format", choices=("json", "csv", "md"), default="json")
    p.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="photodistill", description="Linear-optical photon distillation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="heralded distillation of noisy photons")
    sim.add_argument("--n", type=int, default=3, help="photons and modes")
    sim.add_argument("--unitary", choices=("fourier", "hadamard", "file"), default="fourier")
    sim.add_argument("--unitary-file", type=Path, help="JSON or CSV matrix for --unitary file")
    sim.add_argument("--model", choices=("obb", "sbb"), default="obb")
    sim.add_argument("--eps", type=float, nargs="+", default=[1e-4], help="one value, or one per photon")
    sim.add_argument("--herald-modes", type=int, nargs="+")
    sim.add_argument("--herald-counts", type=int, nargs="+")
    sim.add_argument("--output-mode", type=int)
    sim.add_argument("--loss-file", type=Path, help="characterised chip (JSON) for the loss pipeline")
    sim.add_argument("--scan-optimality", action="store_true")
    sim.add_argument("--include-fourier", action="store_true")
    sim.add_argument("--trials", type=int, default=200)
    sim.add_argument("--eps-scan", type=float, nargs="+", help="also tabulate eps_out over these inputs")

    ch = sub.add_parser("characterize", parents=[common], help="transfer matrix from single-photon counts")
    ch.add_argument("counts", type=Path, nargs="+", help="count CSV with '# s_norm=<int>' header")
    ch.add_argument("--fit-model", action=argparse.BooleanOptionalAction, default=True)
    ch.add_argument("--phases", action=argparse.BooleanOptionalAction, default=True)
    ch.add_argument("--d-in-anchor", type=float, help="pin D_in[0]; overrides the file's d_in_anchor")
    ch.add_argument("--mc-draws", type=int, default=0, help="Poisson draws for the reflectivity SE")
    ch.add_argument("--eta-csv", type=Path, help="write the transmission map in dB here")

    ex = sub.add_parser("extract", parents=[common], help="error budget from correlator data")
    ex.add_argument("correlators", type=Path)
    ex.add_argument("--r1", type=float, required=True, help="reference splitter reflectivity")
    ex.add_argument("--r2", type=float, required=True, help="output splitter reflectivity")
    ex.add_argument("--model", choices=("obb", "sbb", "both"), default="obb")
    ex.add_argument("--mc-draws", type=int, default=0)
    ex.add_argument("--printed-total-se", action="store_true")
    ex.add_argument("--trigger-scale", type=float, default=1.0, help="undersampling correction for N_t")

    rs = sub.add_parser("resources", parents=[common], help="hybrid QEC + distillation photon cost")
    target = rs.add_mutually_exclusive_group()
    target.add_argument("--eps", type=float)
    target.add_argument("--source", help="label from the source table")
    rs.add_argument("--sources-file", type=Path)
    rs.add_argument("--n-max", type=int, default=64)
    rs.add_argument("--isolines", action="store_true")
    rs.add_argument("--isoline-ns", type=int, nargs="+", default=[1, 2, 4, 8, 12, 16, 24, 32])
    rs.add_argument("--boundaries", action="store_true")
    rs.add_argument("--ceil-distance", action="store_true")
    rs.add_argument("--loss", type=float, help="component loss for the loss-budget adjustment")
    rs.add_argument("--gates", type=float, default=6.0)
    return parser


def _simulate(args) -> RunReport:
    digests = {}
    losses = None
    if args.loss_file:
        losses = read_loss_file(args.loss_file)
        digests[str(args.loss_file)] = file_digest(args.loss_file)
    if args.unitary_file:
        digests[str(args.unitary_file)] = file_digest(args.unitary_file)
    req = SimulateRequest(
        n=args.n,
        unitary=args.unitary,
        unitary_file=str(args.unitary_file) if args.unitary_file else None,
        model=args.model,
        eps=args.eps,
        herald_modes=args.herald_modes,
        herald_counts=args.herald_counts,
        output_mode=args.output_mode,
        losses=losses,
        scan_optimality=args.scan_optimality,
        include_fourier=args.include_fourier,
        trials=args.trials,
        eps_scan=args.eps_scan,
        seed=args.seed,
    )
    return run_simulate(req, input_digests=digests)


def _characterize(args) -> RunReport:
    reports = []
    for path in args.counts:
        counts, meta = read_count_csv(path)
        anchor = args.d_in_anchor
        if anchor is None and "d_in_anchor" in meta:
            anchor = float(meta["d_in_anchor"])
        req = CharacterizeRequest(
            counts=counts.counts,
            s_norm=counts.s_norm,
            duration_s=counts.duration_s,
            fit_model=args.fit_model,
            phases=args.phases,
            d_in_anchor=anchor,
            mc_draws=args.mc_draws,
            seed=args.seed,
        )
        reports.append(run_characterize(req, input_digests={str(path): file_digest(path)}))

    if args.eta_csv:
        args.eta_csv.write_text(eta_csv(reports[0].results["eta_map"]), encoding="utf-8")
    if len(reports) == 1:
        return reports[0]
    return RunReport(
        command="characterize",
        parameters={"runs": [r.parameters for r in reports]},
        input_digests={k: v for r in reports for k, v in r.input_digests.items()},
        results={"runs": [r.results for r in reports]},
        warnings=[w for r in reports for w in r.warnings],
    )


def _extract(args) -> RunReport:
    data = read_correlator_csv(args.correlators, trigger_scale=args.trigger_scale)
    kwargs = {"stats": data} if isinstance(data, dict) else {"samples": data}
    req = ExtractRequest(
        r1=args.r1,
        r2=args.r2,
        model=args.model,
        mc_draws=args.mc_draws,
        printed_total_se=args.printed_total_se,
        seed=args.seed,
        **kwargs,
    )
    return run_extract(req, input_digests={str(args.correlators): file_digest(args.correlators)})


def _resources(args) -> RunReport:
    digests = {}
    sources = None
    if args.sources_file:
        sources = load_sources_csv(args.sources_file)
        digests[str(args.sources_file)] = file_digest(args.sources_file)
    req = ResourcesRequest(
        eps=args.eps,
        source=args.source,
        sources=sources,
        n_max=args.n_max,
        ceil_distance=args.ceil_distance,
        isolines=args.isolines,
        isoline_ns=args.isoline_ns,
        boundaries=args.boundaries,
        loss=args.loss,
        gates_per_photon=args.gates,
    )
    return run_resources(req, input_digests=digests)


COMMANDS = {
    "simulate": _simulate,
    "characterize": _characterize,
    "extract": _extract,
    "resources": _resources,
}


def render(report: RunReport, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "md":
        return to_report_md(report)
    return to_json(report)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        report = COMMANDS[args.command](args)
    except PhotodistillError as e:
        logger.error("%s", e)
        return e.exit_code
    except ValidationError as e:
        logger.error("invalid input: %s", e)
        return 2

    text = render(report, args.format)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
