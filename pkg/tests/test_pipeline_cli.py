import json

import pytest

from photodistill.cli import build_parser, main
from photodistill.errors import InvalidInputError
from photodistill.pipeline.run import run_extract, run_resources, run_simulate
from photodistill.schemas import ExtractRequest, ResourcesRequest, SimulateRequest

from conftest import R1, R2


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    assert code == 0
    return json.loads(out)


# ---------------- pipelines ----------------

def test_simulate_report_echoes_parameters():
    report = run_simulate(SimulateRequest(n=3, eps=[0.0759]))
    assert report.command == "simulate"
    assert report.parameters["eps"] == [0.0759]
    assert report.results["eps_out"] == pytest.approx(0.0335, abs=5e-4)
    replay = run_simulate(SimulateRequest(**report.parameters))
    assert replay.results == report.results


def test_simulate_request_validation():
    with pytest.raises(ValueError):
        SimulateRequest(n=3, eps=[0.1, 0.2])
    with pytest.raises(ValueError):
        SimulateRequest(n=3, herald_modes=[0, 1])


def test_simulate_with_explicit_herald_and_scan():
    req = SimulateRequest(n=3, eps=[0.05], herald_modes=[1, 2], herald_counts=[1, 1], output_mode=0, eps_scan=[0.01, 0.02])
    report = run_simulate(req)
    assert report.results["distillation"]["herald"]["output_mode"] == 0
    assert len(report.results["error_scan"]) == 2


def test_extract_from_inline_correlators(correlator_set):
    report = run_extract(ExtractRequest(correlators=correlator_set, model="sbb"))
    assert report.results["budget"]["eps_indist"]["value"] == pytest.approx(0.076, abs=1e-3)
    assert report.results["sbb"]["eps_indist"] == pytest.approx(0.0793, abs=5e-4)
    assert report.results["zeta"]["zeta_star"] == pytest.approx(1.325, abs=5e-3)


def test_extract_request_needs_exactly_one_input(table_stats, correlator_set):
    with pytest.raises(ValueError):
        ExtractRequest(correlators=correlator_set, stats=table_stats)
    with pytest.raises(ValueError):
        ExtractRequest(stats=table_stats)


def test_resources_overview_lists_every_source():
    report = run_resources(ResourcesRequest())
    labels = [s["label"] for s in report.results["sources"]]
    assert labels == ["A", "B", "C"]
    assert report.results["sources"][2]["regime"] == "distillation-required"


def test_resources_request_rejects_both_targets():
    with pytest.raises(ValueError):
        ResourcesRequest(eps=0.01, source="A")


# ---------------- command line ----------------

def test_cli_simulate_fourier_three(capsys):
    out = _json(capsys, "simulate", "--n", 3, "--unitary", "fourier", "--model", "obb", "--eps", 0.0759)
    assert out["command"] == "simulate"
    assert out["results"]["eps_out"] == pytest.approx(0.0335, abs=5e-4)


def test_cli_simulate_shared_bad_bit(capsys):
    out = _json(capsys, "simulate", "--n", 3, "--model", "sbb", "--eps", 0.0793)
    assert out["results"]["eps_out"] == pytest.approx(0.0313, abs=5e-4)


def test_cli_simulate_optimality_scan(capsys):
    out = _json(capsys, "simulate", "--scan-optimality", "--n", 3, "--trials", 200, "--seed", 7)
    assert out["results"]["min_ratio"] >= 0.99


def test_cli_simulate_loss_pipeline(capsys, data_dir):
    chip = data_dir / "characterized_chip.json"
    out = _json(capsys, "simulate", "--n", 3, "--eps", 0.076, "--loss-file", chip)
    assert out["results"]["eps_out"] == pytest.approx(0.032, abs=1.5e-3)
    assert out["input_digests"][str(chip)].startswith("sha256:")


def test_cli_simulate_without_herald_exits_3(capsys):
    code, _ = _run(capsys, "simulate", "--n", 2)
    assert code == 3


def test_cli_simulate_invalid_error_exits_2(capsys):
    code, _ = _run(capsys, "simulate", "--n", 3, "--eps", 1.5)
    assert code == 2


def test_cli_simulate_unitary_file(capsys, write_json):
    path = write_json("u.json", {"real": [[0.6, 0.8], [0.8, -0.6]]})
    out = _json(capsys, "simulate", "--n", 2, "--unitary", "file", "--unitary-file", path, "--eps", 0.01)
    assert out["results"]["herald_probability"] > 0.0
    assert out["results"]["eps_out"] > 0.0


def test_cli_characterize_chip(capsys, data_dir, tmp_path):
    eta = tmp_path / "eta.csv"
    out = _json(capsys, "characterize", data_dir / "s_recorded.csv", "--eta-csv", eta)
    res = out["results"]
    assert res["d_in"][0] == pytest.approx(0.3568, abs=2e-3)
    assert res["fidelity_full"] == pytest.approx(0.9982, abs=1.5e-3)
    assert res["r_fit"] == pytest.approx(0.517, abs=2e-3)
    assert eta.read_text().splitlines()[0] == "input,output,eta,loss_db"


def test_cli_characterize_reference_and_anchor_flag(capsys, data_dir):
    out = _json(capsys, "characterize", data_dir / "s_recorded_ref.csv", "--d-in-anchor", 0.38)
    assert out["results"]["reflectivity"] == pytest.approx(0.497, abs=2e-3)
    assert out["results"]["d_in"][0] == pytest.approx(0.38)


def test_cli_characterize_two_files(capsys, data_dir):
    out = _json(capsys, "characterize", data_dir / "s_recorded.csv", data_dir / "s_recorded_ref.csv", "--no-fit-model")
    assert len(out["results"]["runs"]) == 2


def test_cli_extract_table(capsys, data_dir):
    out = _json(
        capsys, "extract", data_dir / "correlator_stats.csv", "--r1", R1, "--r2", R2, "--model", "both"
    )
    budget = out["results"]["budget"]
    assert budget["eps_tot"]["value"] == pytest.approx(0.103, abs=1e-3)
    assert budget["eps_indist_out"]["value"] == pytest.approx(0.034, abs=1e-3)
    assert out["results"]["sbb"]["eps_indist"] == pytest.approx(0.0793, abs=5e-4)
    assert out["results"]["sbb"]["eps_indist_out"] == pytest.approx(0.0329, abs=5e-4)


def test_cli_extract_csv_table(capsys, data_dir):
    code, out = _run(capsys, "extract", data_dir / "correlator_stats.csv", "--r1", R1, "--r2", R2, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "quantity,value,se,ci_half_width"
    assert len(lines) == 9


def test_cli_extract_missing_file_exits_2(capsys, tmp_path):
    code, _ = _run(capsys, "extract", tmp_path / "missing.csv", "--r1", R1, "--r2", R2)
    assert code == 2


def test_cli_resources_source_a(capsys):
    out = _json(capsys, "resources", "--source", "A")
    assert out["results"]["optimal"]["n_star"] == 12
    assert out["results"]["optimal"]["ratio"] == pytest.approx(0.25, abs=0.01)
    assert out["results"]["gamma_costs"]["fourier"] == pytest.approx(12.0)


def test_cli_resources_boundaries(capsys):
    out = _json(capsys, "resources", "--boundaries")
    assert out["results"]["boundaries"]["p_cross_over_pth"] == pytest.approx(0.39, abs=0.01)


def test_cli_resources_isolines_csv(capsys, tmp_path):
    target = tmp_path / "iso.csv"
    code, out = _run(capsys, "resources", "--isolines", "--isoline-ns", 1, 12, "--format", "csv", "--output", target)
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[0] == "N,p_over_pth,cost_ratio,valid_linear"


def test_cli_resources_above_threshold_exits_5(capsys):
    code, _ = _run(capsys, "resources", "--eps", 0.5)
    assert code == 5


def test_cli_resources_loss_budget_markdown(capsys):
    code, out = _run(capsys, "resources", "--loss", 0.1, "--gates", 6, "--format", "md")
    assert code == 0
    assert out.startswith("# Run report")
    assert "loss_budget" in out


def test_cli_rejects_conflicting_targets():
    with pytest.raises(SystemExit) as err:
        build_parser().parse_args(["resources", "--eps", "0.01", "--source", "A"])
    assert err.value.code == 2


def test_loss_pipeline_rejects_per_photon_errors(chip):
    with pytest.raises(InvalidInputError):
        run_simulate(SimulateRequest(n=3, eps=[0.07, 0.08, 0.09], losses=chip))
    same = run_simulate(SimulateRequest(n=3, eps=[0.076] * 3, losses=chip))
    assert same.results["eps_out"] == pytest.approx(0.032, abs=1.5e-3)
