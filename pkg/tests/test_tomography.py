import numpy as np
import pytest

from photodistill.errors import ConvergenceError, InvalidInputError, ReconstructionError
from photodistill.optics import fourier_matrix, is_unitary
from photodistill.tomography import (
    CountMatrix,
    amplitudes_from_counts,
    characterize,
    concatenated_amplitudes,
    decompose_losses,
    eta_db,
    extract_reflectivity,
    fit_concatenated_model,
    ideal_distillation_matrix,
    mc_reflectivity_uncertainty,
    reconstruct_phases_3mode,
    sinkhorn_scaling,
    transmission_map,
)
from photodistill.optics import DiagonalLoss

from conftest import D_IN, D_OUT


def _renormalised(a):
    r, c, _, _ = sinkhorn_scaling(np.abs(a) ** 2)
    return np.sqrt(r[:, None] * np.abs(a) ** 2 * c[None, :])


# ---------------- counts and losses ----------------

def test_amplitudes_from_recorded_counts(chip_counts):
    counts, meta = chip_counts
    t = np.asarray(amplitudes_from_counts(counts))
    assert meta["d_in_anchor"] == "0.3568"
    assert t[0, 0] == pytest.approx(0.0824, abs=1e-4)
    assert t.shape == (4, 4)


def test_count_validation():
    with pytest.raises(ValueError):
        CountMatrix(counts=[[1, -1], [1, 1]], s_norm=10)
    with pytest.raises(ValueError):
        CountMatrix(counts=[[1, 2], [1]], s_norm=10)
    with pytest.raises(InvalidInputError):
        amplitudes_from_counts(CountMatrix(counts=[[11, 1], [1, 1]], s_norm=10))
    with pytest.raises(InvalidInputError):
        amplitudes_from_counts(CountMatrix(counts=[[1, 1], [1, 1]], s_norm=0))


def test_loss_products_are_gauge_independent(chip_counts):
    counts, _ = chip_counts
    dec = decompose_losses(amplitudes_from_counts(counts))
    assert dec.gauge == "balanced"
    measured = np.outer(dec.d_in.amplitudes, dec.d_out.amplitudes)
    np.testing.assert_allclose(measured, np.outer(D_IN, D_OUT), atol=2e-3)
    assert dec.residual <= 1e-12


def test_anchored_gauge_convention_pins_first_input(chip_counts):
    # the anchor fixes D_in[0]; the rest follows from the data
    counts, _ = chip_counts
    dec = decompose_losses(amplitudes_from_counts(counts), anchor=D_IN[0])
    assert dec.d_in.amplitudes[0] == pytest.approx(D_IN[0])
    np.testing.assert_allclose(dec.d_in.amplitudes, D_IN, atol=2e-3)
    np.testing.assert_allclose(dec.d_out.amplitudes, D_OUT, atol=2e-3)
    assert dec.residual <= 1e-12
    assert dec.gauge.startswith("anchored")


def test_decomposition_is_exact_in_any_gauge(chip_counts):
    counts, _ = chip_counts
    t = np.asarray(amplitudes_from_counts(counts)).real
    for anchor in (None, 0.3568, 0.5):
        dec = decompose_losses(t, anchor=anchor)
        rebuilt = dec.d_in.amplitudes[:, None] * dec.u_abs * dec.d_out.amplitudes[None, :]
        np.testing.assert_allclose(rebuilt, t, rtol=1e-9)
        np.testing.assert_allclose((dec.u_abs ** 2).sum(axis=0), 1.0, atol=1e-10)
        np.testing.assert_allclose((dec.u_abs ** 2).sum(axis=1), 1.0, atol=1e-10)


def test_balanced_gauge_has_equal_geometric_means():
    t = np.abs(np.asarray(fourier_matrix(3))) * np.outer([0.5, 0.6, 0.7], [0.4, 0.3, 0.8])
    dec = decompose_losses(t)
    assert dec.gauge == "balanced"
    assert np.prod(dec.d_in.amplitudes) == pytest.approx(np.prod(dec.d_out.amplitudes))


def test_gauge_shift_when_anchor_pushes_transmission_above_one():
    t = np.full((2, 2), 0.5) * 0.5
    dec = decompose_losses(t, anchor=0.1)
    assert np.max(dec.d_out.amplitudes) <= 1.0
    assert dec.warnings


def test_sinkhorn_reports_non_convergence():
    a2 = np.array([[0.9, 0.1, 0.3], [0.2, 0.5, 0.1], [0.4, 0.2, 0.7]])
    with pytest.raises(ConvergenceError) as err:
        sinkhorn_scaling(a2, max_iter=1)
    assert err.value.residual > 0


def test_sinkhorn_rejects_dead_rows():
    with pytest.raises(InvalidInputError):
        sinkhorn_scaling(np.array([[0.0, 0.0], [0.5, 0.5]]))


def test_reference_splitter_reflectivity(reference_counts):
    counts, _ = reference_counts
    dec = decompose_losses(amplitudes_from_counts(counts))
    assert extract_reflectivity(dec.u_abs) == pytest.approx(0.497, abs=2e-3)
    assert dec.u_abs[0, 0] == pytest.approx(0.7049, abs=1e-3)


def test_reflectivity_needs_doubly_stochastic_block():
    with pytest.raises(InvalidInputError):
        extract_reflectivity(np.array([[0.9, 0.1], [0.1, 0.9]]))


def test_reflectivity_resampling_spread(reference_counts):
    counts, _ = reference_counts
    assert mc_reflectivity_uncertainty(counts, draws=1000, seed=0) < 1e-3


def test_transmission_map_of_printed_losses():
    tmap = transmission_map(DiagonalLoss(D_IN), DiagonalLoss(D_OUT))
    assert tmap.eta[0][0] == pytest.approx(0.3568 ** 2 * 0.3856 ** 2)
    assert tmap.eta[0][0] == pytest.approx(0.0189, abs=1e-4)
    assert tmap.mean == pytest.approx(0.021, abs=1e-3)
    assert tmap.loss_db()[0][0] == pytest.approx(eta_db(tmap.eta[0][0]))


def test_eta_db():
    assert eta_db(0.1) == pytest.approx(10.0)
    with pytest.raises(InvalidInputError):
        eta_db(0.0)


# ---------------- phases ----------------

def test_phases_of_flat_amplitudes_give_the_ideal_matrix(u_d_th):
    rec = reconstruct_phases_3mode(np.abs(np.asarray(fourier_matrix(3))))
    np.testing.assert_allclose(np.asarray(rec.matrix), u_d_th, atol=1e-9)
    assert rec.unitarity_residual < 1e-9
    np.testing.assert_allclose(ideal_distillation_matrix(), u_d_th, atol=1e-9)


def test_phases_of_the_reconstructed_chip_block(u_d_exp):
    rec = reconstruct_phases_3mode(_renormalised(u_d_exp))
    m = np.asarray(rec.matrix)
    err = min(np.max(np.abs(m - u_d_exp)), np.max(np.abs(m.conj() - u_d_exp)))
    assert err < 2e-3


def test_phases_recover_a_random_unitary_up_to_gauge():
    rng = np.random.default_rng(21)
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q, _ = np.linalg.qr(z)
    rec = reconstruct_phases_3mode(np.abs(q))
    m = np.asarray(rec.matrix)
    assert is_unitary(m, tol=1e-8)
    np.testing.assert_allclose(np.abs(m), np.abs(q), atol=1e-12)


def test_unclosable_triangle_is_reported():
    sq = np.array([[0.45, 0.45, 0.1], [0.1, 0.45, 0.45], [0.45, 0.1, 0.45]])
    with pytest.raises(ReconstructionError) as err:
        reconstruct_phases_3mode(np.sqrt(sq))
    assert len(err.value.triple) == 3


def test_phases_need_doubly_stochastic_input():
    with pytest.raises(InvalidInputError):
        reconstruct_phases_3mode(np.full((3, 3), 0.5))


# ---------------- concatenated model ----------------

def test_concatenated_fit_recovers_exact_model():
    u = concatenated_amplitudes(np.abs(np.asarray(fourier_matrix(3))), 0.3)
    fit = fit_concatenated_model(u)
    assert fit.r2 == pytest.approx(0.3, abs=1e-6)
    assert fit.fidelity_fit == pytest.approx(1.0, abs=1e-9)
    assert not fit.degenerate


def test_concatenated_fit_needs_four_modes():
    with pytest.raises(InvalidInputError):
        fit_concatenated_model(np.eye(3))


# ---------------- full characterisation ----------------

def test_characterize_recorded_chip(chip_counts):
    counts, meta = chip_counts
    result = characterize(counts, anchor=float(meta["d_in_anchor"]))
    assert result.r_fit == pytest.approx(0.517, abs=2e-3)
    assert result.fidelity_fit == pytest.approx(0.9996, abs=3e-4)
    assert result.fidelity_full == pytest.approx(0.9982, abs=1.5e-3)
    assert result.fidelity_full_re <= result.fidelity_full
    assert result.eta_mean == pytest.approx(0.021, abs=2e-3)
    np.testing.assert_allclose(result.d_in, D_IN, atol=2e-3)
    assert result.u_phased is not None
    assert result.reflectivity is None


def test_characterize_reference_block(reference_counts):
    counts, _ = reference_counts
    result = characterize(counts, mc_draws=200, seed=3)
    assert result.reflectivity == pytest.approx(0.497, abs=2e-3)
    assert result.reflectivity_rel_se < 1e-3
    assert result.gauge == "balanced"
    assert result.fidelity_full is None


def test_characterize_three_mode_network():
    t = np.abs(np.asarray(fourier_matrix(3))) * np.outer([0.6, 0.5, 0.7], [0.5, 0.6, 0.4])
    counts = CountMatrix(counts=np.rint(t ** 2 * 1e9).astype(int).tolist(), s_norm=10 ** 9)
    result = characterize(counts)
    assert result.fidelity_full == pytest.approx(1.0, abs=1e-4)
    assert result.r_fit is None


def test_characterize_skips_fit_on_request(chip_counts):
    counts, _ = chip_counts
    result = characterize(counts, fit_model=False)
    assert result.r_fit is None and result.u_phased is None
