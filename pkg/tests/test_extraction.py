import logging

import numpy as np
import pytest

from photodistill.errors import InvalidInputError
from photodistill.extraction import (
    CI_FACTOR,
    DENOMINATOR_NOTE,
    CorrelatorSamples,
    CorrelatorSet,
    Protocol,
    budget_with_ci,
    correlator_from_counts,
    error_values,
    extract_errors,
    extract_errors_sbb,
    monte_carlo_uncertainty,
    numerical_uncertainty,
    propagate_uncertainty,
    raw_visibility,
    sample_stats,
    sbb_input_error,
    zeta_sensitivity,
)

from conftest import R1, R2


# ---------------- correlators ----------------

def test_uncorrelated_counts_give_unit_correlator():
    counts = {"n3": 1000, "n4": 2000, "n34": 2, "nt": 1_000_000}
    assert correlator_from_counts(Protocol.A, counts) == pytest.approx(1.0)
    assert correlator_from_counts(Protocol.B, counts, trigger_scale=2.0) == pytest.approx(2.0)


def test_heralded_correlator_from_counts():
    counts = {"n12": 5000, "n123": 400, "n124": 500, "n1234": 4}
    assert correlator_from_counts("C", counts) == pytest.approx(4 * 5000 / (400 * 500))


def test_correlator_counts_must_be_complete():
    with pytest.raises(InvalidInputError):
        correlator_from_counts(Protocol.D, {"n12": 1})
    with pytest.raises(InvalidInputError):
        correlator_from_counts(Protocol.A, {"n3": 0, "n4": 1, "n34": 0, "nt": 1})


def test_sample_statistics_reproduce_table_row():
    z = np.random.default_rng(0).standard_normal(80)
    z = (z - z.mean()) / z.std(ddof=1)
    stats = sample_stats(0.104 + 0.045 * z)
    assert stats.n == 80
    assert stats.mean == pytest.approx(0.104)
    assert stats.sd == pytest.approx(0.045)
    assert stats.se == pytest.approx(0.005, abs=1e-4)


def test_sample_statistics_need_two_samples():
    with pytest.raises(InvalidInputError):
        sample_stats([0.1])


def test_samples_reject_negative_values():
    with pytest.raises(ValueError):
        CorrelatorSamples(values={Protocol.A: [0.1, -0.2]})


def test_samples_need_every_protocol():
    samples = CorrelatorSamples(values={Protocol.A: [0.1, 0.2], Protocol.B: [0.1, 0.2]})
    with pytest.raises(InvalidInputError):
        samples.stats()


def test_correlator_set_validates_reflectivity():
    with pytest.raises(ValueError):
        CorrelatorSet(g_a=0.1, g_b=0.1, g_c=0.1, g_d=0.1, r1=1.0, r2=0.5)


# ---------------- visibilities and errors ----------------

def test_visibilities_from_table(correlator_set):
    v = error_values(*correlator_set.means(), R1, R2)
    assert v["v0"] == pytest.approx(0.745, abs=1e-3)
    # the published g_D is rounded to three digits
    assert v["v1"] == pytest.approx(0.739, abs=1.5e-3)


def test_error_values_from_table(correlator_set):
    v = error_values(*correlator_set.means(), R1, R2)
    expected = {
        "eps_multi": 0.030,
        "eps_multi_out": 0.052,
        "eps_tot": 0.103,
        "eps_tot_out": 0.084,
        "eps_indist": 0.076,
        "eps_indist_out": 0.034,
    }
    for name, value in expected.items():
        assert v[name] == pytest.approx(value, abs=1e-3), name


def test_error_values_accept_arrays():
    v = error_values(np.array([0.05, 0.06]), 0.12, 0.1, 0.13, 0.5, 0.5)
    assert v["eps_tot"].shape == (2,)


def test_error_values_reject_negative_purity():
    with pytest.raises(InvalidInputError):
        error_values(0.0, 0.9, 0.0, 0.0, 0.5, 0.5)


def test_visibility_out_of_range_is_kept_and_logged(caplog):
    with caplog.at_level(logging.WARNING):
        v = raw_visibility(-0.1, 0.5)
    assert v == pytest.approx(1.2)
    assert "outside [0, 1]" in caplog.text


def test_visibility_needs_interior_reflectivity():
    with pytest.raises(InvalidInputError):
        raw_visibility(0.1, 0.0)


# ---------------- uncertainties ----------------

def test_standard_errors_from_table(correlator_set):
    se = propagate_uncertainty(correlator_set)
    assert se.eps_indist == pytest.approx(0.001, abs=1.1e-3)
    assert se.eps_indist_out == pytest.approx(0.008, abs=1.1e-3)
    assert se.eps_tot_out == pytest.approx(0.006, abs=1.1e-3)
    assert se.eps_multi == pytest.approx(0.0004)
    assert se.eps_multi_out == pytest.approx(0.0025)


def test_published_total_error_se_is_doubled(correlator_set):
    linear = propagate_uncertainty(correlator_set).eps_tot
    printed = propagate_uncertainty(correlator_set, printed_total_se=True).eps_tot
    assert linear == pytest.approx(0.000998, abs=2e-6)
    assert printed == pytest.approx(2 * linear)


def test_closed_form_matches_numerical_jacobian(correlator_set):
    closed = propagate_uncertainty(correlator_set).model_dump()
    numeric = numerical_uncertainty(correlator_set).model_dump()
    for name in closed:
        assert numeric[name] == pytest.approx(closed[name], rel=1e-5), name


def test_monte_carlo_agrees_with_linear_propagation(correlator_set):
    closed = propagate_uncertainty(correlator_set).model_dump()
    mc = monte_carlo_uncertainty(correlator_set, draws=100_000, seed=0).model_dump()
    for name in closed:
        assert mc[name] == pytest.approx(closed[name], rel=0.05), name


def test_monte_carlo_is_seeded(correlator_set):
    a = monte_carlo_uncertainty(correlator_set, draws=1000, seed=4)
    b = monte_carlo_uncertainty(correlator_set, draws=1000, seed=4)
    assert a == b


# ---------------- budget ----------------

def test_budget_rows_and_intervals(correlator_set):
    budget = extract_errors(correlator_set)
    assert DENOMINATOR_NOTE in budget.warnings
    est = budget.eps_indist
    assert est.ci_high - est.value == pytest.approx(CI_FACTOR * est.se)
    rows = budget_with_ci(budget)
    assert [r.quantity for r in rows][:2] == ["V0", "V1"]
    assert len(rows) == 8
    assert rows[0].ci_half_width == pytest.approx(CI_FACTOR * rows[0].se)


def test_budget_flags_published_total_se(correlator_set):
    budget = extract_errors(correlator_set, printed_total_se=True)
    assert any("published" in w for w in budget.warnings)


def test_budget_warns_on_unphysical_visibility():
    cs = CorrelatorSet(g_a=0.01, g_b=-0.05, g_c=0.01, g_d=0.1, r1=0.5, r2=0.5)
    budget = extract_errors(cs)
    assert budget.v0.value > 1.0
    assert any("V0" in w for w in budget.warnings)


def test_shared_bad_bit_reading(correlator_set):
    sbb = extract_errors_sbb(extract_errors(correlator_set))
    assert sbb.eps_indist == pytest.approx(0.0793, abs=5e-4)
    assert sbb.eps_indist_out == pytest.approx(0.0329, abs=5e-4)


def test_shared_bad_bit_input_error_keeps_purity():
    eps = sbb_input_error(0.0759)
    assert (1 - eps) ** 2 + eps ** 2 == pytest.approx((1 - 0.0759) ** 2)
    with pytest.raises(InvalidInputError):
        sbb_input_error(0.5)


def test_zeta_sensitivity():
    z = zeta_sensitivity(0.0296, 0.052)
    assert z.zeta_star == pytest.approx(1.33, abs=5e-3)
    assert z.minimum == pytest.approx(0.0391, abs=2e-4)
    assert z.estimate == pytest.approx(0.0408, abs=1e-4)
    with pytest.raises(InvalidInputError):
        zeta_sensitivity(0.0, 0.05)
