import math

import numpy as np
import pytest

from photodistill.errors import InvalidInputError
from photodistill.optics import DiagonalLoss, beam_splitter, compose_lossy, fourier_matrix, haar_unitary
from photodistill.sim import (
    NoiseModel,
    PhotonSourceModel,
    SpeciesTerm,
    event_probability,
    expand_species,
    labelled_outcome_probabilities,
    outcome_distribution,
)
from photodistill.sim.events import compositions, photon_number_outcomes


def test_source_model_validation():
    with pytest.raises(ValueError):
        PhotonSourceModel(eps_per_input=[0.1, 1.5])
    with pytest.raises(ValueError):
        PhotonSourceModel(eps_per_input=[])
    src = PhotonSourceModel.uniform(3, 0.1, NoiseModel.SBB)
    assert src.n_photons == 3
    assert src.mean_eps == pytest.approx(0.1)


@pytest.mark.parametrize("model", list(NoiseModel))
def test_expansion_weights_sum_to_one(model):
    src = PhotonSourceModel(model=model, eps_per_input=[0.1, 0.2, 0.05, 0.3])
    terms = expand_species(src)
    assert len(terms) == 16
    assert math.fsum(t.weight for t in terms) == pytest.approx(1.0, abs=1e-12)


def test_expansion_labels_by_model():
    obb = expand_species(PhotonSourceModel(model=NoiseModel.OBB, eps_per_input=[1.0, 1.0]))
    sbb = expand_species(PhotonSourceModel(model=NoiseModel.SBB, eps_per_input=[1.0, 1.0]))
    assert [t.species_of_photon for t in obb] == [[1, 2]]
    assert [t.species_of_photon for t in sbb] == [[1, 1]]


def test_expansion_drops_zero_weights():
    terms = expand_species(PhotonSourceModel.uniform(3, 0.0))
    assert len(terms) == 1
    assert terms[0].bad_photons == 0


def test_expansion_limit():
    with pytest.raises(InvalidInputError):
        expand_species(PhotonSourceModel.uniform(13, 0.1))


def test_compositions_are_bounded_and_complete():
    occs = list(compositions([2, 1, 3], 3))
    assert all(sum(o) == 3 and o[0] <= 2 and o[1] <= 1 for o in occs)
    assert len(occs) == len(set(occs))
    assert len(list(photon_number_outcomes(3, 3))) == math.comb(5, 2)


def test_distinguishable_pair_on_balanced_splitter():
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 1])
    assert event_probability(beam_splitter(0.5), [0, 1], term, (1, 1)) == pytest.approx(0.5)


def test_hong_ou_mandel_dip():
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 0])
    assert event_probability(beam_splitter(0.5), [0, 1], term, (1, 1)) == pytest.approx(0.0, abs=1e-15)
    assert event_probability(beam_splitter(0.5), [0, 1], term, (2, 0)) == pytest.approx(0.5)


def test_fourier_three_photon_coincidence():
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 0, 0])
    assert event_probability(fourier_matrix(3), [0, 1, 2], term, (1, 1, 1)) == pytest.approx(1 / 3)


@pytest.mark.parametrize("labels", [[0, 0, 0], [0, 1, 0], [1, 2, 3], [0, 1, 1]])
def test_unitary_distribution_is_normalised(labels):
    u = haar_unitary(3, np.random.default_rng(4))
    dist = outcome_distribution(u, [0, 1, 2], SpeciesTerm(weight=1.0, species_of_photon=labels))
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_repeated_input_mode_is_normalised():
    u = haar_unitary(3, np.random.default_rng(8))
    dist = outcome_distribution(u, [0, 0, 1], SpeciesTerm(weight=1.0, species_of_photon=[0, 0, 0]))
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_lossy_network_outcomes_over_all_photon_numbers():
    t = compose_lossy(DiagonalLoss([0.9, 0.8]), beam_splitter(0.5), DiagonalLoss([0.7, 1.0]))
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 1])
    total = 0.0
    for k in range(3):
        total += sum(event_probability(t, [0, 1], term, o) for o in compositions([k, k], k))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_single_photon_loss_probability():
    t = compose_lossy(DiagonalLoss([0.5]), np.eye(1), DiagonalLoss([1.0]))
    term = SpeciesTerm(weight=1.0, species_of_photon=[0])
    assert event_probability(t, [0], term, (1,)) == pytest.approx(0.25)
    assert event_probability(t, [0], term, (0,)) == pytest.approx(0.75)


def test_labelled_split_tracks_species_positions():
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 1])
    rows = labelled_outcome_probabilities(np.eye(2), [0, 1], term, (1, 1))
    assert len(rows) == 1
    occupations, p = rows[0]
    assert occupations == {0: (1, 0), 1: (0, 1)}
    assert p == pytest.approx(1.0)


def test_outcome_validation():
    term = SpeciesTerm(weight=1.0, species_of_photon=[0, 0])
    with pytest.raises(InvalidInputError):
        event_probability(np.eye(2), [0, 1], term, (1, 1, 0))
    with pytest.raises(InvalidInputError):
        event_probability(np.eye(2), [0, 1], term, (2, 1))
    with pytest.raises(InvalidInputError):
        event_probability(np.eye(2), [0], term, (1, 0))
