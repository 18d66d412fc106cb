"""Multi-species permanent rule for partially distinguishable photons.

Photons of one species add amplitudes; distinct species add probabilities. The
probability of an outcome is the sum, over every way of splitting the outcome
into per-species occupations, of the product of the per-species permanent
probabilities.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterator, Sequence

import numpy as np

from photodistill.errors import InvalidInputError
from photodistill.optics.matrices import dilate, is_unitary
from photodistill.optics.permanent import permanent
from photodistill.sim.species import SpeciesTerm

Occupation = tuple[int, ...]


def compositions(remaining: Sequence[int], total: int) -> Iterator[Occupation]:
    """Occupation vectors ``v <= remaining`` (elementwise) with ``sum(v) == total``.

    Yielded in a fixed lexicographic order.
    """
    if not remaining:
        if total == 0:
            yield ()
        return
    head, rest = remaining[0], remaining[1:]
    rest_cap = sum(rest)
    for k in range(min(head, total), -1, -1):
        if total - k > rest_cap:
            break
        for tail in compositions(rest, total - k):
            yield (k,) + tail


def photon_number_outcomes(n_modes: int, n_photons: int) -> Iterator[Occupation]:
    return compositions([n_photons] * n_modes, n_photons)


def _groups(inputs: Sequence[int], term: SpeciesTerm) -> list[tuple[int, list[int]]]:
    if len(inputs) != len(term.species_of_photon):
        raise InvalidInputError(
            f"{len(inputs)} input modes given for {len(term.species_of_photon)} photons"
        )
    by_label: dict[int, list[int]] = {}
    for mode, label in zip(inputs, term.species_of_photon):
        by_label.setdefault(label, []).append(int(mode))
    return sorted(by_label.items())


def _species_probability(a: np.ndarray, rows: list[int], occupation: Occupation) -> float:
    cols = [j for j, m in enumerate(occupation) for _ in range(m)]
    amp = permanent(a[np.ix_(rows, cols)])
    norm = math.prod(math.factorial(m) for m in occupation)
    norm *= math.prod(math.factorial(c) for c in Counter(rows).values())
    return abs(amp) ** 2 / norm


def _lossless_splits(a: np.ndarray, groups, outcome: Occupation):
    """Yield ``(per-species occupations, probability)`` for a full-detection outcome."""

    def walk(idx: int, remaining: Occupation, acc: tuple, prob: float):
        if idx == len(groups):
            yield acc, prob
            return
        _, rows = groups[idx]
        for occ in compositions(remaining, len(rows)):
            p = _species_probability(a, rows, occ)
            if p == 0.0:
                continue
            left = tuple(r - o for r, o in zip(remaining, occ))
            yield from walk(idx + 1, left, acc + (occ,), prob * p)

    yield from walk(0, tuple(outcome), (), 1.0)


def _validate(a: np.ndarray, inputs: Sequence[int], outcome: Sequence[int]) -> Occupation:
    outcome = tuple(int(m) for m in outcome)
    if len(outcome) != a.shape[1]:
        raise InvalidInputError(f"outcome has {len(outcome)} modes, network has {a.shape[1]} outputs")
    if any(m < 0 for m in outcome):
        raise InvalidInputError("outcome occupations must be nonnegative")
    if any(i < 0 or i >= a.shape[0] for i in inputs):
        raise InvalidInputError(f"input modes {list(inputs)} outside {a.shape[0]} inputs")
    if sum(outcome) > len(inputs):
        raise InvalidInputError(f"outcome holds {sum(outcome)} photons, only {len(inputs)} injected")
    return outcome


def labelled_outcome_probabilities(t, inputs: Sequence[int], term: SpeciesTerm, outcome: Sequence[int]):
    """Split the probability of ``outcome`` by where each species ended up.

    Returns a list of ``(occupations, probability)`` where ``occupations`` maps
    each species label to its occupation of the physical output modes. Photons
    missing from a sub-unitary network's outcome are traced over loss modes.
    """
    a = np.asarray(t, dtype=complex)
    outcome = _validate(a, inputs, outcome)
    groups = _groups(inputs, term)
    labels = [label for label, _ in groups]
    missing = len(inputs) - sum(outcome)

    if missing == 0:
        return [(dict(zip(labels, occs)), p) for occs, p in _lossless_splits(a, groups, outcome)]

    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("photon loss is only modelled for square transfer matrices")
    if is_unitary(a):
        return []
    n = a.shape[1]
    w = np.asarray(dilate(a))
    merged: dict[tuple, float] = {}
    for lost in photon_number_outcomes(n, missing):
        for occs, p in _lossless_splits(w, groups, outcome + lost):
            key = tuple(occ[:n] for occ in occs)
            merged[key] = merged.get(key, 0.0) + p
    return [(dict(zip(labels, key)), p) for key, p in merged.items()]


def event_probability(t, inputs: Sequence[int], term: SpeciesTerm, outcome: Sequence[int]) -> float:
    return float(sum(p for _, p in labelled_outcome_probabilities(t, inputs, term, outcome)))


def outcome_distribution(t, inputs: Sequence[int], term: SpeciesTerm) -> dict[Occupation, float]:
    """Probabilities of every photon-number-conserving outcome."""
    a = np.asarray(t, dtype=complex)
    return {
        outcome: event_probability(a, inputs, term, outcome)
        for outcome in photon_number_outcomes(a.shape[1], len(inputs))
    }
