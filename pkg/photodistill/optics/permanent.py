from __future__ import annotations

import math
from itertools import permutations

import numpy as np

from photodistill.errors import InvalidInputError

MAX_PERMANENT_SIZE = 16


def _square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"permanent needs a square matrix, got shape {a.shape}")
    return a


def permanent(m) -> complex:
    """Ryser inclusion-exclusion walked in Gray-code order, O(2^n n).

    The subset order is fixed, so equal inputs give bit-identical results.
    """
    a = _square(m)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > MAX_PERMANENT_SIZE:
        raise InvalidInputError(f"permanent limited to n <= {MAX_PERMANENT_SIZE}, got {n}")

    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray >> bit & 1:
            row_sums += a[:, bit]
        else:
            row_sums -= a[:, bit]
        term = complex(np.prod(row_sums))
        total += -term if bin(gray).count("1") & 1 else term
    return total if n % 2 == 0 else -total


def naive_permanent(m) -> complex:
    """Sum over all n! permutations. Test oracle only."""
    a = _square(m)
    n = a.shape[0]
    if n > 8:
        raise InvalidInputError("naive permanent limited to n <= 8")
    rows = range(n)
    return complex(sum(math.prod(a[i, p[i]] for i in rows) for p in permutations(range(n))))
