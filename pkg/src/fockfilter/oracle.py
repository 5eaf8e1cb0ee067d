"""Permanent-based transition amplitudes for linear interferometers.

This module is the independent cross-check for the element engine: given
only a circuit's total mode unitary, the amplitude between two Fock
occupations is a matrix permanent with repeated rows/columns, divided by
the product of sqrt-factorials.  None of the binomial expansion code is
used here, so agreement between the two routes is meaningful evidence.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, PhotonLimitError

#: Ryser's formula is O(2^n * n); this caps n to keep calls exact and fast
MAX_PERMANENT_SIZE = 16


def permanent(matrix: np.ndarray) -> complex:
    """Permanent of a square matrix via Ryser's inclusion-exclusion formula.

    Column subsets are visited in Gray-code order so each step updates the
    running row sums with a single column add or subtract.  Exact-arithmetic
    friendly: everything stays in plain complex scalars.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"permanent needs a square matrix, got {m.shape}")
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j  # empty product: the vacuum-to-vacuum amplitude
    if n > MAX_PERMANENT_SIZE:
        raise PhotonLimitError(f"permanent of size {n} exceeds the supported {MAX_PERMANENT_SIZE}")

    rows = [[complex(m[i, j]) for j in range(n)] for i in range(n)]
    row_sums = [0j] * n
    total = 0j
    gray = 0
    sign = 1  # (-1)^popcount(gray), tracked incrementally
    for k in range(1, 1 << n):
        # bit j toggles between consecutive Gray codes
        j = (k & -k).bit_length() - 1
        bit = 1 << j
        gray ^= bit
        if gray & bit:
            for i in range(n):
                row_sums[i] += rows[i][j]
            sign = -sign
        else:
            for i in range(n):
                row_sums[i] -= rows[i][j]
            sign = -sign
        prod = 1.0 + 0j
        for s in row_sums:
            prod *= s
        total += sign * prod
    if n % 2:
        total = -total
    return total


def amplitude_via_permanent(
    u: np.ndarray, input_occ: Sequence[int], output_occ: Sequence[int]
) -> complex:
    """<output| U |input> for a mode unitary ``u`` acting on creation operators.

    The sub-matrix repeats column j once per input photon in mode j and
    row i once per output photon in mode i; the amplitude is its permanent
    over sqrt of the occupation factorials.  Photon-number mismatch gives 0.
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    if u.shape != (m, m):
        raise DimensionMismatchError(f"mode unitary must be square, got {u.shape}")
    if len(input_occ) != m or len(output_occ) != m:
        raise DimensionMismatchError(
            f"occupations of lengths {len(input_occ)}/{len(output_occ)} against {m} modes"
        )
    if any(n < 0 for n in input_occ) or any(n < 0 for n in output_occ):
        raise DimensionMismatchError("negative photon count")
    n_in = sum(input_occ)
    if n_in != sum(output_occ):
        return 0j
    if n_in > MAX_PERMANENT_SIZE:
        raise PhotonLimitError(f"{n_in} photons exceed the supported {MAX_PERMANENT_SIZE}")

    cols = [j for j, n in enumerate(input_occ) for _ in range(n)]
    rows = [i for i, n in enumerate(output_occ) for _ in range(n)]
    sub = u[np.ix_(rows, cols)] if n_in else np.zeros((0, 0), dtype=complex)
    weight = 1.0
    for n in input_occ:
        weight *= math.factorial(n)
    for n in output_occ:
        weight *= math.factorial(n)
    return permanent(sub) / math.sqrt(weight)
