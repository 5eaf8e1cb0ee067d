"""The permanent-based oracle, checked against hand-computable cases."""

import itertools
import math

import numpy as np
import pytest

from fockfilter import (
    DimensionMismatchError,
    MAX_PERMANENT_SIZE,
    PhotonLimitError,
    SYMMETRIC_BS,
    amplitude_via_permanent,
    permanent,
)
from fockfilter.verify import haar_unitary

RSQRT2 = 1.0 / math.sqrt(2.0)


def permanent_by_definition(m):
    n = m.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0j
        for i, j in enumerate(perm):
            prod *= m[i, j]
        total += prod
    return total


def test_permanent_small_cases():
    assert permanent(np.zeros((0, 0))) == 1.0 + 0j
    assert abs(permanent(np.array([[3.5 + 1j]])) - (3.5 + 1j)) < 1e-15
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    # per = ad + bc
    assert abs(permanent(m) - 10.0) < 1e-13
    assert abs(permanent(np.ones((4, 4))) - 24.0) < 1e-12  # 4!
    assert abs(permanent(np.eye(5)) - 1.0) < 1e-12


def test_permanent_matches_brute_force():
    rng = np.random.default_rng(31)
    for n in range(1, 6):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert abs(permanent(m) - permanent_by_definition(m)) < 1e-10


def test_permanent_row_and_column_permutation_invariance():
    rng = np.random.default_rng(37)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    reference = permanent(m)
    for perm in itertools.permutations(range(4)):
        assert abs(permanent(m[list(perm), :]) - reference) < 1e-12
        assert abs(permanent(m[:, list(perm)]) - reference) < 1e-12


def test_permanent_rejects_non_square_and_oversize():
    with pytest.raises(DimensionMismatchError):
        permanent(np.ones((2, 3)))
    big = np.eye(MAX_PERMANENT_SIZE + 1)
    with pytest.raises(PhotonLimitError):
        permanent(big)


def test_amplitude_via_permanent_single_photon_is_matrix_element():
    u = np.array(SYMMETRIC_BS)
    assert abs(amplitude_via_permanent(u, (1, 0), (1, 0)) - RSQRT2) < 1e-15
    assert abs(amplitude_via_permanent(u, (1, 0), (0, 1)) - RSQRT2) < 1e-15
    assert abs(amplitude_via_permanent(u, (0, 1), (0, 1)) + RSQRT2) < 1e-15


def test_amplitude_via_permanent_hong_ou_mandel():
    u = np.array(SYMMETRIC_BS)
    assert abs(amplitude_via_permanent(u, (1, 1), (1, 1))) < 1e-15
    assert abs(amplitude_via_permanent(u, (1, 1), (2, 0)) - RSQRT2) < 1e-15
    assert abs(amplitude_via_permanent(u, (1, 1), (0, 2)) + RSQRT2) < 1e-15


def test_amplitude_via_permanent_conserves_probability():
    rng = np.random.default_rng(41)
    u = haar_unitary(3, rng)
    # all 3-mode outputs with 2 photons
    outputs = [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1)]
    total = sum(abs(amplitude_via_permanent(u, (1, 1, 0), out)) ** 2 for out in outputs)
    assert abs(total - 1.0) < 1e-12


def test_amplitude_via_permanent_photon_mismatch_is_zero():
    u = np.array(SYMMETRIC_BS)
    assert amplitude_via_permanent(u, (1, 0), (1, 1)) == 0j
    assert amplitude_via_permanent(u, (0, 0), (0, 0)) == 1.0 + 0j


def test_amplitude_via_permanent_identity_channel():
    u = np.eye(3)
    assert abs(amplitude_via_permanent(u, (2, 1, 0), (2, 1, 0)) - 1.0) < 1e-15
    assert amplitude_via_permanent(u, (2, 1, 0), (1, 2, 0)) == 0j
