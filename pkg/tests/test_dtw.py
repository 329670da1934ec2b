import numpy as np
import pytest

from skelact import dtw_distance
from skelact.errors import DimMismatch, EmptySequence

from oracles import band_admits, dtw_oracle


def test_known_small_case():
    # Single possible path: (0,0) -> (1,0); costs 1 and 2.
    assert dtw_distance(np.array([[0.0], [3.0]]), np.array([[1.0]])) == pytest.approx(3.0)


def test_perfect_alignment_is_zero():
    a = np.array([[0.0], [1.0], [2.0]])
    b = np.array([[0.0], [1.0], [1.0], [2.0]])
    assert dtw_distance(a, b) == pytest.approx(0.0)


def test_identity_and_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.normal(size=(rng.integers(1, 8), 3))
        b = rng.normal(size=(rng.integers(1, 8), 3))
        assert dtw_distance(a, a) == pytest.approx(0.0, abs=1e-12)
        assert dtw_distance(a, b) == pytest.approx(dtw_distance(b, a))
        assert dtw_distance(a, b) >= 0.0


def test_matches_path_enumeration_oracle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n, m = rng.integers(1, 7), rng.integers(1, 7)
        dim = rng.integers(1, 5)
        a = rng.normal(size=(n, dim))
        b = rng.normal(size=(m, dim))
        assert dtw_distance(a, b, band=1.0) == pytest.approx(dtw_oracle(a, b), abs=1e-9)


def test_banded_matches_restricted_oracle():
    rng = np.random.default_rng(12)
    for _ in range(120):
        n, m = rng.integers(1, 7), rng.integers(1, 7)
        a = rng.normal(size=(n, 2))
        b = rng.normal(size=(m, 2))
        band = float(rng.uniform(0.05, 0.9))
        got = dtw_distance(a, b, band=band)
        want = dtw_oracle(a, b, admitted=band_admits(n, m, band))
        if np.isinf(want):
            assert np.isinf(got)
        else:
            assert got == pytest.approx(want, abs=1e-9)


def test_band_never_underestimates():
    rng = np.random.default_rng(13)
    for _ in range(50):
        a = rng.normal(size=(rng.integers(2, 30), 4))
        b = rng.normal(size=(rng.integers(2, 30), 4))
        full = dtw_distance(a, b, band=1.0)
        banded = dtw_distance(a, b, band=0.2)
        assert banded >= full - 1e-9


def test_full_band_equals_unbanded():
    # band >= 1.0 admits every cell, so widening further changes nothing
    rng = np.random.default_rng(14)
    a = rng.normal(size=(40, 3))
    b = rng.normal(size=(55, 3))
    assert dtw_distance(a, b, band=1.0) == dtw_distance(a, b, band=5.0)


def test_one_dimensional_input_promoted():
    a = np.array([0.0, 1.0, 2.0])
    b = np.array([0.0, 2.0])
    assert dtw_distance(a, b) == pytest.approx(1.0)


def test_empty_sequence_rejected():
    with pytest.raises(EmptySequence):
        dtw_distance(np.zeros((0, 3)), np.zeros((4, 3)))


def test_dim_mismatch_rejected():
    with pytest.raises(DimMismatch):
        dtw_distance(np.zeros((3, 2)), np.zeros((3, 4)))
