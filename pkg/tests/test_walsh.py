import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from potential_encoding import DecayExp, sample_model
from potential_encoding.potential import PotentialDomainError
from potential_encoding.walsh import WalshSpectrum, analyze, basis_vector, fwht, synthesize


def naive_spectrum(f):
    """O(N^2) inner products against explicit popcount sign patterns."""
    N = len(f)
    return [
        sum(f[k] * (-1) ** bin(j & k).count("1") for k in range(N)) / N
        for j in range(N)
    ]


def vectors(max_n=6):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(np.float64, 2**n, elements=st.floats(-1e3, 1e3, allow_nan=False))
    )


class TestBasisVector:
    def test_all_ones(self):
        np.testing.assert_array_equal(basis_vector(0, 3), [1, 1, 1, 1, 1, 1, 1, 1])

    def test_alternating(self):
        np.testing.assert_array_equal(basis_vector(1, 3), [1, -1, 1, -1, 1, -1, 1, -1])

    def test_mask7_popcount_oracle(self):
        expected = [(-1) ** bin(7 & k).count("1") for k in range(8)]
        assert expected == [1, -1, -1, 1, -1, 1, 1, -1]
        np.testing.assert_array_equal(basis_vector(7, 3), expected)

    def test_matches_hadamard_columns(self):
        H = np.array([[1, 1], [1, -1]])
        H3 = np.kron(np.kron(H, H), H)
        for j in range(8):
            np.testing.assert_array_equal(basis_vector(j, 3), H3[:, j])

    @pytest.mark.parametrize("j", [-1, 8])
    def test_out_of_range(self, j):
        with pytest.raises(IndexError):
            basis_vector(j, 3)


class TestAnalyze:
    def test_constant(self):
        np.testing.assert_array_equal(analyze([5, 5, 5, 5]).coeffs, [5, 0, 0, 0])

    def test_pure_alternation(self):
        np.testing.assert_array_equal(analyze([1, -1]).coeffs, [0, 1])

    def test_decay_round_trip(self):
        f = sample_model(DecayExp(), 5, 0.0, 10.0).values
        assert np.max(np.abs(synthesize(analyze(f)) - f)) < 1e-12

    def test_non_power_of_two(self):
        with pytest.raises(PotentialDomainError):
            analyze([1.0, 2.0, 3.0])

    def test_non_finite(self):
        with pytest.raises(PotentialDomainError):
            analyze([1.0, math.inf])

    @pytest.mark.parametrize("n", range(1, 7))
    def test_fast_matches_naive(self, n, rng):
        for _ in range(5):
            f = rng.normal(size=2**n)
            np.testing.assert_allclose(analyze(f).coeffs, naive_spectrum(list(f)), rtol=1e-12, atol=1e-12)


class TestSynthesize:
    def test_constant_spectrum(self):
        np.testing.assert_array_equal(synthesize(WalshSpectrum(3, [2.0] + [0.0] * 7)), [2.0] * 8)

    def test_two_point(self):
        np.testing.assert_array_equal(synthesize(analyze([1, -1])), [1, -1])

    def test_round_trip_random(self, rng):
        for n in range(1, 9):
            f = rng.normal(size=2**n)
            assert np.max(np.abs(synthesize(analyze(f)) - f)) < 1e-12

    def test_json_round_trip(self, rng):
        s = analyze(rng.normal(size=16))
        back = WalshSpectrum.from_json(s.to_json())
        np.testing.assert_array_equal(back.coeffs, s.coeffs)


@given(vectors())
@settings(max_examples=60, deadline=None)
def test_butterfly_involution(f):
    np.testing.assert_allclose(fwht(fwht(f)), len(f) * f, rtol=1e-12, atol=1e-9)


@given(vectors())
@settings(max_examples=60, deadline=None)
def test_parseval(f):
    c = analyze(f).coeffs
    lhs = float(np.sum(f**2))
    rhs = len(f) * float(np.sum(c**2))
    assert rhs == pytest.approx(lhs, rel=1e-9, abs=1e-9)
