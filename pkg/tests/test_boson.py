import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhlab import boson
from qhlab.distance import total_variation

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def fock_amplitudes(A):
    """Brute-force Fock-space evolution of one photon per input mode.

    Each photon j independently lands in mode i with amplitude ``A[i, j]``;
    the amplitude of counts ``S`` sums every assignment with those counts,
    times ``sqrt(prod s!)`` from ``(b^dagger)^s |0> = sqrt(s!) |s>``.
    """
    m, n = A.shape
    amps = {}
    for assignment in itertools.product(range(m), repeat=n):
        S = tuple(np.bincount(assignment, minlength=m))
        term = np.prod([A[i, j] for j, i in enumerate(assignment)])
        amps[S] = amps.get(S, 0) + term
    out = {}
    for S, a in amps.items():
        norm = math.prod(math.factorial(s) for s in S)
        out[S] = abs(a) ** 2 * norm
    return out


class TestPermanent:
    @pytest.mark.parametrize("f", [boson.permanent_ryser, boson.permanent_minors])
    def test_small_cases(self, f):
        assert f(np.eye(4)) == pytest.approx(1)
        assert f([[1, 2], [3, 4]]) == pytest.approx(1 * 4 + 2 * 3)
        assert f(np.ones((4, 4))) == pytest.approx(24)
        assert f(np.ones((6, 6))) == pytest.approx(720)

    def test_zero_row(self, rng):
        M = random_complex(rng, 5)
        M[2] = 0
        assert boson.permanent_ryser(M) == 0

    def test_six_by_six_matches_minors(self, rng):
        M = random_complex(rng, 6)
        a, b = boson.permanent_ryser(M), boson.permanent_minors(M)
        assert abs(a - b) <= 1e-9 * abs(b)

    @pytest.mark.parametrize("f", [boson.permanent_ryser, boson.permanent_minors])
    def test_non_square(self, f):
        with pytest.raises(ValueError):
            f(np.ones((2, 3)))

    def test_single_entry_per_row(self, rng):
        perm = rng.permutation(6)
        vals = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        M = np.zeros((6, 6), dtype=complex)
        M[np.arange(6), perm] = vals
        assert boson.permanent_ryser(M) == pytest.approx(np.prod(vals), rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, n=st.integers(1, 7))
    def test_ryser_equals_minors(self, seed, n):
        M = random_complex(np.random.default_rng(seed), n)
        a, b = boson.permanent_ryser(M), boson.permanent_minors(M)
        assert abs(a - b) <= 1e-9 * max(abs(b), 1e-300)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(2, 6))
    def test_row_and_column_permutation_invariance(self, seed, n):
        r = np.random.default_rng(seed)
        M = random_complex(r, n)
        P = M[r.permutation(n)][:, r.permutation(n)]
        assert boson.permanent_ryser(P) == pytest.approx(boson.permanent_ryser(M), rel=1e-9)


class TestOutcomes:
    def test_build_A_S(self, rng):
        A = boson.haar_random_interferometer(5, 3, rng)
        np.testing.assert_array_equal(boson.build_A_S(A, (0, 1, 0, 1, 1)), A.A[[1, 3, 4]])
        np.testing.assert_array_equal(boson.build_A_S(A, (3, 0, 0, 0, 0)), A.A[[0, 0, 0]])
        B = boson.haar_random_interferometer(3, 2, rng)
        np.testing.assert_array_equal(boson.build_A_S(B, (1, 0, 1)), B.A[[0, 2]])

    def test_build_A_S_photon_mismatch(self, rng):
        with pytest.raises(ValueError):
            boson.build_A_S(boson.haar_random_interferometer(3, 2, rng), (1, 1, 1))

    def test_enumerate(self):
        assert boson.enumerate_outcomes(2, 2) == [(2, 0), (1, 1), (0, 2)]
        assert len(boson.enumerate_outcomes(3, 1)) == 3
        assert len(boson.enumerate_outcomes(5, 3)) == 35

    def test_enumeration_budget(self):
        with pytest.raises(ValueError):
            boson.enumerate_outcomes(40, 20)

    def test_hong_ou_mandel(self):
        hom = boson.hong_ou_mandel()
        assert boson.outcome_probability(hom, (1, 1)) <= 1e-12
        assert boson.full_distribution(hom).as_dict() == pytest.approx({(2, 0): 0.5, (1, 1): 0.0, (0, 2): 0.5})

    def test_point_mass(self, rng):
        A = np.eye(2)[:, :1]
        assert boson.full_distribution(A).as_dict() == pytest.approx({(1, 0): 1.0, (0, 1): 0.0})
        assert set(boson.sample_outcome(A, 500, rng)) == {(1, 0)}

    def test_fock_oracle_five_modes_three_photons(self, rng):
        A = boson.haar_random_interferometer(5, 3, rng)
        oracle = fock_amplitudes(A.A)
        dist = boson.full_distribution(A)
        for S, p in zip(dist.labels, dist.probs):
            assert abs(p - oracle[S]) <= 1e-8

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds, m=st.integers(1, 7), n=st.integers(1, 4))
    def test_normalization(self, seed, m, n):
        n = min(n, m)
        A = boson.haar_random_interferometer(m, n, np.random.default_rng(seed))
        assert abs(boson.full_distribution(A).probs.sum() - 1.0) <= 1e-8


class TestSampling:
    def test_hom_no_coincidences(self, rng):
        shots = boson.sample_outcome(boson.hong_ou_mandel(), 100_000, rng)
        assert sum(S == (1, 1) for S in shots) / len(shots) < 0.001

    def test_empirical_tv(self, rng):
        A = boson.haar_random_interferometer(5, 3, rng)
        dist = boson.full_distribution(A)
        shots = boson.sample_outcome(A, 100_000, rng)
        index = {S: i for i, S in enumerate(dist.labels)}
        freq = np.bincount([index[S] for S in shots], minlength=len(dist)) / len(shots)
        assert total_variation(freq, dist.probs) < 0.02


class TestHaar:
    @pytest.mark.parametrize("m,n", [(1, 1), (4, 2), (7, 4), (16, 16)])
    def test_orthonormal_columns(self, rng, m, n):
        A = boson.haar_random_interferometer(m, n, rng).A
        assert np.max(np.abs(A.conj().T @ A - np.eye(n))) <= 1e-9

    def test_scalar(self, rng):
        A = boson.haar_random_interferometer(1, 1, rng).A
        assert A.shape == (1, 1)
        assert abs(abs(A[0, 0]) - 1) <= 1e-12

    def test_first_moment(self, rng):
        m, draws = 5, 10_000
        x = np.array([abs(boson.haar_random_unitary(m, rng)[0, 0]) ** 2 for _ in range(draws)])
        # |U_00|^2 ~ Beta(1, m - 1)
        sd = np.sqrt((m - 1) / (m**2 * (m + 1)))
        assert abs(x.mean() - 1 / m) <= 3 * sd / np.sqrt(draws)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            boson.Interferometer(np.ones((3, 2)))


class TestFormats:
    def test_outcome_round_trip(self):
        assert boson.format_outcome((2, 0, 1)) == "2-0-1"
        assert boson.parse_outcome("2-0-1") == (2, 0, 1)

    def test_matrix_json_round_trip(self, rng, tmp_path):
        M = random_complex(rng, 3)
        path = tmp_path / "m.json"
        boson.write_matrix_json(M, path)
        np.testing.assert_array_equal(boson.read_matrix_json(path), M)

    def test_matrix_json_strict(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"rows": [[[1, 0]]], "extra": 1}')
        with pytest.raises(ValueError):
            boson.read_matrix_json(path)


def test_ryser_speed(rng):
    M = random_complex(rng, 12)
    start = time.perf_counter()
    boson.permanent_ryser(M)
    assert time.perf_counter() - start < 5.0
