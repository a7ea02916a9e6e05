import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhlab import distance
from qhlab.distance import DiscreteDistribution

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_probs(rng, D):
    return rng.dirichlet(np.ones(D))


class TestDiscreteDistribution:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([1.2, -0.2])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([0.5, 0.4])

    def test_sampling_frequencies(self, rng):
        d = DiscreteDistribution([0.2, 0.5, 0.3])
        freq = np.bincount(d.sample(100_000, rng), minlength=3) / 100_000
        np.testing.assert_allclose(freq, d.probs, atol=0.01)


class TestDistinguishProbability:
    def test_identical(self):
        assert distance.distinguish_probability([0.3, 0.7], [0.3, 0.7]) == 0.5

    def test_disjoint(self):
        assert distance.distinguish_probability([1, 0, 0], [0, 0.5, 0.5]) == 1.0

    def test_point_vs_coin(self):
        assert distance.distinguish_probability([1, 0], [0.5, 0.5]) == pytest.approx(0.75)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            distance.total_variation([1, 0], [1, 0, 0])

    @settings(max_examples=100, deadline=None)
    @given(seed=seeds, D=st.integers(2, 20))
    def test_symmetric_and_bounded(self, seed, D):
        r = np.random.default_rng(seed)
        p, q = random_probs(r, D), random_probs(r, D)
        pd = distance.distinguish_probability(p, q)
        assert pd == distance.distinguish_probability(q, p)
        assert 0.5 <= pd <= 1.0


class TestRepetitions:
    def test_certain_decision(self):
        assert distance.repetitions_for_confidence(1.0, 0.01) == math.ceil(math.log(100) / 0.5) == 10

    def test_no_bias(self):
        with pytest.raises(ValueError):
            distance.repetitions_for_confidence(0.5, 0.01)

    def test_monotone_in_failure(self):
        counts = [distance.repetitions_for_confidence(0.6, f) for f in [1e-6, 1e-3, 0.01, 0.1, 0.3, 0.49]]
        assert counts == sorted(counts, reverse=True)
        assert counts[-1] < counts[0] / 10

    @pytest.mark.parametrize("p_dist", [0.55, 0.6, 0.75])
    def test_majority_vote_accuracy(self, p_dist, rng):
        p = np.array([p_dist, 1 - p_dist])
        q = p[::-1].copy()
        assert distance.distinguish_probability(p, q) == pytest.approx(p_dist)
        reps = distance.repetitions_for_confidence(p_dist, 0.01)
        truths = rng.choice(["p", "q"], 1000)
        right = sum(distance.majority_vote_distinguish(p, q, t, reps, rng) == t for t in truths)
        assert right / 1000 >= 0.97


class TestDirichlet:
    def test_zero_variance_limit(self, rng):
        d = distance.random_dice_distribution(20, 1e-10, rng)
        assert np.max(np.abs(d.probs - 1 / 20)) < 1e-3

    def test_large_die_moments(self, rng):
        D, v = 10_000, 1e-8
        d = distance.random_dice_distribution(D, v, rng)
        assert d.probs.mean() == pytest.approx(1 / D, rel=1e-12)
        assert abs(d.probs.var() / v - 1) <= 0.2

    def test_two_sided_is_beta(self, rng):
        v = 0.05
        alpha = distance.dirichlet_concentration(2, v)
        x = np.array([distance.random_dice_distribution(2, v, rng).probs for _ in range(4000)])
        np.testing.assert_allclose(x.sum(axis=1), 1.0)
        # Beta(alpha, alpha) has variance 1 / (4 (2 alpha + 1))
        assert 1 / (4 * (2 * alpha + 1)) == pytest.approx(v)
        assert x[:, 0].var() == pytest.approx(v, rel=0.1)

    def test_mean_within_standard_errors(self, rng):
        D, v, draws = 6, 0.01, 5000
        x = np.array([distance.random_dice_distribution(D, v, rng).probs for _ in range(draws)])
        se = np.sqrt(v / draws)
        assert np.all(np.abs(x.mean(axis=0) - 1 / D) <= 3 * se)

    def test_infeasible_variance(self):
        with pytest.raises(ValueError):
            distance.dirichlet_concentration(4, 0.25)


class TestEmpirical:
    def test_single_sample_matches_optimal(self, rng):
        p, q = random_probs(rng, 8), random_probs(rng, 8)
        acc = distance.single_sample_accuracy(p, q, 100_000, rng)
        assert acc == pytest.approx(distance.distinguish_probability(p, q), abs=0.01)

    def test_identical_is_a_coin(self, rng):
        p = random_probs(rng, 5)
        assert distance.single_sample_accuracy(p, p, 100_000, rng) == pytest.approx(0.5, abs=0.01)

    def test_disjoint_always_right(self, rng):
        p, q = np.array([0.5, 0.5, 0, 0]), np.array([0, 0, 0.3, 0.7])
        assert distance.single_sample_accuracy(p, q, 10_000, rng) == 1.0
        for truth in ["p", "q"] * 50:
            assert distance.empirical_distinguish(p, q, truth, 1, rng) == truth

    def test_ties_go_to_p(self, rng):
        p = np.array([0.5, 0.5])
        assert distance.empirical_distinguish(p, p, "q", 10, rng) == "p"

    def test_many_samples_concentrate(self, rng):
        p, q = np.array([0.6, 0.4]), np.array([0.4, 0.6])
        assert all(distance.empirical_distinguish(p, q, "q", 500, rng) == "q" for _ in range(50))


class TestDiceRatio:
    def test_matches_direct_dirichlet_multinomial(self):
        from scipy.special import betaln

        counts = np.array([3, 0, 1])
        alpha = 0.7
        # closed form through multivariate beta functions
        log_B = lambda a: np.sum([math.lgamma(x) for x in a]) - math.lgamma(sum(a))  # noqa: E731
        direct = log_B(alpha + counts) - log_B(np.full(3, alpha)) + counts.sum() * math.log(3)
        assert distance.dice_log_likelihood_ratio(counts, alpha) == pytest.approx(direct, rel=1e-12)
        assert betaln(1, 1) == 0


class TestCsv:
    def test_round_trip(self, tmp_path):
        d = DiscreteDistribution([0.25, 0.75], labels=["a", "b"])
        path = tmp_path / "d.csv"
        distance.write_distribution_csv(d, path)
        back = distance.read_distribution_csv(path)
        assert back.labels == ("a", "b")
        np.testing.assert_array_equal(back.probs, d.probs)

    def test_align(self):
        p = DiscreteDistribution([0.5, 0.5], labels=["x", "y"])
        q = DiscreteDistribution([1.0], labels=["z"])
        pp, qq, support = distance.align(p, q)
        assert support == ["x", "y", "z"]
        assert distance.total_variation(pp, qq) == 1.0
