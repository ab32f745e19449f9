"""
Unit tests for src/engine/oracle.py.

Samplers are checked for determinism, support and, on tiny instances,
distribution against brute-force enumeration.
"""

from collections import Counter

import numpy as np
import pytest

from src.engine.core import ParamsError, validate_params
from src.engine.oracle import (
    RngStream, derive_seed, sample_batch, sample_function_batch, sample_function_replies,
    sample_permutation_batch, sample_permutation_replies, sample_replies, vectorisable,
)
from src.engine.profile import col2_batch
from src.models import Params, ReplySequence, World
from tests.brute_force import function_distribution, permutation_distribution


# ---------------------------------------------------------------------------
# Seeds and streams
# ---------------------------------------------------------------------------

class TestDeriveSeed:

    def test_deterministic(self):
        assert derive_seed(7, 'permutation', 3) == derive_seed(7, 'permutation', 3)

    def test_labels_separate_streams(self):
        seeds = {derive_seed(7, 'permutation', 0), derive_seed(7, 'function', 0),
                 derive_seed(7, 'permutation', 1), derive_seed(8, 'permutation', 0)}
        assert len(seeds) == 4

    def test_fits_64_bits(self):
        assert 0 <= derive_seed(2 ** 64 - 1, 'x') < 2 ** 64

    def test_rejects_out_of_range_seed(self):
        with pytest.raises(ValueError, match="64 bits"):
            derive_seed(2 ** 64)
        with pytest.raises(ValueError):
            derive_seed(-1)


class TestRngStream:

    def test_same_seed_same_output(self):
        a, b = RngStream(42), RngStream(42)
        assert a.integers(1000, 10).tolist() == b.integers(1000, 10).tolist()

    def test_below_large_bound(self):
        rng = RngStream(1)
        bound = (1 << 200) + 12345
        values = [rng.below(bound) for _ in range(50)]
        assert all(0 <= v < bound for v in values)
        assert len(set(values)) == 50

    def test_rejects_bad_seed(self):
        with pytest.raises(ValueError):
            RngStream(-5)


# ---------------------------------------------------------------------------
# Single transcripts
# ---------------------------------------------------------------------------

class TestSampleFunctionReplies:

    def test_empty_when_q_zero(self):
        assert sample_function_replies(validate_params(1, 0, 0), RngStream(0)) == ReplySequence(())

    def test_reproducible_for_fixed_seed(self):
        p = validate_params(8, 4, 3)
        first = sample_function_replies(p, RngStream(2024))
        second = sample_function_replies(p, RngStream(2024))
        assert first == second
        assert len(first) == 3
        assert all(0 <= r < 16 for r in first)

    def test_uniform_one_bit_replies(self):
        p = validate_params(4, 3, 10)
        batch = sample_function_batch(p, RngStream(5), 10_000)
        assert abs((batch == 0).mean() - 0.5) < 0.01

    def test_wide_replies_use_big_integers(self):
        p = validate_params(200, 10, 5)
        omega = sample_function_replies(p, RngStream(3))
        assert all(0 <= r < (1 << 190) for r in omega)


class TestSamplePermutationReplies:

    def test_full_domain_one_bit(self):
        omega = sample_permutation_replies(validate_params(1, 0, 2), RngStream(9))
        assert sorted(omega.replies) == [0, 1]

    def test_pigeonhole_at_full_domain(self):
        omega = sample_permutation_replies(validate_params(2, 1, 4), RngStream(11))
        assert Counter(omega.replies) == {0: 2, 1: 2}

    def test_no_collisions_without_truncation(self):
        p = validate_params(10, 0, 200)
        for seed in range(20):
            omega = sample_permutation_replies(p, RngStream(seed))
            assert len(set(omega.replies)) == 200

    def test_bin_capacity_respected(self):
        p = validate_params(6, 2, 60)
        for seed in range(10):
            counts = Counter(sample_permutation_replies(p, RngStream(seed)).replies)
            assert max(counts.values()) <= 4

    def test_large_n_distinct_values(self):
        p = validate_params(128, 0, 50)
        omega = sample_permutation_replies(p, RngStream(4))
        assert len(set(omega.replies)) == 50

    def test_rejection_path_for_sparse_domain(self):
        p = validate_params(40, 30, 500)
        omega = sample_permutation_replies(p, RngStream(8))
        assert len(omega) == 500
        assert all(0 <= r < 1024 for r in omega)

    def test_rejects_q_beyond_domain(self):
        with pytest.raises(ParamsError, match="exceeds the domain size"):
            sample_permutation_replies(Params(n=2, m=1, q=5), RngStream(0))

    def test_dispatch_by_world(self):
        p = validate_params(4, 1, 3)
        a = sample_replies(p, RngStream(1), World.PERMUTATION)
        b = sample_permutation_replies(p, RngStream(1))
        assert a == b


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------

class TestBatches:

    def test_function_batch_shape_and_range(self):
        p = validate_params(8, 4, 5)
        batch = sample_function_batch(p, RngStream(0), 300)
        assert batch.shape == (300, 5)
        assert batch.max() < 16

    def test_permutation_batch_key_sort_path(self):
        p = validate_params(4, 1, 6)
        batch = sample_permutation_batch(p, RngStream(0), 500)
        assert batch.shape == (500, 6)
        for row in batch:
            assert max(Counter(row.tolist()).values()) <= 2

    def test_permutation_batch_row_path(self):
        p = validate_params(16, 0, 64)
        batch = sample_permutation_batch(p, RngStream(0), 20)
        assert (col2_batch(batch) == 0).all()

    def test_q_zero_batch(self):
        batch = sample_batch(validate_params(3, 1, 0), RngStream(0), World.PERMUTATION, 10)
        assert batch.shape == (10, 0)

    def test_batch_deterministic(self):
        p = validate_params(5, 2, 4)
        a = sample_batch(p, RngStream(77), World.PERMUTATION, 100)
        b = sample_batch(p, RngStream(77), World.PERMUTATION, 100)
        assert np.array_equal(a, b)

    def test_rejects_wide_domain(self):
        p = validate_params(100, 0, 2)
        assert not vectorisable(p)
        with pytest.raises(ValueError, match="n <= 63"):
            sample_function_batch(p, RngStream(0), 5)

    def test_m_zero_permutation_has_no_col2(self):
        p = validate_params(6, 0, 10)
        assert col2_batch(sample_permutation_batch(p, RngStream(3), 1000)).max() == 0


# ---------------------------------------------------------------------------
# Distribution against brute force
# ---------------------------------------------------------------------------

class TestDistribution:

    def test_equal_pair_frequency_is_one_third(self):
        p = validate_params(2, 1, 2)
        batch = sample_permutation_batch(p, RngStream(123), 200_000)
        equal = (batch[:, 0] == batch[:, 1]).mean()
        assert abs(equal - 1 / 3) < 0.005

    @pytest.mark.parametrize("n,m,q", [(2, 1, 2), (3, 1, 3), (3, 2, 4), (4, 2, 3)])
    def test_transcript_frequencies_match_exact(self, n, m, q):
        p = validate_params(n, m, q)
        trials = 200_000
        batch = sample_permutation_batch(p, RngStream(derive_seed(1, n, m, q)), trials)
        observed = Counter(map(tuple, batch.tolist()))
        for transcript, prob in permutation_distribution(p).items():
            expected = float(prob) * trials
            sd = (expected * (1 - float(prob))) ** 0.5
            assert abs(observed.get(transcript, 0) - expected) <= 4 * sd + 1

    def test_single_transcript_sampler_matches_exact(self):
        p = validate_params(2, 1, 2)
        rng = RngStream(99)
        trials = 20_000
        observed = Counter(sample_permutation_replies(p, rng).replies for _ in range(trials))
        for transcript, prob in permutation_distribution(p).items():
            expected = float(prob) * trials
            sd = (expected * (1 - float(prob))) ** 0.5
            assert abs(observed.get(transcript, 0) - expected) <= 4 * sd + 1

    @pytest.mark.parametrize("n,m,q", [(2, 1, 2), (3, 1, 3), (3, 2, 4), (4, 2, 3)])
    def test_function_transcript_frequencies_match_exact(self, n, m, q):
        p = validate_params(n, m, q)
        trials = 200_000
        batch = sample_function_batch(p, RngStream(derive_seed(2, n, m, q)), trials)
        observed = Counter(map(tuple, batch.tolist()))
        exact = function_distribution(p)
        assert set(observed) <= set(exact)
        for transcript, prob in exact.items():
            expected = float(prob) * trials
            sd = (expected * (1 - float(prob))) ** 0.5
            assert abs(observed.get(transcript, 0) - expected) <= 5 * sd + 1

    def test_single_function_sampler_matches_exact(self):
        p = validate_params(3, 1, 2)
        rng = RngStream(101)
        trials = 32_000
        observed = Counter(sample_function_replies(p, rng).replies for _ in range(trials))
        for transcript, prob in function_distribution(p).items():
            expected = float(prob) * trials
            sd = (expected * (1 - float(prob))) ** 0.5
            assert abs(observed.get(transcript, 0) - expected) <= 5 * sd + 1

    @pytest.mark.slow
    def test_equal_pair_frequency_million_trials(self):
        p = validate_params(2, 1, 2)
        batch = sample_permutation_batch(p, RngStream(2), 1_000_000)
        assert abs((batch[:, 0] == batch[:, 1]).mean() - 1 / 3) < 0.005
