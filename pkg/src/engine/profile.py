"""
Profile - Sufficient Statistics of a Transcript
Both worlds' likelihoods depend on a transcript only through its bin
occupancies, so everything downstream is keyed by CountProfile.
"""

import logging
from collections import Counter
from fractions import Fraction
from math import comb
from typing import Iterable

import numpy as np

from src.models import CountProfile, Params, ReplySequence

logger = logging.getLogger(__name__)


def make_profile(counts: Iterable[int], p: Params) -> CountProfile:
    """Partition normal form: positive parts, sorted descending."""
    parts = tuple(sorted((int(c) for c in counts if c > 0), reverse=True))
    if sum(parts) != p.q:
        raise ValueError(f"profile {parts} does not sum to q={p.q}")
    if len(parts) > p.bin_count:
        raise ValueError(f"profile {parts} has more parts than the {p.bin_count} bins")
    return CountProfile(counts=parts, q=p.q, bin_count=p.bin_count)


def count_profile(omega: ReplySequence, p: Params) -> CountProfile:
    """Sorted bin occupancies of omega, empty bins omitted."""
    if len(omega) != p.q:
        raise ValueError(f"transcript has {len(omega)} replies, expected q={p.q}")
    if any(r < 0 or r >= p.bin_count for r in omega):
        raise ValueError(f"reply outside [0, 2^{p.reply_bits})")
    return make_profile(Counter(omega.replies).values(), p)


def col_j(omega: ReplySequence, j: int) -> int:
    """Number of index j-subsets i_1 < ... < i_j with equal replies."""
    if j < 2:
        raise ValueError(f"col_j needs j >= 2, got {j}")
    return sum(comb(c, j) for c in Counter(omega.replies).values())


def col_j_from_profile(profile: CountProfile, j: int) -> int:
    if j < 2:
        raise ValueError(f"col_j needs j >= 2, got {j}")
    return sum(comb(c, j) for c in profile.counts)


def representative_replies(profile: CountProfile) -> ReplySequence:
    """A canonical transcript with this profile: bin i repeated counts[i] times."""
    replies: list[int] = []
    for bin_value, count in enumerate(profile.counts):
        replies.extend([bin_value] * count)
    return ReplySequence(tuple(replies))


def expected_col2_function(p: Params) -> Fraction:
    """E[col_2] for a random function: C(q,2) / 2^(n-m)."""
    return Fraction(comb(p.q, 2), p.bin_count)


def expected_col2_permutation(p: Params) -> Fraction:
    """E[col_2] for a truncated permutation: C(q,2) (2^m - 1) / (2^n - 1)."""
    if p.domain_size == 1:
        return Fraction(0)
    return Fraction(comb(p.q, 2) * (p.bin_capacity - 1), p.domain_size - 1)


def col2_batch(replies: np.ndarray) -> np.ndarray:
    """
    col_2 of every row of a trials x q array.
    After sorting, each entry contributes the number of equal entries before it.
    """
    trials, q = replies.shape
    if q < 2:
        return np.zeros(trials, dtype=np.int64)
    s = np.sort(replies, axis=1)
    idx = np.arange(q, dtype=np.int64)
    new_run = np.ones(s.shape, dtype=bool)
    new_run[:, 1:] = s[:, 1:] != s[:, :-1]
    run_start = np.maximum.accumulate(np.where(new_run, idx, 0), axis=1)
    return (idx - run_start).sum(axis=1)


def profile_keys_batch(replies: np.ndarray) -> np.ndarray:
    """
    Row-wise profile keys: bin occupancies sorted descending, zero padded to
    width q. Equal keys mean equal profiles.
    """
    trials, q = replies.shape
    if q == 0:
        return np.zeros((trials, 0), dtype=np.int64)
    s = np.sort(replies, axis=1)
    idx = np.arange(q, dtype=np.int64)
    new_run = np.ones(s.shape, dtype=bool)
    new_run[:, 1:] = s[:, 1:] != s[:, :-1]
    run_end = np.ones(s.shape, dtype=bool)
    run_end[:, :-1] = new_run[:, 1:]
    run_start = np.maximum.accumulate(np.where(new_run, idx, 0), axis=1)
    lengths = np.where(run_end, idx - run_start + 1, 0)
    return -np.sort(-lengths, axis=1)


def profile_from_key(key: np.ndarray, p: Params) -> CountProfile:
    return make_profile(key.tolist(), p)


def profiles_batch(replies: np.ndarray, p: Params) -> list[CountProfile]:
    """Count profile of every row of a trials x q array."""
    return [profile_from_key(key, p) for key in profile_keys_batch(replies)]
