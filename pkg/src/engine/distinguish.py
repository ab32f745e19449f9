"""
Distinguish - Guessing Strategies
Each strategy maps a transcript to a guess about which world produced it.
All three depend on the transcript only through its count profile, which
makes their exact advantage a sum over an acceptance region of profiles.

  collision  guess function iff col_2 >= threshold
  balance    one-bit replies; guess permutation iff 4 * Delta^2 < q
  bayes      guess permutation iff P_perm >= P_func (ties to permutation)
"""

import logging
from fractions import Fraction

import numpy as np

from src.engine.core import DistinguisherError
from src.engine.exact import MAX_ENUM_Q, balance_accepts, enumerate_profiles, seq_prob_func, seq_prob_perm
from src.engine.profile import (
    col2_batch, col_j, col_j_from_profile, count_profile, expected_col2_function,
    expected_col2_permutation, profile_from_key, profile_keys_batch,
)
from src.logging_config import log_call
from src.models import CountProfile, DistinguisherKind, DistinguisherSpec, Guess, Params, ReplySequence

logger = logging.getLogger(__name__)


def default_collision_threshold(p: Params) -> float:
    """Midpoint of E_func[col_2] and E_perm[col_2]."""
    return float((expected_col2_function(p) + expected_col2_permutation(p)) / 2)


# =============================================================================
# DISTINGUISHERS
# =============================================================================

class Distinguisher:
    """
    Base class. Subclasses check their preconditions in __init__ and define
    accepts_profile (True = guess permutation) plus a batch form.
    """

    kind: DistinguisherKind

    def __init__(self, p: Params):
        self.params = p

    def accepts_profile(self, profile: CountProfile) -> bool:
        raise NotImplementedError

    def decide(self, omega: ReplySequence) -> Guess:
        if self.accepts_profile(count_profile(omega, self.params)):
            return Guess.PERMUTATION
        return Guess.FUNCTION

    def permutation_guesses(self, replies: np.ndarray) -> np.ndarray:
        """Boolean mask over the rows of a trials x q array."""
        if replies.shape[1] == 0:
            empty = CountProfile(counts=(), q=0, bin_count=self.params.bin_count)
            return np.full(replies.shape[0], self.accepts_profile(empty), dtype=bool)
        keys, inverse = np.unique(profile_keys_batch(replies), axis=0, return_inverse=True)
        verdicts = np.array(
            [self.accepts_profile(profile_from_key(k, self.params)) for k in keys], dtype=bool
        )
        return verdicts[inverse.reshape(-1)]

    def count_permutation_guesses(self, batch) -> int:
        """Number of transcripts guessed permutation; batch is an array or a list of ReplySequence."""
        if isinstance(batch, np.ndarray):
            if batch.shape[0] == 0:
                return 0
            return int(self.permutation_guesses(batch).sum())
        return sum(1 for omega in batch if self.decide(omega) is Guess.PERMUTATION)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params})"


class CollisionDistinguisher(Distinguisher):
    kind = DistinguisherKind.COLLISION

    def __init__(self, p: Params, threshold: float = None):
        super().__init__(p)
        if threshold is None:
            threshold = default_collision_threshold(p)
        if threshold < 0:
            raise DistinguisherError(f"collision threshold must be >= 0, got {threshold}")
        self.threshold = threshold

    def accepts_profile(self, profile: CountProfile) -> bool:
        return col_j_from_profile(profile, 2) < self.threshold

    def decide(self, omega: ReplySequence) -> Guess:
        return Guess.FUNCTION if col_j(omega, 2) >= self.threshold else Guess.PERMUTATION

    def permutation_guesses(self, replies: np.ndarray) -> np.ndarray:
        return col2_batch(replies) < self.threshold


class BalanceDistinguisher(Distinguisher):
    kind = DistinguisherKind.BALANCE

    def __init__(self, p: Params):
        super().__init__(p)
        if not p.is_one_bit:
            raise DistinguisherError(f"balance test needs m = n-1 (got n={p.n}, m={p.m})")
        if p.q % 2:
            raise DistinguisherError(f"balance test needs even q, got q={p.q}")

    def accepts_profile(self, profile: CountProfile) -> bool:
        # either bin may hold the larger count; Delta only depends on the split
        return balance_accepts(profile.q, profile.counts[0] if profile.counts else 0)

    def decide(self, omega: ReplySequence) -> Guess:
        ones = sum(omega.replies)
        if balance_accepts(self.params.q, ones):
            return Guess.PERMUTATION
        return Guess.FUNCTION

    def permutation_guesses(self, replies: np.ndarray) -> np.ndarray:
        delta = self.params.q - 2 * replies.sum(axis=1, dtype=np.int64)
        return 4 * delta * delta < self.params.q


class BayesDistinguisher(Distinguisher):
    kind = DistinguisherKind.BAYES

    def __init__(self, p: Params):
        super().__init__(p)
        if p.q > MAX_ENUM_Q:
            raise DistinguisherError(f"bayes test needs exact probabilities, q must be <= {MAX_ENUM_Q}")

    def accepts_profile(self, profile: CountProfile) -> bool:
        return seq_prob_perm(profile, self.params) >= seq_prob_func(profile, self.params)


def build_distinguisher(spec: DistinguisherSpec, p: Params) -> Distinguisher:
    """Check preconditions once and bind the strategy to p."""
    kind = DistinguisherKind(spec.kind)
    if spec.threshold is not None and kind is not DistinguisherKind.COLLISION:
        raise DistinguisherError(f"threshold only applies to the collision test, not {kind.value}")
    if kind is DistinguisherKind.COLLISION:
        return CollisionDistinguisher(p, spec.threshold)
    if kind is DistinguisherKind.BALANCE:
        return BalanceDistinguisher(p)
    return BayesDistinguisher(p)


# =============================================================================
# ONE-SHOT DECISIONS
# =============================================================================

def collision_decide(omega: ReplySequence, p: Params, threshold: float = None) -> Guess:
    return CollisionDistinguisher(p, threshold).decide(omega)


def balance_decide(omega: ReplySequence, p: Params) -> Guess:
    if len(omega) != p.q:
        raise DistinguisherError(f"transcript has {len(omega)} replies, expected q={p.q}")
    return BalanceDistinguisher(p).decide(omega)


def bayes_decide(omega: ReplySequence, p: Params) -> Guess:
    return BayesDistinguisher(p).decide(omega)


# =============================================================================
# EXACT ADVANTAGE BY REGION SUM
# =============================================================================

@log_call
def exact_advantage(spec: DistinguisherSpec, p: Params) -> Fraction:
    """
    P(guess perm | perm) - P(guess perm | func), summed exactly over the
    profiles the strategy accepts.
    """
    d = build_distinguisher(spec, p)
    total = Fraction(0)
    for profile, mult in enumerate_profiles(p):
        if d.accepts_profile(profile):
            total += mult * (seq_prob_perm(profile, p) - seq_prob_func(profile, p))
    return total
