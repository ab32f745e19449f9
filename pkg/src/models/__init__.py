"""
Data Models
Dataclasses for all entities. These are pure Python values, no computation
beyond derived properties. Construct Params through
src.engine.core.validate_params so the invariants are checked.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional


class World(str, Enum):
    """Which object the oracle sampled; also the distinguisher's guess."""
    PERMUTATION = 'permutation'
    FUNCTION = 'function'


# A guess names the world the distinguisher believes in
Guess = World


class DistinguisherKind(str, Enum):
    COLLISION = 'collision'
    BALANCE = 'balance'
    BAYES = 'bayes'


class GGBranch(str, Enum):
    SMALL_M = 'small_m'
    LARGE_M = 'large_m'
    NONE = 'none'


@dataclass(frozen=True)
class Params:
    """Instance description: n-bit oracle, m truncated bits, q distinct queries."""
    n: int
    m: int
    q: int

    @property
    def domain_size(self) -> int:
        return 1 << self.n

    @property
    def bin_count(self) -> int:
        """B = 2^(n-m): number of distinct truncated replies."""
        return 1 << (self.n - self.m)

    @property
    def bin_capacity(self) -> int:
        """2^m: n-bit preimages per truncated reply under a permutation."""
        return 1 << self.m

    @property
    def reply_bits(self) -> int:
        return self.n - self.m

    @property
    def is_one_bit(self) -> bool:
        return self.m == self.n - 1


@dataclass(frozen=True)
class ReplySequence:
    """One oracle transcript: q truncated replies, each in [0, 2^(n-m))."""
    replies: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.replies)

    def __iter__(self) -> Iterator[int]:
        return iter(self.replies)


@dataclass(frozen=True)
class CountProfile:
    """Sorted (descending) occupancies of the nonempty bins of a transcript."""
    counts: tuple[int, ...]
    q: int
    bin_count: int

    @property
    def parts(self) -> int:
        return len(self.counts)

    def fits_capacity(self, capacity: int) -> bool:
        return all(c <= capacity for c in self.counts)


@dataclass(frozen=True)
class ProfileEnumeration:
    """All count profiles of Omega_q with the number of transcripts realising each."""
    params: Params
    entries: tuple[tuple[CountProfile, int], ...]

    def __iter__(self) -> Iterator[tuple[CountProfile, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total_sequences(self) -> int:
        return sum(mult for _, mult in self.entries)


@dataclass(frozen=True)
class DistinguisherSpec:
    """Named guessing strategy; threshold only applies to the collision test."""
    kind: DistinguisherKind
    threshold: Optional[float] = None


@dataclass(frozen=True)
class AdvantageEstimate:
    """Monte Carlo estimate of a distinguisher's advantage."""
    params: Params
    distinguisher: DistinguisherKind
    trials_per_world: int
    p_perm_guess_given_perm: float
    p_perm_guess_given_func: float
    adv_hat: float
    ci_halfwidth_95: float
    seed: int


@dataclass(frozen=True)
class BirthdayChain:
    """The four displayed values of the birthday inequality chain."""
    lower_exp: float     # 1 - e^{-q(q-1)/2^{n+1}}
    lower_pow: float     # 1 - (1 - q/2^{n+1})^{q-1}
    upper_pow: float     # 1 - (1 - q/2^n)^{(q-1)/2}
    upper_quad: float    # q(q-1)/2^{n+1}

    @property
    def middle_link_holds(self) -> bool:
        """upper_pow <= upper_quad; fails at q = 2 where the exponent is 1/2."""
        return self.upper_pow <= self.upper_quad


@dataclass(frozen=True)
class BoundReport:
    """Every closed-form bound evaluated at one (n, m, q)."""
    n: int
    m: int
    q: int
    birthday_exact: float
    birthday_lower: float
    birthday_lower_exp: float
    birthday_upper: float
    birthday_upper_pow: float
    hall: float
    bi: float
    bi_applicable: bool
    bi_constant: float
    gg_small_m: float
    gg_small_m_applicable: bool
    gg_large_m: float
    gg_large_m_applicable: bool
    stam: float
    stam_relaxed: float
    stam_simplified: float
    stam_simplified_applicable: bool
    combined: float
    combined_regime: str


@dataclass(frozen=True)
class SharpnessReport:
    """Outcome of the balance-test sharpness inequalities at one (n, q)."""
    params: Params
    admissible_k: tuple[int, ...]
    checks: tuple[tuple[str, int, bool], ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(holds for _, _, holds in self.checks)

    @property
    def counterexample(self) -> Optional[tuple[str, int]]:
        for name, k, holds in self.checks:
            if not holds:
                return name, k
        return None


@dataclass(frozen=True)
class SweepRow:
    """One Monte Carlo estimate with the Stam and combined bounds beside it."""
    estimate: AdvantageEstimate
    stam: float
    combined: float

    @property
    def q(self) -> int:
        return self.estimate.params.q


@dataclass(frozen=True)
class QHalfResult:
    n: int
    m: int
    method: str
    q_half: Optional[int]

    @property
    def reached(self) -> bool:
        return self.q_half is not None
