"""
Core - Instance Parameters and Numeric Conventions
Validates (n, m, q), defines the domain errors, and fixes the two numeric
representations used everywhere else:

  - ExactRational: fractions.Fraction (always lowest terms, denominator > 0)
    for the exact module; floats only at the reporting boundary.
  - LogProb: log2 of a probability or bound term held as an mpmath mpf, so
    products of many factors at n up to 256 never underflow.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Union

from mpmath import mp, mpf, workprec

from src.config import config
from src.models import Params

logger = logging.getLogger(__name__)

MAX_N = 256

ExactRational = Fraction


class ParamsError(ValueError):
    """Invalid (n, m, q) or a Params-level precondition of an operation."""


class EnvelopeError(ValueError):
    """Request lies outside a computational envelope (enumeration size, trial count)."""


class DistinguisherError(ValueError):
    """A distinguisher's preconditions do not hold for the given Params."""


def validate_params(n: int, m: int, q: int) -> Params:
    """
    Check the instance invariants and return an immutable Params.
    Raises ParamsError naming the first violated rule.
    """
    for name, value in (('n', n), ('m', m), ('q', q)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParamsError(f"{name} must be an integer, got {value!r}")
    if n < 1:
        raise ParamsError(f"n must be >= 1, got {n}")
    if n > MAX_N:
        raise ParamsError(f"n must be <= {MAX_N}, got {n}")
    if m < 0:
        raise ParamsError(f"m must be >= 0, got {m}")
    if m >= n:
        raise ParamsError(f"m must be < n (got m={m}, n={n})")
    if q < 0:
        raise ParamsError(f"q must be >= 0, got {q}")
    if q > (1 << n):
        raise ParamsError(f"q exceeds 2^n (q={q}, 2^n={1 << n})")

    p = Params(n=n, m=m, q=q)
    # Bin bookkeeping must tile the domain exactly
    assert p.bin_count * p.bin_capacity == p.domain_size
    return p


def to_rational(x: Union[int, Rational, str]) -> ExactRational:
    """Exact conversion; floats are refused."""
    if isinstance(x, float):
        raise TypeError("refusing to convert a float to an exact rational")
    return Fraction(x)


@contextmanager
def working_precision(bits: int = None) -> Iterator[None]:
    """mpmath precision context for bound evaluation (config default, >= 80 bits)."""
    with workprec(bits or config.PRECISION_BITS):
        yield


def _log2(x) -> mpf:
    if x == 0:
        return mpf('-inf')
    return mp.log(x, 2)


@dataclass(frozen=True)
class LogProb:
    """
    log2 of a nonnegative quantity. Adding two LogProbs multiplies the
    quantities they represent; log_sum adds them.
    """
    value: mpf

    @classmethod
    def from_prob(cls, p: Union[int, Rational, float, mpf]) -> 'LogProb':
        if p < 0:
            raise ValueError(f"probability must be >= 0, got {p}")
        if isinstance(p, Rational) and not isinstance(p, int):
            # numerator and denominator separately: both may exceed float range
            return cls(_log2(mpf(p.numerator)) - _log2(mpf(p.denominator)))
        return cls(_log2(mpf(p)))

    @classmethod
    def power_of_two(cls, exponent) -> 'LogProb':
        return cls(mpf(exponent))

    def to_prob(self) -> mpf:
        return mp.power(2, self.value)

    def __add__(self, other: 'LogProb') -> 'LogProb':
        return LogProb(self.value + other.value)

    def scale(self, k) -> 'LogProb':
        """Represents the quantity raised to the power k."""
        return LogProb(self.value * k)

    def one_minus(self) -> mpf:
        """1 - 2^value, accurate when value is close to 0."""
        return -mp.expm1(self.value * mp.ln2)

    def __lt__(self, other: 'LogProb') -> bool:
        return self.value < other.value

    def __le__(self, other: 'LogProb') -> bool:
        return self.value <= other.value

    @staticmethod
    def log_sum(terms: Iterable['LogProb']) -> 'LogProb':
        """log2 of the sum of the represented quantities (log-sum-exp in base 2)."""
        values = [t.value for t in terms]
        if not values:
            return LogProb(mpf('-inf'))
        top = max(values)
        if mp.isinf(top):
            return LogProb(top)
        total = mp.fsum(mp.power(2, v - top) for v in values)
        return LogProb(top + mp.log(total, 2))
