"""
Exact - Rational-Arithmetic Distributions on Small Instances
Transcript probabilities in both worlds, total variation distance (the
maximal advantage), KL divergence with the Pinsker check, and the exact
advantage of the one-bit balance test with its sharpness
inequalities.

Everything here is exact (fractions.Fraction / Python ints); floats appear
only in kl_perm_func and at the reporting boundary.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isqrt, perm, prod

from mpmath import mp, mpf
from sympy.utilities.iterables import partitions

from src.engine.core import EnvelopeError, ParamsError, working_precision
from src.logging_config import log_call
from src.models import CountProfile, Params, ProfileEnumeration, SharpnessReport

logger = logging.getLogger(__name__)

MAX_ENUM_Q = 30


def _check_profile(profile: CountProfile, p: Params) -> None:
    if profile.q != p.q or profile.bin_count != p.bin_count:
        raise ValueError(f"profile (q={profile.q}, B={profile.bin_count}) does not belong to {p}")


# =============================================================================
# PER-TRANSCRIPT PROBABILITIES
# =============================================================================

@lru_cache(maxsize=65536)
def seq_prob_func(profile: CountProfile, p: Params) -> Fraction:
    """P_func(omega) = 2^-(n-m)q, the same for every transcript."""
    _check_profile(profile, p)
    return Fraction(1, p.bin_count ** p.q)


@lru_cache(maxsize=65536)
def seq_prob_perm(profile: CountProfile, p: Params) -> Fraction:
    """
    P_perm(omega) = prod_c (2^m)_c / (2^n)_q with (x)_k the falling factorial;
    zero when some bin holds more than 2^m replies.
    """
    _check_profile(profile, p)
    if p.q > p.domain_size:
        raise ParamsError(f"q={p.q} exceeds 2^n={p.domain_size}")
    if not profile.fits_capacity(p.bin_capacity):
        return Fraction(0)
    numerator = prod(perm(p.bin_capacity, c) for c in profile.counts)
    return Fraction(numerator, perm(p.domain_size, p.q))


# =============================================================================
# ENUMERATION OF Omega_q BY PROFILE
# =============================================================================

def profile_multiplicity(counts: tuple[int, ...], p: Params) -> int:
    """
    Number of transcripts with this profile:
    q!/prod(c!) ways to place indices x B!/((B-l)! prod(m_s!)) ways to label bins.
    """
    arrangements = factorial(p.q) // prod(factorial(c) for c in counts)
    size_repeats = prod(factorial(counts.count(s)) for s in set(counts))
    return arrangements * perm(p.bin_count, len(counts)) // size_repeats


@log_call
def enumerate_profiles(p: Params) -> ProfileEnumeration:
    """All partitions of q into at most 2^(n-m) parts, with transcript counts."""
    if p.q > MAX_ENUM_Q:
        raise EnvelopeError(f"enumeration needs q <= {MAX_ENUM_Q}, got q={p.q}")

    entries = []
    for part_sizes in partitions(p.q, m=min(p.bin_count, max(p.q, 1))):
        counts = tuple(sorted(
            (size for size, reps in part_sizes.items() for _ in range(reps)),
            reverse=True,
        ))
        profile = CountProfile(counts=counts, q=p.q, bin_count=p.bin_count)
        entries.append((profile, profile_multiplicity(counts, p)))

    entries.sort(key=lambda e: e[0].counts, reverse=True)
    logger.debug(f"enumerate_profiles | {p} -> {len(entries)} profiles")
    return ProfileEnumeration(params=p, entries=tuple(entries))


# =============================================================================
# DISTANCES
# =============================================================================

@log_call
def total_variation(p: Params) -> Fraction:
    """1/2 sum_omega |P_perm - P_func|: the advantage of the best distinguisher."""
    total = sum(
        (mult * abs(seq_prob_perm(profile, p) - seq_prob_func(profile, p))
         for profile, mult in enumerate_profiles(p)),
        Fraction(0),
    )
    return total / 2


@log_call
def kl_perm_func(p: Params) -> float:
    """KL(P_perm || P_func) in nats; transcripts impossible under perm contribute 0."""
    with working_precision():
        terms = []
        for profile, mult in enumerate_profiles(p):
            pp = seq_prob_perm(profile, p)
            if pp == 0:
                continue
            ratio = pp / seq_prob_func(profile, p)
            weight = mult * pp
            log_ratio = mp.log(mpf(ratio.numerator)) - mp.log(mpf(ratio.denominator))
            terms.append(mpf(weight.numerator) / weight.denominator * log_ratio)
        return float(mp.fsum(terms))


def pinsker_bound(p: Params) -> float:
    """sqrt(KL / 2): the Pinsker upper bound on total variation."""
    return float(mp.sqrt(max(mpf(0), mpf(kl_perm_func(p))) / 2))


# =============================================================================
# BALANCE TEST (one-bit replies)
# =============================================================================

def _require_alg1(p: Params) -> None:
    if not p.is_one_bit:
        raise ParamsError(f"balance test needs m = n-1 (got n={p.n}, m={p.m})")
    if p.q % 2:
        raise ParamsError(f"balance test needs even q, got q={p.q}")
    if p.q > p.domain_size // 2:
        raise ParamsError(f"balance test needs q <= 2^(n-1)={p.domain_size // 2}, got q={p.q}")


def balance_accepts(q: int, k: int) -> bool:
    """|k - (q-k)| < sqrt(q)/2, in integers: 4 (2k - q)^2 < q."""
    return 4 * (2 * k - q) ** 2 < q


def alg1_admissible_k(q: int) -> tuple[int, ...]:
    # |2k - q| < sqrt(q)/2 confines k to a window of half-width isqrt(q) around q/2
    lo = max(0, q // 2 - isqrt(q) - 1)
    hi = min(q, q // 2 + isqrt(q) + 1)
    return tuple(k for k in range(lo, hi + 1) if balance_accepts(q, k))


@lru_cache(maxsize=None)
def _falling(x: int, k: int) -> int:
    return perm(x, k)


def _alg1_numerator(p: Params, k: int) -> int:
    """P_perm of one transcript with k zeros, times (2^n)_q."""
    half = p.domain_size // 2
    return _falling(half, k) * _falling(half, p.q - k)


@log_call
def alg1_exact_advantage(p: Params) -> Fraction:
    """
    sum over admissible k of C(q,k) (P_perm({k, q-k}) - 2^-q).
    Accumulated over a common denominator so only one gcd is taken.
    """
    _require_alg1(p)
    q = p.q
    denominator = _falling(p.domain_size, q)
    weighted = 0
    binomials = 0
    for k in alg1_admissible_k(q):
        c = comb(q, k)
        weighted += c * _alg1_numerator(p, k)
        binomials += c
    return Fraction(weighted * 2 ** q - denominator * binomials, denominator * 2 ** q)


def alg1_lower_bound(p: Params) -> Fraction:
    """The claimed floor (q/4) / 2^n."""
    return Fraction(p.q, 4 * p.domain_size)


@log_call
def alg1_sharpness_checks(p: Params) -> SharpnessReport:
    """
    Evaluate the sharpness inequalities of the balance test exactly.

    Checks, per admissible k (p_k = P_perm / P_func for k zeros):
      eq_b            C(q,k) 2^-q >= 1/(2 sqrt q)
      eq_p            p_k > 1 + (q/2)/2^n
      binomial_ratio  C(q,k)/C(q,q/2) >= 1 - (q-2k)^2/(2q) >= 7/8
      p_ratio         p_k/p_{q/2} >= 1 - (q-2k)^2/2^n >= 1 - (q/4)/2^n
    and once at k = q/2:
      eq_b_half            C(q,q/2) 2^-q >= 1/sqrt(2q)
      eq_p_half            p_{q/2} >= 1 + q/2^n
      eq_p_half_corrected  p_{q/2} > 1 + (q/2)/2^n
      conclusion           advantage > (q/4)/2^n

    Failures are returned in the report, never raised. eq_p_half never holds.
    eq_p fails for k != q/2 when q^2 is small against 2^n (e.g. n=12, q=18).
    The conclusion fails for several small instances (e.g. n=4, q=4).
    """
    _require_alg1(p)
    if p.q < 2:
        raise ParamsError("sharpness checks need q >= 2")

    q, N = p.q, p.domain_size
    half = q // 2
    four_q = 4 ** q
    c_half = comb(q, half)
    num_half = _alg1_numerator(p, half)
    den = _falling(N, q)
    checks: list[tuple[str, int, bool]] = []

    admissible = alg1_admissible_k(q)
    for k in admissible:
        c = comb(q, k)
        num = _alg1_numerator(p, k)
        d2 = (q - 2 * k) ** 2
        checks.append(('eq_b', k, 4 * q * c * c >= four_q))
        # num 2^q / den > (2^(n+1) + q) / 2^(n+1)
        checks.append(('eq_p', k, num * 2 ** q * 2 * N > den * (2 * N + q)))
        checks.append(('binomial_ratio', k,
                       2 * q * c >= c_half * (2 * q - d2) and 8 * (2 * q - d2) >= 7 * 2 * q))
        checks.append(('p_ratio', k,
                       num * N >= num_half * (N - d2) and 4 * (N - d2) >= 4 * N - q))

    checks.append(('eq_b_half', half, 2 * q * c_half * c_half >= four_q))
    checks.append(('eq_p_half', half, num_half * 2 ** q * N >= den * (N + q)))
    checks.append(('eq_p_half_corrected', half, num_half * 2 ** q * 2 * N > den * (2 * N + q)))
    checks.append(('conclusion', half, alg1_exact_advantage(p) > alg1_lower_bound(p)))

    report = SharpnessReport(params=p, admissible_k=admissible, checks=tuple(checks))
    if not report.passed:
        failed = [f"{name}@k={k}" for name, k, holds in checks if not holds]
        logger.warning(f"alg1_sharpness_checks | n={p.n} q={q} | failed: {', '.join(failed)}")
    return report


def alg1_sharpness_ratio(p: Params) -> float:
    """Exact balance-test advantage divided by the Stam bound."""
    from src.engine.bounds import stam_bound

    bound = stam_bound(p.n, p.m, p.q)
    if bound == 0:
        return 0.0
    return float(alg1_exact_advantage(p)) / bound
