"""
Bounds - Closed-Form Advantage Bounds
Birthday (exact product and its inequality chain), Hall et al., Bellare-
Impagliazzo, Gilboa-Gueron (two regimes), Stam with its relaxed and
simplified companions, the pointwise-minimum combined bound, and the
q_1/2 solver.

Every formula is evaluated with mpmath at config.PRECISION_BITS (>= 80) and
powers are taken in log2 space, so n up to 256 works; values are returned as
Python floats. Raw formula values may exceed 1; only combined_bound clamps.
"""

import logging
from typing import Callable, Optional

from mpmath import mp, mpf

from src.bus.events import bus, EVENT_QHALF_PROBE
from src.config import config
from src.engine.core import EnvelopeError, LogProb, ParamsError, validate_params, working_precision
from src.logging_config import log_call
from src.models import BirthdayChain, BoundReport, GGBranch, Params, QHalfResult

logger = logging.getLogger(__name__)

_DIRECT_PRODUCT_LIMIT = 1 << 16

QHALF_METHODS = ('stam', 'birthday', 'combined', 'hall', 'bi', 'gg', 'exact', 'montecarlo')


def _log2_r(p: Params) -> mpf:
    """log2 of r = q / 2^((n+m)/2)."""
    return mp.log(p.q, 2) - mpf(p.n + p.m) / 2


def _r_power(p: Params, exponent, coeff=1) -> LogProb:
    """coeff * r^exponent as a LogProb."""
    return LogProb.from_prob(coeff) + LogProb(_log2_r(p)).scale(exponent)


def _total(*terms: LogProb) -> float:
    return float(LogProb.log_sum(terms).to_prob())


# =============================================================================
# BIRTHDAY
# =============================================================================

def birthday_exact(n: int, q: int) -> float:
    """
    Advantage of the full-output collision test: 1 - prod_{k=1}^{q-1} (1 - k/2^n).
    """
    validate_params(n, 0, q)
    if q <= 1:
        return 0.0
    N = 1 << n
    if q <= _DIRECT_PRODUCT_LIMIT:
        with working_precision():
            log_prod = mp.fsum(mp.log1p(-mpf(k) / N) for k in range(1, q))
            return float(LogProb(log_prod / mp.ln2).one_minus())

    # prod_{k<q} (N-k)/N = N! / ((N-q)! N^q); the loggammas cancel to ~q^2/N
    with working_precision(2 * n + 128):
        log_prod = mp.loggamma(N + 1) - mp.loggamma(N - q + 1) - q * mp.log(N)
        return float(LogProb(log_prod / mp.ln2).one_minus())


@log_call
def birthday_chain(n: int, q: int) -> BirthdayChain:
    """
    lower_exp <= lower_pow <= birthday_exact <= upper_pow <= upper_quad, except
    that upper_pow <= upper_quad fails at q = 2 (logged, not raised).
    """
    validate_params(n, 0, q)
    if q <= 1:
        return BirthdayChain(0.0, 0.0, 0.0, 0.0)

    N = 1 << n
    with working_precision():
        x = mpf(q) * (q - 1) / (2 * N)
        lower_exp = -mp.expm1(-x)
        lower_pow = -mp.expm1((q - 1) * mp.log1p(-mpf(q) / (2 * N)))
        if q == N:
            upper_pow = mpf(1)
        else:
            upper_pow = -mp.expm1(mpf(q - 1) / 2 * mp.log1p(-mpf(q) / N))
        chain = BirthdayChain(
            lower_exp=float(lower_exp),
            lower_pow=float(lower_pow),
            upper_pow=float(upper_pow),
            upper_quad=float(x),
        )

    if not chain.middle_link_holds:
        logger.warning(
            f"birthday_chain | n={n} q={q} | 1-(1-q/2^n)^((q-1)/2) = {chain.upper_pow:.6g} "
            f"exceeds q(q-1)/2^(n+1) = {chain.upper_quad:.6g}"
        )
    return chain


def birthday_upper(n: int, q: int) -> float:
    """q(q-1) / 2^(n+1), unclamped."""
    validate_params(n, 0, q)
    with working_precision():
        return float(mpf(q) * (q - 1) / (2 << n))


# =============================================================================
# HALL, BELLARE-IMPAGLIAZZO, GILBOA-GUERON
# =============================================================================

def hall_bound(n: int, m: int, q: int) -> float:
    """5 r^(2/3) + 1/2 r^3 2^(-(n-7m)/2), r = q/2^((n+m)/2)."""
    p = validate_params(n, m, q)
    if q == 0:
        return 0.0
    with working_precision():
        cubic = _r_power(p, 3) + LogProb.power_of_two(mpf(7 * m - n) / 2 - 1)
        return _total(_r_power(p, mpf(2) / 3, 5), cubic)


def bi_bound(n: int, m: int, q: int, c: float = None) -> tuple[float, bool]:
    """
    c * n * q / 2^((n+m)/2) with the caller's constant c standing in for O(n).
    Applicable only inside 2^(n-m) < q < 2^((n+m)/2).
    """
    p = validate_params(n, m, q)
    c = config.BI_CONSTANT if c is None else c
    if not c > 0:
        raise ParamsError(f"bi constant must be > 0, got {c}")
    applicable = p.bin_count < q and q * q < (1 << (n + m))
    if q == 0:
        return 0.0, False
    with working_precision():
        return float(_r_power(p, 1, mpf(c) * n).to_prob()), applicable


def gg_branch(n: int, m: int) -> GGBranch:
    """small_m when m <= n/3; large_m when n/3 < m <= n - 4 - log2(n)."""
    if 3 * m <= n:
        return GGBranch.SMALL_M
    slack = n - 4 - m
    # m <= n - 4 - log2 n  <=>  n <= 2^(n-4-m)
    if slack >= 0 and n <= (1 << slack):
        return GGBranch.LARGE_M
    return GGBranch.NONE


def gg_small_m(n: int, m: int, q: int) -> float:
    """2 * 2^(1/3) r^(2/3) + (2 sqrt2 / sqrt3) r^(3/2) + r^2."""
    p = validate_params(n, m, q)
    if q == 0:
        return 0.0
    with working_precision():
        return _total(
            _r_power(p, mpf(2) / 3, 2 * mp.cbrt(2)),
            _r_power(p, mpf(3) / 2, 2 * mp.sqrt(2) / mp.sqrt(3)),
            _r_power(p, 2),
        )


def gg_large_m(n: int, m: int, q: int) -> float:
    """3 r^(2/3) + 2r + 5r^2 + 1/2 (2r)^(n/(n-m))."""
    p = validate_params(n, m, q)
    if q == 0:
        return 0.0
    with working_precision():
        two_r = LogProb(_log2_r(p) + 1)
        return _total(
            _r_power(p, mpf(2) / 3, 3),
            _r_power(p, 1, 2),
            _r_power(p, 2, 5),
            two_r.scale(mpf(n) / (n - m)) + LogProb.power_of_two(-1),
        )


def gg_bound(n: int, m: int, q: int) -> tuple[Optional[float], GGBranch]:
    """The formula for whichever regime (n, m) falls in; None outside both."""
    validate_params(n, m, q)
    branch = gg_branch(n, m)
    if branch is GGBranch.SMALL_M:
        return gg_small_m(n, m, q), branch
    if branch is GGBranch.LARGE_M:
        return gg_large_m(n, m, q), branch
    return None, branch


# =============================================================================
# STAM
# =============================================================================

def stam_bound(n: int, m: int, q: int) -> float:
    """1/2 sqrt((2^(n-m) - 1) q (q-1) / ((2^n - 1)(2^n - (q-1))))."""
    p = validate_params(n, m, q)
    N = p.domain_size
    if q - 1 >= N:
        raise ParamsError(f"stam bound needs q-1 < 2^n, got q={q}")
    if q <= 1:
        return 0.0
    with working_precision():
        ratio = mpf((p.bin_count - 1) * q * (q - 1)) / mpf((N - 1) * (N - q + 1))
        return float(mp.sqrt(ratio) / 2)


def stam_relaxed(n: int, m: int, q: int) -> float:
    """q / (2 sqrt(1 - (q-1)/2^n) 2^((n+m)/2)); never below stam_bound."""
    p = validate_params(n, m, q)
    if q == 0:
        return 0.0
    with working_precision():
        headroom = 1 - mpf(q - 1) / p.domain_size
        return float(_r_power(p, 1).to_prob() / (2 * mp.sqrt(headroom)))


def stam_simplified(n: int, m: int, q: int) -> tuple[float, bool]:
    """q / 2^((n+m)/2), claimed to dominate stam_bound when q <= 3/4 2^n."""
    p = validate_params(n, m, q)
    applicable = 4 * q <= 3 * p.domain_size
    if q == 0:
        return 0.0, applicable
    with working_precision():
        return float(_r_power(p, 1).to_prob()), applicable


# =============================================================================
# COMBINED
# =============================================================================

def combined_regime(n: int, m: int, q: int) -> str:
    """Which term attains the minimum: birthday, stam or trivial (ties in that order)."""
    birthday = birthday_upper(n, q)
    stam = stam_bound(n, m, q)
    if birthday <= stam and birthday <= 1:
        return 'birthday'
    if stam <= 1:
        return 'stam'
    return 'trivial'


def combined_bound(n: int, m: int, q: int) -> float:
    """min(1, q(q-1)/2^(n+1), stam_bound)."""
    validate_params(n, m, q)
    return min(1.0, birthday_upper(n, q), stam_bound(n, m, q))


@log_call
def bound_report(n: int, m: int, q: int, bi_constant: float = None) -> BoundReport:
    validate_params(n, m, q)
    bi_constant = config.BI_CONSTANT if bi_constant is None else bi_constant
    chain = birthday_chain(n, q)
    bi, bi_ok = bi_bound(n, m, q, bi_constant)
    branch = gg_branch(n, m)
    simplified, simplified_ok = stam_simplified(n, m, q)

    return BoundReport(
        n=n, m=m, q=q,
        birthday_exact=birthday_exact(n, q),
        birthday_lower=chain.lower_pow,
        birthday_lower_exp=chain.lower_exp,
        birthday_upper=chain.upper_quad,
        birthday_upper_pow=chain.upper_pow,
        hall=hall_bound(n, m, q),
        bi=bi,
        bi_applicable=bi_ok,
        bi_constant=bi_constant,
        gg_small_m=gg_small_m(n, m, q),
        gg_small_m_applicable=branch is GGBranch.SMALL_M,
        gg_large_m=gg_large_m(n, m, q),
        gg_large_m_applicable=branch is GGBranch.LARGE_M,
        stam=stam_bound(n, m, q),
        stam_relaxed=stam_relaxed(n, m, q),
        stam_simplified=simplified,
        stam_simplified_applicable=simplified_ok,
        combined=combined_bound(n, m, q),
        combined_regime=combined_regime(n, m, q),
    )


# =============================================================================
# GRIDS AND q_1/2
# =============================================================================

def q_grid(q_min: int, q_max: int, points: int, log_scale: bool = False) -> list[int]:
    """
    Sorted distinct integers from q_min to q_max (both included), evenly or
    geometrically spaced. Exact for q up to 2^256.
    """
    if q_min < 0 or q_max < q_min:
        raise ParamsError(f"need 0 <= q_min <= q_max, got {q_min}..{q_max}")
    if points < 1:
        raise ParamsError(f"points must be >= 1, got {points}")
    if points == 1 or q_min == q_max:
        return [q_min]

    if not log_scale:
        span = q_max - q_min
        return sorted({q_min + span * i // (points - 1) for i in range(points)})

    if q_min < 1:
        raise ParamsError("a log-scale grid needs q_min >= 1")
    with working_precision(max(config.PRECISION_BITS, 2 * q_max.bit_length() + 64)):
        ratio = mpf(q_max) / q_min
        grid = {q_min, q_max}
        for i in range(1, points - 1):
            q = int(mp.nint(q_min * mp.power(ratio, mpf(i) / (points - 1))))
            grid.add(min(max(q, q_min), q_max))
    return sorted(grid)


def _smallest_reaching(f: Callable[[int], float], q_max: int, method: str) -> Optional[int]:
    """
    Smallest q in [0, q_max] with f(q) >= 1/2 for nondecreasing f, by
    exponential bracketing then bisection. None when f(q_max) < 1/2.
    """
    def probe(q: int) -> bool:
        value = f(q)
        bus.emit(EVENT_QHALF_PROBE, {'method': method, 'q': q, 'value': value})
        logger.debug(f"q_half | method={method} q={q} value={value:.6g}")
        return value >= 0.5

    if probe(0):
        return 0
    lo, hi = 0, 1
    while True:
        if hi >= q_max:
            hi = q_max
            if not probe(hi):
                return None
            break
        if probe(hi):
            break
        lo, hi = hi, 2 * hi

    # invariant: f(lo) < 1/2 <= f(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return hi


@log_call
def q_half(n: int, m: int, method: str = 'stam', *, bi_constant: float = None,
           trials: int = None, seed: int = None, workers: int = None) -> QHalfResult:
    """
    Smallest q whose advantage (or upper bound on it, for bound methods)
    reaches 1/2; q_half None means "not reached" for any q <= 2^n.

    Bound methods give a lower estimate of the true q_1/2. exact is limited
    to the enumeration envelope; montecarlo estimates the advantage of the
    collision test with its default threshold, so its answer is noisy near
    the crossing.
    """
    if method not in QHALF_METHODS:
        raise ParamsError(f"unknown method {method!r}; choose from {', '.join(QHALF_METHODS)}")
    p = validate_params(n, m, 0)
    N = p.domain_size

    formulas: dict[str, Callable[[int], float]] = {
        'stam': lambda q: stam_bound(n, m, q),
        'birthday': lambda q: birthday_upper(n, q),
        'combined': lambda q: combined_bound(n, m, q),
        'hall': lambda q: hall_bound(n, m, q),
        'bi': lambda q: bi_bound(n, m, q, bi_constant)[0],
    }

    if method in formulas:
        found = _smallest_reaching(formulas[method], N, method)
    elif method == 'gg':
        if gg_branch(n, m) is GGBranch.NONE:
            found = None
        else:
            found = _smallest_reaching(lambda q: gg_bound(n, m, q)[0], N, method)
    elif method == 'exact':
        from src.engine.exact import MAX_ENUM_Q, total_variation

        cap = min(N, MAX_ENUM_Q)
        found = _smallest_reaching(lambda q: float(total_variation(validate_params(n, m, q))), cap, method)
        if found is None and cap < N:
            raise EnvelopeError(
                f"exact total variation stays below 1/2 up to q={cap}; "
                f"larger q is outside the enumeration envelope"
            )
    else:
        from src.engine.mc import estimate_advantage
        from src.engine.oracle import derive_seed
        from src.models import DistinguisherKind, DistinguisherSpec

        spec = DistinguisherSpec(kind=DistinguisherKind.COLLISION)
        master = config.SEED if seed is None else seed

        def measured(q: int) -> float:
            if q <= 1:
                return 0.0
            est = estimate_advantage(
                validate_params(n, m, q), spec,
                trials=trials or config.TRIALS,
                seed=derive_seed(master, 'qhalf', q),
                workers=workers,
            )
            return est.adv_hat

        found = _smallest_reaching(measured, N, method)

    logger.info(f"q_half | n={n} m={m} method={method} -> {found if found is not None else 'not reached'}")
    return QHalfResult(n=n, m=m, method=method, q_half=found)
