"""
Monte Carlo - Advantage Estimation
Runs a distinguisher on transcripts drawn from each world and reports the
difference of its "permutation" rates with a 95% confidence half-width.

Trials are cut into fixed-size blocks. Each block has its own RNG sub-seed
derived from (seed, world, block index) and contributes a count; counts are
summed, so the result does not depend on the number of workers or on the
order in which blocks finish.
"""

import logging
import math
import multiprocessing as mp
from typing import Iterable, Optional

from src.bus.events import (
    bus,
    EVENT_BLOCK_COMPLETE,
    EVENT_SIMULATION_COMPLETE,
    EVENT_SIMULATION_STARTED,
    EVENT_SWEEP_ROW_READY,
)
from src.config import config
from src.engine.bounds import combined_bound, stam_bound
from src.engine.core import EnvelopeError, validate_params
from src.engine.distinguish import build_distinguisher
from src.engine.oracle import RngStream, derive_seed, sample_batch, sample_replies, vectorisable
from src.logging_config import log_call
from src.models import AdvantageEstimate, DistinguisherSpec, Params, SweepRow, World

logger = logging.getLogger(__name__)

MIN_TRIALS = 100
_BLOCK_TRIALS = 4096
_BLOCK_CELLS = 1 << 22      # trials x q per block, bounds block memory
_Z_95 = 1.96


def block_layout(trials: int, q: int) -> list[tuple[int, int]]:
    """(block index, trials in block) pairs; depends only on trials and q."""
    size = max(1, min(_BLOCK_TRIALS, _BLOCK_CELLS // max(q, 1)))
    return [(i, min(size, trials - start)) for i, start in enumerate(range(0, trials, size))]


def _run_block(task: tuple) -> tuple[str, int, int, int]:
    """Worker: (p, spec, world, block, trials, seed) -> (world, block, trials, permutation guesses)."""
    p, spec, world, block, trials, seed = task
    rng = RngStream(derive_seed(seed, world.value, block))
    d = build_distinguisher(spec, p)
    if vectorisable(p):
        batch = sample_batch(p, rng, world, trials)
    else:
        batch = [sample_replies(p, rng, world) for _ in range(trials)]
    return world.value, block, trials, d.count_permutation_guesses(batch)


def ci_halfwidth(rate_perm: float, rate_func: float, trials: int) -> float:
    """Normal approximation for a difference of two proportions, floored at 1/trials."""
    variance = (rate_perm * (1 - rate_perm) + rate_func * (1 - rate_func)) / trials
    return max(_Z_95 * math.sqrt(variance), 1.0 / trials)


@log_call
def estimate_advantage(p: Params, d: DistinguisherSpec, trials: int = None,
                       seed: int = None, workers: int = None) -> AdvantageEstimate:
    """
    Estimate P(guess perm | perm) - P(guess perm | func) from `trials`
    transcripts per world. Deterministic in (p, d, trials, seed).
    """
    trials = config.TRIALS if trials is None else trials
    seed = config.SEED if seed is None else seed
    workers = config.WORKERS if workers is None else workers
    if trials < MIN_TRIALS:
        raise EnvelopeError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if workers < 1:
        raise EnvelopeError(f"workers must be >= 1, got {workers}")
    derive_seed(seed)  # range check before any work
    build_distinguisher(d, p)  # preconditions fail here, not inside a worker

    layout = block_layout(trials, p.q)
    tasks = [(p, d, world, block, size, seed)
             for world in (World.PERMUTATION, World.FUNCTION)
             for block, size in layout]
    bus.emit(EVENT_SIMULATION_STARTED, {
        'params': p, 'distinguisher': d.kind, 'trials': trials, 'blocks': len(tasks),
    })
    logger.debug(f"estimate_advantage | {p} {d.kind} trials={trials} blocks={len(tasks)} workers={workers}")

    counts = {World.PERMUTATION.value: 0, World.FUNCTION.value: 0}
    for world, block, size, hits in _execute(tasks, workers):
        counts[world] += hits
        bus.emit(EVENT_BLOCK_COMPLETE, {'world': world, 'block': block, 'trials': size})

    rate_perm = counts[World.PERMUTATION.value] / trials
    rate_func = counts[World.FUNCTION.value] / trials
    estimate = AdvantageEstimate(
        params=p,
        distinguisher=d.kind,
        trials_per_world=trials,
        p_perm_guess_given_perm=rate_perm,
        p_perm_guess_given_func=rate_func,
        adv_hat=rate_perm - rate_func,
        ci_halfwidth_95=ci_halfwidth(rate_perm, rate_func, trials),
        seed=seed,
    )
    bus.emit(EVENT_SIMULATION_COMPLETE, {'estimate': estimate})
    return estimate


def _execute(tasks: list[tuple], workers: int) -> Iterable[tuple[str, int, int, int]]:
    if workers == 1 or len(tasks) == 1:
        for task in tasks:
            yield _run_block(task)
        return
    with mp.Pool(min(workers, len(tasks))) as pool:
        yield from pool.imap_unordered(_run_block, tasks)


@log_call
def sweep(n: int, m: int, q_list: Iterable[int], d: DistinguisherSpec, trials: int = None,
          seed: Optional[int] = None, workers: int = None) -> list[SweepRow]:
    """One estimate per q, each with its own sub-seed, next to the Stam and combined bounds."""
    seed = config.SEED if seed is None else seed
    rows = []
    for q in q_list:
        p = validate_params(n, m, q)
        estimate = estimate_advantage(p, d, trials, derive_seed(seed, 'sweep', q), workers)
        row = SweepRow(estimate=estimate, stam=stam_bound(n, m, q), combined=combined_bound(n, m, q))
        bus.emit(EVENT_SWEEP_ROW_READY, {'q': q, 'row': row})
        rows.append(row)
    return rows
