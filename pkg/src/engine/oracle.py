"""
Oracle - Seeded Transcript Samplers
Produces the q truncated replies the adversary sees, under either world.

Queries are distinct and non-adaptive: for distinct queries both worlds'
reply distributions are exchangeable and independent of which points are
asked, so sampling the transcript directly loses nothing.

Truncation keeps the high (n - m) bits: v -> v >> m.
"""

import hashlib
import logging
from typing import Union

import numpy as np

from src.engine.core import ParamsError
from src.models import Params, ReplySequence, World

logger = logging.getLogger(__name__)

_SEED_LIMIT = 1 << 64
_NUMPY_MAX_BITS = 63            # largest n handled with uint64 arrays
_DENSE_LIMIT = 1 << 24          # partial Fisher-Yates allowed up to this domain size
_KEY_SORT_LIMIT = 1 << 12       # batch permutations by sorting random keys up to this domain
_KEY_SORT_CELLS = 1 << 20       # rows x domain per key-sort chunk


def derive_seed(master_seed: int, *labels) -> int:
    """64-bit sub-seed = BLAKE2b(master_seed, labels...). Stable across platforms."""
    if not 0 <= master_seed < _SEED_LIMIT:
        raise ValueError(f"seed must fit in 64 bits, got {master_seed}")
    h = hashlib.blake2b(digest_size=8)
    h.update(master_seed.to_bytes(8, 'little'))
    for label in labels:
        h.update(b'\x1f')
        h.update(str(label).encode('utf-8'))
    return int.from_bytes(h.digest(), 'little')


class RngStream:
    """
    Deterministic pseudorandom stream (numpy PCG64) keyed by a 64-bit seed.
    Same seed, same output on every platform. Not safe to share between
    concurrent tasks; derive a sub-seed per task instead.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < _SEED_LIMIT:
            raise ValueError(f"seed must fit in 64 bits, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def integers(self, high: int, size) -> np.ndarray:
        """Uniform uint64 values in [0, high), high <= 2^63."""
        return self._gen.integers(0, high, size=size, dtype=np.uint64)

    def below(self, bound: int) -> int:
        """Uniform Python int in [0, bound) for a bound of any size."""
        if bound <= (1 << _NUMPY_MAX_BITS):
            return int(self._gen.integers(0, bound, dtype=np.uint64))
        bits = (bound - 1).bit_length()
        mask = (1 << bits) - 1
        nbytes = (bits + 7) // 8
        while True:
            x = int.from_bytes(self._gen.bytes(nbytes), 'little') & mask
            if x < bound:
                return x

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


def vectorisable(p: Params) -> bool:
    """True when n-bit values fit the uint64 batch paths."""
    return p.n <= _NUMPY_MAX_BITS


# =============================================================================
# UNTRUNCATED DRAWS WITHOUT REPLACEMENT
# =============================================================================

def _partial_fisher_yates(domain: int, q: int, rng: RngStream) -> np.ndarray:
    pool = np.arange(domain, dtype=np.uint64)
    picks = rng.generator.integers(np.arange(q), domain)  # pick_i uniform in [i, domain)
    for i, j in enumerate(picks.tolist()):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:q].copy()


def _rejection_numpy(domain: int, q: int, rng: RngStream) -> np.ndarray:
    # Batched form of "draw, skip if already used": within each batch only the
    # first occurrence of a value survives, in stream order.
    kept = np.empty(0, dtype=np.uint64)
    while kept.size < q:
        draw = rng.integers(domain, q - kept.size)
        _, first = np.unique(draw, return_index=True)
        draw = draw[np.sort(first)]
        kept = np.concatenate([kept, draw[~np.isin(draw, kept)]])
    return kept


def _rejection_bigint(domain: int, q: int, rng: RngStream) -> list[int]:
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < q:
        v = rng.below(domain)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _permutation_values(p: Params, rng: RngStream) -> Union[np.ndarray, list[int]]:
    """q distinct n-bit values, uniformly without replacement."""
    domain, q = p.domain_size, p.q
    if domain <= _DENSE_LIMIT and 2 * q > domain:
        return _partial_fisher_yates(domain, q, rng)
    if vectorisable(p):
        return _rejection_numpy(domain, q, rng)
    return _rejection_bigint(domain, q, rng)


# =============================================================================
# SINGLE TRANSCRIPTS
# =============================================================================

def sample_function_replies(p: Params, rng: RngStream) -> ReplySequence:
    """Truncated replies of a uniform random function at q distinct points."""
    if p.reply_bits <= _NUMPY_MAX_BITS:
        return ReplySequence(tuple(rng.integers(p.bin_count, p.q).tolist()))
    return ReplySequence(tuple(rng.below(p.bin_count) for _ in range(p.q)))


def sample_permutation_replies(p: Params, rng: RngStream) -> ReplySequence:
    """Truncated replies of a uniform random permutation at q distinct points."""
    if p.q > p.domain_size:
        raise ParamsError(f"q={p.q} exceeds the domain size 2^{p.n}")
    values = _permutation_values(p, rng)
    if isinstance(values, np.ndarray):
        assert np.unique(values).size == values.size, "permutation sampler repeated a value"
        replies = (values >> np.uint64(p.m)).tolist()
    else:
        assert len(set(values)) == len(values), "permutation sampler repeated a value"
        replies = [v >> p.m for v in values]
    return ReplySequence(tuple(replies))


def sample_replies(p: Params, rng: RngStream, world: World) -> ReplySequence:
    if world is World.PERMUTATION:
        return sample_permutation_replies(p, rng)
    return sample_function_replies(p, rng)


# =============================================================================
# BATCHES (trials x q uint64 arrays, n <= 63)
# =============================================================================

def _require_vectorisable(p: Params) -> None:
    if not vectorisable(p):
        raise ValueError(f"batch sampling needs n <= {_NUMPY_MAX_BITS}, got n={p.n}")


def sample_function_batch(p: Params, rng: RngStream, trials: int) -> np.ndarray:
    _require_vectorisable(p)
    return rng.integers(p.bin_count, (trials, p.q))


def sample_permutation_batch(p: Params, rng: RngStream, trials: int) -> np.ndarray:
    _require_vectorisable(p)
    if p.q == 0 or trials == 0:
        return np.empty((trials, p.q), dtype=np.uint64)

    domain = p.domain_size
    if domain <= _KEY_SORT_LIMIT:
        # argsort of iid keys is a uniform permutation; its prefix is a uniform ordered q-subset
        rows_per_chunk = max(1, _KEY_SORT_CELLS // domain)
        chunks = []
        for start in range(0, trials, rows_per_chunk):
            rows = min(rows_per_chunk, trials - start)
            keys = rng.generator.random((rows, domain))
            chunks.append(np.argsort(keys, axis=1)[:, :p.q].astype(np.uint64))
        values = np.concatenate(chunks)
    else:
        values = np.stack([_permutation_values(p, rng) for _ in range(trials)])

    return values >> np.uint64(p.m)


def sample_batch(p: Params, rng: RngStream, world: World, trials: int) -> np.ndarray:
    logger.debug(f"sample_batch | world={world.value} n={p.n} m={p.m} q={p.q} trials={trials}")
    if world is World.PERMUTATION:
        return sample_permutation_batch(p, rng, trials)
    return sample_function_batch(p, rng, trials)
