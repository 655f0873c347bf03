"""Shared plumbing: reproducible RNG streams and a small worker pool."""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

DEFAULT_SEED = 123456789


def _key_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part) & 0xFFFFFFFF


def rng_for(seed: int, *path) -> np.random.Generator:
    """Derive an independent generator from a root seed and a stream path.

    Streams are split with a counter-based scheme (Philox keyed through
    ``SeedSequence`` spawn keys), so any (seed, path) pair addresses the
    same stream no matter which other streams were drawn before it.
    Path elements may be ints or short string tags.
    """
    key = tuple(_key_part(p) for p in path)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path) -> int:
    """A derived integer seed for APIs that take seeds rather than streams."""
    return int(rng_for(seed, *path).integers(0, 2**63))


def available_threads() -> int:
    return max(1, os.cpu_count() or 1)


def pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Map ``fn`` over ``items`` on a bounded thread pool.

    Results come back in input order, so output never depends on the
    schedule; callers keep determinism by seeding each item up front.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
