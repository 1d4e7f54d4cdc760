"""Seeded random streams.

All Monte Carlo in the package draws from Philox (a counter-based 64-bit
generator) keyed by ``(seed, stream index)``.  Work is always split into
fixed-size chunks with one stream per chunk, so results do not depend on
how many workers process the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 1 << 16


def stream(seed: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(n, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn, n: int, workers: int = 1, chunk: int = CHUNK) -> list:
    """Call ``fn(index, size)`` for each chunk; results come back in chunk order."""
    sizes = chunk_sizes(n, chunk)
    if workers <= 1 or len(sizes) == 1:
        return [fn(i, m) for i, m in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))
