"""Retained-sample bookkeeping and named seed substreams."""

from __future__ import annotations

import numpy as np

# Fixed stream ids so every consumer of the master seed draws from an
# independent, reproducible substream.
_STREAMS = {
    "split": 1,
    "block-chain": 2,
    "weight-chain": 3,
    "generator": 4,
    "reduced-weight-chain": 5,
}


def retained_indices(iterations: int, burn_in: float, thinning: int) -> list:
    """Sample indices kept after burn-in and thinning.

    Returns {round(T*kappa) + i*lam : 0 <= i <= floor((T - round(T*kappa))/lam)},
    a nonempty list ending at or before index T (states are indexed 0..T,
    index 0 being the initial state).
    """
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn-in fraction must be in [0, 1), got {burn_in}")
    if thinning < 1:
        raise ValueError(f"thinning stride must be >= 1, got {thinning}")
    start = int(np.floor(iterations * burn_in + 0.5))
    count = (iterations - start) // thinning
    return [start + i * thinning for i in range(count + 1)]


def stream_seed_sequence(master_seed: int, stream: str, repetition: int = 0) -> np.random.SeedSequence:
    """Independent SeedSequence for a named substream of one repetition."""
    try:
        stream_id = _STREAMS[stream]
    except KeyError:
        raise ValueError(f"unknown stream {stream!r}; known: {sorted(_STREAMS)}") from None
    return np.random.SeedSequence([int(master_seed), stream_id, int(repetition)])


def stream_seed_int(master_seed: int, stream: str, repetition: int = 0) -> int:
    """128-bit integer seed for the named substream (for random.Random)."""
    words = stream_seed_sequence(master_seed, stream, repetition).generate_state(2, np.uint64)
    return (int(words[0]) << 64) | int(words[1])
