"""Splittable random streams.

Every stream is keyed by ``(master_seed, *path)`` where the path elements are
integers or short string tags. Two calls with the same key give identical
generators, and the stream for one trial never depends on how many other
trials ran before it.
"""

import zlib

import numpy as np

NOISE = "noise"
ALGO = "algo"
LABELS = "labels"


def _tag_to_int(tag):
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError(f"stream path elements must be non-negative, got {tag}")
        return int(tag)
    return zlib.crc32(str(tag).encode("utf-8"))


def seed_sequence(master_seed, *path):
    return np.random.SeedSequence(
        entropy=int(master_seed) & 0xFFFF_FFFF_FFFF_FFFF,
        spawn_key=tuple(_tag_to_int(t) for t in path),
    )


def substream(master_seed, *path):
    """Return a ``numpy.random.Generator`` for the stream at ``path``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *path)))


def trial_streams(master_seed, grid_index, trial_index):
    """Noise and algorithm generators for one trial of one grid point."""
    return (
        substream(master_seed, grid_index, trial_index, NOISE),
        substream(master_seed, grid_index, trial_index, ALGO),
    )
