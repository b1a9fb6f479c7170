"""Deterministic counter-based random streams for reproducible sampling.

Every logical sampling task owns a stream addressed by (master seed, path):
the path hashes into a Philox key and the task index selects a disjoint
block of the 256-bit counter space. Because the counter addressing is
explicit, a batch of consecutive tasks can be generated in one vectorized
call that is bit-identical to generating each task's stream separately,
which is what makes experiment results independent of chunking and thread
count.
"""

from __future__ import annotations

import numpy as np

# One Philox counter increment emits four 64-bit words, i.e. four doubles.
_WORDS_PER_BLOCK = 4

# Counter blocks reserved per task for object-mode streams (used when the
# number of draws per task is not fixed, e.g. Gaussian rejection sampling).
OBJECT_MODE_BLOCKS = 1 << 20


def stream_key(master_seed: int, *path: int) -> np.ndarray:
    """Derive a 128-bit Philox key from a master seed and an index path."""
    entropy = (int(master_seed),) + tuple(int(p) for p in path)
    return np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)


def blocks_per_trial(draws: int) -> int:
    """Counter blocks a trial consuming ``draws`` uniform doubles must reserve."""
    return max(1, -(-int(draws) // _WORDS_PER_BLOCK))


def _counter_start(trial_index: int, blocks: int) -> np.ndarray:
    offset = int(trial_index) * int(blocks)
    if offset >= 1 << 64:
        raise ValueError("counter offset exceeds 64 bits; reduce trial count or block size")
    counter = np.zeros(_WORDS_PER_BLOCK, dtype=np.uint64)
    counter[0] = offset
    return counter


def trial_generator(key: np.ndarray, trial_index: int, blocks: int) -> np.random.Generator:
    """Generator positioned at the start of one trial's counter block."""
    return np.random.Generator(np.random.Philox(key=key, counter=_counter_start(trial_index, blocks)))


def object_stream(master_seed: int, *path: int) -> np.random.Generator:
    """Object-mode stream for a task addressed by (master seed, path).

    The final path component is the task index; earlier components hash into
    the key. Each task gets OBJECT_MODE_BLOCKS counter blocks, far more than
    any single task draws.
    """
    *prefix, task = path
    key = stream_key(master_seed, *prefix)
    return trial_generator(key, int(task), OBJECT_MODE_BLOCKS)


def chunk_uniforms(
    key: np.ndarray, start_trial: int, n_trials: int, blocks: int, draws: int
) -> np.ndarray:
    """Uniform doubles for trials [start_trial, start_trial + n_trials).

    Returns shape (n_trials, draws); row i equals
    ``trial_generator(key, start_trial + i, blocks).random(draws)`` exactly.
    """
    bg = np.random.Philox(key=key, counter=_counter_start(start_trial, blocks))
    flat = np.random.Generator(bg).random(n_trials * blocks * _WORDS_PER_BLOCK)
    out = flat.reshape(n_trials, blocks * _WORDS_PER_BLOCK)
    return out[:, :draws]
