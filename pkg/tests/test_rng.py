import numpy as np

from quht.measurement import pauli_string_povm, sample
from quht.rng import (
    blocks_per_trial,
    chunk_uniforms,
    object_stream,
    stream_key,
    trial_generator,
)
from quht.states import density_from_bloch


def test_chunk_rows_equal_per_trial_streams():
    key = stream_key(123, 4)
    blocks = blocks_per_trial(37)
    batch = chunk_uniforms(key, 10, 8, blocks, 37)
    for i in range(8):
        solo = trial_generator(key, 10 + i, blocks).random(37)
        assert np.array_equal(batch[i], solo)


def test_chunking_is_invisible():
    key = stream_key(9, 0)
    blocks = blocks_per_trial(100)
    whole = chunk_uniforms(key, 0, 64, blocks, 100)
    parts = np.vstack(
        [chunk_uniforms(key, t0, 16, blocks, 100) for t0 in (0, 16, 32, 48)]
    )
    assert np.array_equal(whole, parts)


def test_distinct_paths_give_distinct_streams():
    a = trial_generator(stream_key(1, 0), 0, 4).random(16)
    b = trial_generator(stream_key(1, 1), 0, 4).random(16)
    c = trial_generator(stream_key(2, 0), 0, 4).random(16)
    d = trial_generator(stream_key(1, 0), 1, 4).random(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_object_stream_deterministic():
    x = object_stream(5, 2, 77).standard_normal(10)
    y = object_stream(5, 2, 77).standard_normal(10)
    assert np.array_equal(x, y)


def test_sample_on_trial_stream_matches_chunk_counting():
    # the harness counts outcomes straight off the uniform block; sample()
    # on the equivalent per-trial generator must agree count for count
    src = density_from_bloch([0.8, 0.0, 0.0])
    key = stream_key(11, 0)
    shots = 100
    blocks = blocks_per_trial(3 * shots)
    for trial in (0, 3, 17):
        gen = trial_generator(key, trial, blocks)
        records = [sample(pauli_string_povm(ax), src, shots, gen) for ax in "XYZ"]
        u = chunk_uniforms(key, trial, 1, blocks, 3 * shots)[0]
        from quht.measurement import born_probabilities

        for i, ax in enumerate("XYZ"):
            probs = born_probabilities(pauli_string_povm(ax), src)
            p0 = max(probs[0], 1.0 - probs[0])
            head = int((u[i * shots : (i + 1) * shots] < p0).sum())
            plus = head if probs[0] >= 1.0 - probs[0] else shots - head
            assert plus == records[i].counts[0]
