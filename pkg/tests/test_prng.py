import numpy as np

from chartlab.numcore import PrngStream, fnv1a64, mix64

# Independent transcription of the reference algorithm, used as the oracle
# for the stream implementation.
_MASK = (1 << 64) - 1


def _reference_splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


# First three outputs for seed 0, as published with the reference C code.
SEED0_VECTOR = (0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F)


def test_seed0_matches_published_vector():
    stream = PrngStream(0)
    assert tuple(stream.next_u64() for _ in range(3)) == SEED0_VECTOR


def test_matches_reference_transcription_for_many_seeds():
    for seed in (0, 1, 42, 2**63, 0xDEADBEEF):
        stream = PrngStream(seed)
        state = seed
        for _ in range(100):
            state, expected = _reference_splitmix64(state)
            assert stream.next_u64() == expected


def test_uniform_draws_in_unit_interval():
    stream = PrngStream(12345)
    draws = stream.uniform_array(1_000_000)
    assert draws.min() >= 0.0
    assert draws.max() < 1.0


def test_distinct_stream_ids_differ_at_first_draw():
    seed = 99
    a = PrngStream(seed, stream_id=1)
    b = PrngStream(seed, stream_id=2)
    assert a.next_u64() != b.next_u64()


def test_stream_id_zero_is_reference_sequence():
    assert mix64(0) == 0
    assert PrngStream(7, stream_id=0).next_u64() == PrngStream(7).next_u64()


def test_vectorized_draws_equal_scalar_draws():
    a = PrngStream(31337)
    b = PrngStream(31337)
    vec = a.next_u64_array(257)
    scalar = np.array([b.next_u64() for _ in range(257)], dtype=np.uint64)
    np.testing.assert_array_equal(vec, scalar)
    # the state advanced identically: subsequent draws agree too
    assert a.next_u64() == b.next_u64()

    a2, b2 = PrngStream(5), PrngStream(5)
    np.testing.assert_allclose(a2.uniform_array(100),
                               np.array([b2.uniform() for _ in range(100)]))


def test_identical_keys_give_identical_sequences():
    a = PrngStream(8, stream_id=3)
    b = PrngStream(8, stream_id=3)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]


def test_child_streams_deterministic_and_distinct():
    root = PrngStream(11)
    c1 = root.child(0)
    c2 = root.child(1)
    c1_again = PrngStream(11).child(0)
    assert c1.next_u64() == c1_again.next_u64()
    assert PrngStream(11).child(0).next_u64() != c2.next_u64()
    assert root.child("rec-1").state != root.child("rec-2").state


def test_normal_array_matches_scalar_and_is_standardish():
    a, b = PrngStream(21), PrngStream(21)
    assert a.normal_array(1)[0] == b.normal()
    draws = PrngStream(22).normal_array(200_000)
    assert abs(draws.mean()) < 0.01
    assert abs(draws.std() - 1.0) < 0.01


def test_randint_bounds_and_determinism():
    stream = PrngStream(3)
    vals = [stream.randint(2, 5) for _ in range(2000)]
    assert set(vals) == {2, 3, 4, 5}


def test_fnv1a64_stable():
    assert fnv1a64("") == 0xCBF29CE484222325
    assert fnv1a64("a") != fnv1a64("b")
