"""The frozen PRNG stack: SplitMix64, seed derivation, shuffling,
largest-remainder apportionment."""

import pytest
from hypothesis import given, strategies as st

from daedra_forge.determinism import (
    ALGORITHM_ID,
    SplitMix64,
    apportion,
    derive_seed,
    deterministic_shuffle,
)

# Reference output stream for seed 1234567, cross-checked against an
# independent transcription of the published algorithm.
SPLITMIX64_SEED_1234567 = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
]


def test_splitmix64_known_stream():
    gen = SplitMix64(1234567)
    assert [gen.next_u64() for _ in range(5)] == SPLITMIX64_SEED_1234567


def test_splitmix64_independent_reimplementation():
    # Fresh inline transcription of the update/output functions.
    mask = (1 << 64) - 1

    def stream(seed, n):
        out = []
        state = seed & mask
        for _ in range(n):
            state = (state + 0x9E3779B97F4A7C15) & mask
            z = state
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
            out.append(z ^ (z >> 31))
        return out

    for seed in (0, 1, 2**64 - 1, 987654321):
        gen = SplitMix64(seed)
        assert [gen.next_u64() for _ in range(20)] == stream(seed, 20)


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=1, max_value=10**6))
def test_next_below_in_range(seed, bound):
    gen = SplitMix64(seed)
    for _ in range(5):
        assert 0 <= gen.next_below(bound) < bound


def test_next_below_one_is_zero():
    gen = SplitMix64(7)
    assert all(gen.next_below(1) == 0 for _ in range(10))


def test_derive_seed_deterministic_and_order_sensitive():
    assert derive_seed(0, "split", "F:Q1") == derive_seed(0, "split", "F:Q1")
    assert derive_seed("a", "b") != derive_seed("b", "a")
    assert derive_seed(1) != derive_seed("1")  # type-tagged
    value = derive_seed(12345, "epoch", 3)
    assert 0 <= value < 2**64


def test_derive_seed_no_concatenation_collision():
    # length-prefixing must separate ("ab","c") from ("a","bc")
    assert derive_seed("ab", "c") != derive_seed("a", "bc")


def test_shuffle_golden_stream():
    # Frozen-stream regression pin: these exact permutations are part of
    # the reproducibility contract for persisted splits.
    items = list(range(10))
    deterministic_shuffle(items, 42)
    assert items == [0, 9, 5, 8, 6, 4, 7, 2, 1, 3]
    items = list(range(10))
    deterministic_shuffle(items, 43)
    assert items == [4, 2, 5, 6, 1, 3, 9, 8, 7, 0]


@given(st.lists(st.integers(), max_size=50), st.integers(min_value=0, max_value=2**64 - 1))
def test_shuffle_is_permutation(items, seed):
    shuffled = list(items)
    deterministic_shuffle(shuffled, seed)
    assert sorted(shuffled) == sorted(items)


def test_shuffle_same_seed_same_order():
    a = list(range(100))
    b = list(range(100))
    deterministic_shuffle(a, 7)
    deterministic_shuffle(b, 7)
    assert a == b


def test_apportion_hand_checked():
    # quotas (7.0, 1.5, 1.5): one leftover goes to the earlier tied index
    assert apportion(10, (0.7, 0.15, 0.15)) == [7, 2, 1]
    # quotas (2.1, 0.45, 0.45)
    assert apportion(3, (0.7, 0.15, 0.15)) == [2, 1, 0]
    assert apportion(100, (0.7, 0.15, 0.15)) == [70, 15, 15]
    # quotas (3.5, 3.5): tie, earlier index wins
    assert apportion(7, (0.5, 0.5)) == [4, 3]
    assert apportion(0, (0.7, 0.15, 0.15)) == [0, 0, 0]


@given(
    st.integers(min_value=0, max_value=10000),
    st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=1, max_size=5),
)
def test_apportion_properties(n, weights):
    total = sum(weights)
    ratios = [w / total for w in weights]
    counts = apportion(n, ratios)
    assert sum(counts) == n
    assert all(c >= 0 for c in counts)
    # largest-remainder never strays more than one seat from the quota
    for count, ratio in zip(counts, ratios):
        assert abs(count - n * ratio) < 1 + 1e-9


def test_algorithm_id_frozen():
    assert ALGORITHM_ID == "sha256/splitmix64/fisher-yates/v1"
