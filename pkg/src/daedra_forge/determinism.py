"""Frozen, seedable randomness primitives.

Split assignments, subsamples and training shuffles must be reproducible
bit-for-bit across runs, Python versions and platforms, so nothing here
delegates to ``random`` or ``numpy.random`` (whose streams are not frozen
by contract). The generator is SplitMix64; seeds are derived from context
strings via SHA-256 so unrelated stages never share a stream.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

# Recorded in split manifests; bump only with a schema version change.
ALGORITHM_ID = "sha256/splitmix64/fisher-yates/v1"

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream (Steele et al.). 64-bit state, full period."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Unbiased draw from [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n


def derive_seed(*parts: int | str) -> int:
    """Mix heterogeneous context parts into one 64-bit seed.

    Each part is tagged with its type and length, so ("a", "bc") and
    ("ab", "c") derive different seeds.
    """
    digest = hashlib.sha256()
    for part in parts:
        if isinstance(part, bool) or not isinstance(part, (int, str)):
            raise TypeError(f"seed parts must be int or str, got {type(part)!r}")
        encoded = str(part).encode("utf-8")
        tag = "i" if isinstance(part, int) else "s"
        digest.update(f"{tag}{len(encoded)}:".encode("ascii"))
        digest.update(encoded)
    return int.from_bytes(digest.digest()[:8], "big")


def deterministic_shuffle(items: list, seed: int) -> None:
    """In-place Fisher-Yates shuffle driven by SplitMix64."""
    rng = SplitMix64(seed)
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_below(i + 1)
        items[i], items[j] = items[j], items[i]


def apportion(n: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of ``n`` units across ``ratios``.

    Ties on the fractional remainder resolve to the earlier ratio, so the
    result is a pure function of (n, ratios).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be non-negative")
    quotas = [n * r for r in ratios]
    counts = [int(q) for q in quotas]
    leftover = n - sum(counts)
    by_remainder = sorted(
        range(len(ratios)), key=lambda i: (-(quotas[i] - counts[i]), i)
    )
    for i in by_remainder[:leftover]:
        counts[i] += 1
    return counts
