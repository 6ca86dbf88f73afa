"""xoshiro256** pseudo-random generator.

Pure-integer arithmetic so that a seed yields the same stream on every
platform and Python version. State is seeded through splitmix64, as
recommended by the generator's authors.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

# role constants XOR-ed into a base seed to derive independent streams
ROLE_RANDOM_POLICY = 0x52414E444F4D5F50
ROLE_ANNEAL = 0x414E4E45414C5F5F
ROLE_BENCH = 0x42454E43485F5F5F
ROLE_GENERATOR = 0x47454E5F46475F5F


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(x: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def mix_seed(base: int, *keys: int) -> int:
    """Derive a 64-bit seed from a base seed and integer keys."""
    state = base & MASK64
    for key in keys:
        state, out = splitmix64(state ^ (key & MASK64))
        state = out
    return state


class Xoshiro256:
    """xoshiro256** with a small subset of the :mod:`random` API."""

    def __init__(self, seed: int = 0):
        s = seed & MASK64
        state = []
        for _ in range(4):
            s, out = splitmix64(s)
            state.append(out)
        self._s = state

    @classmethod
    def for_role(cls, seed: int, role: int) -> "Xoshiro256":
        return cls((seed ^ role) & MASK64)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = max(1, (n - 1).bit_length())
        while True:
            r = self.next_u64() >> (64 - bits)
            if r < n:
                return r

    def randint(self, lo: int, hi: int) -> int:
        """Integer in the inclusive range [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population, k: int) -> list:
        pool = list(population)
        if k > len(pool):
            raise ValueError("sample larger than population")
        # partial Fisher-Yates
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
