"""SplitMix64: a tiny seeded generator, reproducible bit-for-bit anywhere.

Reference algorithm (Steele, Lea, Flood 2014): add the golden gamma
``0x9E3779B97F4A7C15`` to the state, then mix with two xor-shift-multiply
rounds. Doubles in ``[0, 1)`` use the top 53 bits.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()
