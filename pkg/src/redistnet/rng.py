"""Deterministic random number plumbing.

Two generators are used throughout the package:

* ``numpy.random.Generator`` (PCG64) for setup work: network construction,
  beneficiary-set sampling, initial strategy placement.
* :class:`Pcg32` for the imitation loop itself.  The compiled simulation
  kernel keeps its RNG state in two local integers, so the loop generator has
  to be something we can express identically in Python and in machine code.
  This class is the Python reference; ``_kernel.py`` inlines the same update,
  and the two are checked against each other bit for bit in the test suite.

The update is the standard PCG-XSH-RR 32-bit generator (64-bit state, 32-bit
output).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1
_PCG_MULT = 6364136223846793005


class Pcg32:
    """PCG-XSH-RR generator with 64-bit state and 32-bit output."""

    __slots__ = ("state", "inc")

    def __init__(self, initstate: int, initseq: int):
        self.state = 0
        self.inc = ((int(initseq) << 1) | 1) & _MASK64
        self.next_uint32()
        self.state = (self.state + int(initstate)) & _MASK64
        self.next_uint32()

    def next_uint32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & _MASK32

    def randrange(self, n: int) -> int:
        """Integer in [0, n).  Plain modulo; the bias is ~n/2**32 and the
        populations here are at most a few thousand nodes."""
        if n <= 0:
            raise ValueError("randrange needs n > 0")
        return self.next_uint32() % n

    def random(self) -> float:
        """Float in [0, 1) with 32 bits of resolution."""
        return self.next_uint32() / 4294967296.0

    @classmethod
    def from_seed_sequence(cls, ss: np.random.SeedSequence) -> "Pcg32":
        initstate, initseq = (int(x) for x in ss.generate_state(2, dtype=np.uint64))
        return cls(initstate, initseq)


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Accept either a Generator or a seed (None seeds from OS entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
