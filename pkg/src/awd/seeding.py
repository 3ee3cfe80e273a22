"""Deterministic 64-bit seeding and uniform draws.

The per-record seed derivation and the parameter-draw stream are pinned
bit-exactly so that independently generated records (any worker count,
any platform) produce identical bytes:

* ``derive_seed(master, index)`` applies the SplitMix64 finalizer to
  ``master XOR (index * 0x9E3779B97F4A7C15)`` (all mod 2**64).
* ``SplitMix64`` iterates the standard stream: the state advances by the
  golden-ratio increment and each output is the finalizer of the state.
* Doubles are formed as ``(x >> 11) * 2**-53``, uniform in [0, 1).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of a 64-bit word."""
    z &= MASK64
    z = (z ^ (z >> 30)) * MIX1 & MASK64
    z = (z ^ (z >> 27)) * MIX2 & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Per-record seed: finalizer of master XOR (index * golden ratio)."""
    return mix64((master & MASK64) ^ (index * GOLDEN & MASK64))


class SplitMix64:
    """Minimal deterministic RNG used for parameter draws and presets."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.next_double() * (hi - lo)
