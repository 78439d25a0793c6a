"""Deterministic 64-bit LCG, bit-identical across every component.

The generator is pinned so that native and interpreted workers draw the same
streams: state' = (state * 6364136223846793005 + 1442695040888963407) mod 2**64
(Knuth's MMIX constants).  Floats in [0, 1) take the top 53 bits.
"""

from __future__ import annotations

from dataclasses import dataclass

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1

#: 2**-53, the spacing of the unit-interval grid.
_UNIT = 2.0**-53


@dataclass(frozen=True)
class RngState:
    state: int = 0


def lcg_next(s: RngState) -> tuple[RngState, int]:
    """Advance one step; returns (new state, output), output == new state."""
    nxt = (s.state * MULTIPLIER + INCREMENT) & MASK64
    return RngState(nxt), nxt


def unit_float(x: int) -> float:
    """Map a 64-bit value onto the [0, 1) grid: (x >> 11) * 2**-53, exact."""
    return (x >> 11) * _UNIT
