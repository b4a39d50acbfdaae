"""Attack cost models: executed classical search vs reported quantum search.

The quantum side is never executed. It is the standard expected-query count
for an unstructured search over 2**bits candidates, ceil(pi/4 * 2**(bits/2)),
reported alongside the classical figure for comparison. The pi/4 constant is
the usual expected-case factor; treat the output as an order-of-magnitude
model, not an engineering estimate.
"""

from __future__ import annotations

from enum import Enum

from mpmath import mp

__all__ = ["grover_cost", "classical_cost", "CostModel"]

_MAX_BITS = 512


def grover_cost(bits: int) -> int:
    """ceil(pi/4 * 2**(bits/2)) as an exact integer, for 1 <= bits <= 512."""
    if not isinstance(bits, int) or isinstance(bits, bool):
        raise ValueError("bits must be an integer")
    if not 1 <= bits <= _MAX_BITS:
        raise ValueError(f"bits must be in [1, {_MAX_BITS}]")
    with mp.workdps(220):  # ~730 bits of precision, ample for 2**256
        return int(mp.ceil(mp.pi / 4 * mp.power(2, mp.mpf(bits) / 2)))


def classical_cost(bits: int) -> int:
    """Worst-case classical exhaustive search: 2**bits oracle queries."""
    if not 1 <= bits <= _MAX_BITS:
        raise ValueError(f"bits must be in [1, {_MAX_BITS}]")
    return 1 << bits


class CostModel(Enum):
    CLASSICAL = "classical"
    GROVER_EXPECTED = "grover-expected"

    def expected_queries(self, bits: int) -> int:
        if self is CostModel.CLASSICAL:
            return classical_cost(bits)
        return grover_cost(bits)
