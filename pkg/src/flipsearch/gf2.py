"""GF(2) vectors packed into Python ints, plus row-echelon helpers.

Bit ``i`` of the packed integer is the coefficient of basis element ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True, slots=True)
class BitVec:
    bits: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.bits < 0 or self.bits >> self.dim:
            raise ValueError(f"bits {self.bits:#x} do not fit in dim {self.dim}")

    @classmethod
    def zero(cls, dim: int) -> BitVec:
        return cls(0, dim)

    @classmethod
    def unit(cls, index: int, dim: int) -> BitVec:
        return cls(1 << index, dim)

    @classmethod
    def from_str(cls, token: str) -> BitVec:
        """Parse a 0/1 string; character ``i`` is coefficient ``i``."""
        if not token or set(token) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {token!r}")
        return cls(int(token[::-1], 2), len(token))

    def to_str(self) -> str:
        return format(self.bits, f"0{self.dim}b")[::-1]

    def __add__(self, other: BitVec) -> BitVec:
        return add(self, other)

    __xor__ = __add__
    __sub__ = __add__

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return (self.bits >> i & 1 for i in range(self.dim))

    def __str__(self) -> str:
        return self.to_str()


def add(u: BitVec, v: BitVec) -> BitVec:
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} != {v.dim}")
    return BitVec(u.bits ^ v.bits, u.dim)


def is_zero(v: BitVec | int) -> bool:
    return (v.bits if isinstance(v, BitVec) else v) == 0


def _as_ints(rows: Iterable[BitVec | int]) -> list[int]:
    out = []
    dim = None
    for r in rows:
        if isinstance(r, BitVec):
            if dim is not None and r.dim != dim:
                raise ValueError(f"dimension mismatch: {r.dim} != {dim}")
            dim = r.dim
            out.append(r.bits)
        else:
            out.append(r)
    return out


def gf2_rank(rows: Iterable[BitVec | int]) -> int:
    """Rank of the span of ``rows`` over GF(2)."""
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    for x in _as_ints(rows):
        while x:
            top = x.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = x
                break
            x ^= p
    return len(pivots)


def find_dependency(rows: Sequence[BitVec | int]) -> list[int] | None:
    """Indices of a nonempty subset of ``rows`` that XORs to zero, or None.

    The returned subset is the one produced by the first row that reduces to
    zero during elimination, so it always contains that row.
    """
    pivots: dict[int, tuple[int, int]] = {}  # leading bit -> (row, combo mask)
    for i, x in enumerate(_as_ints(rows)):
        combo = 1 << i
        while x:
            top = x.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = (x, combo)
                break
            x ^= p[0]
            combo ^= p[1]
        else:
            return [k for k in range(i + 1) if combo >> k & 1]
    return None


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_of(x: int) -> list[int]:
    """Positions of the set bits of ``x``, ascending."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out
