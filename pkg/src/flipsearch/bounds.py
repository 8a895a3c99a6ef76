"""Closed-form commutative multiplication counts.

Rosowski's construction multiplies an ``l x m`` by an ``m x n`` matrix with
``m(ln + l + n - 1)/2`` products, plus ``(l - 1)/2`` extra when ``m`` is odd
and ``n`` is even.  Since ``AB = (B^T A^T)^T``, the count for ``(n, m, l)``
also applies to ``(l, m, n)``, which gives the improved bound.
"""

from __future__ import annotations

from typing import NamedTuple


class BoundRow(NamedTuple):
    l: int
    m: int
    n: int
    rosowski: int
    improved: int


def _check(l, m, n):
    if min(l, m, n) < 1:
        raise ValueError(f"dimensions must be positive: {(l, m, n)}")


def rosowski_bound(l: int, m: int, n: int) -> int:
    _check(l, m, n)
    base = m * (l * n + l + n - 1)
    if m % 2 == 1 and n % 2 == 0:
        base += l - 1
    assert base % 2 == 0
    return base // 2


def improved_bound(l: int, m: int, n: int) -> int:
    _check(l, m, n)
    base = m * (l * n + l + n - 1)
    if m % 2 == 1 and l % 2 == 0 and n % 2 == 0:
        base += min(l, n) - 1
    return base // 2


def table_sizes(max_size: int = 5) -> list[tuple[int, int, int]]:
    """Sizes ``2 <= l <= n <= max_size``, ``2 <= m <= max_size`` in l, m, n order."""
    if max_size < 2:
        raise ValueError("max_size must be at least 2")
    r = range(2, max_size + 1)
    return [(l, m, n) for l in r for m in r for n in r if l <= n]


def results_table(max_size: int = 5) -> list[BoundRow]:
    return [
        BoundRow(l, m, n, rosowski_bound(l, m, n), improved_bound(l, m, n))
        for l, m, n in table_sizes(max_size)
    ]
