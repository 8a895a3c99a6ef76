"""Flip, plus and reduction moves for standard and Marakov-like schemes.

The pure functions (:func:`apply_flip`, :func:`apply_plus`, ...) take and
return :class:`~flipsearch.tensors.Scheme` values and are what tests and
tools use.  :class:`FlipWalker` is the mutable state a random walk runs on;
it keeps per-slot indices so that drawing a random flip costs O(1) on
average.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import NamedTuple

from .gf2 import find_dependency
from .tensors import Mode, RankOneTensor, Scheme

_OTHER = ((1, 2), (0, 2), (0, 1))


class FlipCandidate(NamedTuple):
    """Flip of terms ``idx1`` and ``idx2`` which agree in ``shared_slot``.

    ``variant`` is the slot of ``idx1`` that receives the ``idx2`` factor;
    the remaining slot of ``idx2`` receives the ``idx1`` factor.  Slots are
    numbered 0, 1, 2.
    """

    idx1: int
    idx2: int
    shared_slot: int
    variant: int


def _check_noncomm(s: Scheme):
    if s.mode is Mode.COMMUTATIVE:
        raise ValueError("commutative schemes use flipsearch.comm_moves")


def find_flips(s: Scheme) -> list[FlipCandidate]:
    _check_noncomm(s)
    groups: dict[tuple[int, int], list[int]] = {}
    for i, t in enumerate(s.terms):
        for k in range(3):
            groups.setdefault((k, t[k]), []).append(i)
    out = []
    for (k, _), members in groups.items():
        for i in members:
            for j in members:
                if i != j:
                    for x in _OTHER[k]:
                        out.append(FlipCandidate(i, j, k, x))
    return out


def apply_flip(s: Scheme, c: FlipCandidate) -> Scheme:
    """Rewrite ``a*b1*c1 + a*b2*c2`` as ``a*(b1+b2)*c1 + a*b2*(c2+c1)``.

    Zero factors are left in place; see :func:`reduce_trivial`.
    """
    _check_noncomm(s)
    i, j, k, x = c
    if i == j or x == k or not (0 <= x < 3):
        raise ValueError(f"malformed flip candidate {c}")
    ti, tj = list(s.terms[i]), list(s.terms[j])
    if ti[k] != tj[k]:
        raise ValueError(f"stale flip candidate {c}: terms differ in slot {k}")
    y = 3 - k - x
    ti[x] ^= tj[x]
    tj[y] ^= ti[y]
    terms = list(s.terms)
    terms[i], terms[j] = RankOneTensor(*ti), RankOneTensor(*tj)
    return Scheme(s.mode, s.dims, terms)


def plus_terms(t1, t2, variant: int) -> list[tuple[int, int, int]]:
    """The three terms replacing ``t1, t2`` in the given plus variant (1, 2 or 3)."""
    a1, b1, c1 = t1[:3]
    a2, b2, c2 = t2[:3]
    if variant == 1:
        return [(a1, b1 ^ b2, c1), (a2 ^ a1, b2, c2), (a1, b2, c2 ^ c1)]
    if variant == 2:
        return [(a1, b1, c1 ^ c2), (a2, b2 ^ b1, c2), (a2 ^ a1, b1, c2)]
    if variant == 3:
        return [(a1 ^ a2, b1, c1), (a2, b2, c2 ^ c1), (a2, b2 ^ b1, c1)]
    raise ValueError(f"plus variant must be 1, 2 or 3, got {variant}")


def apply_plus(s: Scheme, idx1: int, idx2: int, variant: int) -> Scheme:
    _check_noncomm(s)
    if idx1 == idx2:
        raise ValueError("plus needs two distinct terms")
    new = plus_terms(s.terms[idx1], s.terms[idx2], variant)
    terms = [t for i, t in enumerate(s.terms) if i not in (idx1, idx2)]
    return Scheme(s.mode, s.dims, terms + new)


def reduce_trivial(s: Scheme) -> Scheme:
    """Drop zero-factor terms and cancel equal terms in pairs.

    Survivors keep their relative order; of an odd number of copies the
    first one survives.
    """
    live = [t for t in s.terms if all(t)]
    left = Counter(live)
    keep_first = {t for t, c in left.items() if c % 2}
    out = []
    for t in live:
        if t in keep_first:
            out.append(t)
            keep_first.discard(t)
    return Scheme(s.mode, s.dims, out)


def find_reduction(s: Scheme) -> tuple[int, list[int]] | None:
    """Look for a general reduction: terms sharing a factor whose factors in
    another slot are linearly dependent.

    Returns ``(slot, indices)`` with ``indices`` a dependent set of terms
    sharing their ``slot`` factor, or None.  The first index listed is the
    one that gets eliminated.  This is a full scan and is off by default in
    the search.
    """
    for k in range(3):
        groups: dict[int, list[int]] = {}
        for i, t in enumerate(s.terms):
            groups.setdefault(t[k], []).append(i)
        for members in groups.values():
            if len(members) < 2:
                continue
            for x in _OTHER[k]:
                dep = find_dependency([s.terms[i][x] for i in members])
                if dep:
                    idx = [members[d] for d in dep]
                    return x, [idx[-1]] + idx[:-1]
    return None


def apply_reduction(s: Scheme, slot: int, indices: list[int]) -> Scheme:
    """Eliminate ``indices[0]`` whose ``slot`` factor is the XOR of the others'.

    All terms in ``indices`` must share their factor in one other slot.
    """
    t_idx, rest = indices[0], indices[1:]
    tt = s.terms[t_idx]
    shared = [k for k in range(3) if k != slot and all(s.terms[i][k] == tt[k] for i in rest)]
    if not shared:
        raise ValueError("reduction terms do not share a factor")
    acc = 0
    for i in rest:
        acc ^= s.terms[i][slot]
    if acc != tt[slot]:
        raise ValueError("reduction set is not dependent")
    z = 3 - slot - shared[0]
    terms = list(s.terms)
    for i in rest:
        t = list(terms[i])
        t[z] ^= tt[z]
        terms[i] = RankOneTensor(*t)
    del terms[t_idx]
    return reduce_trivial(Scheme(s.mode, s.dims, terms))


class FlipWalker:
    """Mutable scheme plus slot indices for fast random flips.

    Each term is a list ``[u, v, w, pos]`` where ``pos`` is its index in
    :attr:`terms`.  Reductions are applied eagerly: zero-factor terms vanish
    and two terms agreeing in two slots are merged into one.
    """

    def __init__(self, scheme: Scheme, rng: random.Random, merge: bool = True):
        if scheme.mode is Mode.COMMUTATIVE:
            raise ValueError("use CommFlipWalker for commutative schemes")
        self.mode = scheme.mode
        self.dims = scheme.dims
        self.rng = rng
        self.merge = merge
        self.terms: list[list[int]] = []
        self.index: tuple[dict, dict, dict] = ({}, {}, {})
        self.shared_groups = 0
        work = []
        for t in reduce_trivial(scheme).terms:
            work.append(self._add(list(t)))
        self._settle(work)

    @property
    def rank(self) -> int:
        return len(self.terms)

    def snapshot(self) -> Scheme:
        return Scheme(self.mode, self.dims, [tuple(t[:3]) for t in self.terms])

    # -- index maintenance ----------------------------------------------------

    def _link(self, t):
        pos = t[3]
        for k in range(3):
            g = self.index[k].get(t[k])
            if g is None:
                self.index[k][t[k]] = [pos]
            else:
                g.append(pos)
                if len(g) == 2:
                    self.shared_groups += 1

    def _unlink(self, t):
        pos = t[3]
        for k in range(3):
            idx = self.index[k]
            g = idx[t[k]]
            if len(g) == 1:
                del idx[t[k]]
            else:
                g.remove(pos)
                if len(g) == 1:
                    self.shared_groups -= 1

    def _add(self, t):
        t = t[:3] + [len(self.terms)]
        self.terms.append(t)
        self._link(t)
        return t

    def _drop(self, t):
        """Remove an already unlinked term."""
        pos = t[3]
        last = self.terms.pop()
        if last is not t:
            self._unlink(last)
            last[3] = pos
            self.terms[pos] = last
            self._link(last)
        t[3] = -1

    def _settle(self, work):
        """Apply eager reductions touching the terms in ``work``."""
        while work:
            t = work.pop()
            if t[3] < 0:
                continue
            if not (t[0] and t[1] and t[2]):
                self._unlink(t)
                self._drop(t)
                continue
            if not self.merge:
                continue
            partner = None
            for k in (0, 1):
                for pos in self.index[k][t[k]]:
                    o = self.terms[pos]
                    if o is t:
                        continue
                    a, b = _OTHER[k]
                    if o[a] == t[a]:
                        partner, z = o, b
                        break
                    if o[b] == t[b]:
                        partner, z = o, a
                        break
                if partner is not None:
                    break
            if partner is None:
                continue
            # drop the partner while t is still linked: the swap-remove may move t
            self._unlink(partner)
            self._drop(partner)
            self._unlink(t)
            t[z] ^= partner[z]
            if t[z]:
                self._link(t)
                work.append(t)
            else:
                self._drop(t)

    # -- moves ----------------------------------------------------------------

    def can_flip(self) -> bool:
        return self.shared_groups > 0

    def random_flip(self) -> bool:
        """Apply one uniformly drawn flip; False if no two terms share a factor."""
        if not self.shared_groups:
            return False
        rnd = self.rng.random
        terms = self.terms
        index = self.index
        r = len(terms)
        while True:
            t = terms[int(rnd() * r)]
            k = int(rnd() * 3)
            g = index[k][t[k]]
            if len(g) > 1:
                break
        o = terms[g[int(rnd() * (len(g) - 1))]]
        if o is t:
            o = terms[g[-1]]
        x = _OTHER[k][int(rnd() * 2)]
        self.flip(t, o, k, x)
        return True

    def flip(self, t, o, k, x):
        """Flip term lists ``t`` and ``o`` sharing slot ``k``; ``t[x]`` gets ``o[x]``."""
        y = 3 - k - x
        self._unlink(t)
        self._unlink(o)
        t[x] ^= o[x]
        o[y] ^= t[y]
        self._link(t)
        self._link(o)
        self._settle([o, t])

    def plus(self, attempts: int = 16) -> bool:
        """Replace two random terms by three (rank + 1).

        Draws avoiding zero factors are retried up to ``attempts`` times.
        """
        r = len(self.terms)
        if r < 2:
            return False
        rng = self.rng
        for _ in range(attempts):
            i, j = rng.sample(range(r), 2)
            t, o = self.terms[i], self.terms[j]
            new = plus_terms(t, o, rng.randint(1, 3))
            if all(a and b and c for a, b, c in new):
                break
        else:
            return False
        for x in (t, o):
            self._unlink(x)
        for x in sorted((t, o), key=lambda x: -x[3]):
            self._drop(x)
        self._settle([self._add(list(n)) for n in new])
        return True

    def check(self):
        """Assert index consistency (debug aid)."""
        for pos, t in enumerate(self.terms):
            assert t[3] == pos
            for k in range(3):
                assert pos in self.index[k][t[k]]
        for k in range(3):
            assert sum(len(g) for g in self.index[k].values()) == len(self.terms)
        assert self.shared_groups == sum(
            len(g) > 1 for idx in self.index for g in idx.values()
        )
