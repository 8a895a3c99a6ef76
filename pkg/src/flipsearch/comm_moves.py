"""Flip, plus and reduction moves for commutative schemes.

A commutative term ``{p, q} x w`` stands for ``p*q*w`` modulo swapping the
two U1 factors, so any U1 factor of one term may pair with any U1 factor of
another.  Two terms sharing ``w`` can therefore flip in four ways (one per
choice of "moving" factor in each term) instead of two:

    x1*y1*c + x2*y2*c  ->  (x1+x2)*y1*c + x2*(y2+y1)*c

Two terms sharing a U1 factor ``a`` flip like the non-commutative case, with
``a`` allowed in either position of either term.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import NamedTuple

from .moves import plus_terms
from .tensors import CommRankOne, Mode, Scheme, canonicalize


class CommFlipCandidate(NamedTuple):
    """A flip of commutative terms ``idx1``, ``idx2``.

    ``shared_kind == "c"``: the terms share ``w``; ``pairing = (i1, i2)``
    picks the U1 factor (0 for ``p``, 1 for ``q``) of each term that moves:
    ``x1 += x2`` in term 1, then term 2's other factor absorbs term 1's other
    factor.  ``variant`` is unused.

    ``shared_kind == "ab"``: ``pairing = (i1, i2)`` are the positions of the
    shared U1 value in each term.  ``variant == "ab"`` adds term 2's other
    U1 factor into term 1 and term 1's ``w`` into term 2; ``variant == "c"``
    does the reverse.
    """

    idx1: int
    idx2: int
    shared_kind: str
    pairing: tuple[int, int]
    variant: str | None = None


def _check_comm(s: Scheme):
    if s.mode is not Mode.COMMUTATIVE:
        raise ValueError("comm_moves operates on commutative schemes only")


def find_comm_flips(s: Scheme) -> list[CommFlipCandidate]:
    _check_comm(s)
    terms = s.terms
    by_w: dict[int, list[int]] = {}
    by_u: dict[int, list[tuple[int, int]]] = {}
    for i, (p, q, w) in enumerate(terms):
        by_w.setdefault(w, []).append(i)
        by_u.setdefault(p, []).append((i, 0))
        if q != p:
            by_u.setdefault(q, []).append((i, 1))
    out = []
    for members in by_w.values():
        for i in members:
            for j in members:
                if i != j:
                    for pr in ((0, 0), (0, 1), (1, 0), (1, 1)):
                        out.append(CommFlipCandidate(i, j, "c", pr))
    for members in by_u.values():
        for i, pi in members:
            for j, pj in members:
                if i != j:
                    for var in ("ab", "c"):
                        out.append(CommFlipCandidate(i, j, "ab", (pi, pj), var))
    return out


def comm_flip_terms(t1, t2, kind: str, pairing, variant=None):
    """The two raw (uncanonicalized) terms replacing ``t1``, ``t2``."""
    u1, w1 = [t1[0], t1[1]], t1[2]
    u2, w2 = [t2[0], t2[1]], t2[2]
    i1, i2 = pairing
    if kind == "c":
        if w1 != w2:
            raise ValueError("stale flip candidate: terms do not share w")
        x1, y1 = u1[i1], u1[1 - i1]
        x2, y2 = u2[i2], u2[1 - i2]
        x1 ^= x2
        y2 ^= y1
        return (x1, y1, w1), (x2, y2, w2)
    if kind == "ab":
        a = u1[i1]
        if u2[i2] != a:
            raise ValueError("stale flip candidate: terms do not share a U1 factor")
        y1, y2 = u1[1 - i1], u2[1 - i2]
        if variant == "ab":
            y1 ^= y2
            w2 ^= w1
        elif variant == "c":
            w1 ^= w2
            y2 ^= y1
        else:
            raise ValueError(f"unknown variant {variant!r}")
        return (a, y1, w1), (a, y2, w2)
    raise ValueError(f"unknown shared kind {kind!r}")


def apply_comm_flip(s: Scheme, c: CommFlipCandidate) -> Scheme:
    """Apply a flip; results are canonicalized, zero factors are kept."""
    _check_comm(s)
    if c.idx1 == c.idx2:
        raise ValueError("flip needs two distinct terms")
    n1, n2 = comm_flip_terms(s.terms[c.idx1], s.terms[c.idx2], c.shared_kind, c.pairing, c.variant)
    terms = list(s.terms)
    terms[c.idx1], terms[c.idx2] = canonicalize(n1), canonicalize(n2)
    return Scheme(s.mode, s.dims, terms)


def comm_plus_terms(t1, t2, variant: int, swap1: bool = False, swap2: bool = False):
    """Plus on commutative terms: order each U1 pair, then apply the plain plus."""
    p1, q1, w1 = t1[:3]
    p2, q2, w2 = t2[:3]
    if swap1:
        p1, q1 = q1, p1
    if swap2:
        p2, q2 = q2, p2
    return [canonicalize(t) for t in plus_terms((p1, q1, w1), (p2, q2, w2), variant)]


def apply_comm_plus(s: Scheme, idx1: int, idx2: int, variant: int, swap1=False, swap2=False) -> Scheme:
    _check_comm(s)
    if idx1 == idx2:
        raise ValueError("plus needs two distinct terms")
    new = comm_plus_terms(s.terms[idx1], s.terms[idx2], variant, swap1, swap2)
    terms = [t for i, t in enumerate(s.terms) if i not in (idx1, idx2)]
    return Scheme(s.mode, s.dims, terms + new)


def reduce_comm_trivial(s: Scheme) -> Scheme:
    _check_comm(s)
    live = [canonicalize(t) for t in s.terms if all(t)]
    odd = {t for t, c in Counter(live).items() if c % 2}
    out = []
    for t in live:
        if t in odd:
            out.append(t)
            odd.discard(t)
    return Scheme(s.mode, s.dims, out)


class CommFlipWalker:
    """Mutable commutative scheme with U1 and w indices.

    Terms are lists ``[p, q, w, pos]`` with ``p <= q``.  A term appears once
    in the U1 index under each distinct value of ``p`` and ``q``.  Zero
    factors are dropped and mergeable pairs merged as soon as they appear.
    """

    def __init__(self, scheme: Scheme, rng: random.Random, merge: bool = True):
        _check_comm(scheme)
        self.mode = scheme.mode
        self.dims = scheme.dims
        self.rng = rng
        self.merge = merge
        self.terms: list[list[int]] = []
        self.u_index: dict[int, list[int]] = {}
        self.w_index: dict[int, list[int]] = {}
        self.shared_groups = 0
        work = [self._add(list(t)) for t in reduce_comm_trivial(scheme).terms]
        self._settle(work)

    @property
    def rank(self) -> int:
        return len(self.terms)

    def snapshot(self) -> Scheme:
        return Scheme(self.mode, self.dims, [tuple(t[:3]) for t in self.terms])

    def _link_one(self, idx, key, pos):
        g = idx.get(key)
        if g is None:
            idx[key] = [pos]
        else:
            g.append(pos)
            if len(g) == 2:
                self.shared_groups += 1

    def _unlink_one(self, idx, key, pos):
        g = idx[key]
        if len(g) == 1:
            del idx[key]
        else:
            g.remove(pos)
            if len(g) == 1:
                self.shared_groups -= 1

    def _link(self, t):
        pos = t[3]
        self._link_one(self.u_index, t[0], pos)
        if t[1] != t[0]:
            self._link_one(self.u_index, t[1], pos)
        self._link_one(self.w_index, t[2], pos)

    def _unlink(self, t):
        pos = t[3]
        self._unlink_one(self.u_index, t[0], pos)
        if t[1] != t[0]:
            self._unlink_one(self.u_index, t[1], pos)
        self._unlink_one(self.w_index, t[2], pos)

    def _add(self, t):
        p, q = (t[0], t[1]) if t[0] <= t[1] else (t[1], t[0])
        t = [p, q, t[2], len(self.terms)]
        self.terms.append(t)
        self._link(t)
        return t

    def _drop(self, t):
        pos = t[3]
        last = self.terms.pop()
        if last is not t:
            self._unlink(last)
            last[3] = pos
            self.terms[pos] = last
            self._link(last)
        t[3] = -1

    def _set(self, t, p, q, w):
        if p > q:
            p, q = q, p
        t[0], t[1], t[2] = p, q, w

    def _find_partner(self, t):
        """A term mergeable with ``t`` and the merged factors, or None."""
        p, q, w = t[0], t[1], t[2]
        for pos in self.w_index[w]:
            o = self.terms[pos]
            if o is t:
                continue
            # shared w and a shared U1 value: sum the other U1 factors
            if o[0] == p:
                return o, (p, q ^ o[1], w)
            if o[1] == p:
                return o, (p, q ^ o[0], w)
            if o[0] == q:
                return o, (q, p ^ o[1], w)
            if o[1] == q:
                return o, (q, p ^ o[0], w)
        for pos in self.u_index[p]:
            o = self.terms[pos]
            if o is not t and o[0] == p and o[1] == q:
                return o, (p, q, w ^ o[2])
        return None

    def _settle(self, work):
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
            found = self._find_partner(t)
            if found is None:
                continue
            o, (p, q, w) = found
            self._unlink(o)
            self._drop(o)
            self._unlink(t)
            if p and q and w:
                self._set(t, p, q, w)
                self._link(t)
                work.append(t)
            else:
                self._drop(t)

    def can_flip(self) -> bool:
        return self.shared_groups > 0

    def random_flip(self) -> bool:
        if not self.shared_groups:
            return False
        rnd = self.rng.random
        terms = self.terms
        r = len(terms)
        while True:
            t = terms[int(rnd() * r)]
            f = int(rnd() * 3)
            g = self.w_index[t[2]] if f == 2 else self.u_index[t[f]]
            if len(g) > 1:
                break
        o = terms[g[int(rnd() * (len(g) - 1))]]
        if o is t:
            o = terms[g[-1]]
        if f == 2:
            i1, i2 = int(rnd() * 2), int(rnd() * 2)
            x1, y1 = t[i1], t[1 - i1]
            x2, y2 = o[i2], o[1 - i2]
            n1 = (x1 ^ x2, y1, t[2])
            n2 = (x2, y2 ^ y1, o[2])
        else:
            a = t[f]
            y1 = t[1 - f]
            y2 = o[1] if o[0] == a else o[0]
            if rnd() < 0.5:
                n1 = (a, y1 ^ y2, t[2])
                n2 = (a, y2, o[2] ^ t[2])
            else:
                n1 = (a, y1, t[2] ^ o[2])
                n2 = (a, y2 ^ y1, o[2])
        self._unlink(t)
        self._unlink(o)
        self._set(t, *n1)
        self._set(o, *n2)
        self._link(t)
        self._link(o)
        self._settle([o, t])
        return True

    def plus(self, attempts: int = 16) -> bool:
        r = len(self.terms)
        if r < 2:
            return False
        rng = self.rng
        for _ in range(attempts):
            i, j = rng.sample(range(r), 2)
            t, o = self.terms[i], self.terms[j]
            new = comm_plus_terms(t, o, rng.randint(1, 3), rng.random() < 0.5, rng.random() < 0.5)
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
        for pos, t in enumerate(self.terms):
            assert t[3] == pos and t[0] <= t[1]
            assert pos in self.u_index[t[0]] and pos in self.u_index[t[1]]
            assert pos in self.w_index[t[2]]
        n_u = sum(1 + (t[0] != t[1]) for t in self.terms)
        assert sum(len(g) for g in self.u_index.values()) == n_u
        assert sum(len(g) for g in self.w_index.values()) == len(self.terms)
        groups = list(self.u_index.values()) + list(self.w_index.values())
        assert self.shared_groups == sum(len(g) > 1 for g in groups)
