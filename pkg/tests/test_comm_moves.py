import random

import pytest

from flipsearch.comm_moves import (
    CommFlipCandidate,
    CommFlipWalker,
    apply_comm_flip,
    apply_comm_plus,
    comm_flip_terms,
    find_comm_flips,
    reduce_comm_trivial,
)
from flipsearch.tensors import Mode, Scheme, canonicalize, standard_scheme
from oracle import brute_sum, brute_verify

DIMS = (2, 2, 2)  # U1 has 8 coordinates, w has 4
a1, b1, a2, b2 = 0b00000011, 0b00010100, 0b01100000, 0b10001000
c = 0b0001


def comm(*terms):
    return Scheme(Mode.COMMUTATIVE, DIMS, [canonicalize(t) for t in terms])


def same_sum(s, t):
    return brute_sum("commutative", s.dims, s.terms) == brute_sum("commutative", t.dims, t.terms)


def test_shared_c_has_four_pairings():
    s = comm((a1, b1, c), (a2, b2, c))
    cands = [x for x in find_comm_flips(s) if x.shared_kind == "c" and x.idx1 == 0]
    assert len(cands) >= 4
    results = {tuple(sorted(apply_comm_flip(s, x).terms)) for x in cands}
    assert len(results) == 4
    for x in cands:
        assert same_sum(s, apply_comm_flip(s, x))


def test_shared_c_pairings_match_listed_forms():
    # the four rewrites of a1*b1*c + a2*b2*c
    s = [(a1, b1, c), (a2, b2, c)]

    def forms(pairing):
        return {canonicalize(t) for t in comm_flip_terms(*s, "c", pairing)}

    assert forms((1, 1)) == {canonicalize((a1, b1 ^ b2, c)), canonicalize((a2 ^ a1, b2, c))}
    assert forms((0, 0)) == {canonicalize((a1 ^ a2, b1, c)), canonicalize((a2, b1 ^ b2, c))}
    assert forms((0, 1)) == {canonicalize((a1 ^ b2, b1, c)), canonicalize((a2 ^ b1, b2, c))}
    # cross pairing with b1 moving: a1*(b1+a2) + a2*(b2+a1); the variant
    # a1*(b1+a2) + (a2+b1)*b2 would leave a1*a2 + b1*b2 behind
    assert forms((1, 0)) == {canonicalize((a1, b1 ^ a2, c)), canonicalize((a2, b2 ^ a1, c))}
    wrong = comm((a1, b1 ^ a2, c), (a2 ^ b1, b2, c))
    assert not same_sum(comm(*s), wrong)


def test_shared_ab_across_positions():
    # a is the smaller factor of one term and the larger of the other
    a, y1, y2 = 0b00100000, 0b00000001, 0b10000000
    s = comm((a, y1, 0b0001), (y2, a, 0b0010))
    t0, t1 = s.terms
    assert t0.q == a and t1.p == a
    cands = [x for x in find_comm_flips(s) if x.shared_kind == "ab"]
    assert cands
    for x in cands:
        out = apply_comm_flip(s, x)
        assert same_sum(s, out)
        assert all(t.p <= t.q for t in out.terms)


def test_single_term_has_no_flips():
    assert find_comm_flips(comm((a1, b1, c))) == []


def test_equal_factors_create_zero():
    s = comm((a1, b1, c), (a2, b1, c))
    pairing = (s.terms[0].index(b1), s.terms[1].index(b1))
    out = apply_comm_flip(s, CommFlipCandidate(0, 1, "c", pairing))
    assert any(0 in t[:2] for t in out.terms)
    assert reduce_comm_trivial(out).rank == 1


def test_stale_candidate():
    s = comm((a1, b1, c), (a2, b2, 0b0010))
    with pytest.raises(ValueError):
        apply_comm_flip(s, CommFlipCandidate(0, 1, "c", (0, 0)))


def test_comm_plus_example():
    c1, c2 = 0b0001, 0b0010
    s = Scheme(Mode.COMMUTATIVE, DIMS, [(a1, b1, c1), (a2, b2, c2)])
    out = apply_comm_plus(s, 0, 1, 1)
    expect = [(a1, b1 ^ b2, c1), (a2 ^ a1, b2, c2), (a1, b2, c2 ^ c1)]
    assert out.terms == [canonicalize(t) for t in expect]
    assert out.rank == 3 and same_sum(s, out)


@pytest.mark.parametrize("variant", [1, 2, 3])
@pytest.mark.parametrize("swaps", [(False, False), (True, False), (False, True), (True, True)])
def test_comm_plus_preserves_sum(variant, swaps):
    rng = random.Random(variant * 10 + sum(swaps))
    for _ in range(50):
        t1 = canonicalize((rng.getrandbits(8), rng.getrandbits(8), rng.getrandbits(4)))
        t2 = canonicalize((rng.getrandbits(8), rng.getrandbits(8), rng.getrandbits(4)))
        s = Scheme(Mode.COMMUTATIVE, DIMS, [t1, t2])
        out = apply_comm_plus(s, 0, 1, variant, *swaps)
        assert out.rank == 3 and same_sum(s, out)


def test_reduce_comm_trivial_examples():
    p, q, w = a1, b1, c
    assert reduce_comm_trivial(comm((0, q, w), (p, q, w))).rank == 1
    both = Scheme(Mode.COMMUTATIVE, DIMS, [(p, q, w), (q, p, w)])
    assert reduce_comm_trivial(both).rank == 0
    clean = standard_scheme(DIMS, Mode.COMMUTATIVE)
    assert reduce_comm_trivial(clean).terms == clean.terms


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 2)])
def test_functional_walk_keeps_sum(dims):
    rng = random.Random(1)
    s = standard_scheme(dims, Mode.COMMUTATIVE)
    for step in range(300):
        cands = find_comm_flips(s)
        if step % 20 == 0 or not cands:
            i, j = rng.sample(range(s.rank), 2)
            nxt = apply_comm_plus(s, i, j, rng.randint(1, 3), rng.random() < 0.5, rng.random() < 0.5)
            assert nxt.rank == s.rank + 1
        else:
            cand = rng.choice(cands)
            nxt = apply_comm_flip(s, cand)
            assert nxt.rank == s.rank
            assert sum(a != b for a, b in zip(s.terms, nxt.terms)) <= 2
            assert all(t.p <= t.q for t in nxt.terms)
        s = reduce_comm_trivial(nxt)
        assert brute_verify(s)


@pytest.mark.parametrize("merge", [True, False])
def test_walker_consistency(merge):
    rng = random.Random(2)
    w = CommFlipWalker(standard_scheme((2, 2, 3), Mode.COMMUTATIVE), rng, merge=merge)
    for i in range(3000):
        if not w.random_flip():
            w.plus()
        if i % 61 == 0:
            w.plus()
        if i % 50 == 0:
            w.check()
            assert brute_verify(w.snapshot())


def test_walker_merges_equal_pairs():
    s = Scheme(Mode.COMMUTATIVE, DIMS, [(a1, b1, 0b0001), (a1, b1, 0b0010)])
    w = CommFlipWalker(s, random.Random(0))
    assert w.snapshot().terms == [canonicalize((a1, b1, 0b0011))]
    s = Scheme(Mode.COMMUTATIVE, DIMS, [canonicalize((a1, b1, c)), canonicalize((b2, a1, c))])
    w = CommFlipWalker(s, random.Random(0))
    assert w.snapshot().terms == [canonicalize((a1, b1 ^ b2, c))]


def test_walker_rejects_standard():
    with pytest.raises(ValueError):
        CommFlipWalker(standard_scheme(DIMS), random.Random(0))
