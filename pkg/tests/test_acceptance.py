"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py [criterion numbers]``.
The search reproductions (criteria 4 to 6) are marked ``slow``.
"""

from __future__ import annotations

import contextlib
import io
import random
import sys
import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flipsearch.cli import main as cli_main  # noqa: E402
from flipsearch.comm_moves import (  # noqa: E402
    apply_comm_flip,
    apply_comm_plus,
    find_comm_flips,
    reduce_comm_trivial,
)
from flipsearch.moves import apply_flip, apply_plus, find_flips, reduce_trivial  # noqa: E402
from flipsearch.scheme_io import (  # noqa: E402
    format_scheme,
    golden_path,
    parse_scheme,
    read_scheme,
    render_algorithm,
    write_scheme,
)
from flipsearch.search import (  # noqa: E402
    SearchParams,
    adaptive_search,
    combined_search,
    extend_scheme,
    make_walker,
    marakov_to_commutative,
    parallel_search,
)
from flipsearch.tensors import (  # noqa: E402
    Dims,
    Mode,
    commutative_target,
    definitional_terms,
    slot_dims,
    standard_scheme,
    sym_embed,
    verify,
)
from oracle import brute_verify, evaluate_rendered, expected_product  # noqa: E402
from published_table import BOUND, TABLE  # noqa: E402

# one fresh segment per 200k iterations for the long searches
SEGMENT = 200_000
# tuned on seeds disjoint from the ones below
COMM_PLUS_INTERVAL = 10_000

_reporter = None


@pytest.fixture(autouse=True)
def _bind_reporter(request):
    global _reporter
    _reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    yield
    _reporter = None


def emit(n: int, ok: bool, detail: str, elapsed: float):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({elapsed:.1f}s)"
    if _reporter is not None:
        _reporter.write_line("")
        _reporter.write_line(line)
    else:
        print(line, flush=True)
    assert ok, line


def search_rate(mode: Mode, dims, target: int, seeds, budget: int, base_seed: int, plus_interval=None):
    """Run one search per seed; return the list of iterations-to-target (None on a miss)."""
    out = []
    for s in range(seeds):
        p = SearchParams(
            max_iterations=budget,
            target_rank=target,
            seed=base_seed + s,
            restarts=max(0, budget // SEGMENT - 1),
            plus_interval=plus_interval,
        )
        r = parallel_search(Dims(*dims), p, mode)
        assert verify(r.best_scheme)
        out.append(r.iterations_used if r.best_rank <= target else None)
    return out


def random_scheme(mode: Mode, dims, rng: random.Random, steps: int):
    """A verified scheme reached by a short random walk from the standard one."""
    w = make_walker(standard_scheme(dims, mode), rng)
    for i in range(steps):
        if not w.random_flip():
            w.plus()
        if i % 40 == 39:
            w.plus()
    return w.snapshot()


# -- 1, 2: bounds table and golden file ---------------------------------------


def test_criterion_1_bounds_table():
    t0 = time.perf_counter()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(["table", "--max", "5"])
    rows = {}
    for line in buf.getvalue().splitlines()[1:]:
        l, m, n, b = map(int, line.split())
        rows[(l, m, n)] = b
    wrong = [k for k in BOUND if rows.get(k) != BOUND[k]]
    elapsed = time.perf_counter() - t0
    ok = code == 0 and len(rows) == 40 and not wrong and elapsed < 1.0
    emit(1, ok, f"{len(rows)} rows, {40 - len(wrong)}/40 match the published column", elapsed)


def test_criterion_2_strassen_golden():
    t0 = time.perf_counter()
    sf = read_scheme(golden_path())
    ok = sf.verified and sf.rank == 7 and sf.mode is Mode.STANDARD and tuple(sf.dims) == (2, 2, 2)
    ok = ok and brute_verify(sf.scheme)
    elapsed = time.perf_counter() - t0
    emit(2, ok and elapsed < 1.0, f"golden file verified={sf.verified} rank={sf.rank}", elapsed)


# -- 3 to 6: search reproductions ---------------------------------------------


def test_criterion_3_standard_222():
    t0 = time.perf_counter()
    hits = search_rate(Mode.STANDARD, (2, 2, 2), 7, seeds=10, budget=10**6, base_seed=3000)
    n = sum(h is not None for h in hits)
    its = sorted(h for h in hits if h is not None)
    emit(3, n >= 9, f"standard (2,2,2)->7 in {n}/10 seeds, max {its[-1] if its else '-'} iterations",
         time.perf_counter() - t0)


def _rate_criterion(number, mode, goals, base_seed, plus_interval=None):
    t0 = time.perf_counter()
    parts, ok = [], True
    for dims, target in goals:
        hits = search_rate(mode, dims, target, 10, 10**7, base_seed, plus_interval)
        n = sum(h is not None for h in hits)
        ok &= n >= 8
        parts.append(f"{dims}->{target} {n}/10")
    emit(number, ok, f"{mode} " + ", ".join(parts), time.perf_counter() - t0)


@pytest.mark.slow
def test_criterion_4_commutative_small():
    goals = [((2, 2, 2), TABLE[(2, 2, 2)][2]), ((2, 2, 3), TABLE[(2, 2, 3)][2]),
             ((2, 3, 2), TABLE[(2, 3, 2)][2]), ((2, 3, 3), TABLE[(2, 3, 3)][2])]
    # rarer plus moves than the commutative default; see README
    _rate_criterion(4, Mode.COMMUTATIVE, goals, base_seed=4000, plus_interval=COMM_PLUS_INTERVAL)


@pytest.mark.slow
def test_criterion_5_marakov():
    goals = [((2, 2, 2), TABLE[(2, 2, 2)][1]), ((2, 3, 3), TABLE[(2, 3, 3)][1]),
             ((3, 3, 3), TABLE[(3, 3, 3)][1])]
    _rate_criterion(5, Mode.MARAKOV, goals, base_seed=5000)


@pytest.mark.slow
def test_criterion_6_combined_333():
    # seeds run one after another; each gets its own 30 minute allowance
    t0 = time.perf_counter()
    target = TABLE[(3, 3, 3)][3]
    results = []
    for s in range(5):
        start = time.perf_counter()
        p_m = SearchParams(max_iterations=10**7, target_rank=22, seed=6000 + s, restarts=49)
        p_c = SearchParams(max_iterations=2 * 10**7, target_rank=target, seed=6100 + s, restarts=19)
        r = combined_search((3, 3, 3), p_m, p_c)
        took = time.perf_counter() - start
        assert verify(r.best_scheme) and r.best_scheme.mode is Mode.COMMUTATIVE
        results.append((r.best_rank, took))
        if r.best_rank <= target and took <= 1800:
            break
    good = [t for rank, t in results if rank <= target and t <= 1800]
    detail = f"(3,3,3)->{target} in {len(good)}/{len(results)} seeds tried, ranks {[r for r, _ in results]}"
    if good:
        detail += f", first hit after {good[0]:.0f}s"
    emit(6, bool(good), detail, time.perf_counter() - t0)


# -- 7 to 11: properties -------------------------------------------------------

SOUND_DIMS = [(2, 2, 2), (2, 3, 2), (2, 2, 3)]


def _soundness_walk(mode: Mode, dims, moves: int, seed: int) -> dict:
    rng = random.Random(seed)
    s = standard_scheme(dims, mode)
    comm = mode is Mode.COMMUTATIVE
    cap = s.rank + 6
    stats = dict(flips=0, plus=0, reductions=0)
    for _ in range(moves):
        cands = find_comm_flips(s) if comm else find_flips(s)
        if s.rank >= 2 and (not cands or (s.rank < cap and rng.random() < 0.05)):
            i, j = rng.sample(range(s.rank), 2)
            if comm:
                nxt = apply_comm_plus(s, i, j, rng.randint(1, 3), rng.random() < 0.5, rng.random() < 0.5)
            else:
                nxt = apply_plus(s, i, j, rng.randint(1, 3))
            assert nxt.rank == s.rank + 1, "plus must add exactly one term"
            stats["plus"] += 1
        elif cands:
            nxt = (apply_comm_flip if comm else apply_flip)(s, rng.choice(cands))
            assert nxt.rank == s.rank, "flip must keep the rank"
            stats["flips"] += 1
        else:
            break
        assert verify(nxt), f"{mode} {dims}: move broke the sum"
        red = reduce_comm_trivial(nxt) if comm else reduce_trivial(nxt)
        if red.rank != nxt.rank:
            stats["reductions"] += 1
            assert verify(red), f"{mode} {dims}: reduction broke the sum"
        s = red
    assert brute_verify(s)
    return stats


def test_criterion_7_move_soundness():
    t0 = time.perf_counter()
    totals = dict(flips=0, plus=0, reductions=0)
    ok = True
    for seed, (mode, dims) in enumerate(product(Mode, SOUND_DIMS)):
        try:
            st = _soundness_walk(mode, dims, 10**5, seed=700 + seed)
        except AssertionError:
            ok = False
            continue
        for k in totals:
            totals[k] += st[k]
    emit(7, ok, f"9 walks of 1e5 moves: {totals['flips']} flips, {totals['plus']} plus, "
                f"{totals['reductions']} reductions, all sums preserved", time.perf_counter() - t0)


def test_criterion_8_quotient():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    ok = True
    for _ in range(10**4):
        dims = Dims(*rng.integers(1, 5, size=3))
        d1, _, d3 = slot_dims(Mode.COMMUTATIVE, dims)
        p, p2, q = (int(rng.integers(0, 1 << d1)) for _ in range(3))
        w, w2 = (int(rng.integers(0, 1 << d3)) for _ in range(2))
        e = sym_embed(p, q, w, d1, d3)
        ok &= np.array_equal(e, sym_embed(q, p, w, d1, d3))
        ok &= np.array_equal(sym_embed(p ^ p2, q, w, d1, d3), e ^ sym_embed(p2, q, w, d1, d3))
        ok &= np.array_equal(sym_embed(p, q, w ^ w2, d1, d3), e ^ sym_embed(p, q, w2, d1, d3))
    sizes = 0
    for dims in product(range(1, 5), repeat=3):
        d1, _, d3 = slot_dims(Mode.COMMUTATIVE, dims)
        acc = np.zeros_like(commutative_target(dims).data)
        for t in definitional_terms(Mode.COMMUTATIVE, dims):
            acc ^= sym_embed(t[0], t[1], t[2], d1, d3)
        ok &= np.array_equal(acc, commutative_target(dims).data)
        sizes += 1
    emit(8, bool(ok), f"1e4 random triples symmetric and bilinear, target matches on {sizes} sizes",
         time.perf_counter() - t0)


def test_criterion_9_conversion_extension():
    t0 = time.perf_counter()
    rng = random.Random(9)
    checked = 0
    ok = True
    for dims in product(range(1, 4), repeat=3):
        l, m, n = dims
        added = {"l": m * n, "m": l * n, "n": l * m}
        for k in range(100):
            mode = (Mode.STANDARD, Mode.MARAKOV, Mode.COMMUTATIVE)[k % 3]
            s = random_scheme(mode, dims, rng, rng.randrange(0, 400))
            if k % 3 == 1:
                c = marakov_to_commutative(s)
                ok &= c.rank == s.rank and verify(c)
                if k < 10:
                    ok &= brute_verify(c)
                # the Marakov input also gets extended below
            for axis in "lmn":
                e = extend_scheme(s, axis)
                ok &= e.rank == s.rank + added[axis] and verify(e)
            checked += 1
    emit(9, bool(ok), f"{checked} random schemes over 27 sizes converted/extended with predicted ranks",
         time.perf_counter() - t0)


def test_criterion_10_reproducibility(tmp_path):
    t0 = time.perf_counter()
    outputs = []
    for run in range(2):
        p = SearchParams(max_iterations=200_000, seed=424242, walkers=1, restarts=3)
        r = parallel_search((3, 3, 3), p, Mode.MARAKOV)
        path = tmp_path / f"run{run}.mmscheme"
        write_scheme(r.best_scheme, path)
        outputs.append((path.read_bytes(), r.to_json(timing=False).encode()))
    ok = outputs[0] == outputs[1]
    emit(10, ok, f"two seeded runs give identical scheme files ({len(outputs[0][0])} bytes) and reports",
         time.perf_counter() - t0)


def test_criterion_11_round_trip_and_render():
    t0 = time.perf_counter()
    rng = random.Random(11)
    schemes = [read_scheme(golden_path()).scheme]
    for mode in Mode:
        for dims in [(1, 1, 1), (2, 2, 2), (2, 3, 4), (3, 3, 3), (4, 2, 3)]:
            for _ in range(4):
                schemes.append(random_scheme(mode, dims, rng, rng.randrange(0, 2000)))
    ok = True
    for s in schemes:
        back = parse_scheme(format_scheme(s))
        ok &= back.verified and back.scheme == s
    golden = read_scheme(golden_path()).scheme
    products, outputs = evaluate_rendered(render_algorithm(golden), commutative=False)
    ok &= len(products) == 7 and outputs == expected_product(2, 2, 2, commutative=False)
    emit(11, bool(ok), f"{len(schemes)} schemes round-trip, rendered Strassen multiplies 2x2 matrices",
         time.perf_counter() - t0)


if __name__ == "__main__":
    import tempfile

    wanted = {int(a) for a in sys.argv[1:]} or set(range(1, 12))
    funcs = {
        int(name.split("_")[2]): f
        for name, f in sorted(globals().items())
        if name.startswith("test_criterion_")
    }
    failed = 0
    for n in sorted(wanted):
        f = funcs[n]
        try:
            if "tmp_path" in f.__code__.co_varnames[: f.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    f(Path(d))
            else:
                f()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
