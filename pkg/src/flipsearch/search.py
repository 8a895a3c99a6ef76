"""Adaptive flip graph random walks and the pipelines built on them."""

from __future__ import annotations

import json
import logging
import multiprocessing as mp
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .comm_moves import CommFlipWalker
from .moves import FlipWalker, apply_reduction, find_reduction
from .tensors import (
    Dims,
    Mode,
    Scheme,
    canonicalize,
    definitional_terms,
    label_index,
    residual,
    slot_labels,
    standard_scheme,
    verify,
)

log = logging.getLogger(__name__)

# (plus_interval, plus_cap) per mode
PLUS_DEFAULTS = {
    Mode.STANDARD: (10_000, 8),
    Mode.MARAKOV: (10_000, 8),
    Mode.COMMUTATIVE: (1_000, 12),
}


@dataclass
class SearchParams:
    max_iterations: int = 1_000_000
    plus_interval: int | None = None  # None: mode default
    plus_cap: int | None = None  # None: mode default
    target_rank: int | None = None
    seed: int = 0
    restarts: int = 0
    walkers: int = 1
    merge: bool = True
    full_reduction: bool = False
    check_every: int = 0
    checkpoint: str | None = None
    progress_every: float = 2.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.plus_interval is not None and self.plus_interval < 1:
            raise ValueError("plus_interval must be >= 1")
        if self.plus_cap is not None and self.plus_cap < 0:
            raise ValueError("plus_cap must be >= 0")
        if self.walkers < 1:
            raise ValueError("walkers must be >= 1")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")

    def plus_schedule(self, mode: Mode) -> tuple[int, int]:
        interval, cap = PLUS_DEFAULTS[Mode(mode)]
        return (
            interval if self.plus_interval is None else self.plus_interval,
            cap if self.plus_cap is None else self.plus_cap,
        )


@dataclass
class SearchReport:
    best_scheme: Scheme
    best_rank: int
    iterations_used: int
    wall_time: float
    walker_id: int
    rng_seed: int
    interrupted: bool = False
    history: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self, timing: bool = True) -> dict:
        s = self.best_scheme
        out = {
            "mode": str(s.mode),
            "dims": list(s.dims),
            "best_rank": self.best_rank,
            "iterations_used": self.iterations_used,
            "walker_id": self.walker_id,
            "rng_seed": self.rng_seed,
            "interrupted": self.interrupted,
            "history": [list(h) for h in self.history],
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)


class UnverifiedSchemeError(ValueError):
    pass


def derive_seed(seed: int, walker_id: int) -> int:
    """Independent 64-bit seed for a walker, via numpy's SeedSequence spawning."""
    ss = np.random.SeedSequence(seed, spawn_key=(walker_id,))
    return int(ss.generate_state(1, np.uint64)[0])


def make_walker(scheme: Scheme, rng: random.Random, merge: bool = True):
    if scheme.mode is Mode.COMMUTATIVE:
        return CommFlipWalker(scheme, rng, merge=merge)
    return FlipWalker(scheme, rng, merge=merge)


def _require_verified(s: Scheme, what: str = "start scheme"):
    bad = residual(s)
    if len(bad):
        raise UnverifiedSchemeError(
            f"{what} does not sum to the {s.mode} ({','.join(map(str, s.dims))}) target "
            f"({len(bad)} wrong coordinates)"
        )


def adaptive_search(
    start: Scheme,
    params: SearchParams,
    *,
    walker_id: int = 0,
    rng_seed: int | None = None,
    progress: Callable[[dict], None] | None = None,
    on_improve: Callable[[Scheme], None] | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> SearchReport:
    """Random walk on the adaptive flip graph from ``start``.

    Each iteration applies a random flip (or a plus when no flip exists) and,
    with probability ``1/plus_interval``, a plus as long as the rank does not
    exceed ``best + plus_cap``.  Zero terms and mergeable pairs are reduced
    as soon as a move creates them.  The budget is split into
    ``restarts + 1`` segments; each segment walks afresh from ``start``
    while the best scheme is kept across segments.
    """
    _require_verified(start)
    t0 = time.perf_counter()
    seed = params.seed if rng_seed is None else rng_seed
    rng = random.Random(seed)
    rnd = rng.random
    interval, cap = params.plus_schedule(start.mode)
    p_plus = 1.0 / interval
    target = params.target_rank

    walker = make_walker(start, rng, params.merge)
    best = walker.snapshot()
    best_rank = best.rank
    history = [(0, best_rank)]
    if on_improve is not None:
        on_improve(best)

    segments = params.restarts + 1
    seg_len = [params.max_iterations // segments] * segments
    seg_len[-1] += params.max_iterations - sum(seg_len)
    it = 0
    interrupted = False
    last_progress = t0
    done = target is not None and best_rank <= target

    try:
        for seg, n_iter in enumerate(seg_len):
            if done:
                break
            if seg:
                walker = make_walker(start, rng, params.merge)
            seg_end = it + n_iter
            while it < seg_end:
                # inner loop runs without the bookkeeping below
                chunk_end = min(seg_end, it + 1024)
                while it < chunk_end:
                    it += 1
                    if not walker.random_flip():
                        if not walker.plus():
                            break
                    r = walker.rank
                    if r < best_rank:
                        break
                    if rnd() < p_plus and r <= best_rank + cap:
                        walker.plus()
                r = walker.rank
                if r < best_rank:
                    snap = walker.snapshot()
                    _require_verified(snap, "walk state")
                    best, best_rank = snap, r
                    history.append((it, r))
                    if on_improve is not None:
                        on_improve(best)
                    if target is not None and r <= target:
                        done = True
                        break
                elif not walker.can_flip() and walker.rank < 2:
                    break
                if params.full_reduction:
                    snap = walker.snapshot()
                    found = find_reduction(snap) if snap.mode is not Mode.COMMUTATIVE else None
                    if found is not None:
                        walker = make_walker(apply_reduction(snap, *found), rng, params.merge)
                        continue
                if params.check_every and it % params.check_every < 1024:
                    walker.check()
                    _require_verified(walker.snapshot(), "walk state")
                if should_stop is not None and should_stop():
                    done = True
                    break
                if progress is not None:
                    now = time.perf_counter()
                    if now - last_progress >= params.progress_every:
                        last_progress = now
                        progress(
                            {
                                "walker": walker_id,
                                "iteration": it,
                                "rank": walker.rank,
                                "best_rank": best_rank,
                                "elapsed": round(now - t0, 3),
                            }
                        )
            if done:
                break
    except KeyboardInterrupt:
        interrupted = True

    _require_verified(best, "best scheme")
    return SearchReport(
        best_scheme=best,
        best_rank=best_rank,
        iterations_used=it,
        wall_time=time.perf_counter() - t0,
        walker_id=walker_id,
        rng_seed=seed,
        interrupted=interrupted,
        history=history,
    )


# -- starting points ----------------------------------------------------------

_AXES = {"l": 0, "m": 1, "n": 2}


def _relabel(x: int, src: list, dst_index: dict) -> int:
    out = 0
    i = 0
    while x:
        if x & 1:
            out |= 1 << dst_index[src[i]]
        x >>= 1
        i += 1
    return out


def extend_scheme(s: Scheme, axis: str) -> Scheme:
    """Embed an ``(l, m, n)`` scheme into a size one larger along ``axis``.

    The standard terms that involve the new row/column index are appended,
    so the rank grows by ``m*n``, ``l*n`` or ``l*m`` for axes l, m, n.
    """
    if axis not in _AXES:
        raise ValueError(f"axis must be one of l, m, n, got {axis!r}")
    _require_verified(s, "scheme to extend")
    ax = _AXES[axis]
    big = list(s.dims)
    big[ax] += 1
    big = Dims(*big)
    old = slot_labels(s.mode, s.dims)
    new = [label_index(x) for x in slot_labels(s.mode, big)]
    terms = [tuple(_relabel(t[k], old[k], new[k]) for k in range(3)) for t in s.terms]
    if s.mode is Mode.COMMUTATIVE:
        terms = [canonicalize(t) for t in terms]
    # definitional_terms iterates i, j, k in order; keep those using the new index
    ijk = [(i, j, k) for i in range(big.l) for j in range(big.m) for k in range(big.n)]
    for (i, j, k), t in zip(ijk, definitional_terms(s.mode, big)):
        if (i, j, k)[ax] == big[ax] - 1:
            terms.append(t)
    out = Scheme(s.mode, big, terms)
    _require_verified(out, "extended scheme")
    return out


def to_commutative(s: Scheme) -> Scheme:
    """Reinterpret a standard or Marakov-like scheme over the commutative U1 space."""
    if s.mode is Mode.COMMUTATIVE:
        return s.copy()
    s1, s2, s3 = slot_labels(s.mode, s.dims)
    u1 = label_index(slot_labels(Mode.COMMUTATIVE, s.dims)[0])
    terms = [
        canonicalize((_relabel(t[0], s1, u1), _relabel(t[1], s2, u1), t[2])) for t in s.terms
    ]
    return Scheme(Mode.COMMUTATIVE, s.dims, terms)


def marakov_to_commutative(s: Scheme) -> Scheme:
    if s.mode is not Mode.MARAKOV:
        raise ValueError(f"expected a marakov scheme, got {s.mode}")
    _require_verified(s, "marakov scheme")
    out = to_commutative(s)
    _require_verified(out, "converted scheme")
    return out


# -- pipelines ----------------------------------------------------------------


def split_budget(params: SearchParams, marakov_share: float = 0.25) -> tuple[SearchParams, SearchParams]:
    """Split one budget into Marakov and commutative stage parameters."""
    first = max(1, int(params.max_iterations * marakov_share))
    second = max(1, params.max_iterations - first)
    p_m = replace(params, max_iterations=first, plus_interval=None, plus_cap=None, target_rank=None)
    p_c = replace(params, max_iterations=second, seed=derive_seed(params.seed, 1 << 20))
    return p_m, p_c


def combined_search(
    dims: Dims,
    params_marakov: SearchParams,
    params_comm: SearchParams,
    *,
    start: Scheme | None = None,
    progress=None,
    on_improve=None,
) -> SearchReport:
    """Marakov-like walk, conversion, then a commutative walk from its best scheme."""
    dims = Dims(*dims)
    if start is None:
        start = standard_scheme(dims, Mode.MARAKOV)
    first = parallel_search(start, params_marakov, progress=progress)
    log.info("marakov stage: rank %d after %d iterations", first.best_rank, first.iterations_used)
    conv = marakov_to_commutative(first.best_scheme)
    second = parallel_search(conv, params_comm, progress=progress, on_improve=on_improve)
    second.iterations_used += first.iterations_used
    second.wall_time += first.wall_time
    return second


# -- parallel walkers ---------------------------------------------------------

_shared: dict = {}


def _init_worker(best_value, lock, target, checkpoint):
    _shared.update(best=best_value, lock=lock, target=target, checkpoint=checkpoint)


def _publish(scheme: Scheme):
    best, lock = _shared["best"], _shared["lock"]
    with lock:
        if scheme.rank < best.value:
            best.value = scheme.rank
            if _shared["checkpoint"]:
                from .scheme_io import save_scheme

                save_scheme(scheme, _shared["checkpoint"])


def _global_target_met() -> bool:
    target = _shared["target"]
    return target is not None and _shared["best"].value <= target


def _walker_main(start: Scheme, params: SearchParams, walker_id: int, seed: int) -> SearchReport:
    return adaptive_search(
        start,
        params,
        walker_id=walker_id,
        rng_seed=seed,
        on_improve=_publish,
        should_stop=_global_target_met,
    )


def parallel_search(
    start: Scheme | Dims,
    params: SearchParams,
    mode: Mode | str | None = None,
    *,
    progress=None,
    on_improve=None,
) -> SearchReport:
    """Run ``params.walkers`` independent walks and return the best report.

    With a single walker the walk runs in-process and is fully determined by
    ``params.seed``.  Walker ``i`` of a pool uses ``derive_seed(seed, i)``.
    """
    if not isinstance(start, Scheme):
        start = standard_scheme(Dims(*start), Mode(mode or Mode.STANDARD))
    _require_verified(start)

    if params.walkers == 1:
        def improve(s):
            if params.checkpoint:
                from .scheme_io import save_scheme

                save_scheme(s, params.checkpoint)
            if on_improve is not None:
                on_improve(s)

        return adaptive_search(start, params, progress=progress, on_improve=improve)

    ctx = mp.get_context()
    best_value = ctx.Value("i", start.rank + 1)
    lock = ctx.Lock()
    seeds = [derive_seed(params.seed, i) for i in range(params.walkers)]
    with ProcessPoolExecutor(
        max_workers=params.walkers,
        mp_context=ctx,
        initializer=_init_worker,
        initargs=(best_value, lock, params.target_rank, params.checkpoint),
    ) as pool:
        futures = [pool.submit(_walker_main, start, params, i, s) for i, s in enumerate(seeds)]
        reports = [f.result() for f in futures]
    best = min(reports, key=lambda r: (r.best_rank, r.walker_id))
    best.iterations_used = sum(r.iterations_used for r in reports)
    if on_improve is not None:
        on_improve(best.best_scheme)
    return best


def default_walkers() -> int:
    env = os.environ.get("FLIPSEARCH_THREADS")
    if env:
        return max(1, int(env))
    return 1


__all__ = [
    "SearchParams",
    "SearchReport",
    "UnverifiedSchemeError",
    "adaptive_search",
    "combined_search",
    "derive_seed",
    "extend_scheme",
    "marakov_to_commutative",
    "parallel_search",
    "split_budget",
    "to_commutative",
]
