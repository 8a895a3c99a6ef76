"""Target tensors, starting schemes and the dense verification oracle.

Basis orderings (shared by every module and by the scheme file format):

* a-basis ``a_ij`` row-major over ``i < l, j < m``; b-basis ``b_jk`` row-major
  over ``j < m, k < n``; c-basis ``c_ki`` row-major over ``k < n, i < l``.
* Commutative mode: slot one is ``U1`` (a-basis followed by b-basis), the
  second factor lives in the same space, slot three is the c-basis.
* Marakov mode: slot one holds the a's with odd column index (1-based)
  followed by the b's with even row index; slot two holds the a's with even
  column index followed by the b's with odd row index.

Labels are ``(letter, r, s)`` tuples with 1-based indices, e.g. ``("a", 1, 2)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .gf2 import BitVec, bits_of


class Mode(str, enum.Enum):
    STANDARD = "standard"
    MARAKOV = "marakov"
    COMMUTATIVE = "commutative"

    def __str__(self) -> str:
        return self.value


class Dims(NamedTuple):
    l: int
    m: int
    n: int

    def check(self) -> Dims:
        if min(self) < 1:
            raise ValueError(f"dimensions must be positive: {tuple(self)}")
        return self


class RankOneTensor(NamedTuple):
    u: int
    v: int
    w: int


class CommRankOne(NamedTuple):
    """Unordered pair ``{p, q}`` over U1 times ``w`` over the c-space.

    Canonical form keeps ``p <= q`` in the packed integer order.
    """

    p: int
    q: int
    w: int


Label = tuple[str, int, int]


def a_labels(d: Dims) -> list[Label]:
    return [("a", i, j) for i in range(1, d.l + 1) for j in range(1, d.m + 1)]


def b_labels(d: Dims) -> list[Label]:
    return [("b", j, k) for j in range(1, d.m + 1) for k in range(1, d.n + 1)]


def c_labels(d: Dims) -> list[Label]:
    return [("c", k, i) for k in range(1, d.n + 1) for i in range(1, d.l + 1)]


def slot_labels(mode: Mode, dims: Dims) -> tuple[list[Label], list[Label], list[Label]]:
    """Basis labels of the three slot spaces of ``mode``."""
    mode = Mode(mode)
    d = Dims(*dims)
    a, b, c = a_labels(d), b_labels(d), c_labels(d)
    if mode is Mode.STANDARD:
        return a, b, c
    if mode is Mode.COMMUTATIVE:
        return a + b, a + b, c
    s1 = [x for x in a if x[2] % 2 == 1] + [x for x in b if x[1] % 2 == 0]
    s2 = [x for x in a if x[2] % 2 == 0] + [x for x in b if x[1] % 2 == 1]
    return s1, s2, c


def slot_dims(mode: Mode, dims: Dims) -> tuple[int, int, int]:
    return tuple(len(x) for x in slot_labels(mode, dims))


def label_index(labels: list[Label]) -> dict[Label, int]:
    return {x: i for i, x in enumerate(labels)}


def definitional_terms(mode: Mode, dims: Dims) -> list[tuple[int, int, int]]:
    """Unit-vector summands of the target, one per ``(i, j, k)``, in i-j-k order."""
    mode = Mode(mode)
    d = Dims(*dims).check()
    s1, s2, s3 = (label_index(x) for x in slot_labels(mode, d))
    out = []
    for i in range(1, d.l + 1):
        for j in range(1, d.m + 1):
            for k in range(1, d.n + 1):
                a, b, c = ("a", i, j), ("b", j, k), ("c", k, i)
                if mode is Mode.MARAKOV and j % 2 == 0:
                    a, b = b, a
                x, y = 1 << s1[a], 1 << s2[b]
                if mode is Mode.COMMUTATIVE and x > y:
                    x, y = y, x
                out.append((x, y, 1 << s3[c]))
    return out


@dataclass
class Scheme:
    mode: Mode
    dims: Dims
    terms: list = field(default_factory=list)

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.dims = Dims(*self.dims).check()
        cls = CommRankOne if self.mode is Mode.COMMUTATIVE else RankOneTensor
        self.terms = [cls(*t) for t in self.terms]

    @property
    def rank(self) -> int:
        return len(self.terms)

    @property
    def slot_dims(self) -> tuple[int, int, int]:
        return slot_dims(self.mode, self.dims)

    def copy(self) -> Scheme:
        return Scheme(self.mode, self.dims, list(self.terms))

    def sorted(self) -> Scheme:
        return Scheme(self.mode, self.dims, sorted(self.terms))

    def __len__(self) -> int:
        return len(self.terms)


def canonicalize(t: CommRankOne | tuple) -> CommRankOne:
    p, q, w = t
    return CommRankOne(p, q, w) if p <= q else CommRankOne(q, p, w)


def standard_scheme(dims: Dims, mode: Mode = Mode.STANDARD) -> Scheme:
    """The rank ``l*m*n`` scheme that spells out the target term by term."""
    return Scheme(mode, dims, definitional_terms(mode, dims))


def strassen_scheme() -> Scheme:
    """Strassen's seven products over GF(2), as a (2,2,2) standard scheme."""
    d = Dims(2, 2, 2)
    ia, ib, ic = (label_index(x) for x in slot_labels(Mode.STANDARD, d))

    def vec(index, *labels):
        return sum(1 << index[(lab[0], int(lab[1]), int(lab[2]))] for lab in labels)

    rows = [
        (("a11", "a22"), ("b11", "b22"), ("c11", "c22")),
        (("a21", "a22"), ("b11",), ("c12", "c22")),
        (("a11",), ("b12", "b22"), ("c21", "c22")),
        (("a12", "a22"), ("b21", "b22"), ("c11",)),
        (("a12", "a11"), ("b22",), ("c21", "c11")),
        (("a22",), ("b21", "b11"), ("c12", "c11")),
        (("a21", "a11"), ("b12", "b11"), ("c22",)),
    ]
    terms = [tuple(vec(ix, *names) for ix, names in zip((ia, ib, ic), row)) for row in rows]
    return Scheme(Mode.STANDARD, d, terms)


# -- dense oracle -------------------------------------------------------------


@dataclass
class DenseTarget:
    """Dense 0/1 array; shape ``(d1, d2, d3)`` or ``(d1*(d1+1)//2, d3)`` when commutative."""

    mode: Mode
    dims: Dims
    data: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, DenseTarget):
            return NotImplemented
        return (self.mode, self.dims) == (other.mode, other.dims) and np.array_equal(
            self.data, other.data
        )

    def nonzero(self) -> int:
        return int(np.count_nonzero(self.data))


def _bit_matrix(values, dim: int) -> np.ndarray:
    out = np.zeros((len(values), dim), dtype=np.int64)
    for r, x in enumerate(values):
        for i in bits_of(int(x)):
            out[r, i] = 1
    return out


def _sym_fold(full: np.ndarray) -> np.ndarray:
    """Fold a ``(d1, d1, d3)`` array onto symmetric pairs ``i <= j``."""
    d1 = full.shape[0]
    iu, ju = np.triu_indices(d1)
    folded = full[iu, ju] + full[ju, iu]
    diag = iu == ju
    folded[diag] = full[iu[diag], iu[diag]]
    return folded % 2


def sym_pair_index(i: int, j: int, d1: int) -> int:
    """Row of the symmetric pair ``e_i e_j`` in the folded layout."""
    if i > j:
        i, j = j, i
    return i * d1 - i * (i - 1) // 2 + (j - i)


def sym_pair_labels(d1: int) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(d1)
    return list(zip(iu.tolist(), ju.tolist()))


def _as_int(x) -> int:
    return x.bits if isinstance(x, BitVec) else int(x)


def dense_sum(mode: Mode, dims: Dims, terms) -> DenseTarget:
    """GF(2) sum of the dense embeddings of ``terms``."""
    mode = Mode(mode)
    dims = Dims(*dims)
    d1, d2, d3 = slot_dims(mode, dims)
    terms = list(terms)
    cols = list(zip(*terms)) if terms else ((), (), ())
    U = _bit_matrix(cols[0], d1)
    V = _bit_matrix(cols[1], d2)
    W = _bit_matrix(cols[2], d3)
    # float matmul hits BLAS; entries are small integer counts so stay exact
    uv = (U[:, :, None] * V[:, None, :]).reshape(len(terms), d1 * d2).astype(np.float64)
    full = (uv.T @ W.astype(np.float64)).astype(np.int64).reshape(d1, d2, d3) % 2
    data = _sym_fold(full) if mode is Mode.COMMUTATIVE else full
    return DenseTarget(mode, dims, data.astype(np.uint8))


def sym_embed(p, q, w, d1: int, d3: int) -> np.ndarray:
    """Dense symmetric-square image of the commutative term ``{p, q} x w``."""
    P = _bit_matrix([_as_int(p)], d1)[0]
    Q = _bit_matrix([_as_int(q)], d1)[0]
    W = _bit_matrix([_as_int(w)], d3)[0]
    full = np.einsum("i,j,k->ijk", P, Q, W)
    return _sym_fold(full).astype(np.uint8)


def _target(mode: Mode, dims: Dims) -> DenseTarget:
    return dense_sum(mode, dims, definitional_terms(mode, dims))


def standard_target(dims: Dims) -> DenseTarget:
    return _target(Mode.STANDARD, dims)


def marakov_target(dims: Dims) -> DenseTarget:
    return _target(Mode.MARAKOV, dims)


def commutative_target(dims: Dims) -> DenseTarget:
    return _target(Mode.COMMUTATIVE, dims)


_TARGET_CACHE: dict[tuple[Mode, Dims], DenseTarget] = {}


def target(mode: Mode, dims: Dims) -> DenseTarget:
    key = (Mode(mode), Dims(*dims))
    if key not in _TARGET_CACHE:
        _TARGET_CACHE[key] = _target(*key)
    return _TARGET_CACHE[key]


def residual(scheme: Scheme) -> np.ndarray:
    """Coordinates where the scheme's sum differs from its target."""
    got = dense_sum(scheme.mode, scheme.dims, scheme.terms).data
    return np.argwhere(got != target(scheme.mode, scheme.dims).data)


def verify(scheme: Scheme) -> bool:
    return len(residual(scheme)) == 0


def coordinate_name(scheme: Scheme, coord) -> str:
    """Human-readable name of a dense coordinate, e.g. ``a_11*b_12*c_21``."""
    s1, s2, s3 = slot_labels(scheme.mode, scheme.dims)

    def fmt(lab):
        return f"{lab[0]}_{lab[1]}{lab[2]}"

    if scheme.mode is Mode.COMMUTATIVE:
        i, j = sym_pair_labels(len(s1))[coord[0]]
        return f"{fmt(s1[i])}*{fmt(s1[j])}*{fmt(s3[coord[1]])}"
    return "*".join(fmt(lab[c]) for lab, c in zip((s1, s2, s3), coord))
