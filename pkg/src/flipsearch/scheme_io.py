"""Text interchange format for schemes, and rendering as explicit algorithms.

A scheme file is UTF-8 with LF line endings::

    mmscheme v1 standard 2 2 2 7 gf2
    1001 1001 1001
    ...

The header gives mode, l, m, n, rank and the field.  Each body line holds
the three factors of one term as 0/1 strings in the basis orders documented
in :mod:`flipsearch.tensors`; character ``i`` is the coefficient of basis
element ``i``.  Commutative terms are written in canonical order.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .gf2 import BitVec, bits_of
from .tensors import Dims, Mode, Scheme, canonicalize, slot_labels, verify

MAGIC = "mmscheme"
VERSION = "v1"
FIELD = "gf2"


class SchemeFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class SchemeFile:
    scheme: Scheme
    verified: bool
    version: str = VERSION

    @property
    def mode(self) -> Mode:
        return self.scheme.mode

    @property
    def dims(self) -> Dims:
        return self.scheme.dims

    @property
    def rank(self) -> int:
        return self.scheme.rank


def format_scheme(s: Scheme) -> str:
    d1, d2, d3 = s.slot_dims
    lines = [f"{MAGIC} {VERSION} {s.mode} {s.dims.l} {s.dims.m} {s.dims.n} {s.rank} {FIELD}"]
    for t in s.terms:
        if s.mode is Mode.COMMUTATIVE:
            t = canonicalize(t)
        lines.append(
            " ".join(BitVec(x, d).to_str() for x, d in zip(t, (d1, d2, d3)))
        )
    return "\n".join(lines) + "\n"


def write_scheme(s: Scheme, destination: str | os.PathLike | IO[str]) -> SchemeFile:
    """Serialize ``s``; refuses schemes that do not verify."""
    if not verify(s):
        raise ValueError("refusing to write a scheme that does not verify")
    text = format_scheme(s)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_bytes(text.encode("utf-8"))
    return SchemeFile(s, True)


def save_scheme(s: Scheme, path: str | os.PathLike) -> None:
    """Atomically replace ``path`` with ``s`` (used for checkpoints)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            write_scheme(s, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_scheme(text: str) -> SchemeFile:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SchemeFormatError("empty file", 1)
    head = lines[0].split()
    if len(head) != 8 or head[0] != MAGIC:
        raise SchemeFormatError(f"bad header {lines[0]!r}", 1)
    if head[1] != VERSION:
        raise SchemeFormatError(f"unsupported format version {head[1]!r}", 1)
    try:
        mode = Mode(head[2])
    except ValueError:
        raise SchemeFormatError(f"unknown mode {head[2]!r}", 1) from None
    try:
        l, m, n, rank = (int(x) for x in head[3:7])
    except ValueError:
        raise SchemeFormatError("dimensions and rank must be integers", 1) from None
    if min(l, m, n) < 1 or rank < 0:
        raise SchemeFormatError("dimensions must be positive", 1)
    if head[7] != FIELD:
        raise SchemeFormatError(f"unsupported field {head[7]!r}", 1)
    dims = Dims(l, m, n)
    sizes = Scheme(mode, dims).slot_dims
    body = lines[1:]
    if len(body) != rank:
        raise SchemeFormatError(f"header says rank {rank} but file has {len(body)} terms", len(lines))
    terms = []
    for lineno, line in enumerate(body, start=2):
        toks = line.split()
        if len(toks) != 3:
            raise SchemeFormatError(f"expected 3 factors, got {len(toks)}", lineno)
        vals = []
        for tok, size in zip(toks, sizes):
            if len(tok) != size:
                raise SchemeFormatError(f"factor {tok!r} has length {len(tok)}, expected {size}", lineno)
            try:
                vals.append(BitVec.from_str(tok).bits)
            except ValueError as e:
                raise SchemeFormatError(str(e), lineno) from None
        terms.append(canonicalize(vals) if mode is Mode.COMMUTATIVE else tuple(vals))
    s = Scheme(mode, dims, terms)
    return SchemeFile(s, verify(s))


def read_scheme(source: str | os.PathLike | IO[str]) -> SchemeFile:
    """Parse a scheme file; ``.verified`` tells whether it sums to its target."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        raw = Path(source).read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SchemeFormatError(f"not UTF-8: {e}") from None
    return parse_scheme(text)


def load_scheme(path) -> Scheme:
    return read_scheme(path).scheme


def golden_path(name: str = "strassen_222") -> Path:
    return Path(__file__).parent / "data" / f"{name}.mmscheme"


# -- rendering ----------------------------------------------------------------


def _var(label) -> str:
    letter, r, s = label
    return f"{letter.upper()}_{r}{s}"


def render_algorithm(s: Scheme) -> str:
    """Write ``s`` as products ``m_p = (...)(...)`` and outputs ``C_ik = ...``.

    Output ``C_ik`` collects the products whose third factor contains
    ``c_ki``.  Signs are dropped (everything is over GF(2)).
    """
    if not verify(s):
        raise ValueError("refusing to render a scheme that does not verify")
    s1, s2, s3 = slot_labels(s.mode, s.dims)
    lines = []
    outputs: dict[tuple[int, int], list[int]] = {}
    for p, t in enumerate(s.terms, start=1):
        f1 = " + ".join(_var(s1[i]) for i in bits_of(t[0]))
        f2 = " + ".join(_var(s2[i]) for i in bits_of(t[1]))
        lines.append(f"m_{p} = ({f1})({f2})")
        for i in bits_of(t[2]):
            _, k, row = s3[i]
            outputs.setdefault((row, k), []).append(p)
    for i in range(1, s.dims.l + 1):
        for k in range(1, s.dims.n + 1):
            prods = outputs.get((i, k))
            rhs = " + ".join(f"m_{p}" for p in prods) if prods else "0"
            lines.append(f"C_{i}{k} = {rhs}")
    return "\n".join(lines) + "\n"


def scheme_to_string(s: Scheme) -> str:
    buf = io.StringIO()
    write_scheme(s, buf)
    return buf.getvalue()
