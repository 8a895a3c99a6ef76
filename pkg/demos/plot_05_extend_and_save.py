"""
Growing a scheme and saving it
==============================

Extend Strassen to (2,2,3) in the commutative setting, search down from
the extended start, then write and reread the result.
"""

import tempfile
from pathlib import Path

from flipsearch import SearchParams, adaptive_search, extend_scheme, read_scheme, write_scheme
from flipsearch.search import to_commutative
from flipsearch.tensors import strassen_scheme

start = extend_scheme(to_commutative(strassen_scheme()), "n")
print("extended start", tuple(start.dims), "rank", start.rank)

r = adaptive_search(start, SearchParams(max_iterations=300_000, target_rank=10, seed=1))
print("after search rank", r.best_rank)

with tempfile.TemporaryDirectory() as d:
    path = Path(d) / "c223.mmscheme"
    write_scheme(r.best_scheme, path)
    print(path.read_text())
    back = read_scheme(path)
    print("reread verified", back.verified, "equal", back.scheme == r.best_scheme)
