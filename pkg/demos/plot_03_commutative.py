"""
Commutative schemes and the combined pipeline
=============================================

When the entries commute, a product a*b equals b*a, so terms live in the
symmetric square.  A walk in Marakov-like mode gives a good start for the
commutative walk.
"""

from flipsearch import (
    SearchParams,
    adaptive_search,
    combined_search,
    marakov_to_commutative,
    standard_scheme,
)
from flipsearch.bounds import improved_bound
from flipsearch.tensors import Mode

# plain commutative walk, (2,3,2) has bound 11
r = adaptive_search(
    standard_scheme((2, 3, 2), Mode.COMMUTATIVE),
    SearchParams(max_iterations=200_000, target_rank=11, seed=3),
)
print("(2,3,2) commutative rank", r.best_rank, "bound", improved_bound(2, 3, 2))

# Marakov-like schemes convert term by term
m = standard_scheme((3, 3, 3), Mode.MARAKOV)
print("converted rank", marakov_to_commutative(m).rank)

# combined: Marakov walk, convert, commutative walk
p_m = SearchParams(max_iterations=300_000, target_rank=15, seed=5, restarts=2)
p_c = SearchParams(max_iterations=300_000, target_rank=15, seed=6)
r = combined_search((2, 3, 3), p_m, p_c)
print("(2,3,3) combined rank", r.best_rank, "bound", improved_bound(2, 3, 3))
