"""
Random walk on the flip graph
=============================

Start from the 8-term schoolbook scheme and let flips and reductions find
a 7-term one.  Then look at a single flip by hand.
"""

import random

from flipsearch import SearchParams, adaptive_search, standard_scheme
from flipsearch.moves import apply_flip, find_flips, reduce_trivial

start = standard_scheme((2, 2, 2))
report = adaptive_search(start, SearchParams(max_iterations=100_000, target_rank=7, seed=1))
print("best rank", report.best_rank, "after", report.iterations_used, "iterations")
print("rank history (iteration, rank):", report.history)

# one flip by hand: two terms sharing a factor exchange parts of the others
s = standard_scheme((2, 2, 2))
cand = random.Random(0).choice(find_flips(s))
print("flip", cand)
after = reduce_trivial(apply_flip(s, cand))
print("rank before", s.rank, "after", after.rank)
