"""
Closed-form commutative upper bounds
====================================

Tabulate the construction bound and its transposed improvement for all
sizes with 2 <= l <= n <= 5.
"""

import numpy as np

from flipsearch.bounds import results_table

rows = results_table(5)
arr = np.array([tuple(r) for r in rows])
print(" l  m  n  base  improved")
for l, m, n, base, imp in arr:
    mark = " *" if imp < base else ""
    print(f"{l:2d} {m:2d} {n:2d} {base:5d} {imp:9d}{mark}")

# fraction of sizes where transposing helps
print("improved in", int((arr[:, 4] < arr[:, 3]).sum()), "of", len(arr), "sizes")
