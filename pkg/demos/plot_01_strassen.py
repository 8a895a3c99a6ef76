"""
Strassen's scheme as a tensor decomposition
===========================================

Load the bundled rank-7 scheme, check it against the 2x2 multiplication
tensor and print it as an algorithm.
"""

from flipsearch import golden_path, read_scheme, render_algorithm, standard_scheme
from flipsearch.tensors import residual, verify

sf = read_scheme(golden_path("strassen_222"))
print("rank", sf.rank, "verified", sf.verified)

# each line of the file is one rank-one term u (x) v (x) w; bit i is basis element i
print(golden_path("strassen_222").read_text())

# the same as straight-line code over GF(2)
print(render_algorithm(sf.scheme))

# the schoolbook scheme has 8 terms and also sums to the target
naive = standard_scheme((2, 2, 2))
print("naive rank", naive.rank, verify(naive))

# dropping a term leaves a residual; list the wrong coordinates
broken = sf.scheme.copy()
broken.terms.pop()
print("coordinates off after dropping a term:", residual(broken).tolist())
