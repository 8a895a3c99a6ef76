"""Flip graph searches for commutative and non-commutative matrix
multiplication schemes over GF(2)."""

from .bounds import improved_bound, results_table, rosowski_bound
from .search import (
    SearchParams,
    SearchReport,
    adaptive_search,
    combined_search,
    extend_scheme,
    marakov_to_commutative,
    parallel_search,
)
from .scheme_io import golden_path, read_scheme, render_algorithm, save_scheme, write_scheme
from .tensors import Dims, Mode, Scheme, standard_scheme, strassen_scheme, verify

__version__ = "0.1.0"
