"""Exact hafnian / loop-hafnian computation and benchmarking."""

from .engine import (
    EngineOptions,
    exp_coefficient,
    hafnian,
    inner_series,
    loop_correction_vector,
    loop_hafnian,
    reduce_terms,
    subset_term,
)
from .kernels import kernel_mode, set_kernel_mode
from .lowrank import LowRankFactor, expand_product, hafnian_lowrank
from .matrix import (
    ComplexSymmetricMatrix,
    PairSubset,
    pair_submatrix,
    pair_swap,
    read_matrix,
    split_diag_offdiag,
    validate_or_symmetrize,
    write_matrix,
)
from .oracle import (
    double_factorial,
    hafnian_bruteforce,
    loop_hafnian_bruteforce,
    matching_count_bruteforce,
    permanent_ryser,
    telephone,
)
from .powertrace import power_traces_charpoly, power_traces_spectral

__version__ = "0.1.0"

__all__ = [
    "ComplexSymmetricMatrix",
    "EngineOptions",
    "LowRankFactor",
    "PairSubset",
    "double_factorial",
    "exp_coefficient",
    "expand_product",
    "hafnian",
    "hafnian_bruteforce",
    "hafnian_lowrank",
    "inner_series",
    "kernel_mode",
    "loop_correction_vector",
    "loop_hafnian",
    "loop_hafnian_bruteforce",
    "matching_count_bruteforce",
    "pair_submatrix",
    "pair_swap",
    "permanent_ryser",
    "power_traces_charpoly",
    "power_traces_spectral",
    "read_matrix",
    "reduce_terms",
    "set_kernel_mode",
    "split_diag_offdiag",
    "subset_term",
    "telephone",
    "validate_or_symmetrize",
    "write_matrix",
]
