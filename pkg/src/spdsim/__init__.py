"""Simulation of SPD matrices whose zeros follow an undirected graph."""

__version__ = "0.1.0"

from .errors import ConsistencyError, DomainError, FormatError, NumericalError, ParameterError
from .graph import UndirectedGraph, erdos_renyi, is_adjacent, nonadjacent_predecessors
from .linalg import condition_number, gram, is_spd, project, sym_eigenvalues
from .matgen import (
    Distribution,
    Method,
    SimConfig,
    SpdResult,
    cond_shift,
    diag_dominance,
    eig_shift,
    partial_orth,
    random_constrained_sym,
    simulate,
)
from .metrics import MatrixStats, dd_ratio_bound, max_ratio, ratio_matrix, summarize
