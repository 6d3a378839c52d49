"""Undirected graphs over vertices ``1..p`` and Erdős–Rényi generation.

Vertices are 1-based at every public entry point. Internally the graph is a
dense symmetric boolean adjacency matrix, which is plenty for ``p`` up to a
few thousand.
"""

from __future__ import annotations

import io
import os
from typing import Iterable, TextIO

import numpy as np

from .errors import FormatError, ParameterError

__all__ = [
    "UndirectedGraph",
    "erdos_renyi",
    "is_adjacent",
    "nonadjacent_predecessors",
    "read_edgelist",
    "write_edgelist",
    "parse_edgelist",
    "format_edgelist",
]


class UndirectedGraph:
    """Immutable simple undirected graph on vertices ``1..p``.

    Parameters
    ----------
    p : int
        Number of vertices, at least 1.
    edges : iterable of (int, int)
        Unordered vertex pairs, 1-based. Order within a pair is irrelevant and
        duplicates are collapsed. Self-loops are rejected.
    """

    __slots__ = ("_p", "_adj", "_edges")

    def __init__(self, p: int, edges: Iterable[tuple[int, int]] = ()):
        p = _check_p(p)
        adj = np.zeros((p, p), dtype=bool)
        for pair in edges:
            i, j = (int(v) for v in pair)
            if i == j:
                raise ParameterError(f"self-loop {{{i}, {i}}} is not allowed")
            _check_vertex(p, i)
            _check_vertex(p, j)
            adj[i - 1, j - 1] = adj[j - 1, i - 1] = True
        self._init(p, adj)

    def _init(self, p, adj):
        adj.setflags(write=False)
        self._p = p
        self._adj = adj
        self._edges = None

    @classmethod
    def from_adjacency(cls, adjacency) -> "UndirectedGraph":
        """Build a graph from a square boolean matrix.

        Only the strict upper triangle is read; it is mirrored, so the result
        is symmetric even if the input is not.
        """
        a = np.asarray(adjacency, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"adjacency must be square, got shape {a.shape}")
        p = _check_p(a.shape[0])
        upper = np.triu(a, 1)
        g = cls.__new__(cls)
        g._init(p, upper | upper.T)
        return g

    @classmethod
    def empty(cls, p: int) -> "UndirectedGraph":
        return cls(p)

    @classmethod
    def complete(cls, p: int) -> "UndirectedGraph":
        p = _check_p(p)
        return cls.from_adjacency(~np.eye(p, dtype=bool))

    @property
    def p(self) -> int:
        return self._p

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only ``p x p`` boolean adjacency matrix (0-based indices)."""
        return self._adj

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        """Edge set as canonical 1-based pairs ``(i, j)`` with ``i < j``."""
        if self._edges is None:
            rows, cols = np.nonzero(np.triu(self._adj, 1))
            self._edges = frozenset(zip((rows + 1).tolist(), (cols + 1).tolist()))
        return self._edges

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(self._adj)) // 2

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def is_adjacent(self, i: int, j: int) -> bool:
        _check_vertex(self._p, i)
        _check_vertex(self._p, j)
        return bool(self._adj[i - 1, j - 1])

    def nonadjacent_predecessors(self, i: int) -> list[int]:
        _check_vertex(self._p, i)
        return (np.flatnonzero(~self._adj[i - 1, : i - 1]) + 1).tolist()

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self._p == other._p and np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self._p, np.packbits(self._adj).tobytes()))

    def __repr__(self):
        return f"UndirectedGraph(p={self._p}, n_edges={self.n_edges})"


def _check_p(p) -> int:
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ParameterError(f"vertex count must be a positive integer, got {p!r}")
    return int(p)


def _check_vertex(p, i):
    if isinstance(i, bool) or int(i) != i or not 1 <= i <= p:
        raise ParameterError(f"vertex {i!r} out of range 1..{p}")


def erdos_renyi(p: int, d: float, seed=None) -> UndirectedGraph:
    """Sample an Erdős–Rényi graph G(p, d).

    Each of the ``p(p-1)/2`` candidate edges is included independently with
    probability ``d``. Candidates are visited in row-major order of the
    strict upper triangle, consuming one uniform draw each, so the graph is a
    pure function of ``(p, d, seed)``.

    Parameters
    ----------
    p : int
        Number of vertices.
    d : float
        Edge probability in ``[0, 1]``. The endpoints give the empty and the
        complete graph.
    seed : int, numpy.random.Generator or None
        Anything accepted by :func:`numpy.random.default_rng`.
    """
    p = _check_p(p)
    d = float(d)
    if not 0.0 <= d <= 1.0:
        raise ParameterError(f"edge probability must lie in [0, 1], got {d!r}")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(p, 1)
    keep = rng.random(rows.size) < d
    adj = np.zeros((p, p), dtype=bool)
    adj[rows[keep], cols[keep]] = True
    return UndirectedGraph.from_adjacency(adj)


def is_adjacent(g: UndirectedGraph, i: int, j: int) -> bool:
    """True iff ``{i, j}`` is an edge of ``g``; always False for ``i == j``."""
    return g.is_adjacent(i, j)


def nonadjacent_predecessors(g: UndirectedGraph, i: int) -> list[int]:
    """Vertices ``j < i`` not adjacent to ``i``, in increasing order."""
    return g.nonadjacent_predecessors(i)


# -- edge-list text format ---------------------------------------------------
#
#   # optional comments
#   p 4
#   1 2
#   2 4


def format_edgelist(g: UndirectedGraph) -> str:
    lines = [f"p {g.p}"]
    lines.extend(f"{i} {j}" for i, j in g.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> UndirectedGraph:
    p = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if p is None:
            if len(fields) != 2 or fields[0] != "p":
                raise FormatError(f"line {lineno}: expected header 'p <int>', got {raw!r}")
            p = _parse_int(fields[1], lineno)
            continue
        if len(fields) != 2:
            raise FormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        i, j = (_parse_int(f, lineno) for f in fields)
        if not i < j:
            raise FormatError(f"line {lineno}: edge must satisfy i < j, got {i} {j}")
        edges.append((i, j))
    if p is None:
        raise FormatError("missing header 'p <int>'")
    try:
        return UndirectedGraph(p, edges)
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def _parse_int(s, lineno):
    try:
        return int(s)
    except ValueError:
        raise FormatError(f"line {lineno}: not an integer: {s!r}") from None


def write_edgelist(g: UndirectedGraph, dest: str | os.PathLike | TextIO) -> None:
    text = format_edgelist(g)
    if isinstance(dest, io.TextIOBase) or hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_edgelist(src: str | os.PathLike | TextIO) -> UndirectedGraph:
    if hasattr(src, "read"):
        return parse_edgelist(src.read())
    with open(src, encoding="utf-8") as fh:
        return parse_edgelist(fh.read())
