"""Random SPD matrices whose zero pattern follows an undirected graph.

Three families of generators:

* diagonal dominance: random off-diagonal entries on the edges of ``G``,
  diagonal set to the absolute row sum plus a positive perturbation;
* diagonal shifts of a random matrix in S(G), either lifting the minimum
  eigenvalue to ``epsilon`` or fixing the condition number to ``kappa0``;
* partial orthogonalization: a random factor ``Q`` whose rows are made
  orthogonal exactly for the non-adjacent pairs, returning ``Q Q^t``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import _mgs
from .errors import ConsistencyError, DomainError, NumericalError, ParameterError
from .graph import UndirectedGraph
from .linalg import gram, is_spd, sym_eigenvalues, write_matrix, zero_row_tol

__all__ = [
    "Method",
    "Distribution",
    "SimConfig",
    "SpdResult",
    "random_constrained_sym",
    "dominant_diagonal",
    "diag_dominance",
    "eig_shift",
    "cond_shift",
    "orthogonalize_row",
    "partial_orth",
    "simulate",
    "generate",
    "pattern_residual",
    "check_result",
    "write_result",
]


class Method(str, Enum):
    DIAG_DOMINANCE = "dd"
    EIG_SHIFT = "eigshift"
    COND_SHIFT = "condshift"
    PARTIAL_ORTH = "po"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        try:
            return _METHOD_ALIASES[key]
        except KeyError:
            names = ", ".join(m.value for m in cls)
            raise ParameterError(f"unknown method {value!r} (expected one of {names})") from None

    def __str__(self):
        return self.value


_METHOD_ALIASES = {
    "dd": Method.DIAG_DOMINANCE,
    "diagdominance": Method.DIAG_DOMINANCE,
    "diagdom": Method.DIAG_DOMINANCE,
    "eig": Method.EIG_SHIFT,
    "eigshift": Method.EIG_SHIFT,
    "cond": Method.COND_SHIFT,
    "condshift": Method.COND_SHIFT,
    "po": Method.PARTIAL_ORTH,
    "partialorth": Method.PARTIAL_ORTH,
}


@dataclass(frozen=True)
class Distribution:
    """Scalar distribution for random entries.

    ``kind`` is one of

    * ``"uniform"``: uniform on ``[a, b)``;
    * ``"uniform-open-low"``: uniform on ``(a, b]``;
    * ``"normal"``: normal with mean ``a`` and standard deviation ``b``.
    """

    kind: str = "uniform"
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "uniform-open-low", "normal"):
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ParameterError("distribution parameters must be finite")
        if self.kind == "normal":
            if self.b <= 0:
                raise ParameterError("normal standard deviation must be positive")
        elif not self.a < self.b:
            raise ParameterError(f"uniform bounds need a < b, got {self.a}, {self.b}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "uniform":
            return self.a + (self.b - self.a) * rng.random(size)
        if self.kind == "uniform-open-low":
            return self.b - (self.b - self.a) * rng.random(size)
        return rng.normal(self.a, self.b, size)

    @property
    def strictly_positive(self) -> bool:
        return self.kind == "uniform-open-low" and self.a >= 0 or self.kind == "uniform" and self.a > 0

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """Parse ``"kind:a:b"``, e.g. ``"uniform:-1:1"`` or ``"normal:0:1"``."""
        parts = str(text).split(":")
        if len(parts) != 3:
            raise ParameterError(f"distribution must look like 'kind:a:b', got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ParameterError(f"bad distribution {text!r}: {exc}") from None

    def __str__(self):
        return f"{self.kind}:{self.a!r}:{self.b!r}"


UNIFORM_01 = Distribution("uniform", 0.0, 1.0)
POSITIVE_PERTURBATION = Distribution("uniform-open-low", 0.0, 1.0)


@dataclass(frozen=True)
class SimConfig:
    """Generation settings.

    ``zero_tol`` is relative to the largest diagonal entry of the result:
    a non-edge entry passes when ``|m_ij| <= zero_tol * max_k m_kk``.
    """

    method: Method = Method.PARTIAL_ORTH
    entry_dist: Distribution = UNIFORM_01
    perturbation_dist: Distribution = POSITIVE_PERTURBATION
    epsilon: float = 1.0
    kappa0: float = 10.0
    seed: int | None = None
    zero_tol: float = 1e-8
    max_redraws: int = 10

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon!r}")
        if not self.kappa0 > 1:
            raise ParameterError(f"kappa0 must exceed 1, got {self.kappa0!r}")
        if not self.zero_tol >= 0:
            raise ParameterError(f"zero_tol must be nonnegative, got {self.zero_tol!r}")
        if not self.perturbation_dist.strictly_positive:
            raise ParameterError("perturbation distribution must be strictly positive")

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class SpdResult:
    """A generated matrix together with everything needed to reproduce it.

    ``pattern_residual`` is the largest ``|m_ij| / max_k m_kk`` over
    non-adjacent pairs measured before structural zeros were snapped to 0,
    and ``worst_pair`` the 1-based pair attaining it.
    """

    matrix: np.ndarray
    graph: UndirectedGraph
    method: Method
    seed: int | None
    zero_tol: float = 1e-8
    factor: np.ndarray | None = None
    pattern_residual: float = 0.0
    worst_pair: tuple[int, int] | None = None
    info: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


def _rng(cfg: SimConfig, rng):
    return rng if rng is not None else np.random.default_rng(cfg.seed)


# -- S(G) and diagonal dominance ---------------------------------------------


def random_constrained_sym(
    g: UndirectedGraph, cfg: SimConfig = SimConfig(), rng=None, *, random_diagonal: bool = False
) -> np.ndarray:
    """Random symmetric matrix supported on the edges of ``g``.

    One draw from ``cfg.entry_dist`` per edge, in canonical edge order. The
    diagonal is zero unless ``random_diagonal`` is set, in which case it is
    drawn from the same distribution after the off-diagonal entries.
    """
    rng = _rng(cfg, rng)
    p = g.p
    rows, cols = np.nonzero(np.triu(g.adjacency, 1))
    m = np.zeros((p, p))
    vals = cfg.entry_dist.sample(rng, rows.size)
    m[rows, cols] = vals
    m[cols, rows] = vals
    if random_diagonal:
        m[np.diag_indices(p)] = cfg.entry_dist.sample(rng, p)
    return m


def dominant_diagonal(m, delta) -> np.ndarray:
    """Copy of ``m`` with ``m_ii = sum_{j != i} |m_ij| + delta_i``."""
    m = np.array(m, dtype=np.float64)
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), (m.shape[0],))
    off = np.abs(m)
    np.fill_diagonal(off, 0.0)
    m[np.diag_indices_from(m)] = off.sum(axis=1) + delta
    return m


def diag_dominance(g: UndirectedGraph, cfg: SimConfig = SimConfig(), rng=None) -> SpdResult:
    rng = _rng(cfg, rng)
    m = random_constrained_sym(g, cfg, rng)
    delta = cfg.perturbation_dist.sample(rng, g.p)
    return SpdResult(
        matrix=dominant_diagonal(m, delta),
        graph=g,
        method=Method.DIAG_DOMINANCE,
        seed=cfg.seed,
        zero_tol=cfg.zero_tol,
        info={"delta": delta},
    )


# -- diagonal shifts ---------------------------------------------------------


def eig_shift(m, epsilon: float) -> np.ndarray:
    """``M + (max(0, -lambda_min) + epsilon) I``: every eigenvalue ends up ``>= epsilon``."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon!r}")
    m = np.array(m, dtype=np.float64)
    lam_min = sym_eigenvalues(m)[0]
    shift = max(0.0, -lam_min) + epsilon
    m[np.diag_indices_from(m)] += shift
    return m


def cond_shift(m, kappa0: float) -> np.ndarray:
    """``M + s I`` with ``s = (lambda_max - kappa0 lambda_min) / (kappa0 - 1)``.

    The result has spectral condition number ``kappa0``.
    """
    if not kappa0 > 1:
        raise ParameterError(f"kappa0 must exceed 1, got {kappa0!r}")
    m = np.array(m, dtype=np.float64)
    ev = sym_eigenvalues(m)
    lam_min, lam_max = ev[0], ev[-1]
    if lam_max <= 0:
        raise DomainError(f"condition shift needs lambda_max > 0, got {lam_max!r}")
    if lam_max == lam_min:
        raise DomainError("condition shift is undefined for a multiple of the identity")
    shift = (lam_max - kappa0 * lam_min) / (kappa0 - 1.0)
    m[np.diag_indices_from(m)] += shift
    return m


# -- partial orthogonalization -----------------------------------------------


def orthogonalize_row(q: np.ndarray, g: UndirectedGraph, i: int, tol: float | None = None) -> float:
    """Orthogonalize row ``i`` (1-based) of ``q`` in place against its non-neighbours.

    An orthogonal basis of ``span{q_j : j < i, j not adjacent to i}`` is
    rebuilt from scratch with modified Gram-Schmidt, then its projections are
    removed from ``q_i`` one at a time. The basis is discarded afterwards;
    the other rows of ``q`` are left as they are. Returns the new norm of
    ``q_i``.
    """
    if q.dtype != np.float64 or not q.flags.c_contiguous:
        raise ParameterError("factor must be a C-contiguous float64 array")
    preds = np.flatnonzero(~g.adjacency[i - 1, : i - 1]).astype(np.int64)
    if tol is None:
        tol = zero_row_tol(q)
    basis = np.empty((preds.size, q.shape[1]))
    sqnorm = np.empty(preds.size)
    return float(_mgs.orth_row(q, i - 1, preds, basis, sqnorm, tol))


def partial_orth(
    g: UndirectedGraph, cfg: SimConfig = SimConfig(), rng=None, *, factor=None
) -> SpdResult:
    """Partial-orthogonalization generator.

    Draws a ``p x p`` factor with i.i.d. ``cfg.entry_dist`` entries (or uses
    ``factor`` if given), processes rows ``1..p`` in order with
    :func:`orthogonalize_row`, and returns the Gram matrix of the processed
    factor. A row that becomes numerically zero is redrawn and processed
    again, at most ``cfg.max_redraws`` times.

    Non-edge entries below ``cfg.zero_tol`` (relative to the largest
    diagonal entry) are set to exactly 0 in the returned matrix.
    """
    rng = _rng(cfg, rng)
    p = g.p
    if factor is None:
        q = cfg.entry_dist.sample(rng, (p, p))
    else:
        q = np.array(factor, dtype=np.float64, order="C")
        if q.shape != (p, p):
            raise ParameterError(f"factor must be {p}x{p}, got {q.shape}")
    adj = g.adjacency
    tol = zero_row_tol(q)
    basis = np.empty((p, p))
    sqnorm = np.empty(p)
    redraws = 0
    for i in range(p):
        preds = np.flatnonzero(~adj[i, :i]).astype(np.int64)
        if preds.size == 0:
            continue
        attempts = 0
        while _mgs.orth_row(q, i, preds, basis, sqnorm, tol) <= tol:
            if attempts == cfg.max_redraws:
                raise NumericalError(
                    f"row {i + 1} stayed numerically zero after {attempts} redraws"
                )
            attempts += 1
            q[i] = cfg.entry_dist.sample(rng, p)
            tol = zero_row_tol(q)
        redraws += attempts

    m = gram(q)
    residual, worst = pattern_residual(m, g)
    _snap_zeros(m, g, cfg.zero_tol)
    return SpdResult(
        matrix=m,
        graph=g,
        method=Method.PARTIAL_ORTH,
        seed=cfg.seed,
        zero_tol=cfg.zero_tol,
        factor=q,
        pattern_residual=residual,
        worst_pair=worst,
        info={"redraws": redraws},
    )


def _snap_zeros(m, g, zero_tol):
    scale = m.diagonal().max(initial=0.0)
    off = ~g.adjacency
    np.fill_diagonal(off, False)
    m[off & (np.abs(m) <= zero_tol * scale)] = 0.0


# -- dispatch and validation -------------------------------------------------


def pattern_residual(m, g: UndirectedGraph) -> tuple[float, tuple[int, int] | None]:
    """Largest ``|m_ij| / max_k m_kk`` over non-adjacent ``i != j`` and its 1-based pair."""
    m = np.asarray(m)
    off = ~g.adjacency
    np.fill_diagonal(off, False)
    if not off.any():
        return 0.0, None
    vals = np.where(off, np.abs(m), -1.0)
    flat = int(np.argmax(vals))
    i, j = divmod(flat, m.shape[0])
    scale = m.diagonal().max(initial=0.0)
    worst = float(vals[i, j])
    rel = worst / scale if scale > 0 else (0.0 if worst == 0 else np.inf)
    return float(rel), (min(i, j) + 1, max(i, j) + 1)


def generate(g: UndirectedGraph, cfg: SimConfig = SimConfig(), rng=None) -> SpdResult:
    """Run the configured generator without validating the result."""
    rng = _rng(cfg, rng)
    method = cfg.method
    if method is Method.DIAG_DOMINANCE:
        return diag_dominance(g, cfg, rng)
    if method is Method.PARTIAL_ORTH:
        return partial_orth(g, cfg, rng)
    m = random_constrained_sym(g, cfg, rng, random_diagonal=True)
    if method is Method.EIG_SHIFT:
        out = eig_shift(m, cfg.epsilon)
    else:
        out = cond_shift(m, cfg.kappa0)
    return SpdResult(matrix=out, graph=g, method=method, seed=cfg.seed, zero_tol=cfg.zero_tol)


def check_result(result: SpdResult) -> None:
    """Raise :class:`ConsistencyError` unless ``result`` meets its invariants."""
    m = result.matrix
    if m.shape != (result.graph.p, result.graph.p):
        raise ConsistencyError(f"matrix shape {m.shape} does not match p={result.graph.p}")
    if not np.array_equal(m, m.T):
        raise ConsistencyError("matrix is not exactly symmetric")
    residual, pair = pattern_residual(m, result.graph)
    if result.pattern_residual > residual:
        residual, pair = result.pattern_residual, result.worst_pair
    if residual > result.zero_tol:
        raise ConsistencyError(
            f"non-edge entry {pair} has relative magnitude {residual:.3e} > {result.zero_tol:g}",
            where=pair,
        )
    if not is_spd(m):
        lam_min = float(sym_eigenvalues(m)[0])
        raise ConsistencyError(f"matrix is not SPD (lambda_min = {lam_min!r})", where=lam_min)


def simulate(g: UndirectedGraph, cfg: SimConfig = SimConfig(), rng=None) -> SpdResult:
    """Generate with the configured method and validate the result."""
    result = generate(g, cfg, rng)
    check_result(result)
    return result


# -- serialization -----------------------------------------------------------


def write_result(result: SpdResult, matrix_path, *, graph_path=None, extra: dict | None = None) -> str:
    """Write the matrix (Matrix Market) and a JSON manifest next to it.

    The manifest path is ``matrix_path`` with ``.json`` appended; it is
    returned.
    """
    matrix_path = os.fspath(matrix_path)
    comment = f"spdsim method={result.method.value} seed={result.seed} p={result.p}"
    write_matrix(matrix_path, result.matrix, comment=comment)
    manifest = {
        "method": result.method.value,
        "seed": result.seed,
        "p": result.p,
        "n_edges": result.graph.n_edges,
        "graph": os.fspath(graph_path) if graph_path is not None else None,
        "zero_tol": result.zero_tol,
        "pattern_residual": result.pattern_residual,
    }
    if extra:
        manifest.update(extra)
    manifest_path = matrix_path + ".json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
