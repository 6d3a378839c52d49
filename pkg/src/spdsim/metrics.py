"""Link-strength and conditioning statistics of generated matrices.

The central quantity is the row-normalized ratio ``r_ij = |m_ij| / m_ii``
and its maximum ``R`` over all ordered off-diagonal positions. Because the
normalization uses the row's own diagonal, ``r_ij != r_ji`` in general.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .graph import UndirectedGraph
from .linalg import sym_eigenvalues
from .matgen import SpdResult, pattern_residual

__all__ = [
    "MatrixStats",
    "Summary",
    "ratio_matrix",
    "max_ratio",
    "dd_ratio_bound",
    "matrix_stats",
    "result_stats",
    "summarize",
]


def ratio_matrix(m) -> np.ndarray:
    """``r_ij = |m_ij| / m_ii`` for ``i != j``, zero on the diagonal."""
    m = np.asarray(m, dtype=np.float64)
    diag = m.diagonal()
    if np.any(diag <= 0):
        i = int(np.argmax(diag <= 0)) + 1
        raise DomainError(f"ratio needs a positive diagonal; m[{i},{i}] = {diag[i - 1]!r}")
    r = np.abs(m) / diag[:, None]
    np.fill_diagonal(r, 0.0)
    return r


def max_ratio(m) -> float:
    """``R = max_{i != j} |m_ij| / m_ii``."""
    return float(ratio_matrix(m).max(initial=0.0))


def dd_ratio_bound(p: int, d: float) -> float:
    """Asymptotic almost-sure bound ``2 / ((p - 1) d)`` on diagonal-dominance ratios.

    Valid for off-diagonal entries uniform on ``[0, 1]``.
    """
    if isinstance(p, bool) or int(p) != p or p < 2:
        raise ParameterError(f"p must be an integer >= 2, got {p!r}")
    if not 0 < d <= 1:
        raise ParameterError(f"d must lie in (0, 1], got {d!r}")
    return 2.0 / ((p - 1) * d)


@dataclass(frozen=True)
class MatrixStats:
    r_max: float
    cond: float
    min_eig: float
    pattern_ok: bool
    p: int
    d_nominal: float | None = None

    @property
    def spd(self) -> bool:
        return self.min_eig > 0


def matrix_stats(
    m,
    g: UndirectedGraph,
    zero_tol: float = 1e-8,
    d_nominal: float | None = None,
    *,
    residual: float = 0.0,
) -> MatrixStats:
    """Compute :class:`MatrixStats` for ``m`` generated on graph ``g``.

    ``residual`` lets callers fold in a pattern residual measured before
    structural zeros were snapped. ``cond`` is NaN when ``m`` is not SPD and
    ``r_max`` is NaN when the diagonal is not positive.
    """
    m = np.asarray(m, dtype=np.float64)
    ev = sym_eigenvalues(m)
    lam_min, lam_max = float(ev[0]), float(ev[-1])
    cond = lam_max / lam_min if lam_min > 0 else math.nan
    try:
        r = max_ratio(m)
    except DomainError:
        r = math.nan
    measured, _ = pattern_residual(m, g)
    return MatrixStats(
        r_max=r,
        cond=cond,
        min_eig=lam_min,
        pattern_ok=max(measured, residual) <= zero_tol,
        p=m.shape[0],
        d_nominal=d_nominal,
    )


def result_stats(result: SpdResult, d_nominal: float | None = None) -> MatrixStats:
    return matrix_stats(
        result.matrix,
        result.graph,
        result.zero_tol,
        d_nominal,
        residual=result.pattern_residual,
    )


@dataclass
class Summary:
    """Aggregate of a homogeneous batch of :class:`MatrixStats`.

    Mean and variance of ``r_max`` are kept as Welford moments so shards can
    be combined with :meth:`merge`; condition numbers are kept whole for the
    median.
    """

    n: int = 0
    r_mean: float = 0.0
    r_m2: float = 0.0
    n_pattern_ok: int = 0
    n_spd: int = 0
    conds: list = field(default_factory=list)

    def add(self, s: MatrixStats) -> None:
        self.n += 1
        delta = s.r_max - self.r_mean
        self.r_mean += delta / self.n
        self.r_m2 += delta * (s.r_max - self.r_mean)
        self.n_pattern_ok += bool(s.pattern_ok)
        self.n_spd += bool(s.spd)
        self.conds.append(s.cond)

    def merge(self, other: "Summary") -> "Summary":
        n = self.n + other.n
        if n == 0:
            return Summary()
        delta = other.r_mean - self.r_mean
        return Summary(
            n=n,
            r_mean=self.r_mean + delta * other.n / n,
            r_m2=self.r_m2 + other.r_m2 + delta * delta * self.n * other.n / n,
            n_pattern_ok=self.n_pattern_ok + other.n_pattern_ok,
            n_spd=self.n_spd + other.n_spd,
            conds=self.conds + other.conds,
        )

    @property
    def r_sd(self) -> float:
        return math.sqrt(self.r_m2 / (self.n - 1)) if self.n > 1 else 0.0

    @property
    def r_se(self) -> float:
        return self.r_sd / math.sqrt(self.n) if self.n else math.nan

    @property
    def cond_median(self) -> float:
        return float(np.median(self.conds)) if self.conds else math.nan

    @property
    def frac_pattern_ok(self) -> float:
        return self.n_pattern_ok / self.n

    @property
    def frac_spd(self) -> float:
        return self.n_spd / self.n


def summarize(samples) -> Summary:
    """Mean/sd (n-1 convention) of ``r_max``, median ``cond``, pattern and SPD rates."""
    samples = list(samples)
    if not samples:
        raise ParameterError("cannot summarize an empty sample list")
    if len({(s.p, s.d_nominal) for s in samples}) > 1:
        raise ParameterError("samples mix different (p, d) settings")
    out = Summary()
    for s in samples:
        out.add(s)
    return out
