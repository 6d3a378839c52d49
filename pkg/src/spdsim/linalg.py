"""Dense symmetric linear algebra used by the generators and the metrics.

Matrices are plain float64 ``numpy`` arrays. A "symmetric matrix" is an
array for which ``m[i, j] == m[j, i]`` holds bit for bit; :func:`sym_matrix`
produces one by mirroring the upper triangle.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.io
import scipy.sparse

from .errors import DomainError, FormatError, NumericalError, ParameterError

__all__ = [
    "ZERO_ROW_RTOL",
    "sym_matrix",
    "zero_row_tol",
    "project",
    "gram",
    "sym_eigenvalues",
    "is_spd",
    "condition_number",
    "write_matrix",
    "read_matrix",
]

ZERO_ROW_RTOL = 1e-12


def sym_matrix(a) -> np.ndarray:
    """Return a float64 copy of square ``a`` with the upper triangle mirrored down."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {m.shape}")
    upper = np.triu(m, 1)
    return np.triu(m) + upper.T


def zero_row_tol(rows) -> float:
    """Norm below which a vector counts as numerically zero among ``rows``."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    largest = float(np.sqrt(np.einsum("ij,ij->i", rows, rows).max(initial=0.0)))
    return ZERO_ROW_RTOL * max(1.0, largest)


def project(u, v, tol: float | None = None) -> np.ndarray:
    """Orthogonal projection of ``u`` onto the line spanned by ``v``.

    Returns the zero vector when ``v`` is numerically zero; by default that
    threshold is ``zero_row_tol`` of the pair ``(u, v)``.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ParameterError(f"vectors must be 1-d of equal length, got {u.shape} and {v.shape}")
    if tol is None:
        tol = zero_row_tol(np.vstack([u, v]))
    vv = float(v @ v)
    if np.sqrt(vv) <= tol:
        return np.zeros_like(v)
    return (float(u @ v) / vv) * v


def gram(q) -> np.ndarray:
    """Gram matrix ``Q Q^t`` of the rows of ``q``, exactly symmetric."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2:
        raise ParameterError(f"factor must be 2-d, got shape {q.shape}")
    return sym_matrix(q @ q.T)


def sym_eigenvalues(m) -> np.ndarray:
    """All eigenvalues of symmetric ``m`` in ascending order (LAPACK ``syevd``)."""
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise NumericalError("matrix has non-finite entries")
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed for p={m.shape[0]}: {exc}") from exc


def is_spd(m) -> bool:
    """True iff a Cholesky factorization of ``m`` succeeds."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.all(np.isfinite(m)):
        return False
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return False
    return True


def condition_number(m) -> float:
    """Spectral condition number ``lambda_max / lambda_min`` of an SPD matrix."""
    ev = sym_eigenvalues(m)
    if ev[0] <= 0:
        raise DomainError(f"condition number needs an SPD matrix, lambda_min = {ev[0]!r}")
    return float(ev[-1] / ev[0])


# -- Matrix Market -----------------------------------------------------------


def write_matrix(dest, m, *, comment: str = "", layout: str = "auto") -> None:
    """Write symmetric ``m`` in Matrix Market format.

    ``layout="auto"`` picks the coordinate format when ``m`` has at least one
    exact zero and the dense array format otherwise. Values are written in
    shortest round-trip form, so :func:`read_matrix` returns ``m`` bit for bit.
    """
    m = np.asarray(m, dtype=np.float64)
    if layout == "auto":
        layout = "coordinate" if np.any(m == 0.0) else "array"
    if layout == "coordinate":
        payload = scipy.sparse.coo_matrix(np.tril(m))
    elif layout == "array":
        payload = m
    else:
        raise ParameterError(f"unknown layout {layout!r}")
    scipy.io.mmwrite(_fspath(dest), payload, comment=comment, symmetry="symmetric")


def read_matrix(src) -> np.ndarray:
    try:
        a = scipy.io.mmread(_fspath(src))
    except (ValueError, OSError, IndexError) as exc:
        if isinstance(exc, FileNotFoundError):
            raise
        raise FormatError(f"cannot parse Matrix Market file {src!r}: {exc}") from exc
    if scipy.sparse.issparse(a):
        a = a.toarray()
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FormatError(f"matrix in {src!r} is not square: {a.shape}")
    return a


def _fspath(x):
    return os.fspath(x) if isinstance(x, (str, os.PathLike)) else x
