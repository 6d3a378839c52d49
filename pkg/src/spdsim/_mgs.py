"""Compiled inner loop of the partial-orthogonalization generator."""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def orth_row(q, i, preds, basis, sqnorm, tol):
    """Make row ``i`` of ``q`` orthogonal to the rows listed in ``preds``.

    First builds an orthogonal basis of ``span(q[preds])`` with modified
    Gram-Schmidt into ``basis[:len(preds)]``, each basis vector being
    reduced against all earlier ones in order. Then subtracts from ``q[i]``
    its projection onto each basis vector in turn. Basis vectors whose norm
    is at most ``tol`` contribute nothing. ``q`` is updated in place.
    """
    m = preds.size
    p = q.shape[1]
    tol2 = tol * tol
    for a in range(m):
        src = preds[a]
        for c in range(p):
            basis[a, c] = q[src, c]
        for b in range(a):
            if sqnorm[b] <= tol2:
                continue
            dot = 0.0
            for c in range(p):
                dot += basis[a, c] * basis[b, c]
            f = dot / sqnorm[b]
            for c in range(p):
                basis[a, c] -= f * basis[b, c]
        s = 0.0
        for c in range(p):
            s += basis[a, c] * basis[a, c]
        sqnorm[a] = s
    for a in range(m):
        if sqnorm[a] <= tol2:
            continue
        dot = 0.0
        for c in range(p):
            dot += q[i, c] * basis[a, c]
        f = dot / sqnorm[a]
        for c in range(p):
            q[i, c] -= f * basis[a, c]
    s = 0.0
    for c in range(p):
        s += q[i, c] * q[i, c]
    return np.sqrt(s)
