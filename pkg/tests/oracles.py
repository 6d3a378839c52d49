"""Independent reference computations used by the tests.

Nothing here shares code with ``spdsim``'s generators.
"""

from fractions import Fraction


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _solve(a, b):
    """Exact Gauss-Jordan elimination on a nonsingular rational system."""
    n = len(b)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def exact_partial_orth_rows(q, adjacency):
    """Rows of ``q`` after sequential orthogonalization, in exact arithmetic.

    Row ``i`` (0-based, processed in increasing order) is replaced by its
    residual after orthogonal projection onto the span of the already
    processed rows ``j < i`` with ``adjacency[i][j]`` false. The projection
    is obtained from the normal equations, solved over the rationals.
    """
    rows = [[Fraction(float(x)) for x in row] for row in q]
    p = len(rows)
    for i in range(p):
        preds = [j for j in range(i) if not adjacency[i][j]]
        if not preds:
            continue
        g = [[_dot(rows[a], rows[b]) for b in preds] for a in preds]
        rhs = [_dot(rows[a], rows[i]) for a in preds]
        coef = _solve(g, rhs)
        rows[i] = [
            x - sum(c * rows[j][k] for c, j in zip(coef, preds))
            for k, x in enumerate(rows[i])
        ]
    return rows


def exact_gram(rows):
    return [[_dot(u, v) for v in rows] for u in rows]


def brute_pattern_ok(m, adjacency, zero_tol):
    """Per-pair loop over every non-adjacent pair."""
    p = len(m)
    scale = max(m[k][k] for k in range(p))
    for i in range(p):
        for j in range(p):
            if i != j and not adjacency[i][j] and abs(m[i][j]) > zero_tol * scale:
                return False
    return True
