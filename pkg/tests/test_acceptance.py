"""Exit criteria for the package, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; run with
``pytest tests/test_acceptance.py -v`` to see them.
"""

import time
from itertools import combinations

import numpy as np
import pytest

from oracles import exact_gram, exact_partial_orth_rows
from spdsim.cli import main
from spdsim.graph import UndirectedGraph, erdos_renyi
from spdsim.harness import TABLE1_D, TIMING_P, SweepSpec, derive_seed, run_sweep, run_timing
from spdsim.linalg import condition_number, is_spd, sym_eigenvalues, sym_matrix
from spdsim.matgen import Method, SimConfig, cond_shift, eig_shift, generate, partial_orth, pattern_residual
from spdsim.metrics import dd_ratio_bound, result_stats

pytestmark = pytest.mark.acceptance

ZERO_TOL = 1e-8


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return emit


def _mean_r(p, d, method, graphs, matrices, base_seed):
    spec = SweepSpec(p_values=[p], d_values=[d], methods=[method], graphs_per_cell=graphs,
                     matrices_per_graph=matrices, base_seed=base_seed)
    recs = run_sweep(spec)
    return float(np.mean([r.r_max for r in recs])), len(recs)


def test_ac1_pattern_and_spd_soundness(report):
    t0 = time.perf_counter()
    total = bad_spd = bad_pattern = 0
    worst = 0.0
    for p in (10, 25, 50, 100, 200):
        for d in ("0.0025", "0.025", "0.25", "0.5"):
            for gi in range(10):
                g = erdos_renyi(p, float(d), derive_seed(1, p, d, "graph", gi))
                for method in (Method.DIAG_DOMINANCE, Method.PARTIAL_ORTH):
                    for mi in range(10):
                        cfg = SimConfig(method=method, seed=derive_seed(1, p, d, method.value, gi, mi), zero_tol=ZERO_TOL)
                        res = generate(g, cfg)
                        residual = max(res.pattern_residual, pattern_residual(res.matrix, g)[0])
                        worst = max(worst, residual)
                        total += 1
                        bad_spd += not is_spd(res.matrix)
                        bad_pattern += residual > ZERO_TOL
    elapsed = time.perf_counter() - t0
    ok = total == 4000 and bad_spd == 0 and bad_pattern == 0
    report(
        "AC1 pattern + SPD soundness",
        ok,
        f"{total} matrices, {bad_spd} not SPD, {bad_pattern} pattern violations "
        f"(worst relative residual {worst:.2e} <= {ZERO_TOL:g}), {elapsed:.0f} s",
    )


def test_ac2_oracle_equivalence(report):
    rng = np.random.default_rng(2)
    graphs = []
    for p in range(1, 6):
        pairs = list(combinations(range(1, p + 1), 2))
        for mask in range(1 << len(pairs)):
            graphs.append(UndirectedGraph(p, [e for k, e in enumerate(pairs) if mask >> k & 1]))
    n_exhaustive = len(graphs)
    pairs6 = list(combinations(range(1, 7), 2))
    for mask in rng.choice(1 << 15, size=2000, replace=False):
        graphs.append(UndirectedGraph(6, [e for k, e in enumerate(pairs6) if int(mask) >> k & 1]))
    max_err = 0.0
    for g in graphs:
        q = rng.random((g.p, g.p))
        res = partial_orth(g, SimConfig(zero_tol=ZERO_TOL), factor=q)
        ref = np.array(exact_gram(exact_partial_orth_rows(q, g.adjacency.tolist())), dtype=float)
        max_err = max(max_err, float(np.abs(res.matrix - ref).max()))
    ok = max_err <= 1e-10
    report(
        "AC2 oracle equivalence",
        ok,
        f"{n_exhaustive} exhaustive graphs (p <= 5) + 2000 sampled at p = 6; "
        f"max |entry - exact| = {max_err:.2e} <= 1e-10",
    )


def test_ac3_shift_formulas(report):
    rng = np.random.default_rng(3)
    eig_err = cond_err = 0.0
    floor_ok = True
    n = 0
    for p in (5, 50):
        for _ in range(100):
            m = sym_matrix(rng.uniform(-1, 1, (p, p)))
            lam = sym_eigenvalues(m)
            eps = float(rng.uniform(0.01, 2.0))
            out = eig_shift(m, eps)
            shift = max(0.0, -lam[0]) + eps
            lam_out = sym_eigenvalues(out)[0]
            floor_ok &= lam_out >= eps - 1e-9
            eig_err = max(eig_err, abs(lam_out - (lam[0] + shift)))
            kappa0 = float(10 ** rng.uniform(0.2, 4))
            kappa = condition_number(cond_shift(m, kappa0))
            cond_err = max(cond_err, abs(kappa - kappa0) / kappa0)
            n += 1
    ok = floor_ok and eig_err <= 1e-9 and cond_err <= 1e-6
    report(
        "AC3 shift formulas",
        ok,
        f"{n} inputs; lambda_min >= epsilon: {floor_ok}, max |lambda_min - (lambda + shift)| = {eig_err:.1e} <= 1e-9, "
        f"max relative condition error = {cond_err:.1e} <= 1e-6",
    )


def test_ac4_dd_ratio_decay(report):
    r = {p: _mean_r(p, "0.25", Method.DIAG_DOMINANCE, 10, 10, 4)[0] for p in (50, 100, 200)}
    bound = {p: dd_ratio_bound(p, 0.25) for p in (100, 200)}
    under = {p: r[p] <= 1.05 * bound[p] for p in (100, 200)}
    decays = r[200] < r[50]
    ok = all(under.values()) and decays
    report(
        "AC4 diagonal-dominance ratio decay",
        ok,
        "; ".join(f"p={p}: mean R = {r[p]:.4f} vs 1.05*bound = {1.05 * bound[p]:.4f} ({'ok' if under[p] else 'exceeds'})" for p in (100, 200))
        + f"; mean R(200) = {r[200]:.4f} < mean R(50) = {r[50]:.4f}: {decays}",
    )


def test_ac5_partial_orth_stability(report):
    po100, n100 = _mean_r(100, "0.25", Method.PARTIAL_ORTH, 5, 10, 5)
    po500, n500 = _mean_r(500, "0.25", Method.PARTIAL_ORTH, 5, 10, 5)
    dd500, _ = _mean_r(500, "0.25", Method.DIAG_DOMINANCE, 5, 10, 5)
    factor = max(po100, po500) / min(po100, po500)
    ok = n100 == n500 == 50 and factor < 2 and po500 > 10 * dd500
    report(
        "AC5 partial-orthogonalization stability",
        ok,
        f"mean R: PO p=100 {po100:.4f}, PO p=500 {po500:.4f} (ratio {factor:.3f} < 2); "
        f"DD p=500 {dd500:.4f} (PO/DD = {po500 / dd500:.1f} > 10)",
    )


def test_ac6_condition_number_lower_bound(report):
    medians = {}
    for p in (50, 100):
        conds = []
        for k in range(20):
            g = erdos_renyi(p, 0.5, derive_seed(6, p, "graph", k))
            res = partial_orth(g, SimConfig(seed=derive_seed(6, p, "po", k)))
            conds.append(result_stats(res, 0.5).cond)
        medians[p] = float(np.median(conds))
    ok = all(medians[p] >= p * p for p in medians)
    report(
        "AC6 condition number >= p^2",
        ok,
        "; ".join(f"p={p}: median {medians[p]:.3g} >= {p * p}" for p in medians),
    )


def test_ac7_relative_timing(report):
    recs = run_timing(TIMING_P, TABLE1_D, 50, [Method.DIAG_DOMINANCE, Method.PARTIAL_ORTH], base_seed=7)
    by_cell = {}
    for r in recs:
        by_cell.setdefault((r.p, r.d), {})[r.method] = r.total_seconds
    slower = [c for c, t in by_cell.items() if not t[Method.DIAG_DOMINANCE] < t[Method.PARTIAL_ORTH]]
    worst = run_timing([200], ["0.0025"], 10, Method.PARTIAL_ORTH, base_seed=7)[0].total_seconds
    min_speedup = min(t[Method.PARTIAL_ORTH] / t[Method.DIAG_DOMINANCE] for t in by_cell.values())
    ok = not slower and worst <= 60
    report(
        "AC7 relative timing",
        ok,
        f"DD faster in {len(by_cell) - len(slower)}/{len(by_cell)} cells (min PO/DD {min_speedup:.1f}x); "
        f"10 PO matrices at p=200, d=0.0025 in {worst:.2f} s <= 60 s",
    )


def test_ac8_sweep_determinism(tmp_path, report):
    cfg = tmp_path / "table1-small.toml"
    cfg.write_text(
        'p_values = [10, 25, 50]\nd_values = ["0.0025", "0.025", "0.25", "0.5"]\n'
        'graphs_per_cell = 3\nmatrices_per_graph = 3\nmethods = ["dd", "po"]\n'
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [main(["sweep", "--config", str(cfg), "--seed", "8", "--out", str(out)]) for out in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    n_rows = len(a.read_text().splitlines()) - 1
    ok = codes == [0, 0] and same and n_rows == 3 * 4 * 2 * 9
    report("AC8 determinism", ok, f"exit codes {codes}, {n_rows} rows, byte-identical: {same}")
