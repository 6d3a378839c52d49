"""Experiment sweeps, timing runs and Gaussian sampling.

Seeds
-----
Every random object in a sweep gets its own seed, computed by
:func:`derive_seed` as the first 8 bytes (big endian) of the SHA-256 digest
of the ``|``-joined string ``base_seed|p|d|...``. Graph ``k`` of a cell uses
parts ``(p, d, "graph", k)`` and matrix ``l`` on it uses
``(p, d, method, k, l)``, so both methods see the same graphs and any single
matrix can be rebuilt without replaying the sweep. ``d`` enters as its
canonical decimal string (see :func:`canonical_d`).
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np
import scipy.linalg

from .errors import ConsistencyError, DomainError, FormatError, NumericalError, ParameterError
from .graph import erdos_renyi
from .linalg import condition_number
from .matgen import Distribution, Method, SimConfig, SpdResult, generate, partial_orth
from .metrics import result_stats

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "TABLE1_P",
    "TABLE1_D",
    "DESK_P",
    "TIMING_P",
    "SWEEP_HEADER",
    "TIMING_HEADER",
    "derive_seed",
    "canonical_d",
    "SweepSpec",
    "SweepRecord",
    "TimingRecord",
    "run_sweep",
    "run_timing",
    "sample_gaussian",
    "read_sweep_csv",
    "write_sweep_csv",
    "load_sweep_config",
]

log = logging.getLogger(__name__)

TABLE1_P = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 125, 150, 200, 250, 300, 400, 500, 750, 1000)
TABLE1_D = ("0.0025", "0.005", "0.025", "0.05", "0.25", "0.5")
DESK_P = tuple(p for p in TABLE1_P if p <= 200)
TIMING_P = (10, 25, 50, 100, 150, 200)

SWEEP_HEADER = (
    "p", "d", "method", "graph_index", "matrix_index", "seed",
    "r_max", "cond", "min_eig", "pattern_ok", "gen_time",
)
TIMING_HEADER = ("p", "d", "method", "total_seconds")


def derive_seed(base_seed: int, *parts) -> int:
    key = "|".join(str(x) for x in (base_seed, *parts))
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def canonical_d(d) -> str:
    """Shortest decimal string of probability ``d``, e.g. ``0.25`` or ``"0.250"`` -> ``"0.25"``."""
    try:
        value = float(d)
    except (TypeError, ValueError):
        raise ParameterError(f"not a probability: {d!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"probability must lie in [0, 1], got {d!r}")
    return repr(value)


@dataclass(frozen=True)
class SweepSpec:
    p_values: tuple = DESK_P
    d_values: tuple = TABLE1_D
    graphs_per_cell: int = 10
    matrices_per_graph: int = 10
    methods: tuple = (Method.DIAG_DOMINANCE, Method.PARTIAL_ORTH)
    base_seed: int = 0
    output_path: str | None = None
    zero_tol: float = 1e-8
    entry_dist: Distribution = Distribution()
    measure_time: bool = False

    def __post_init__(self):
        ps = tuple(int(p) for p in self.p_values)
        ds = tuple(canonical_d(d) for d in self.d_values)
        ms = tuple(Method.parse(m) for m in self.methods)
        if not (ps and ds and ms):
            raise ParameterError("p_values, d_values and methods must all be nonempty")
        if any(p < 1 for p in ps):
            raise ParameterError(f"p values must be positive, got {ps}")
        if self.graphs_per_cell < 1 or self.matrices_per_graph < 1:
            raise ParameterError("graphs_per_cell and matrices_per_graph must be >= 1")
        object.__setattr__(self, "p_values", ps)
        object.__setattr__(self, "d_values", ds)
        object.__setattr__(self, "methods", ms)

    def cells(self) -> list[tuple[int, str, Method]]:
        """All ``(p, d, method)`` cells in canonical output order."""
        return sorted(
            ((p, d, m) for p in set(self.p_values) for d in set(self.d_values) for m in set(self.methods)),
            key=lambda c: (c[0], float(c[1]), c[2].value),
        )

    @property
    def rows_per_cell(self) -> int:
        return self.graphs_per_cell * self.matrices_per_graph

    def sim_config(self, method, seed) -> SimConfig:
        return SimConfig(method=method, seed=seed, zero_tol=self.zero_tol, entry_dist=self.entry_dist)


@dataclass(frozen=True)
class SweepRecord:
    p: int
    d: str
    method: Method
    graph_index: int
    matrix_index: int
    seed: int
    r_max: float
    cond: float
    min_eig: float
    pattern_ok: bool
    gen_time: float | None = None

    @property
    def failed(self) -> bool:
        return not (self.pattern_ok and self.min_eig > 0)

    @property
    def key(self):
        return (self.p, self.d, self.method, self.graph_index, self.matrix_index)

    def to_row(self) -> list[str]:
        return [
            str(self.p),
            self.d,
            self.method.value,
            str(self.graph_index),
            str(self.matrix_index),
            str(self.seed),
            _fmt_float(self.r_max),
            _fmt_float(self.cond),
            _fmt_float(self.min_eig),
            "true" if self.pattern_ok else "false",
            "" if self.gen_time is None else _fmt_float(self.gen_time),
        ]

    @classmethod
    def from_row(cls, row) -> "SweepRecord":
        if len(row) != len(SWEEP_HEADER):
            raise FormatError(f"expected {len(SWEEP_HEADER)} fields, got {len(row)}: {row!r}")
        try:
            if row[9] not in ("true", "false"):
                raise ValueError(f"bad boolean {row[9]!r}")
            return cls(
                p=int(row[0]),
                d=canonical_d(row[1]),
                method=Method.parse(row[2]),
                graph_index=int(row[3]),
                matrix_index=int(row[4]),
                seed=int(row[5]),
                r_max=float(row[6]),
                cond=float(row[7]),
                min_eig=float(row[8]),
                pattern_ok=row[9] == "true",
                gen_time=None if row[10] == "" else float(row[10]),
            )
        except (ValueError, ParameterError) as exc:
            raise FormatError(f"malformed sweep row {row!r}: {exc}") from None

    def same_as(self, other: "SweepRecord") -> bool:
        """Field-wise equality that treats NaN as equal to NaN."""
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
                continue
            if a != b:
                return False
        return True


@dataclass(frozen=True)
class TimingRecord:
    p: int
    d: str
    method: Method
    total_seconds: float

    def to_row(self) -> list[str]:
        return [str(self.p), self.d, self.method.value, _fmt_float(self.total_seconds)]


def _fmt_float(x: float) -> str:
    return repr(float(x))


# -- CSV ---------------------------------------------------------------------


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_sweep_csv(records, dest) -> None:
    with _open_out(dest) as fh:
        w = _writer(fh)
        w.writerow(SWEEP_HEADER)
        w.writerows(r.to_row() for r in records)


def read_sweep_csv(src) -> list[SweepRecord]:
    with open(src, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SWEEP_HEADER:
            raise FormatError(f"{src}: unexpected header {header!r}")
        return [SweepRecord.from_row(row) for row in reader]


class _open_out:
    """Open a path for UTF-8/LF writing, or pass through an open text stream."""

    def __init__(self, dest, mode="w"):
        self.dest, self.mode, self.fh = dest, mode, None

    def __enter__(self):
        if hasattr(self.dest, "write"):
            return self.dest
        self.fh = open(self.dest, self.mode, encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


# -- sweep -------------------------------------------------------------------


def _run_cell(spec: SweepSpec, cell) -> list[SweepRecord]:
    p, d, method = cell
    records = []
    for gi in range(spec.graphs_per_cell):
        g = erdos_renyi(p, float(d), derive_seed(spec.base_seed, p, d, "graph", gi))
        for mi in range(spec.matrices_per_graph):
            seed = derive_seed(spec.base_seed, p, d, method.value, gi, mi)
            cfg = spec.sim_config(method, seed)
            t0 = time.perf_counter()
            try:
                result = generate(g, cfg)
            except (NumericalError, DomainError, ConsistencyError) as exc:
                log.warning("generation failed at p=%s d=%s %s (%d, %d): %s", p, d, method, gi, mi, exc)
                nan = math.nan
                records.append(SweepRecord(p, d, method, gi, mi, seed, nan, nan, nan, False))
                continue
            elapsed = time.perf_counter() - t0
            st = result_stats(result, float(d))
            records.append(
                SweepRecord(
                    p, d, method, gi, mi, seed,
                    st.r_max, st.cond, st.min_eig, st.pattern_ok,
                    elapsed if spec.measure_time else None,
                )
            )
    return records


def _completed_prefix(spec: SweepSpec, path) -> list[list[SweepRecord]]:
    """Cells already fully present, in order, at the start of an existing CSV."""
    try:
        existing = read_sweep_csv(path)
    except (FileNotFoundError, FormatError):
        return []
    done = []
    pos = 0
    n = spec.rows_per_cell
    for p, d, method in spec.cells():
        chunk = existing[pos : pos + n]
        expect = [
            (p, d, method, gi, mi)
            for gi in range(spec.graphs_per_cell)
            for mi in range(spec.matrices_per_graph)
        ]
        if [r.key for r in chunk] != expect:
            break
        done.append(chunk)
        pos += n
    return done


def run_sweep(spec: SweepSpec, *, resume: bool = False, jobs: int = 1, progress=None) -> list[SweepRecord]:
    """Generate every matrix of the sweep and collect one record per matrix.

    When ``spec.output_path`` is set, rows are written cell by cell in
    canonical order and flushed after each cell. With ``resume=True``,
    complete cells already at the head of an existing output file are kept
    and skipped; anything after them is regenerated.

    ``gen_time`` is only filled in when ``spec.measure_time`` is set, since
    wall-clock values would break byte-for-byte reproducibility of the CSV.
    """
    cells = spec.cells()
    records: list[SweepRecord] = []
    done: list[list[SweepRecord]] = []
    if resume and spec.output_path and os.path.exists(spec.output_path):
        done = _completed_prefix(spec, spec.output_path)
        log.info("resuming sweep: %d of %d cells already complete", len(done), len(cells))
    for chunk in done:
        records.extend(chunk)
    todo = cells[len(done) :]

    out = None
    if spec.output_path:
        out = open(spec.output_path, "w", encoding="utf-8", newline="")
        w = _writer(out)
        w.writerow(SWEEP_HEADER)
        w.writerows(r.to_row() for r in records)
        out.flush()
    try:
        if jobs > 1:
            pool = ProcessPoolExecutor(max_workers=jobs)
            results = pool.map(_run_cell, [spec] * len(todo), todo)
        else:
            pool = None
            results = (_run_cell(spec, c) for c in todo)
        for cell, chunk in zip(todo, results):
            records.extend(chunk)
            if out is not None:
                w.writerows(r.to_row() for r in chunk)
                out.flush()
            if progress is not None:
                progress(cell, chunk)
        if pool is not None:
            pool.shutdown()
    finally:
        if out is not None:
            out.close()

    failed = sum(r.failed for r in records)
    if failed:
        log.warning("%d of %d sweep rows failed", failed, len(records))
    return records


# -- timing ------------------------------------------------------------------


def _warm_up():
    # the first partial-orthogonalization call may trigger JIT compilation
    from .graph import UndirectedGraph

    partial_orth(UndirectedGraph(3), SimConfig(seed=0))


def run_timing(
    p_values,
    d_values,
    n_matrices: int,
    methods=(Method.DIAG_DOMINANCE, Method.PARTIAL_ORTH),
    base_seed: int = 0,
    output_path=None,
    entry_dist: Distribution = Distribution(),
) -> list[TimingRecord]:
    """Total wall-clock generation time of ``n_matrices`` matrices per cell.

    A fresh graph is drawn for every matrix, outside the timed region. Only
    the generator call is timed; validation, metrics and I/O are not.
    Runs sequentially in the calling process.
    """
    if n_matrices < 1:
        raise ParameterError(f"n_matrices must be >= 1, got {n_matrices!r}")
    if isinstance(methods, (str, Method)):
        methods = (methods,)
    spec = SweepSpec(p_values=p_values, d_values=d_values, methods=methods, base_seed=base_seed)
    _warm_up()
    records = []
    for p, d, method in spec.cells():
        total = 0.0
        for k in range(n_matrices):
            g = erdos_renyi(p, float(d), derive_seed(base_seed, p, d, "timing-graph", k))
            cfg = SimConfig(method=method, seed=derive_seed(base_seed, p, d, method.value, "timing", k), entry_dist=entry_dist)
            t0 = time.perf_counter()
            generate(g, cfg)
            total += time.perf_counter() - t0
        records.append(TimingRecord(p, d, method, total))
    if output_path is not None:
        with _open_out(output_path) as fh:
            w = _writer(fh)
            w.writerow(TIMING_HEADER)
            w.writerows(r.to_row() for r in records)
    return records


# -- Gaussian data -----------------------------------------------------------


def sample_gaussian(result, n: int, as_concentration: bool = False, seed=None) -> np.ndarray:
    """Draw ``n`` zero-mean Gaussian vectors from a generated model.

    The covariance is ``result.matrix``, or its inverse when
    ``as_concentration`` is set. ``result`` may also be a bare matrix.
    Uses the Cholesky factor ``L`` of the matrix: ``x = L z`` for a
    covariance, ``x = L^{-t} z`` for a concentration matrix.
    """
    m = result.matrix if isinstance(result, SpdResult) else np.asarray(result, dtype=np.float64)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        try:
            kappa = condition_number(m)
        except (DomainError, NumericalError):
            kappa = math.inf
        raise NumericalError(f"Cholesky factorization failed (condition number {kappa:.3e})") from None
    if as_concentration:
        kappa = condition_number(m)
        if kappa * np.finfo(float).eps >= 1.0:
            raise NumericalError(f"matrix too ill-conditioned to invert (condition number {kappa:.3e})")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((int(n), m.shape[0]))
    if as_concentration:
        return scipy.linalg.solve_triangular(chol, z.T, lower=True, trans="T").T
    return z @ chol.T


# -- config files ------------------------------------------------------------

_CONFIG_KEYS = {
    "p_values", "d_values", "graphs_per_cell", "matrices_per_graph", "methods",
    "base_seed", "output", "zero_tol", "entry_dist", "measure_time",
}


def load_sweep_config(path) -> dict:
    """Read a TOML sweep config into keyword arguments for :class:`SweepSpec`.

    Recognized keys: ``p_values``, ``d_values`` (numbers or strings),
    ``graphs_per_cell``, ``matrices_per_graph``, ``methods``, ``base_seed``,
    ``output``, ``zero_tol``, ``entry_dist`` (``"kind:a:b"``),
    ``measure_time``.
    """
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise FormatError(f"{path}: unknown keys {sorted(unknown)}")
    kwargs = dict(data)
    if "output" in kwargs:
        kwargs["output_path"] = kwargs.pop("output")
    if "entry_dist" in kwargs:
        kwargs["entry_dist"] = Distribution.parse(kwargs["entry_dist"])
    return kwargs
