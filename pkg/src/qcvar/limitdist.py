"""Monte Carlo simulation of the near-unit likelihood-ratio limit law.

The limit statistic is the trace functional
``tr{ S1 S2^{-1} S1^T }`` of a q-dimensional Ornstein-Uhlenbeck-type
path Z driven by standard Brownian increments, with
``S1 = sum_j dW_j Zbar_{j-1}^T`` and ``S2 = sum_j Zbar_{j-1} Zbar_{j-1}^T / steps``,
where Zbar is the path detrended per the deterministic case.  Quantiles
are tabulated on a grid of localisation matrices and persisted in a
self-describing text format.

Discretisation conventions: the path follows the exact local recursion
``Z_j = (I + C/steps) Z_{j-1} + dW_j`` with ``Z_0 = 0``; the lagged
value Z_{j-1} is associated with time (j - 1/2)/steps.  The midpoint
time grid makes the discrete first and second moments of the trend
regressors match their continuous counterparts to O(steps^-2), so the
discrete least-squares detrend agrees with the closed-form L2[0,1]
projection weights evaluated on the same grid.
"""

from __future__ import annotations

import io
import logging
import os
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DomainError, NumericalError, TableCoverageError

logger = logging.getLogger("qcvar.limitdist")

__all__ = [
    "LimitDistConfig",
    "TableEntry",
    "QuantileTable",
    "c_star",
    "simulate_statistic",
    "simulate_statistics",
    "quantiles_with_se",
    "build_table",
    "lookup",
    "save_table",
    "load_table",
]

_TABLE_VERSION = "1"
_DET_CASES = ("trend", "const", "none")
_CHUNK = 2048


def c_star(c: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Similarity transform ``delta^{-1/2} C delta^{1/2}``.

    ``delta`` must be symmetric positive definite; its principal
    (symmetric) square root is used.  The eigenvalues of the result
    equal those of C.
    """
    c = np.atleast_2d(np.asarray(c, dtype=float))
    delta = np.atleast_2d(np.asarray(delta, dtype=float))
    if delta.shape != c.shape:
        raise DomainError(f"C {c.shape} and delta {delta.shape} must have equal shape")
    if not np.allclose(delta, delta.T, atol=1e-10):
        raise DomainError("delta must be symmetric")
    vals, vecs = np.linalg.eigh(delta)
    if vals.min() <= 0:
        raise DomainError("delta must be positive definite")
    root = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    inv_root = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
    return inv_root @ c @ root


@dataclass(frozen=True)
class LimitDistConfig:
    """Configuration of one limit-law simulation.

    ``c_star`` is the q-by-q localisation argument of the limit law,
    ``det`` the detrending case, ``steps`` the Euler grid size,
    ``reps`` the number of replications and ``levels`` the quantile
    levels to report.
    """

    q: int
    c_star: np.ndarray
    det: str
    steps: int = 2000
    reps: int = 100_000
    seed: int = 0
    levels: tuple = (0.90, 0.95, 0.99)

    def __post_init__(self):
        if self.det not in _DET_CASES:
            raise DomainError(f"det must be one of {_DET_CASES}")
        if self.steps < 100:
            raise DomainError("steps must be at least 100")
        if self.reps < 1000:
            raise DomainError("reps must be at least 1000")
        c = np.atleast_2d(np.asarray(self.c_star, dtype=float))
        if c.shape != (self.q, self.q):
            raise DomainError(f"c_star must be {self.q}x{self.q}, got {c.shape}")
        levels = tuple(float(v) for v in self.levels)
        if not levels or any(not 0.0 < v < 1.0 for v in levels):
            raise DomainError("levels must lie strictly inside (0, 1)")
        object.__setattr__(self, "c_star", c)
        object.__setattr__(self, "levels", levels)


def _detrend_coefficients(s: np.ndarray, det: str) -> tuple[np.ndarray, np.ndarray]:
    """Pair (H, X): regressors X and the map H = (X'X)^{-1} X' to coefficients."""
    n = s.shape[0]
    X = np.ones((n, 1)) if det == "const" else np.column_stack([np.ones(n), s])
    return np.linalg.solve(X.T @ X, X.T), X


def _simulate_chunk(config: LimitDistConfig, rep_indices: Sequence[int]) -> np.ndarray:
    """Statistics for the given replication indices (deterministic per index)."""
    q, n = config.q, config.steps
    m = len(rep_indices)
    scale = 1.0 / np.sqrt(n)
    dw = np.empty((m, n, q))
    for i, rep in enumerate(rep_indices):
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, int(rep))))
        dw[i] = rng.standard_normal((n, q)) * scale

    A_T = (np.eye(q) + config.c_star / n).T
    lagged = np.empty((m, n, q))
    z = np.zeros((m, q))
    for j in range(n):
        lagged[:, j, :] = z
        z = z @ A_T + dw[:, j, :]

    s_grid = (np.arange(1, n + 1) - 0.5) / n
    if config.det != "none":
        H, X = _detrend_coefficients(s_grid, config.det)
        coef = np.einsum("dn,mnq->mdq", H, lagged)
        lagged = lagged - np.einsum("nd,mdq->mnq", X, coef)

    s1 = np.einsum("mnq,mnr->mqr", dw, lagged)
    s2 = np.einsum("mnq,mnr->mqr", lagged, lagged) / n
    dets = np.linalg.det(s2)
    bad = ~np.isfinite(dets) | (np.abs(dets) < 1e-300)
    stats = np.full(m, np.nan)
    good = ~bad
    if good.any():
        solved = np.linalg.solve(s2[good], np.transpose(s1[good], (0, 2, 1)))
        stats[good] = np.einsum("mqr,mrq->m", s1[good], solved)
    return stats


def simulate_statistic(config: LimitDistConfig, rep_index: int) -> float:
    """One replication of the limit statistic, deterministic in (config.seed, rep_index)."""
    return float(_simulate_chunk(config, [rep_index])[0])


def simulate_statistics(
    config: LimitDistConfig,
    n_reps: Optional[int] = None,
    *,
    max_redraws: int = 100,
) -> tuple[np.ndarray, int]:
    """All replications of the limit statistic, chunk-vectorised.

    Replications with a numerically singular second-moment matrix are
    flagged and redrawn from fresh derived seeds; the count of redraws
    is returned alongside the statistics.
    """
    total = config.reps if n_reps is None else int(n_reps)
    out = np.empty(total)
    for start in range(0, total, _CHUNK):
        idx = range(start, min(start + _CHUNK, total))
        out[start: start + len(idx)] = _simulate_chunk(config, list(idx))
    redrawn = 0
    bad = np.flatnonzero(~np.isfinite(out))
    attempt = 1
    while bad.size and attempt <= max_redraws:
        # redraw indices shifted into a disjoint seed range
        redraw_ids = [int(1_000_000_007 * attempt + b) for b in bad]
        out[bad] = _simulate_chunk(config, redraw_ids)
        redrawn += bad.size
        bad = np.flatnonzero(~np.isfinite(out))
        attempt += 1
    if bad.size:
        raise NumericalError(f"{bad.size} replications remained singular after redraws")
    return out, redrawn


def quantiles_with_se(sample: np.ndarray, levels: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Empirical quantiles and their Monte Carlo standard errors.

    The SE uses order-statistic asymptotics, with the quantile density
    estimated from a +/- sqrt(n)/2 order-statistic window.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.shape[0]
    levels = np.asarray(levels, dtype=float)
    qs = np.quantile(x, levels, method="linear")
    ses = np.empty_like(qs)
    half = max(1, int(0.5 * np.sqrt(n)))
    for i, tau in enumerate(levels):
        kk = int(tau * (n - 1))
        lo = max(0, kk - half)
        hi = min(n - 1, kk + half)
        slope = (x[hi] - x[lo]) / ((hi - lo) / n)
        ses[i] = np.sqrt(tau * (1.0 - tau) / n) * slope
    return qs, ses


@dataclass(frozen=True)
class TableEntry:
    """Simulated quantiles for one localisation grid point."""

    c: np.ndarray
    quantiles: tuple
    se: tuple
    redrawn: int


@dataclass(frozen=True)
class QuantileTable:
    """Persisted quantiles of the limit law over a localisation grid.

    Rebuilding with identical metadata (q, det, steps, reps, seed,
    levels, grid) reproduces the table bit-exactly.
    """

    q: int
    det: str
    steps: int
    reps: int
    seed: int
    levels: tuple
    entries: tuple

    @property
    def c_values(self) -> list:
        return [e.c for e in self.entries]


def _format_float(v: float) -> str:
    return repr(float(v))


def _entry_line(entry: TableEntry) -> str:
    c_txt = " ".join(_format_float(v) for v in np.asarray(entry.c).ravel())
    cols = [c_txt, str(entry.redrawn)]
    cols += [_format_float(v) for v in entry.quantiles]
    cols += [_format_float(v) for v in entry.se]
    return ",".join(cols)


def save_table(table: QuantileTable, path: str) -> None:
    """Write the table in the self-describing text format."""
    buf = io.StringIO()
    buf.write("# qcvar critical-value table\n")
    buf.write(f"version={_TABLE_VERSION}\n")
    buf.write(f"q={table.q}\n")
    buf.write(f"det={table.det}\n")
    buf.write(f"steps={table.steps}\n")
    buf.write(f"reps={table.reps}\n")
    buf.write(f"seed={table.seed}\n")
    buf.write("levels=" + ",".join(_format_float(v) for v in table.levels) + "\n")
    buf.write("---\n")
    head = ["c", "redrawn"]
    head += [f"q[{_format_float(v)}]" for v in table.levels]
    head += [f"se[{_format_float(v)}]" for v in table.levels]
    buf.write(",".join(head) + "\n")
    for entry in table.entries:
        buf.write(_entry_line(entry) + "\n")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)


def load_table(path: str) -> QuantileTable:
    """Read a table written by :func:`save_table`."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    meta = {}
    body_at = None
    for i, ln in enumerate(lines):
        if ln.startswith("#") or not ln.strip():
            continue
        if ln.strip() == "---":
            body_at = i + 1
            break
        key, _, val = ln.partition("=")
        meta[key.strip()] = val.strip()
    if body_at is None or meta.get("version") != _TABLE_VERSION:
        raise DomainError(f"{path} is not a version-{_TABLE_VERSION} qcvar table")
    q = int(meta["q"])
    levels = tuple(float(v) for v in meta["levels"].split(","))
    entries = []
    for ln in lines[body_at + 1:]:
        if not ln.strip():
            continue
        cols = ln.split(",")
        c = np.array([float(v) for v in cols[0].split()], dtype=float).reshape(q, q)
        redrawn = int(cols[1])
        n_lv = len(levels)
        quantiles = tuple(float(v) for v in cols[2: 2 + n_lv])
        se = tuple(float(v) for v in cols[2 + n_lv: 2 + 2 * n_lv])
        entries.append(TableEntry(c=c, quantiles=quantiles, se=se, redrawn=redrawn))
    return QuantileTable(
        q=q,
        det=meta["det"],
        steps=int(meta["steps"]),
        reps=int(meta["reps"]),
        seed=int(meta["seed"]),
        levels=levels,
        entries=tuple(entries),
    )


def _entry_key(c: np.ndarray) -> tuple:
    return tuple(np.asarray(c, dtype=float).ravel().tolist())


def build_table(
    c_grid: Sequence[Union[float, np.ndarray]],
    template: LimitDistConfig,
    path: Optional[str] = None,
    *,
    resume: bool = True,
) -> QuantileTable:
    """Simulate quantiles for each grid point and persist after each.

    If ``path`` exists and carries identical metadata, already-computed
    grid points are reused, making interrupted builds resumable.
    """
    if len(c_grid) == 0:
        raise DomainError("the localisation grid must be nonempty")
    grid = [np.atleast_2d(np.asarray(c, dtype=float)) for c in c_grid]
    for c in grid:
        if c.shape != (template.q, template.q):
            raise DomainError(f"grid point shape {c.shape} does not match q={template.q}")

    done: dict[tuple, TableEntry] = {}
    if path is not None and resume and os.path.exists(path):
        prev = load_table(path)
        same_meta = (
            prev.q == template.q
            and prev.det == template.det
            and prev.steps == template.steps
            and prev.reps == template.reps
            and prev.seed == template.seed
            and prev.levels == template.levels
        )
        if same_meta:
            done = {_entry_key(e.c): e for e in prev.entries}

    entries = []
    for c in grid:
        key = _entry_key(c)
        if key in done:
            entries.append(done[key])
        else:
            config = replace(template, c_star=c)
            stats, redrawn = simulate_statistics(config)
            qs, ses = quantiles_with_se(stats, config.levels)
            entries.append(
                TableEntry(c=c, quantiles=tuple(qs), se=tuple(ses), redrawn=redrawn)
            )
        if template.q == 1:
            entries.sort(key=lambda e: float(e.c[0, 0]))
        table = QuantileTable(
            q=template.q,
            det=template.det,
            steps=template.steps,
            reps=template.reps,
            seed=template.seed,
            levels=template.levels,
            entries=tuple(entries),
        )
        if path is not None:
            save_table(table, path)
    return table


def _level_index(table: QuantileTable, level: float) -> int:
    for i, lv in enumerate(table.levels):
        if abs(lv - level) <= 1e-12:
            return i
    raise TableCoverageError(f"level {level} not among tabulated levels {table.levels}")


def lookup(table: QuantileTable, c_query: Union[float, np.ndarray], level: float) -> float:
    """Critical value at the queried localisation point.

    Exact at grid nodes.  Between nodes the q = 1 case interpolates
    linearly; queries outside the grid hull raise
    :class:`TableCoverageError`.  For q >= 2 the nearest node is used,
    with a warning reporting its distance when the match is not exact.
    """
    idx = _level_index(table, level)
    if not table.entries:
        raise TableCoverageError("table has no entries")
    if table.q == 1:
        cq = float(np.atleast_2d(np.asarray(c_query, dtype=float))[0, 0])
        nodes = np.array([float(e.c[0, 0]) for e in table.entries])
        values = np.array([e.quantiles[idx] for e in table.entries])
        exact = np.flatnonzero(np.abs(nodes - cq) <= 1e-9)
        if exact.size:
            return float(values[exact[0]])
        if cq < nodes.min() - 1e-9 or cq > nodes.max() + 1e-9:
            raise TableCoverageError(
                f"query C={cq:.6g} outside tabulated range [{nodes.min():.6g}, {nodes.max():.6g}]"
            )
        hi = int(np.searchsorted(nodes, cq))
        lo = hi - 1
        w = (cq - nodes[lo]) / (nodes[hi] - nodes[lo])
        logger.debug(
            "interpolating C=%g between nodes %g and %g", cq, nodes[lo], nodes[hi]
        )
        return float((1.0 - w) * values[lo] + w * values[hi])

    cq = np.atleast_2d(np.asarray(c_query, dtype=float))
    dists = [float(np.linalg.norm(e.c - cq)) for e in table.entries]
    j = int(np.argmin(dists))
    if dists[j] > 1e-9:
        warnings.warn(
            f"no exact node for the queried localisation matrix; using the nearest "
            f"node at Frobenius distance {dists[j]:.6g}",
            UserWarning,
            stacklevel=2,
        )
    return float(table.entries[j].quantiles[idx])
