"""Command-line interface: data ingestion and user-facing commands.

Subcommands: ``roots``, ``fit``, ``irf``, ``lr``, ``ci``, ``critvals``,
``simulate``.  Every run echoes its resolved configuration (including a
hash and any seed) into the output header, so artifacts can be rerun
bit-identically.  Exit codes: 0 success, 2 input error, 3 numerical or
root-separation error, 4 critical-value table coverage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .dgp import DgpSpec, simulate
from .exceptions import (
    ClassificationError,
    ConstructionError,
    DomainError,
    NumericalError,
    QcvarError,
    SingularDesignError,
    TableCoverageError,
)
from .inference import (
    _merge_intervals,
    chi2_quantile,
    ci_coefficient_given_lambda,
    ci_lambda,
    lr_coefficient,
    lr_lambda,
)
from .likelihood import LambdaGrid, make_design, ols_fit, profile_lambda
from .limitdist import LimitDistConfig, build_table, load_table, lookup
from .representation import irf
from .spectral import (
    RegionSpec,
    VarCoefficients,
    classify,
    half_life_to_radius,
    radius_to_half_life,
    roots,
    split,
)

__all__ = ["Dataset", "ingest_csv", "main"]


@dataclass(frozen=True)
class Dataset:
    """A parsed data matrix with column labels and provenance."""

    names: tuple
    values: np.ndarray
    source: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def ingest_csv(path: str, notices: Optional[list] = None) -> Dataset:
    """Read a comma-delimited file with a header row into a Dataset.

    A leading non-numeric column (dates or row labels) is detected and
    dropped with a notice.  Missing or non-numeric cells are a hard
    error naming every offending row and column; ragged rows report the
    line number.  Column order is preserved: the trailing q series are
    the ones assumed to load on the near-unit directions.
    """
    notices = notices if notices is not None else []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise DomainError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    width = len(header)
    body = rows[1:]
    if not body:
        raise DomainError(f"{path}: no data rows")
    for line_no, row in enumerate(body, start=2):
        if len(row) != width:
            raise DomainError(
                f"{path}: line {line_no} has {len(row)} fields, expected {width}"
            )

    def numeric(cell: str) -> Optional[float]:
        try:
            return float(cell)
        except ValueError:
            return None

    na_markers = ("", "NA", "NaN", "nan")
    start_col = 0
    first_cells = [row[0].strip() for row in body]
    # a date/index column is non-numeric in every row; sporadic or NA-like
    # cells are data errors, not an index column
    if (
        width > 1
        and all(numeric(c) is None for c in first_cells)
        and not any(c in na_markers for c in first_cells)
    ):
        notices.append(f"dropped non-numeric leading column {header[0]!r}")
        start_col = 1

    bad = []
    values = np.empty((len(body), width - start_col))
    for i, row in enumerate(body):
        for j in range(start_col, width):
            cell = row[j].strip()
            v = numeric(cell) if cell not in na_markers else None
            if v is None or not np.isfinite(v):
                bad.append(f"row {i + 2}, column {header[j]!r}: {row[j]!r}")
            else:
                values[i, j - start_col] = v
    if bad:
        listed = "; ".join(bad[:20])
        raise DomainError(f"{path}: missing or non-numeric cells: {listed}")
    return Dataset(names=tuple(header[start_col:]), values=values, source=path)


def _load_coeffs_json(path: str) -> tuple[VarCoefficients, dict]:
    with open(path) as fh:
        payload = json.load(fh)
    phi = payload.get("phi")
    if phi is None:
        raise DomainError(f"{path}: missing 'phi' (list of k p-by-p lag matrices)")
    coeffs = VarCoefficients.from_matrices([np.asarray(m, dtype=float) for m in phi])
    return coeffs, payload


def _round15(obj):
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return str(obj)  # keep JSON standard-compliant for inf half-lives
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round15(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return _round15(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _fmt(v: float) -> str:
    return f"{v:.15g}"


def _config_hash(config: dict) -> str:
    canon = json.dumps(_round15(config), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


class _Emitter:
    """Formats a command's result as text, csv or json with a config header."""

    def __init__(self, command: str, config: dict, fmt: str, output: Optional[str]):
        self.command = command
        self.config = {k: v for k, v in config.items() if v is not None}
        self.fmt = fmt
        self.output = output
        self.sections: list = []

    def add_table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence]):
        self.sections.append(("table", title, list(columns), [list(r) for r in rows]))

    def add_scalars(self, title: str, items: dict):
        self.sections.append(("scalars", title, items))

    def _header_lines(self) -> list:
        cfg = " ".join(f"{k}={v}" for k, v in sorted(self.config.items()))
        return [
            f"# qcvar {__version__} | command={self.command} | config-hash={_config_hash(self.config)}",
            f"# config: {cfg}",
        ]

    def render(self) -> str:
        if self.fmt == "json":
            payload = {
                "version": __version__,
                "command": self.command,
                "config_hash": _config_hash(self.config),
                "config": _round15(self.config),
                "sections": [],
            }
            for sec in self.sections:
                if sec[0] == "table":
                    _, title, cols, rows = sec
                    payload["sections"].append(
                        {"title": title, "columns": cols, "rows": _round15(rows)}
                    )
                else:
                    _, title, items = sec
                    payload["sections"].append({"title": title, "values": _round15(items)})
            return json.dumps(payload, sort_keys=True, indent=1) + "\n"

        buf = io.StringIO()
        if self.fmt == "csv":
            for line in self._header_lines():
                buf.write(line + "\n")
            writer = csv.writer(buf, lineterminator="\n")
            for sec in self.sections:
                if sec[0] == "table":
                    _, title, cols, rows = sec
                    writer.writerow([f"[{title}]"])
                    writer.writerow(cols)
                    for row in rows:
                        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
                else:
                    _, title, items = sec
                    writer.writerow([f"[{title}]"])
                    for k, v in items.items():
                        writer.writerow([k, _fmt(v) if isinstance(v, float) else v])
            return buf.getvalue()

        for line in self._header_lines():
            buf.write(line + "\n")
        for sec in self.sections:
            if sec[0] == "table":
                _, title, cols, rows = sec
                buf.write(f"\n== {title}\n")
                widths = [
                    max(len(str(c)), *(len(self._cell(r[i])) for r in rows)) if rows else len(str(c))
                    for i, c in enumerate(cols)
                ]
                buf.write("  ".join(str(c).ljust(w) for c, w in zip(cols, widths)) + "\n")
                for row in rows:
                    buf.write(
                        "  ".join(self._cell(v).ljust(w) for v, w in zip(row, widths)) + "\n"
                    )
            else:
                _, title, items = sec
                buf.write(f"\n== {title}\n")
                for k, v in items.items():
                    buf.write(f"{k}: {self._cell(v)}\n")
        return buf.getvalue()

    @staticmethod
    def _cell(v) -> str:
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    def emit(self) -> None:
        text = self.render()
        if self.output:
            with open(self.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _resolve_rho(args) -> float:
    if getattr(args, "half_life", None) is not None:
        return half_life_to_radius(args.half_life)
    if getattr(args, "rho", None) is not None:
        return args.rho
    return 0.9


def _coef_pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected two comma-separated integers i,j") from exc
    return i, j


def _common_output_args(sub):
    sub.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub.add_argument("--output", help="write to this file instead of standard output")


def _root_rows(coeffs: VarCoefficients, region: RegionSpec):
    rs = roots(coeffs)
    cls = classify(rs, region)
    rows = []
    for idx, (z, lab) in enumerate(zip(rs.roots, cls.labels), start=1):
        rows.append([idx, float(z.real), float(z.imag), float(abs(z)), float(abs(1 - z)), lab])
    return rows, cls


def cmd_roots(args) -> int:
    rho = _resolve_rho(args)
    notices: list = []
    if args.coeffs:
        coeffs, _ = _load_coeffs_json(args.coeffs)
        source = args.coeffs
    else:
        ds = ingest_csv(args.data, notices)
        coeffs = ols_fit(ds.values, args.k, args.det).coeffs
        source = args.data
    config = dict(command="roots", source=source, k=coeffs.k, p=coeffs.p, rho=rho, det=args.det)
    em = _Emitter("roots", config, args.format, args.output)
    for note in notices:
        em.add_scalars("notice", {"message": note})
    rows, cls = _root_rows(coeffs, RegionSpec(rho))
    em.add_table(
        "characteristic roots",
        ["index", "re", "im", "modulus", "dist_to_unity", "region"],
        rows,
    )
    em.add_scalars("classification", {"q": cls.q, "rho": rho, "half_life": radius_to_half_life(rho)})
    em.emit()
    return 0


def cmd_fit(args) -> int:
    rho = _resolve_rho(args)
    notices: list = []
    ds = ingest_csv(args.data, notices)
    grid = LambdaGrid(family=args.family, q=args.q, rho=rho, eig_step=args.grid_step)
    config = dict(
        command="fit", source=args.data, k=args.k, q=args.q, rho=rho, det=args.det,
        family=args.family, grid_step=grid.resolved_eig_step,
    )
    em = _Emitter("fit", config, args.format, args.output)
    for note in notices:
        em.add_scalars("notice", {"message": note})

    design = make_design(ds.values, args.k, args.det)
    fit = ols_fit(ds.values, args.k, args.det, design=design)
    rows, cls = _root_rows(fit.coeffs, RegionSpec(rho))
    em.add_table("unrestricted roots", ["index", "re", "im", "modulus", "dist_to_unity", "region"], rows)
    em.add_scalars("unrestricted fit", {"loglik": fit.loglik, "n_eff": fit.n_eff})

    prof = profile_lambda(grid, ds.values, args.k, args.det, design=design, refine=True)
    best = prof.best_fit
    em.add_table(
        "profile estimate: near-unit dynamics",
        ["row"] + [f"col{j}" for j in range(args.q)],
        [[i] + [float(v) for v in prof.best_lam[i]] for i in range(args.q)],
    )
    if best.a_hat is not None and best.a_hat.size:
        em.add_table(
            "profile estimate: subspace coefficients a",
            ["row"] + [f"col{j}" for j in range(args.q)],
            [[i] + [float(v) for v in best.a_hat[i]] for i in range(best.a_hat.shape[0])],
        )
        beta = np.hstack([np.eye(ds.p - args.q), -best.a_hat])
        em.add_table(
            "quasi-cointegrating rows [I, -a]",
            ["relation"] + list(ds.names),
            [[i] + [float(v) for v in beta[i]] for i in range(beta.shape[0])],
        )
    lam_eigs = np.linalg.eigvals(prof.best_lam)
    top = float(np.abs(lam_eigs).max())
    em.add_scalars(
        "persistence",
        {
            "largest_eigenvalue_modulus": top,
            "implied_half_life": radius_to_half_life(min(top, 1.0)) if top > 0 else 0.0,
            "profile_loglik": best.loglik,
            "grid_points": len(prof.trace),
            "grid_failures": len(prof.failures),
        },
    )
    em.emit()
    return 0


def cmd_irf(args) -> int:
    coeffs, _ = _load_coeffs_json(args.coeffs)
    sp = split(coeffs, args.q)
    config = dict(command="irf", source=args.coeffs, q=args.q, horizon=args.horizon)
    em = _Emitter("irf", config, args.format, args.output)
    cols = ["s"]
    p = coeffs.p
    for tag in ("value", "near", "stable"):
        cols += [f"{tag}[{i},{j}]" for i in range(p) for j in range(p)]
    rows = []
    for s in range(0, args.horizon + 1):
        resp = irf(sp, s)
        row = [s]
        for m in (resp.value, resp.near_part, resp.stable_part):
            row += [float(v) for v in m.ravel()]
        rows.append(row)
    em.add_table("impulse responses (row-major p*p blocks)", cols, rows)
    em.emit()
    return 0


def _parse_lambda0(text: str, q: int) -> np.ndarray:
    vals = [float(v) for v in text.split(",")]
    if len(vals) == 1:
        return vals[0] * np.eye(q)
    if len(vals) == q * q:
        return np.asarray(vals, dtype=float).reshape(q, q)
    raise DomainError(f"--lambda0 takes 1 or q*q={q * q} comma-separated values")


def cmd_lr(args) -> int:
    rho = _resolve_rho(args)
    notices: list = []
    ds = ingest_csv(args.data, notices)
    lam0 = _parse_lambda0(args.lambda0, args.q)
    config = dict(
        command="lr", source=args.data, k=args.k, q=args.q, rho=rho, det=args.det,
        lambda0=args.lambda0, coef=None if args.coef is None else f"{args.coef[0]},{args.coef[1]}",
        a0=args.a0, table=args.table,
    )
    em = _Emitter("lr", config, args.format, args.output)
    for note in notices:
        em.add_scalars("notice", {"message": note})
    design = make_design(ds.values, args.k, args.det)
    stat = lr_lambda(lam0, ds.values, args.k, args.det, design=design)
    items = {"lr_lambda": stat.value}
    if args.table:
        table = load_table(args.table)
        c_query = ds.n * (lam0 - np.eye(args.q))
        for level in table.levels:
            items[f"critical[{level:g}]"] = lookup(table, c_query, level)
    em.add_scalars("dynamics-block LR", items)
    if args.coef is not None:
        if args.a0 is None:
            raise DomainError("--coef requires --a0")
        i, j = args.coef
        cstat = lr_coefficient(args.a0, i, j, lam0, ds.values, args.k, args.det, design=design)
        em.add_scalars(
            "coefficient LR",
            {
                "lr_coefficient": cstat.value,
                "chi2_0.90": chi2_quantile(0.90),
                "chi2_0.95": chi2_quantile(0.95),
                "chi2_0.99": chi2_quantile(0.99),
            },
        )
    em.emit()
    return 0


def cmd_ci(args) -> int:
    rho = _resolve_rho(args)
    notices: list = []
    ds = ingest_csv(args.data, notices)
    i, j = args.coef
    config = dict(
        command="ci", source=args.data, k=args.k, q=args.q, rho=rho, det=args.det,
        alpha1=args.alpha1, alpha2=args.alpha2, coef=f"{i},{j}",
        grid_step=args.grid_step, table=args.table, seed=args.seed,
    )
    em = _Emitter("ci", config, args.format, args.output)
    for note in notices:
        em.add_scalars("notice", {"message": note})

    if os.path.exists(args.table):
        table = load_table(args.table)
    elif args.build_table:
        template = LimitDistConfig(
            q=args.q, c_star=np.zeros((args.q, args.q)), det=args.det,
            steps=args.steps, reps=args.reps, seed=args.seed,
            levels=(1.0 - args.alpha1, 0.90, 0.95, 0.99),
        )
        c_lo = ds.n * (rho - 1.0)
        c_step = max(0.5, ds.n * args.grid_step / 2.0)
        grid = list(np.arange(c_lo, 1e-9, c_step)) + [0.0]
        table = build_table([np.array([[c]]) for c in grid], template, args.table)
        em.add_scalars("table", {"built": args.table, "nodes": len(table.entries)})
    else:
        raise TableCoverageError(
            f"critical-value table {args.table} not found; rerun with --build-table to create it"
        )

    design = make_design(ds.values, args.k, args.det)
    grid = LambdaGrid(family="scalar", q=args.q, rho=rho, eig_step=args.grid_step)
    block = ci_lambda(args.alpha1, ds.values, args.k, args.det, grid, table, design=design)
    em.add_table(
        "dynamics-block confidence set (accepted nodes)",
        ["lambda", "lr", "critical"],
        [[float(lam[0, 0]), lr, crit] for _, lam, lr, crit in block.accepted],
    )
    pieces = []
    cond_rows = []
    if block.accepted:
        lams = [lam for _, lam, _, _ in block.accepted]
    else:
        prof = profile_lambda(grid, ds.values, args.k, args.det, design=design)
        lams = [prof.best_lam]
        em.add_scalars("warning", {"message": "empty block set; using grid argmax fallback"})
    for lam in lams:
        cset = ci_coefficient_given_lambda(
            args.alpha2, i, j, lam, ds.values, args.k, args.det, design=design
        )
        for lo, hi in cset.intervals:
            cond_rows.append([float(lam[0, 0]), lo, hi])
            pieces.append((lo, hi))
    em.add_table("conditional intervals", ["lambda", "lo", "hi"], cond_rows)
    merged = _merge_intervals(pieces)
    em.add_table("bonferroni confidence set", ["lo", "hi"], [[lo, hi] for lo, hi in merged])
    em.add_scalars(
        "levels",
        {
            "alpha1": args.alpha1,
            "alpha2": args.alpha2,
            "overall_level": 1.0 - args.alpha1 - args.alpha2,
        },
    )
    em.emit()
    return 0


def cmd_critvals(args) -> int:
    grid_vals = [float(v) for v in args.c_grid.split(",")]
    if args.q == 1:
        grid = [np.array([[v]]) for v in grid_vals]
    else:
        if len(grid_vals) % (args.q * args.q):
            raise DomainError(
                f"--c-grid must supply multiples of q*q={args.q * args.q} values for q>1"
            )
        grid = [
            np.asarray(grid_vals[s: s + args.q * args.q]).reshape(args.q, args.q)
            for s in range(0, len(grid_vals), args.q * args.q)
        ]
    levels = tuple(float(v) for v in args.levels.split(","))
    template = LimitDistConfig(
        q=args.q, c_star=grid[0], det=args.det, steps=args.steps,
        reps=args.reps, seed=args.seed, levels=levels,
    )
    config = dict(
        command="critvals", q=args.q, det=args.det, steps=args.steps, reps=args.reps,
        seed=args.seed, levels=args.levels, c_grid=args.c_grid, table=args.table,
    )
    em = _Emitter("critvals", config, args.format, args.output)
    table = build_table(grid, template, args.table)
    rows = []
    for entry in table.entries:
        rows.append(
            [" ".join(_fmt(v) for v in entry.c.ravel()), entry.redrawn]
            + [float(v) for v in entry.quantiles]
        )
    em.add_table(
        "simulated quantiles",
        ["c", "redrawn"] + [f"q[{lv:g}]" for lv in table.levels],
        rows,
    )
    em.add_scalars("table", {"path": args.table, "entries": len(table.entries)})
    em.emit()
    return 0


def cmd_simulate(args) -> int:
    coeffs, payload = _load_coeffs_json(args.coeffs)
    p = coeffs.p
    sigma = np.asarray(payload.get("sigma", np.eye(p)), dtype=float)
    mu = np.asarray(payload.get("mu", np.zeros(p)), dtype=float)
    delta = np.asarray(payload.get("delta", np.zeros(p)), dtype=float)
    spec = DgpSpec(coeffs=coeffs, sigma=sigma, mu=mu, delta=delta, n=args.n)
    y, eps = simulate(spec, args.seed, innovations="none" if args.zero_noise else None)
    config = dict(
        command="simulate", source=args.coeffs, n=args.n, seed=args.seed,
        zero_noise=args.zero_noise,
    )
    em = _Emitter("simulate", config, args.format, args.output)
    cols = [f"y{i + 1}" for i in range(p)]
    rows = [[float(v) for v in y[t]] for t in range(args.n)]
    if args.with_innovations:
        cols += [f"eps{i + 1}" for i in range(p)]
        rows = [r + [float(v) for v in eps[t]] for t, r in enumerate(rows)]
    em.add_table("simulated path", cols, rows)
    em.emit()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcvar",
        description="Quasi-cointegration analysis for VARs with near-unit roots",
    )
    parser.add_argument("--version", action="version", version=f"qcvar {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    def add_rho_group(sub):
        grp = sub.add_mutually_exclusive_group()
        grp.add_argument("--rho", type=float, help="radius of the stable region (default 0.9)")
        grp.add_argument(
            "--half-life", type=float, dest="half_life",
            help="minimum shock half-life in periods (alternative to --rho)",
        )

    sub = subs.add_parser("roots", help="characteristic roots and their classification")
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV file of observed series")
    src.add_argument("--coeffs", help="JSON file with inline lag matrices")
    sub.add_argument("--k", type=int, default=1, help="lag order (data mode)")
    sub.add_argument("--det", choices=("trend", "const", "none"), default="trend")
    add_rho_group(sub)
    _common_output_args(sub)
    sub.set_defaults(func=cmd_roots)

    sub = subs.add_parser("fit", help="OLS and profile estimates with the QCS basis")
    sub.add_argument("--data", required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--det", choices=("trend", "const", "none"), default="trend")
    sub.add_argument("--family", choices=("scalar", "symmetric", "normal"), default="scalar")
    sub.add_argument("--grid-step", type=float, default=None, dest="grid_step",
                     help="eigenvalue grid step (default 0.005 scalar, 0.01 symmetric)")
    add_rho_group(sub)
    _common_output_args(sub)
    sub.set_defaults(func=cmd_fit)

    sub = subs.add_parser("irf", help="impulse responses and their near/stable split")
    sub.add_argument("--coeffs", required=True, help="JSON file with inline lag matrices")
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--horizon", type=int, default=20)
    _common_output_args(sub)
    sub.set_defaults(func=cmd_irf)

    sub = subs.add_parser("lr", help="likelihood-ratio statistics at a hypothesised block")
    sub.add_argument("--data", required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--det", choices=("trend", "const", "none"), default="trend")
    sub.add_argument("--lambda0", required=True, help="scalar or q*q comma-separated entries")
    sub.add_argument("--coef", type=_coef_pair, help="coefficient indices i,j (0-based)")
    sub.add_argument("--a0", type=float, help="hypothesised coefficient value")
    sub.add_argument("--table", help="critical-value table for the block statistic")
    add_rho_group(sub)
    _common_output_args(sub)
    sub.set_defaults(func=cmd_lr)

    sub = subs.add_parser("ci", help="confidence sets including the Bonferroni interval")
    sub.add_argument("--data", required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--det", choices=("trend", "const", "none"), default="trend")
    sub.add_argument("--alpha1", type=float, default=0.025)
    sub.add_argument("--alpha2", type=float, default=0.025)
    sub.add_argument("--coef", type=_coef_pair, required=True, help="indices i,j (0-based)")
    sub.add_argument("--table", required=True, help="critical-value table path")
    sub.add_argument("--build-table", action="store_true", dest="build_table")
    sub.add_argument("--grid-step", type=float, default=0.005, dest="grid_step")
    sub.add_argument("--steps", type=int, default=2000)
    sub.add_argument("--reps", type=int, default=100_000)
    sub.add_argument("--seed", type=int, default=0)
    add_rho_group(sub)
    _common_output_args(sub)
    sub.set_defaults(func=cmd_ci)

    sub = subs.add_parser("critvals", help="build or extend a critical-value table")
    sub.add_argument("--q", type=int, default=1)
    sub.add_argument("--det", choices=("trend", "const", "none"), default="trend")
    sub.add_argument("--c-grid", required=True, dest="c_grid",
                     help="comma-separated localisation values (q*q per node for q>1); "
                          "write --c-grid=-5,... to protect a leading minus sign")
    sub.add_argument("--steps", type=int, default=2000)
    sub.add_argument("--reps", type=int, default=100_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--levels", default="0.9,0.95,0.99")
    sub.add_argument("--table", required=True, help="output table path")
    _common_output_args(sub)
    sub.set_defaults(func=cmd_critvals)

    sub = subs.add_parser("simulate", help="simulate a path from inline coefficients")
    sub.add_argument("--coeffs", required=True, help="JSON with phi and optional sigma/mu/delta")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--zero-noise", action="store_true", dest="zero_noise")
    sub.add_argument("--with-innovations", action="store_true", dest="with_innovations")
    _common_output_args(sub)
    sub.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TableCoverageError as exc:
        print(f"error (table coverage): {exc}", file=sys.stderr)
        return 4
    except (NumericalError, ConstructionError, SingularDesignError, ClassificationError) as exc:
        print(f"error (numerical): {exc}", file=sys.stderr)
        return 3
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error (input): {exc}", file=sys.stderr)
        return 2
    except QcvarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
