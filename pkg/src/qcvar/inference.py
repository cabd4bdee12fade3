"""Likelihood-ratio statistics and confidence sets for the near-unit
block and for scalar quasi-cointegrating coefficients.

The LR for a hypothesised dynamics block compares the restricted profile
fit against the unrestricted maximum of the fixed-weight loglikelihood,
which is attained exactly at the OLS fit (``reference="ols"``, the
default); a grid-profiled reference over the dynamics search space is
available as ``reference="grid"``.  Conditional confidence intervals
for a single subspace coefficient invert the chi-square(1) LR test by
bracketed bisection, and the Bonferroni set unions those intervals over
a confidence set for the dynamics block.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2

from .exceptions import NumericalError, QcvarError, TableCoverageError
from .likelihood import (
    Design,
    FitResult,
    LambdaGrid,
    _as_design,
    ols_fit,
    profile_a,
    profile_lambda,
)
from .limitdist import QuantileTable, c_star, lookup
from .spectral import split

__all__ = [
    "LrStatistic",
    "ConfidenceSet",
    "chi2_quantile",
    "lr_lambda",
    "lr_coefficient",
    "ci_lambda",
    "ci_coefficient_given_lambda",
    "bonferroni_ci",
]

logger = logging.getLogger("qcvar.inference")

#: LR values this far below zero indicate an optimizer inconsistency.
LR_SLACK = 1e-8


def chi2_quantile(level: float) -> float:
    """Quantile of the chi-square distribution with one degree of freedom."""
    return float(chi2.ppf(level, df=1))


def _clamp_lr(value: float, context: str) -> float:
    if value < -LR_SLACK:
        raise NumericalError(
            f"{context}: LR = {value:.3e} is negative beyond slack; the "
            "restricted optimum exceeds its reference maximum"
        )
    if value < 0.0:
        logger.info("%s: clamping LR %.3e to 0", context, value)
        return 0.0
    return value


@dataclass(frozen=True)
class LrStatistic:
    """A likelihood-ratio statistic and the two fits behind it."""

    kind: str
    value: float
    null_lambda: np.ndarray
    null_coef: Optional[tuple]
    fit_unrestricted: Optional[FitResult]
    fit_restricted: FitResult


@dataclass(frozen=True)
class ConfidenceSet:
    """A confidence set, reported as disjoint intervals or grid nodes.

    For the dynamics block, ``accepted`` holds the accepted grid nodes
    as (param, lam, lr, critical value) tuples.  For scalar
    coefficients, ``intervals`` is a minimal union of disjoint [lo, hi]
    pairs and ``hull`` their envelope.  ``diagnostics`` records grid
    resolution, failed fits and fallback events.
    """

    kind: str
    level: float
    intervals: tuple = ()
    accepted: tuple = ()
    hull: Optional[tuple] = None
    diagnostics: tuple = ()

    def contains(self, value: float) -> bool:
        return any(lo - 1e-12 <= value <= hi + 1e-12 for lo, hi in self.intervals)


def _reference_loglik(
    data,
    k: int,
    det: str,
    lambda_space: Optional[LambdaGrid],
    reference: str,
    design: Design,
) -> tuple[float, Optional[FitResult]]:
    if reference == "ols":
        fit = ols_fit(data, k, det, design=design)
        return fit.loglik, fit
    if reference == "grid":
        if lambda_space is None:
            raise QcvarError("reference='grid' requires a lambda_space")
        prof = profile_lambda(lambda_space, data, k, det, design=design, refine=True)
        return prof.loglik, prof.best_fit
    raise QcvarError(f"unknown reference {reference!r}")


def lr_lambda(
    lambda0: np.ndarray,
    data: np.ndarray,
    k: int,
    det: str,
    lambda_space: Optional[LambdaGrid] = None,
    *,
    reference: str = "ols",
    design: Optional[Design] = None,
) -> LrStatistic:
    """LR statistic for the hypothesis that the near-unit block equals lambda0.

    ``2 * [max loglik - profile loglik at lambda0]``, where the
    reference maximum is the exact unrestricted (OLS) maximum by
    default, or the refined grid profile over ``lambda_space`` with
    ``reference="grid"``.
    """
    dz = _as_design(data, k, det, design)
    lambda0 = np.atleast_2d(np.asarray(lambda0, dtype=float))
    restricted = profile_a(lambda0, data, k, det, design=dz)
    ref_loglik, ref_fit = _reference_loglik(data, k, det, lambda_space, reference, dz)
    value = _clamp_lr(2.0 * (ref_loglik - restricted.loglik), "lr_lambda")
    return LrStatistic(
        kind="lambda",
        value=value,
        null_lambda=lambda0,
        null_coef=None,
        fit_unrestricted=ref_fit,
        fit_restricted=restricted,
    )


def lr_coefficient(
    a0: float,
    i: int,
    j: int,
    lambda0: np.ndarray,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    design: Optional[Design] = None,
    fit_at_lambda0: Optional[FitResult] = None,
) -> LrStatistic:
    """LR statistic for the coefficient hypothesis a[i, j] = a0, given lambda0.

    Both maximisations impose the dynamics block; the restricted side
    additionally freezes the (i, j) entry of the subspace matrix.
    ``fit_at_lambda0`` may carry a precomputed unrestricted-side fit.
    """
    dz = _as_design(data, k, det, design)
    lambda0 = np.atleast_2d(np.asarray(lambda0, dtype=float))
    fit_u = fit_at_lambda0 if fit_at_lambda0 is not None else profile_a(
        lambda0, data, k, det, design=dz
    )
    fit_r = profile_a(
        lambda0, data, k, det,
        design=dz, fixed_entry=(i, j, float(a0)), init=fit_u.a_hat,
    )
    value = _clamp_lr(2.0 * (fit_u.loglik - fit_r.loglik), "lr_coefficient")
    return LrStatistic(
        kind="coefficient",
        value=value,
        null_lambda=lambda0,
        null_coef=(i, j, float(a0)),
        fit_unrestricted=fit_u,
        fit_restricted=fit_r,
    )


def _plugin_c_star(n: int, lam0: np.ndarray, fit: FitResult, dz: Design) -> np.ndarray:
    """Feasible localisation argument n(lam0 - I), similarity-transformed.

    For q = 1 the transform is the identity.  For q >= 2 the plug-in
    scale is ``l_near' sigma l_near`` computed from the restricted fit.
    """
    q = lam0.shape[0]
    c_raw = n * (lam0 - np.eye(q))
    if q == 1:
        return c_raw
    sp = fit.split if fit.split is not None else split(fit.coeffs, q, warn_ill_conditioned=False)
    delta = sp.l_near.T @ dz.sigma_ols @ sp.l_near
    return c_star(c_raw, 0.5 * (delta + delta.T))


def ci_lambda(
    alpha1: float,
    data: np.ndarray,
    k: int,
    det: str,
    lambda_space: LambdaGrid,
    table: QuantileTable,
    *,
    reference: str = "ols",
    design: Optional[Design] = None,
) -> ConfidenceSet:
    """Level 1 - alpha1 confidence set for the near-unit dynamics block.

    Scans the grid and accepts the nodes whose LR statistic is at most
    the tabulated quantile at the localisation point n(lambda0 - I_q)
    (similarity-transformed by the plug-in scale for q >= 2).

    Raises
    ------
    TableCoverageError
        Listing the localisation values missing from the table.
    """
    dz = _as_design(data, k, det, design)
    n = dz.n
    level = 1.0 - alpha1
    ref_loglik, _ = _reference_loglik(data, k, det, lambda_space, reference, dz)
    accepted = []
    diagnostics = []
    missing = []
    for param, lam in lambda_space.points():
        try:
            fit = profile_a(lam, data, k, det, design=dz)
        except QcvarError as exc:
            diagnostics.append(f"grid point {lam.tolist()} failed: {exc}")
            continue
        value = _clamp_lr(2.0 * (ref_loglik - fit.loglik), "ci_lambda")
        try:
            crit = lookup(table, _plugin_c_star(n, lam, fit, dz), level)
        except TableCoverageError:
            missing.append(n * (lam - np.eye(lam.shape[0])))
            continue
        if value <= crit:
            accepted.append((param, lam, value, crit))
    if missing:
        listed = ", ".join(np.array2string(m, precision=4) for m in missing[:8])
        raise TableCoverageError(
            f"{len(missing)} grid points have no table coverage; missing "
            f"localisation values include {listed}"
        )
    intervals = ()
    if lambda_space.family == "scalar" and accepted:
        lams = sorted(float(lam[0, 0]) for _, lam, _, _ in accepted)
        runs = []
        start = prev = lams[0]
        step = lambda_space.resolved_eig_step * 1.5
        for v in lams[1:]:
            if v - prev > step:
                runs.append((start, prev))
                start = v
            prev = v
        runs.append((start, prev))
        intervals = tuple(runs)
    return ConfidenceSet(
        kind="lambda",
        level=level,
        intervals=intervals,
        accepted=tuple(accepted),
        hull=(intervals[0][0], intervals[-1][1]) if intervals else None,
        diagnostics=tuple(diagnostics),
    )


def _lr_of(a0: float, i, j, lambda0, data, k, det, dz, fit_u) -> float:
    return lr_coefficient(
        a0, i, j, lambda0, data, k, det, design=dz, fit_at_lambda0=fit_u
    ).value


def ci_coefficient_given_lambda(
    alpha2: float,
    i: int,
    j: int,
    lambda0: np.ndarray,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    design: Optional[Design] = None,
    fit_at_lambda0: Optional[FitResult] = None,
    scan_points: int = 21,
) -> ConfidenceSet:
    """Conditional confidence interval for a[i, j] given the dynamics block.

    Inverts the chi-square(1) LR test by geometric bracket expansion
    from the conditional optimum followed by bisection (endpoint
    tolerance 1e-6).  A scan across the bracketed range detects
    multimodal profiles, which are reported as unions of intervals; a
    flat profile yields an unbounded side, reported in diagnostics.
    """
    dz = _as_design(data, k, det, design)
    lambda0 = np.atleast_2d(np.asarray(lambda0, dtype=float))
    fit_u = fit_at_lambda0 if fit_at_lambda0 is not None else profile_a(
        lambda0, data, k, det, design=dz
    )
    center = float(fit_u.a_hat[i, j])
    threshold = chi2_quantile(1.0 - alpha2)

    def g(a0: float) -> float:
        return _lr_of(a0, i, j, lambda0, data, k, det, dz, fit_u) - threshold

    # curvature-based initial half-width: LR ~ curv * (a - center)^2
    h = 1e-4 * (1.0 + abs(center))
    curv = (g(center + h) + threshold + g(center - h) + threshold) / (2.0 * h * h)
    se = 1.0 / np.sqrt(curv) if curv > 0 else 1.0 + abs(center)
    half = 2.0 * se

    diagnostics = []
    bounds = {}
    for side, sign in (("lower", -1.0), ("upper", +1.0)):
        width = half
        found = None
        for _ in range(60):
            cand = center + sign * width
            if g(cand) > 0.0:
                found = cand
                break
            width *= 2.0
        if found is None:
            diagnostics.append(f"{side} endpoint unbounded after 60 expansions")
            bounds[side] = sign * np.inf
        else:
            inner = center + sign * (width / 2.0 if width > half else 0.0)
            if g(inner) > 0.0:
                inner = center
            lo, hi = (found, inner) if sign < 0 else (inner, found)
            bounds[side] = float(brentq(g, lo, hi, xtol=1e-6))

    lo, hi = bounds["lower"], bounds["upper"]
    if not np.isfinite(lo) or not np.isfinite(hi):
        return ConfidenceSet(
            kind="coefficient",
            level=1.0 - alpha2,
            intervals=((lo, hi),),
            hull=(lo, hi),
            diagnostics=tuple(diagnostics),
        )

    # scan for multimodality across the bracketed range
    grid = np.linspace(lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo), scan_points)
    values = np.array([g(v) for v in grid])
    inside = values <= 0.0
    runs = []
    start = None
    for idx, ok in enumerate(inside):
        if ok and start is None:
            start = idx
        elif not ok and start is not None:
            runs.append((start, idx - 1))
            start = None
    if start is not None:
        runs.append((start, len(grid) - 1))

    if len(runs) <= 1:
        intervals = ((lo, hi),)
    else:
        diagnostics.append(f"profile test accepted {len(runs)} separate runs; reporting a union")
        intervals = []
        for s_idx, e_idx in runs:
            left = grid[s_idx] if s_idx == 0 else brentq(g, grid[s_idx - 1], grid[s_idx], xtol=1e-6)
            right = (
                grid[e_idx] if e_idx == len(grid) - 1 else brentq(g, grid[e_idx], grid[e_idx + 1], xtol=1e-6)
            )
            intervals.append((float(left), float(right)))
        intervals = tuple(intervals)

    return ConfidenceSet(
        kind="coefficient",
        level=1.0 - alpha2,
        intervals=tuple(intervals),
        hull=(intervals[0][0], intervals[-1][1]),
        diagnostics=tuple(diagnostics),
    )


def _merge_intervals(intervals: Sequence[tuple]) -> tuple:
    items = sorted(intervals)
    merged = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1] + 1e-12:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def bonferroni_ci(
    alpha1: float,
    alpha2: float,
    i: int,
    j: int,
    data: np.ndarray,
    k: int,
    det: str,
    lambda_space: LambdaGrid,
    table: QuantileTable,
    *,
    reference: str = "ols",
    design: Optional[Design] = None,
) -> ConfidenceSet:
    """Bonferroni confidence set for a[i, j] at level 1 - alpha1 - alpha2.

    Unions the conditional coefficient intervals over every dynamics
    block accepted by :func:`ci_lambda`.  If the block confidence set is
    empty at the grid resolution, the conditional interval at the grid
    argmax is returned with a prominent warning (a documented fallback;
    an empty set would be uninformative).
    """
    if not 0.0 < alpha1 + alpha2 < 1.0:
        raise QcvarError("alpha1 + alpha2 must lie in (0, 1)")
    dz = _as_design(data, k, det, design)
    block_set = ci_lambda(
        alpha1, data, k, det, lambda_space, table, reference=reference, design=dz
    )
    diagnostics = list(block_set.diagnostics)
    if block_set.accepted:
        lams = [lam for _, lam, _, _ in block_set.accepted]
    else:
        warnings.warn(
            "the dynamics-block confidence set is empty at this grid resolution; "
            "falling back to the conditional interval at the grid argmax",
            UserWarning,
            stacklevel=2,
        )
        diagnostics.append("empty block confidence set; argmax fallback used")
        prof = profile_lambda(lambda_space, data, k, det, design=dz)
        lams = [prof.best_lam]

    pieces = []
    for lam in lams:
        cset = ci_coefficient_given_lambda(
            alpha2, i, j, lam, data, k, det, design=dz
        )
        diagnostics.extend(cset.diagnostics)
        pieces.extend(cset.intervals)
    intervals = _merge_intervals(pieces)
    return ConfidenceSet(
        kind="bonferroni",
        level=1.0 - alpha1 - alpha2,
        intervals=intervals,
        accepted=block_set.accepted,
        hull=(intervals[0][0], intervals[-1][1]) if intervals else None,
        diagnostics=tuple(diagnostics),
    )
