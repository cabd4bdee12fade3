"""Concentrated Gaussian (quasi-)likelihood machinery.

All fits condition on the first k observations and share one
convention: the quadratic form of the concentrated loglikelihood is
weighted by the *unrestricted* OLS variance estimator, which is held
fixed inside every restricted maximisation.  Restricted fits impose the
linear constraint ``Phi @ col{[a; I] lam0^(k-i)} = [a; I] lam0^k`` and
have a closed form; the outer profile over the subspace coefficients
``a`` is a small derivative-free search.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh
from scipy.optimize import minimize, minimize_scalar

from .exceptions import (
    ConditionWarning,
    DomainError,
    NormalizationError,
    NumericalError,
    QcvarError,
    SingularDesignError,
)
from .spectral import LambdaParam, SpectralSplit, VarCoefficients, lambda_materialize, split

__all__ = [
    "DET_CASES",
    "Design",
    "FitResult",
    "LambdaGrid",
    "ProfileLambdaResult",
    "make_design",
    "ols_fit",
    "concentrated_loglik",
    "restricted_fit",
    "profile_a",
    "rrr_fit",
    "profile_lambda",
]

DET_CASES = ("trend", "const", "none")


def _check_det(det: str) -> str:
    if det not in DET_CASES:
        raise DomainError(f"det must be one of {DET_CASES}, got {det!r}")
    return det


@dataclass(frozen=True)
class FitResult:
    """Outcome of a (possibly restricted) VAR fit.

    ``sigma`` is the residual second-moment matrix of this fit divided
    by the effective sample size; ``loglik`` is the concentrated value,
    always weighted by the unrestricted OLS variance estimator of the
    same design.  ``det_coeffs`` holds the intercept/trend coefficients
    in the original (unscaled) time parametrisation, one column per
    deterministic term.
    """

    coeffs: VarCoefficients
    sigma: np.ndarray
    det_coeffs: Optional[np.ndarray]
    loglik: float
    status: str
    det: str
    n_eff: int
    constraint_residual: Optional[float] = None
    a_hat: Optional[np.ndarray] = None
    lam0: Optional[np.ndarray] = None
    split: Optional[SpectralSplit] = None


class Design:
    """Cached regression arrays for one (data, k, det) triple.

    The deterministic trend column is centred and scaled to keep the
    moment matrix well conditioned; :meth:`unscale_det` maps fitted
    coefficients back to the raw ``m + d t`` parametrisation.
    """

    def __init__(self, data: np.ndarray, k: int, det: str):
        data = np.atleast_2d(np.asarray(data, dtype=float))
        if data.ndim != 2:
            raise DomainError("data must be an n-by-p array")
        n, p = data.shape
        if k < 1:
            raise DomainError("lag order k must be positive")
        _check_det(det)
        n_det = {"trend": 2, "const": 1, "none": 0}[det]
        d = n_det + k * p
        n_eff = n - k
        if n_eff < d + 1:
            raise SingularDesignError(
                f"only {n_eff} usable observations for {d} regressors per equation"
            )

        t = np.arange(k + 1, n + 1, dtype=float)
        t_center = t.mean()
        t_scale = float(n)
        det_cols = []
        if det in ("trend", "const"):
            det_cols.append(np.ones(n_eff))
        if det == "trend":
            det_cols.append((t - t_center) / t_scale)
        W = np.empty((n_eff, d))
        for j, col in enumerate(det_cols):
            W[:, j] = col
        for i in range(1, k + 1):
            W[:, n_det + (i - 1) * p: n_det + i * p] = data[k - i: n - i]
        Y = data[k:]

        self.data = data
        self.k, self.det, self.p = k, det, p
        self.n, self.n_eff, self.n_det, self.d = n, n_eff, n_det, d
        self.t_center, self.t_scale = t_center, t_scale
        self.W, self.Y = W, Y
        self.WtW = W.T @ W
        self.WtY = W.T @ Y
        self.YtY = Y.T @ Y
        cond = np.linalg.cond(self.WtW)
        if np.isfinite(cond) and cond < 1e12:
            self.Q = np.linalg.inv(self.WtW)
            coef = self.Q @ self.WtY  # d x p
        else:
            # rank-deficient design: minimum-norm least squares still
            # interpolates (e.g. exactly deterministic data)
            warnings.warn(
                f"regressor moment matrix is ill conditioned ({cond:.3e}); "
                "using a pseudo-inverse fit",
                ConditionWarning,
                stacklevel=3,
            )
            self.Q = np.linalg.pinv(self.WtW, rcond=1e-13)
            coef, *_ = np.linalg.lstsq(W, Y, rcond=None)
        self.theta_ols = coef.T  # p x d
        resid = Y - W @ coef
        sigma = (resid.T @ resid) / n_eff
        self.sigma_ols = 0.5 * (sigma + sigma.T)
        sign, logdet = np.linalg.slogdet(self.sigma_ols)
        if sign <= 0:
            # perfect fit (or degenerate residuals): concentrated value diverges
            self.logdet_sigma_ols = -np.inf
            self.loglik_ols = np.inf
            self._sigma_ols_cho = None
        else:
            self.logdet_sigma_ols = logdet
            self.loglik_ols = -0.5 * n_eff * logdet - 0.5 * n_eff * p
            self._sigma_ols_cho = cho_factor(self.sigma_ols)

    def ssr(self, theta: np.ndarray) -> np.ndarray:
        """Residual second-moment matrix of the coefficient matrix theta."""
        cross = theta @ self.WtY
        out = self.YtY - cross - cross.T + theta @ self.WtW @ theta.T
        return 0.5 * (out + out.T)

    def loglik_fixed_weight(self, theta: np.ndarray) -> float:
        """Concentrated loglik of theta under the OLS variance weight."""
        if self._sigma_ols_cho is None:
            raise SingularDesignError(
                "the OLS residual covariance is singular; the fixed-weight "
                "loglikelihood is undefined"
            )
        quad = np.trace(cho_solve(self._sigma_ols_cho, self.ssr(theta)))
        return -0.5 * self.n_eff * self.logdet_sigma_ols - 0.5 * quad

    def unscale_det(self, det_block: np.ndarray) -> Optional[np.ndarray]:
        """Map fitted deterministic coefficients to the raw m + d t form."""
        if self.n_det == 0:
            return None
        out = det_block.copy()
        if self.det == "trend":
            d_raw = det_block[:, 1] / self.t_scale
            m_raw = det_block[:, 0] - d_raw * self.t_center
            out = np.column_stack([m_raw, d_raw])
        return out

    def split_theta(self, theta: np.ndarray) -> tuple[Optional[np.ndarray], np.ndarray]:
        return (theta[:, : self.n_det] if self.n_det else None), theta[:, self.n_det:]


def make_design(data: np.ndarray, k: int, det: str) -> Design:
    """Build (or reuse) the regression design for repeated fits."""
    return Design(data, k, det)


def _as_design(data, k, det, design: Optional[Design]) -> Design:
    if design is not None:
        if design.k != k or design.det != det:
            raise DomainError("supplied design does not match (k, det)")
        return design
    return Design(data, k, det)


def ols_fit(data: np.ndarray, k: int, det: str, *, design: Optional[Design] = None) -> FitResult:
    """Unrestricted equation-by-equation least squares fit.

    ``sigma`` is the residual moment matrix divided by the effective
    sample size (the variance weight used by every restricted fit).
    """
    dz = _as_design(data, k, det, design)
    det_block, phi_block = dz.split_theta(dz.theta_ols)
    return FitResult(
        coeffs=VarCoefficients.from_stacked(phi_block, k),
        sigma=dz.sigma_ols,
        det_coeffs=dz.unscale_det(det_block) if det_block is not None else None,
        loglik=dz.loglik_ols,
        status="converged",
        det=det,
        n_eff=dz.n_eff,
    )


def concentrated_loglik(
    coeffs: VarCoefficients,
    sigma: np.ndarray,
    data: np.ndarray,
    det: str,
) -> float:
    """Evaluate the concentrated loglikelihood at given lag coefficients.

    The deterministic terms are minimised out by an inner least squares
    (their optimum does not depend on the weight), and the quadratic
    form is weighted by ``sigma``.
    """
    _check_det(det)
    sigma = np.asarray(sigma, dtype=float)
    try:
        cho = cho_factor(sigma)
    except np.linalg.LinAlgError as exc:
        raise DomainError("sigma must be positive definite") from exc
    dz = Design(data, coeffs.k, det)
    u = dz.Y - dz.W[:, dz.n_det:] @ coeffs.stacked.T
    if dz.n_det:
        D = dz.W[:, : dz.n_det]
        coef, *_ = np.linalg.lstsq(D, u, rcond=None)
        u = u - D @ coef
    quad = np.trace(cho_solve(cho, u.T @ u))
    sign, logdet = np.linalg.slogdet(sigma)
    return -0.5 * dz.n_eff * logdet - 0.5 * quad


def _constraint_matrices(a: np.ndarray, lam0: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (r_near, M, N) of the linear constraint Phi M = N."""
    q = lam0.shape[0]
    a = np.asarray(a, dtype=float).reshape(-1, q)
    r_near = np.vstack([a, np.eye(q)])
    blocks = []
    power = np.eye(q)
    for _ in range(k):
        blocks.append(r_near @ power)
        power = power @ lam0
    M = np.vstack(blocks[::-1])
    N = r_near @ power  # power == lam0^k after the loop
    return r_near, M, N


def restricted_fit(
    a: np.ndarray,
    lam0: np.ndarray,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    design: Optional[Design] = None,
) -> FitResult:
    """Closed-form fit under the near-unit subspace constraint.

    Maximises the concentrated loglikelihood (OLS variance weight) over
    all coefficients subject to ``Phi @ M(a, lam0) = N(a, lam0)``, a
    linear restriction handled by restricted generalised least squares.
    Because the restriction acts on the regressor side and the weight on
    the equation side, the weight cancels from the estimator (it still
    scales the reported loglikelihood).
    """
    dz = _as_design(data, k, det, design)
    lam0 = np.atleast_2d(np.asarray(lam0, dtype=float))
    q = lam0.shape[0]
    if q > dz.p:
        raise DomainError(f"q = {q} exceeds series dimension {dz.p}")
    a = np.asarray(a, dtype=float).reshape(dz.p - q, q)

    if q == 0:
        res = ols_fit(data, k, det, design=dz)
        return replace(res, constraint_residual=0.0, a_hat=a, lam0=lam0)

    _, M, N = _constraint_matrices(a, lam0, k)
    K = np.vstack([np.zeros((dz.n_det, q)), M])
    QK = dz.Q @ K
    KQK = K.T @ QK
    try:
        correction = np.linalg.solve(KQK, QK.T)  # (K' Q K)^{-1} K' Q
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("restricted design is singular at this (a, lam0)") from exc
    gap = dz.theta_ols @ K - N
    theta_r = dz.theta_ols - gap @ correction

    det_block, phi_block = dz.split_theta(theta_r)
    resid_norm = float(np.linalg.norm(phi_block @ M - N))
    scale = 1.0 + float(np.linalg.norm(phi_block))
    status = "converged" if resid_norm <= 1e-8 * scale else "constraint-infeasible"
    return FitResult(
        coeffs=VarCoefficients.from_stacked(phi_block, k),
        sigma=dz.ssr(theta_r) / dz.n_eff,
        det_coeffs=dz.unscale_det(det_block) if det_block is not None else None,
        loglik=dz.loglik_fixed_weight(theta_r),
        status=status,
        det=det,
        n_eff=dz.n_eff,
        constraint_residual=resid_norm,
        a_hat=a,
        lam0=lam0,
    )


def _init_a(lam0: np.ndarray, data, k, det, dz: Design) -> np.ndarray:
    """Starting value for the profile search over a."""
    q = lam0.shape[0]
    r = dz.p - q
    try:
        sp = split(ols_fit(data, k, det, design=dz).coeffs, q, warn_ill_conditioned=False)
        return sp.a
    except QcvarError:
        pass
    try:
        lam_scalar = float(np.clip(np.mean(np.linalg.eigvals(lam0).real), 0.0, 1.0))
        return rrr_fit(lam_scalar, q, data, k, det, design=dz).a_hat
    except QcvarError:
        return np.zeros((r, q))


def profile_a(
    lam0: np.ndarray,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    init: Optional[np.ndarray] = None,
    fixed_entry: Optional[tuple[int, int, float]] = None,
    design: Optional[Design] = None,
    xatol: float = 1e-7,
    fatol: float = 1e-8,
    max_restarts: int = 5,
) -> FitResult:
    """Profile the concentrated loglikelihood over the subspace matrix a.

    Runs a Nelder-Mead simplex search (with restarts from the incumbent
    optimum) over the free entries of a, each candidate evaluated by the
    closed-form :func:`restricted_fit`.  With ``fixed_entry=(i, j, a0)``
    the (i, j) coordinate is frozen at ``a0`` and excluded from the
    search, which is the restricted side of the coefficient LR test.
    """
    dz = _as_design(data, k, det, design)
    lam0 = np.atleast_2d(np.asarray(lam0, dtype=float))
    q = lam0.shape[0]
    r = dz.p - q

    if fixed_entry is not None:
        i, j, a0 = fixed_entry
        if not (0 <= i < r and 0 <= j < q):
            raise DomainError(f"fixed entry ({i}, {j}) outside the {r}x{q} coefficient block")

    if r * q == 0:
        return restricted_fit(np.zeros((r, q)), lam0, data, k, det, design=dz)

    a_start = np.asarray(init, dtype=float).reshape(r, q) if init is not None else _init_a(
        lam0, data, k, det, dz
    )

    mask = np.ones((r, q), dtype=bool)
    base = a_start.copy()
    if fixed_entry is not None:
        i, j, a0 = fixed_entry
        mask[i, j] = False
        base[i, j] = a0

    n_free = int(mask.sum())
    if n_free == 0:
        return restricted_fit(base, lam0, data, k, det, design=dz)

    def to_matrix(x: np.ndarray) -> np.ndarray:
        out = base.copy()
        out[mask] = x
        return out

    def objective(x: np.ndarray) -> float:
        return -restricted_fit(to_matrix(x), lam0, data, k, det, design=dz).loglik

    x = base[mask].astype(float)
    best_val = objective(x)
    status = "converged"
    for _ in range(max_restarts + 1):
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={"xatol": xatol, "fatol": fatol, "maxiter": 400 * max(1, n_free)},
        )
        improved = best_val - res.fun
        if res.fun < best_val:
            best_val, x = res.fun, res.x
        status = "converged" if res.success else "max-iter"
        if improved < 10 * fatol:
            break

    fit = restricted_fit(to_matrix(x), lam0, data, k, det, design=dz)
    return replace(fit, status=status)


def rrr_fit(
    lambda0: float,
    q: int,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    design: Optional[Design] = None,
) -> FitResult:
    """Rank-restricted fit for the scalar block ``lam0 * I_q``.

    Quasi-differences the data at ``lambda0`` and solves the canonical
    correlation eigenproblem between the quasi-differences and lagged
    levels (free regressors partialled out), which maximises the
    likelihood under a rank p-q restriction on the level coefficient.
    The recovered coefficients are mapped back to the levels VAR and
    evaluated under the common OLS variance weight, so the result is
    directly comparable with :func:`profile_a` at the same block.
    """
    dz = _as_design(data, k, det, design)
    lambda0 = float(lambda0)
    p, n, n_eff = dz.p, dz.n, dz.n_eff
    if not 0 <= q <= p:
        raise DomainError(f"q must lie in [0, {p}], got {q}")
    if lambda0 == 0.0 and k > 1:
        raise DomainError(
            "lambda0 = 0 with k > 1 degenerates the quasi-difference transform"
        )
    r = p - q
    y = dz.data

    dy = y[1:] - lambda0 * y[:-1]  # quasi-differences, index t = 2..n
    Z0 = dy[k - 1:]
    Z1 = y[k - 1: n - 1]
    z2_cols = [dz.W[:, : dz.n_det]] if dz.n_det else []
    for i in range(1, k):
        z2_cols.append(dy[k - 1 - i: n - 1 - i])
    Z2 = np.hstack(z2_cols) if z2_cols else np.empty((n_eff, 0))

    if Z2.shape[1]:
        coef0, *_ = np.linalg.lstsq(Z2, Z0, rcond=None)
        coef1, *_ = np.linalg.lstsq(Z2, Z1, rcond=None)
        R0 = Z0 - Z2 @ coef0
        R1 = Z1 - Z2 @ coef1
    else:
        R0, R1 = Z0, Z1

    S00 = R0.T @ R0 / n_eff
    S11 = R1.T @ R1 / n_eff
    S01 = R0.T @ R1 / n_eff

    if r == 0:
        pi_hat = np.zeros((p, p))
        beta_hat = np.zeros((p, 0))
    elif r == p:
        pi_hat = np.linalg.solve(S11, S01.T).T
        beta_hat = np.eye(p)
    else:
        try:
            target = S01.T @ cho_solve(cho_factor(S00), S01)
            vals, vecs = eigh(0.5 * (target + target.T), S11)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"canonical correlation eigenproblem failed: {exc}") from exc
        beta_hat = vecs[:, ::-1][:, :r]  # descending eigenvalue order
        alpha_hat = S01 @ beta_hat @ np.linalg.inv(beta_hat.T @ S11 @ beta_hat)
        pi_hat = alpha_hat @ beta_hat.T

    if Z2.shape[1]:
        coef2, *_ = np.linalg.lstsq(Z2, Z0 - Z1 @ pi_hat.T, rcond=None)
    else:
        coef2 = np.empty((0, p))
    det_block = coef2[: dz.n_det].T if dz.n_det else None
    psi = [coef2[dz.n_det + (i - 1) * p: dz.n_det + i * p].T for i in range(1, k)]

    phi = [None] * k
    if k == 1:
        phi[0] = lambda0 * np.eye(p) + pi_hat
    else:
        phi[0] = lambda0 * np.eye(p) + pi_hat + psi[0]
        for j in range(2, k):
            phi[j - 1] = psi[j - 1] - lambda0 * psi[j - 2]
        phi[k - 1] = -lambda0 * psi[k - 2]
    coeffs = VarCoefficients.from_matrices(phi)

    lam0 = lambda0 * np.eye(q)
    a_hat = None
    if 0 < q < p:
        b1 = beta_hat.T[:, :r]
        b2 = beta_hat.T[:, r:]
        try:
            a_hat = -np.linalg.solve(b1, b2)
        except np.linalg.LinAlgError as exc:
            raise NormalizationError(
                "leading block of the estimated quasi-cointegrating basis is "
                "singular; consider reordering the series"
            ) from exc
    elif q == p:
        a_hat = np.zeros((0, p))
    theta = np.hstack([coef2[: dz.n_det].T, coeffs.stacked]) if dz.n_det else coeffs.stacked

    resid_norm = None
    if a_hat is not None and q > 0:
        _, M, N = _constraint_matrices(a_hat, lam0, k)
        resid_norm = float(np.linalg.norm(coeffs.stacked @ M - N))
    return FitResult(
        coeffs=coeffs,
        sigma=dz.ssr(theta) / n_eff,
        det_coeffs=dz.unscale_det(det_block) if det_block is not None else None,
        loglik=dz.loglik_fixed_weight(theta),
        status="converged",
        det=det,
        n_eff=n_eff,
        constraint_residual=resid_norm,
        a_hat=a_hat,
        lam0=lam0,
    )


@dataclass(frozen=True)
class LambdaGrid:
    """Deterministic grid over the near-unit dynamics search space.

    For the scalar family the grid is uniform on [rho, 1] with the given
    eigenvalue step (default 0.005).  For the symmetric family with
    q = 2 it is the tensor product of ordered eigenvalue pairs (step
    ``eig_step``, default 0.01) and rotation angles on [0, pi/2) (step
    ``angle_step``).  Explicit candidate matrices may be supplied
    instead via ``candidates``.
    """

    family: str = "scalar"
    q: int = 1
    rho: float = 0.9
    eig_step: Optional[float] = None
    angle_step: float = float(np.pi / 16)
    candidates: Optional[tuple] = None

    @property
    def resolved_eig_step(self) -> float:
        if self.eig_step is not None:
            return self.eig_step
        return 0.005 if self.family == "scalar" else 0.01

    def points(self) -> list[tuple[Optional[LambdaParam], np.ndarray]]:
        step = self.resolved_eig_step
        if self.candidates is not None:
            return [(None, np.atleast_2d(np.asarray(c, dtype=float))) for c in self.candidates]
        if self.family == "scalar":
            if self.rho >= 1.0:
                lams = np.array([1.0])
            else:
                n_pts = int(round((1.0 - self.rho) / step)) + 1
                lams = np.linspace(self.rho, 1.0, max(n_pts, 2))
            out = []
            for lam in lams:
                param = LambdaParam("scalar", self.q, (float(lam),), rho=self.rho)
                out.append((param, lambda_materialize(param)))
            return out
        if self.family == "symmetric" and self.q == 2:
            n_eig = int(round((1.0 - self.rho) / step)) + 1
            eigs = np.linspace(self.rho, 1.0, max(n_eig, 2))
            n_ang = max(int(round((np.pi / 2) / self.angle_step)), 1)
            angles = np.arange(n_ang) * self.angle_step
            out = []
            for i, e1 in enumerate(eigs):
                for e2 in eigs[: i + 1]:
                    for ang in angles:
                        if e1 == e2 and ang > 0:
                            continue  # rotation is redundant for equal eigenvalues
                        param = LambdaParam(
                            "symmetric", 2, (float(e1), float(e2)), (float(ang),), rho=self.rho
                        )
                        out.append((param, lambda_materialize(param)))
            return out
        raise DomainError(
            f"no automatic grid for family {self.family!r} with q = {self.q}; "
            "supply explicit candidates"
        )


@dataclass(frozen=True)
class ProfileLambdaResult:
    """Grid profile over the near-unit dynamics space."""

    best_lam: np.ndarray
    best_param: Optional[LambdaParam]
    best_fit: FitResult
    trace: tuple
    failures: tuple

    @property
    def loglik(self) -> float:
        return self.best_fit.loglik


def profile_lambda(
    lambda_space: LambdaGrid,
    data: np.ndarray,
    k: int,
    det: str,
    *,
    design: Optional[Design] = None,
    refine: bool = False,
    init: Optional[np.ndarray] = None,
) -> ProfileLambdaResult:
    """Maximise the profile loglikelihood over a grid of dynamics blocks.

    Evaluates :func:`profile_a` at every grid point, recording the full
    trace; failing grid points are recorded and skipped.  With
    ``refine=True`` (scalar family) the incumbent is polished by a
    bounded continuous search between its neighbouring grid nodes.
    """
    dz = _as_design(data, k, det, design)
    pts = lambda_space.points()
    if not pts:
        raise DomainError("lambda grid is empty")
    trace = []
    failures = []
    best = None
    warm = init
    for param, lam in pts:
        try:
            fit = profile_a(lam, data, k, det, design=dz, init=warm)
        except QcvarError as exc:
            failures.append((param, lam, f"{type(exc).__name__}: {exc}"))
            continue
        warm = fit.a_hat
        trace.append((param, lam, fit.loglik, fit.status))
        if best is None or fit.loglik > best[2].loglik:
            best = (param, lam, fit)
    if best is None:
        raise NumericalError("every grid point failed; see failures for details")
    best_param, best_lam, best_fit = best

    if refine and lambda_space.candidates is None and lambda_space.family == "scalar":
        step = lambda_space.resolved_eig_step
        lo = max(lambda_space.rho, float(best_lam[0, 0]) - step)
        hi = min(1.0, float(best_lam[0, 0]) + step)

        def neg_profile(lam_scalar: float) -> float:
            return -profile_a(
                lam_scalar * np.eye(lambda_space.q), data, k, det,
                design=dz, init=best_fit.a_hat,
            ).loglik

        res = minimize_scalar(neg_profile, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-8})
        if -res.fun > best_fit.loglik:
            lam_ref = float(res.x) * np.eye(lambda_space.q)
            fit_ref = profile_a(lam_ref, data, k, det, design=dz, init=best_fit.a_hat)
            if fit_ref.loglik > best_fit.loglik:
                best_param = LambdaParam(
                    "scalar", lambda_space.q, (float(res.x),), rho=lambda_space.rho
                )
                best_lam, best_fit = lam_ref, fit_ref

    return ProfileLambdaResult(
        best_lam=best_lam,
        best_param=best_param,
        best_fit=best_fit,
        trace=tuple(trace),
        failures=tuple(failures),
    )
