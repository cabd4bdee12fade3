"""Data-generating processes for Monte Carlo work.

``build_var`` constructs VAR coefficients whose q largest roots have a
prescribed normalised right basis [a; I_q] and dynamics block, by a
least-norm correction of a stable base draw onto the defining linear
constraint.  ``local_sequence`` produces drifting sequences with the
near-unit block I + C/n, and ``simulate`` generates seeded sample paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import ConstructionError, DomainError
from .spectral import VarCoefficients, companion, roots

__all__ = [
    "DgpSpec",
    "NearUnitBase",
    "LocalSequence",
    "build_var",
    "local_sequence",
    "simulate",
]

#: Required modulus gap between the constructed stable roots and the
#: smallest near-unit eigenvalue.
ROOT_GAP = 1e-3


@dataclass(frozen=True)
class DgpSpec:
    """Full specification of a simulated VAR path.

    ``sigma`` must be symmetric positive definite; ``mu`` and ``delta``
    are the intercept and trend of the observed series.
    """

    coeffs: VarCoefficients
    sigma: np.ndarray
    mu: np.ndarray
    delta: np.ndarray
    n: int

    def __post_init__(self):
        p = self.coeffs.p
        sigma = np.asarray(self.sigma, dtype=float)
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        delta = np.asarray(self.delta, dtype=float).reshape(-1)
        if sigma.shape != (p, p):
            raise DomainError(f"sigma must be {p}x{p}, got {sigma.shape}")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise DomainError("sigma must be symmetric")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise DomainError("sigma must be positive definite") from exc
        if mu.shape != (p,) or delta.shape != (p,):
            raise DomainError("mu and delta must be p-vectors")
        if self.n < 1:
            raise DomainError("sample size must be positive")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def simple(cls, coeffs: VarCoefficients, n: int, sigma: Optional[np.ndarray] = None) -> "DgpSpec":
        """Spec with zero deterministics and identity (or given) noise."""
        p = coeffs.p
        return cls(
            coeffs=coeffs,
            sigma=np.eye(p) if sigma is None else sigma,
            mu=np.zeros(p),
            delta=np.zeros(p),
            n=n,
        )


@dataclass(frozen=True)
class NearUnitBase:
    """Fixed ingredients of a local-to-unity sequence.

    ``stationary`` is held constant along the sequence: either an
    explicit stable base coefficient matrix (p-by-kp), a pair
    ``(r_stable, lam_stable)`` for the exact k = 1 similarity
    construction, or an integer seed from which a stable base is drawn.
    """

    a: np.ndarray
    k: int
    stationary: Union[np.ndarray, tuple, int]

    def __post_init__(self):
        object.__setattr__(self, "a", np.atleast_2d(np.asarray(self.a, dtype=float)))


@dataclass(frozen=True)
class LocalSequence:
    """A realised element of a drifting near-unit sequence."""

    c: np.ndarray
    base: NearUnitBase
    n: int
    realized: VarCoefficients


def _match_roots(found: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair each target eigenvalue with its nearest distinct root.

    Returns (matched roots, remaining roots), using an optimal
    assignment so conjugate pairs cannot be double-counted.
    """
    cost = np.abs(found[None, :] - target[:, None])
    rows, cols = linear_sum_assignment(cost)
    matched = found[cols[np.argsort(rows)]]
    rest = np.delete(found, cols)
    return matched, rest


def _draw_stable_base(rng: np.random.Generator, p: int, k: int, radius: float) -> np.ndarray:
    """Random p-by-kp coefficients with companion spectral radius ``radius``.

    Scaling lag i by c^i rescales every characteristic root by c, so an
    arbitrary draw can be brought to the exact target radius.
    """
    for _ in range(20):
        blocks = [rng.normal(scale=1.0 / np.sqrt(k * p), size=(p, p)) for _ in range(k)]
        coeffs = VarCoefficients.from_matrices(blocks)
        top = np.abs(np.linalg.eigvals(companion(coeffs))).max()
        if top > 1e-8:
            c = radius / top
            return np.hstack([blocks[i] * c ** (i + 1) for i in range(k)])
    raise ConstructionError("could not draw a nondegenerate stable base")


def _stacked_near_basis(r_near: np.ndarray, lam: np.ndarray, k: int) -> np.ndarray:
    """col{r_near @ lam^(k-i)} for i = 1..k (the kp-by-q constraint matrix)."""
    blocks = []
    power = np.eye(lam.shape[0])
    for _ in range(k):
        blocks.append(r_near @ power)
        power = power @ lam
    return np.vstack(blocks[::-1])


def build_var(
    a: np.ndarray,
    lam_near: np.ndarray,
    k: int,
    *,
    stationary: Union[np.ndarray, tuple, None] = None,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    gap: float = ROOT_GAP,
    stable_radius: Optional[float] = None,
    max_tries: int = 50,
    max_modulus: float = 1.0,
) -> VarCoefficients:
    """Construct VAR(k) coefficients with prescribed near-unit block.

    The returned coefficients are the least-norm correction of a stable
    base onto the linear constraint ``Phi @ col{[a; I] lam^(k-i)} =
    [a; I] lam^k``, which forces the characteristic polynomial to have
    roots at the eigenvalues of ``lam_near`` with [a; I_q] as the
    normalised right basis.

    Parameters
    ----------
    a : ndarray
        (p-q)-by-q target subspace coefficients.
    lam_near : ndarray
        q-by-q near-unit dynamics; eigenvalue moduli must not exceed
        ``max_modulus``.
    k : int
        Lag order.
    stationary : optional
        Explicit stable part: a p-by-kp base coefficient matrix (or
        list of k blocks), or a ``(r_stable, lam_stable)`` pair for the
        exact similarity construction (k = 1 only).  When omitted, a
        stable base is drawn from ``rng``/``seed`` and redrawn (up to
        ``max_tries``) until the remaining roots clear the gap.
    gap : float
        Required modulus margin between stable roots and the smallest
        near-unit eigenvalue.

    Raises
    ------
    ConstructionError
        When the retry budget is exhausted or an explicit stable part
        violates the root gap.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    lam_near = np.atleast_2d(np.asarray(lam_near, dtype=float))
    q = lam_near.shape[0]
    if lam_near.shape != (q, q):
        raise DomainError("lam_near must be square")
    if a.shape[1] != q:
        raise DomainError(f"a must have {q} columns, got {a.shape[1]}")
    r = a.shape[0]
    p = r + q
    near_eigs = np.linalg.eigvals(lam_near)
    near_mods = np.abs(near_eigs)
    if near_mods.max() > max_modulus + 1e-12:
        raise DomainError(
            f"near-unit eigenvalue modulus {near_mods.max():.6g} exceeds {max_modulus}"
        )
    floor = near_mods.min() - gap
    if floor <= 0:
        raise DomainError("near-unit eigenvalues leave no room for stable roots below them")

    r_near = np.vstack([a, np.eye(q)])

    if isinstance(stationary, tuple):
        if k != 1:
            raise DomainError("the (r_stable, lam_stable) construction requires k = 1")
        r_stable = np.atleast_2d(np.asarray(stationary[0], dtype=float)).reshape(p, p - q)
        lam_stable = np.atleast_2d(np.asarray(stationary[1], dtype=float))
        stable_mods = np.abs(np.linalg.eigvals(lam_stable))
        if stable_mods.size and stable_mods.max() >= floor:
            raise ConstructionError(
                f"stable eigenvalue modulus {stable_mods.max():.6g} violates the "
                f"gap below {floor:.6g}"
            )
        basis = np.hstack([r_near, r_stable])
        lam = np.zeros((p, p))
        lam[:q, :q] = lam_near
        lam[q:, q:] = lam_stable
        try:
            phi1 = basis @ lam @ np.linalg.inv(basis)
        except np.linalg.LinAlgError as exc:
            raise ConstructionError("similarity basis [r_near, r_stable] is singular") from exc
        return VarCoefficients.from_matrices([phi1])

    if stationary is not None:
        if isinstance(stationary, (list,)):
            base = np.hstack([np.asarray(m, dtype=float) for m in stationary])
        else:
            base = np.asarray(stationary, dtype=float)
        if base.shape != (p, k * p):
            raise DomainError(f"stable base must be {p}x{k * p}, got {base.shape}")
        candidates = [base]
        redraw = False
    else:
        rng = rng if rng is not None else np.random.default_rng(seed)
        candidates = None
        redraw = True

    M = _stacked_near_basis(r_near, lam_near, k)
    N = r_near @ np.linalg.matrix_power(lam_near, k)
    gram_solve = np.linalg.solve(M.T @ M, M.T)  # (M^T M)^{-1} M^T

    target_radius = stable_radius if stable_radius is not None else min(0.6 * floor, 0.5)
    offending = None
    tries = max_tries if redraw else 1
    for _ in range(tries):
        base = candidates[0] if not redraw else _draw_stable_base(rng, p, k, target_radius)
        phi = base + (N - base @ M) @ gram_solve
        coeffs = VarCoefficients.from_stacked(phi, k)
        all_roots = roots(coeffs).roots
        matched, rest = _match_roots(all_roots, near_eigs)
        if np.abs(matched - near_eigs).max() > 1e-8 * max(1.0, near_mods.max()):
            offending = all_roots
            continue
        if rest.size == 0 or np.abs(rest).max() < floor:
            return coeffs
        offending = rest
    detail = np.array2string(np.asarray(offending), precision=4) if offending is not None else ""
    raise ConstructionError(
        f"could not place the remaining roots below modulus {floor:.6g} "
        f"after {tries} tries; offending roots {detail}"
    )


def local_sequence(c: np.ndarray, n: int, base: NearUnitBase) -> LocalSequence:
    """Element of the drifting sequence with near-unit block I + C/n.

    The stationary ingredients of ``base`` are held fixed across n;
    explosive drifts (eigenvalue moduli of I + C/n beyond 1 + 1/n) are
    rejected.
    """
    c = np.atleast_2d(np.asarray(c, dtype=float))
    q = c.shape[0]
    if c.shape != (q, q):
        raise DomainError("C must be square")
    if n < 1:
        raise DomainError("n must be positive")
    lam = np.eye(q) + c / n
    mods = np.abs(np.linalg.eigvals(lam))
    if mods.max() > 1.0 + 1.0 / n + 1e-12:
        raise DomainError(
            f"I + C/n has eigenvalue modulus {mods.max():.6g} > 1 + 1/n (explosive drift)"
        )
    stationary = base.stationary
    if isinstance(stationary, (int, np.integer)):
        realized = build_var(
            base.a, lam, base.k, seed=int(stationary), max_modulus=1.0 + 1.0 / n
        )
    else:
        realized = build_var(
            base.a, lam, base.k, stationary=stationary, max_modulus=1.0 + 1.0 / n
        )
    return LocalSequence(c=c, base=base, n=n, realized=realized)


def simulate(
    spec: DgpSpec,
    seed: Union[int, np.random.SeedSequence],
    innovations: Union[str, Callable, None] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate a path ``y_t = mu + delta t + x_t`` with zero-initialised x.

    Innovations are i.i.d. Gaussian(0, sigma) from the seeded generator;
    pass ``innovations="none"`` for the exact zero-noise path, or a
    callable ``f(rng, n, p) -> (n, p) array`` to substitute a custom
    i.i.d. sampler (it is scaled by the Cholesky factor of sigma).

    Returns
    -------
    (y, eps) : pair of (n, p) arrays
        The observed path and the innovations that generated it.
        Deterministic given (spec, seed).
    """
    coeffs, n, p, k = spec.coeffs, spec.n, spec.coeffs.p, spec.coeffs.k
    rng = np.random.default_rng(seed)
    if innovations == "none":
        eps = np.zeros((n, p))
    else:
        draw = rng.standard_normal((n, p)) if innovations is None else np.asarray(
            innovations(rng, n, p), dtype=float
        )
        if draw.shape != (n, p):
            raise DomainError(f"innovation sampler returned shape {draw.shape}, expected {(n, p)}")
        eps = draw @ np.linalg.cholesky(spec.sigma).T

    x = np.zeros((n + k, p))  # rows 0..k-1 are the zero presample
    for t in range(n):
        acc = eps[t].copy()
        for i in range(1, k + 1):
            acc += coeffs.phi[i - 1] @ x[k + t - i]
        x[k + t] = acc
    x = x[k:]
    t_idx = np.arange(1, n + 1)[:, None]
    y = spec.mu[None, :] + spec.delta[None, :] * t_idx + x
    return y, eps
