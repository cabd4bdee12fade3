"""Characteristic roots, root classification, and the invariant-subspace split.

A VAR's persistence is governed by the roots of its characteristic
polynomial, equivalently the eigenvalues of its companion matrix.  This
demo classifies the roots of a small system into a "near-unit" group
(inside a lens-shaped neighbourhood of +1) and a "stable" group, splits
the companion matrix accordingly, and shows the [a; I] normalisation
that pins down the near-unit basis.
"""

import numpy as np

from qcvar import (
    RegionSpec,
    VarCoefficients,
    classify,
    companion,
    half_life_to_radius,
    radius_to_half_life,
    reconstruct,
    roots,
    split,
)

# ---------------------------------------------------------------------------
# A bivariate VAR(1) with one root at 0.95 and one at 0.5.
# ---------------------------------------------------------------------------
coeffs = VarCoefficients.from_matrices([np.array([[0.95, 0.00],
                                                  [0.45, 0.50]])])
F = companion(coeffs)
print("companion matrix:\n", F)

rs = roots(coeffs)
print("\nroots (descending modulus):", np.round(rs.roots, 6))

# ---------------------------------------------------------------------------
# Choosing the radius via a minimum half-life.  A shock half-life of at
# least 8 periods corresponds to rho = 2^(-1/8) ~ 0.917; here we use 0.9.
# ---------------------------------------------------------------------------
print("\nhalf-life 8 periods  -> rho =", round(half_life_to_radius(8), 3))
print("rho 0.9              -> half-life =", round(radius_to_half_life(0.9), 2), "periods")

region = RegionSpec(rho=0.9)
cls = classify(rs, region)
for z, label in zip(rs.roots, cls.labels):
    print(f"  root {z:.4g}: |z| = {abs(z):.4f}, |1-z| = {abs(1 - z):.4f}  ->  {label}")
print("number of near-unit roots q =", cls.q)

# ---------------------------------------------------------------------------
# Split the companion matrix at q = 1.  The near-unit right basis is
# normalised as [a; I_q]; for this system the 0.95-eigenvector is (1, 1),
# so a = 1: the two series share one persistent component equally.
# ---------------------------------------------------------------------------
s = split(coeffs, cls.q)
print("\nnear-unit dynamics block:", s.lam_near.ravel())
print("normalised near-unit basis [a; I]:", s.r_near.ravel())
print("subspace coefficient a =", s.a.ravel())

# The split reproduces the companion matrix exactly:
err = np.abs(reconstruct(s) - F).max()
print("reconstruction error |F - R Lam L'|:", err)

# Biorthogonality of the stacked bases:
kp = coeffs.k * coeffs.p
print("biorthogonality |L'R - I|:", np.abs(s.big_l.T @ s.big_r - np.eye(kp)).max())
