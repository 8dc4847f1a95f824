#!/usr/bin/env python3
"""A tour of the exact exterior-algebra kernel.

Walks through the four basic operations (wedge, contraction, Hodge star,
inner product) on small dimensions, and shows the classical dimension-3
identifications with cross and dot products.
"""

import numpy as np

from hodgehalf.algebra import (AlgebraElement, hodge_star, inner, interior,
                               multi_indices, wedge)

print("== multi-index bookkeeping ==")
for n in (2, 3, 4):
    counts = [len(multi_indices(n, k)) for k in range(n + 1)]
    print(f"  n={n}: basis sizes per degree {counts} (total {sum(counts)})")

print("\n== wedge product ==")
dx1 = AlgebraElement.basis(3, 0b001)
dx2 = AlgebraElement.basis(3, 0b010)
print("  dx1 ^ dx2 coefficients:", np.round(wedge(dx1, dx2).coeffs.real, 3))
print("  dx2 ^ dx1 coefficients:", np.round(wedge(dx2, dx1).coeffs.real, 3))
print("  (the dx12 slot flips sign: graded anticommutativity)")

print("\n== dimension-3 identifications ==")
rng = np.random.default_rng(0)
a = rng.standard_normal(3)
u = rng.standard_normal(3)
w = wedge(AlgebraElement.one_form(a), AlgebraElement.one_form(u))
cross = np.cross(a, u)
print("  a ^ u as a 2-form:", np.round(w.coeffs.real, 4))
print("  a x u:            ", np.round(cross, 4),
      "(match via v <-> v1 dx23 - v2 dx13 + v3 dx12)")
dot = interior(a, AlgebraElement.one_form(u)).coeffs[0].real
print(f"  a _| u = {dot:.6f}  vs  a . u = {np.dot(a, u):.6f}")

print("\n== Hodge star ==")
for mask, label in [(0b000, "1"), (0b001, "dx1"), (0b011, "dx12")]:
    out = hodge_star(AlgebraElement.basis(3, mask))
    nz = int(np.nonzero(out.coeffs)[0][0])
    print(f"  *{label} -> slot {bin(nz)} with sign {out.coeffs[nz].real:+.0f}")

print("\n== adjointness <a ^ u, v> = <u, a _| v> ==")
worst = 0.0
for trial in range(100):
    a = rng.standard_normal(4)
    uu = AlgebraElement(4, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    vv = AlgebraElement(4, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    lhs = inner(wedge(AlgebraElement.one_form(a), uu), vv)
    rhs = inner(uu, interior(a, vv))
    worst = max(worst, abs(lhs - rhs))
print(f"  worst defect over 100 random n=4 triples: {worst:.3e}")

print("\n== Lagrange identity v ^ (v _| u) + v _| (v ^ u) = |v|^2 u ==")
v = rng.standard_normal(4)
vf = AlgebraElement.one_form(v)
worst = 0.0
for mask in range(16):
    e = AlgebraElement.basis(4, mask)
    out = wedge(vf, interior(v, e)) + interior(v, wedge(vf, e))
    worst = max(worst, np.abs(out.coeffs - np.dot(v, v) * e.coeffs).max())
print(f"  worst residual over the n=4 basis: {worst:.3e}")
