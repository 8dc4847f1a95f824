#!/usr/bin/env python3
"""Dyadic filter banks and the Besov / Sobolev norm machinery."""

import numpy as np

from hodgehalf.fields import Grid, random_form
from hodgehalf.littlewood_paley import (SpaceParams, besov_norm,
                                        completeness_ok, default_bank,
                                        dyadic_block, low_pass, radial_cutoff,
                                        sobolev_norm)

grid = Grid(2, 128, 16.0)
bank = default_bank(grid)
print(f"== filter bank on N={grid.points}, L={grid.length} ==")
print(f"  dyadic window: j in [{bank.j_min}, {bank.j_max}]")
r = np.linspace(0, 3, 7)
print("  base cutoff phi(r):", np.round(radial_cutoff(r), 3), "at r =", r)

total = bank.low.copy()
for j in bank.window:
    total = total + bank.psi[j]
covered = bank.covered_mask()
print(f"  telescoping defect on the covered ball: "
      f"{np.abs(total[covered] - 1).max():.3e}")

print("\n== block decomposition of an annulus field ==")
u = random_form(grid, [0], seed=5, kind="annulus_band", radii=(1.0, 3.0))
acc = low_pass(bank, u)
for j in bank.window:
    blk = dyadic_block(bank, j, u)
    print(f"  |block_{j:+d} u|_2 = {blk.l2_norm():.4f}")
    acc = acc + blk
print(f"  resynthesis |sum - u| / |u| = {(acc - u).l2_norm() / u.l2_norm():.3e}")

print("\n== norms ==")
for s, p, q in [(0.0, 2.0, 2.0), (0.5, 2.0, 1.0), (0.25, 3.0, 2.0)]:
    b = besov_norm(SpaceParams(s, p, q), u, bank)
    print(f"  homogeneous Besov s={s} p={p} q={q}: {b:.4f}")
hs = sobolev_norm(SpaceParams(1.0, 2.0, kind="sobolev"), u, bank)
print(f"  homogeneous Sobolev s=1 p=2: {hs:.4f}"
      f"  (equals |grad u|_2 on mean-free fields)")

print("\n== dilation scaling: |u(2.)| ~ 2^(s - n/p) |u| ==")
fine = Grid(2, 256, 16.0)
fine_bank = default_bank(fine)


def modulated(scale):
    x = fine.coords()
    r2 = sum((scale * np.asarray(xi)) ** 2 for xi in x)
    phase = sum(0.5 * np.pi * scale * np.asarray(xi) for xi in x)
    from hodgehalf.fields import FormField
    return FormField(fine, {0: np.exp(-r2 / 36.0) * np.exp(1j * phase)})


for s, p, q in [(0.0, 2.0, 2.0), (0.5, 2.0, 1.0)]:
    params = SpaceParams(s, p, q)
    ratio = besov_norm(params, modulated(2.0), fine_bank) \
        / besov_norm(params, modulated(1.0), fine_bank)
    print(f"  s={s} p={p}: measured {ratio:.4f}, "
          f"continuum 2^(s-n/p) = {2.0 ** (s - 2 / p):.4f}")

print("\n== completeness predicate (s < n/p, or q = 1 and s <= n/p) ==")
for s, p, q, n in [(0.5, 2.0, 2.0, 2), (1.0, 2.0, 1.0, 2), (1.0, 2.0, 2.0, 2)]:
    ok = completeness_ok(SpaceParams(s, p, q), n)
    print(f"  s={s} p={p} q={q} n={n}: {'complete' if ok else 'not complete'}")
