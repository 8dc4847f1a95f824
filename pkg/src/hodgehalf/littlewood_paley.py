"""Littlewood-Paley filter banks and Besov / Sobolev norms on the torus lattice.

The base cutoff is a smooth radial bump equal to 1 on the ball of radius 3/4
and supported in the ball of radius 4/3, built from the classical exp(-1/t)
mollifier.  The annulus filters psi_j(xi) = phi(2^(-j-1) xi) - phi(2^(-j) xi)
telescope exactly, are supported in 3 * 2^(j-2) <= |xi| <= 2^(j+3) / 3, and
adjacent-only overlap: psi_j psi_k = 0 for |j - k| >= 2.

A finite dyadic window [j_min, j_max] replaces j in Z.  Homogeneous norms
require the spectrum to live inside the covered band (low-frequency leakage
below the window is an error); inhomogeneous norms fold everything below the
unit scale into the low-pass block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FormField, Grid, forward_fft, inverse_fft

LEAK_TOL = 1e-10


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def radial_cutoff(r: np.ndarray) -> np.ndarray:
    """The base profile phi as a function of |xi|: 1 on [0, 3/4], 0 from 4/3."""
    return _smooth_step((4.0 / 3.0 - np.asarray(r, dtype=float)) / (4.0 / 3.0 - 0.75))


@dataclass
class SpaceParams:
    """Names a Besov or Sobolev norm: (s, p, q, homogeneous, kind)."""

    s: float
    p: float
    q: float = 2.0
    homogeneous: bool = True
    kind: str = "besov"

    def __post_init__(self):
        if not 1.0 < self.p < math.inf:
            raise ValueError("p must lie in (1, inf)")
        if not 1.0 <= self.q:
            raise ValueError("q must lie in [1, inf]")
        if self.kind not in ("besov", "sobolev"):
            raise ValueError("kind must be 'besov' or 'sobolev'")


def completeness_ok(params: SpaceParams, n: int) -> bool:
    """Completeness predicate: s < n/p, or q = 1 and s <= n/p.

    Sobolev spaces use the q = p instance of the same predicate.
    """
    q = params.p if params.kind == "sobolev" else params.q
    if params.s < n / params.p:
        return True
    return q == 1 and params.s <= n / params.p


class FilterBank:
    """The dyadic family (phi_low, psi_{j_min} .. psi_{j_max}) on a grid lattice."""

    def __init__(self, grid: Grid, j_min: int, j_max: int):
        if j_min > j_max:
            raise ValueError("need j_min <= j_max")
        lattice_min = np.pi / grid.length
        upper = 2.0 ** (j_max + 3) / 3.0
        lower = 3.0 * 2.0 ** (j_min - 2)
        if upper > grid.nyquist + 1e-12:
            raise ValueError(f"psi_{j_max} support reaches {upper:.3g}, beyond "
                             f"the per-axis band limit {grid.nyquist:.3g}")
        if lower < lattice_min - 1e-12:
            raise ValueError(f"psi_{j_min} support starts at {lower:.3g}, below "
                             f"the smallest nonzero frequency {lattice_min:.3g}")
        self.grid = grid
        self.j_min = j_min
        self.j_max = j_max
        absxi = np.sqrt(grid.freq_sq())
        self.abs_freq = absxi
        self.psi = {j: radial_cutoff(absxi / 2.0 ** (j + 1)) - radial_cutoff(absxi / 2.0 ** j)
                    for j in range(j_min, j_max + 1)}
        self.low = radial_cutoff(absxi / 2.0 ** j_min)
        # unit-scale cutoff, the inhomogeneous low-pass block
        self.phi_unit = radial_cutoff(absxi)

    @property
    def window(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def covered_mask(self) -> np.ndarray:
        """Lattice points where blocks plus low pass telescope exactly to 1."""
        return self.abs_freq <= 1.5 * 2.0 ** self.j_max

    def leakage(self, u: FormField, homogeneous: bool = True) -> float:
        """Fraction of spectral mass the window cannot fully represent."""
        uh = forward_fft(u)
        total = 0.0
        bad = 0.0
        high = self.abs_freq > 1.5 * 2.0 ** self.j_max
        low = self.abs_freq < 2.0 ** self.j_min
        outside = (high | low) if homogeneous else high
        for arr in uh.comps.values():
            mag = np.abs(arr) ** 2
            total += float(mag.sum())
            bad += float(mag[outside].sum())
        return bad / total if total > 0 else 0.0


def build_bank(grid: Grid, j_min: int, j_max: int) -> FilterBank:
    """Construct the Littlewood-Paley family over a dyadic window."""
    return FilterBank(grid, j_min, j_max)


def default_bank(grid: Grid) -> FilterBank:
    """Widest window the lattice supports."""
    j_max = int(math.floor(math.log2(3.0 * grid.nyquist / 8.0)))
    j_min = int(math.ceil(math.log2(np.pi / (3.0 * grid.length)) + 2))
    while 2.0 ** (j_max + 3) / 3.0 > grid.nyquist:
        j_max -= 1
    while 3.0 * 2.0 ** (j_min - 2) < np.pi / grid.length:
        j_min += 1
    if j_min > j_max:
        raise ValueError("lattice too coarse for a dyadic window")
    return FilterBank(grid, j_min, j_max)


def dyadic_block(bank: FilterBank, j: int, u: FormField) -> FormField:
    """The block at scale 2^j: inverse FFT of psi_j times the spectrum."""
    if j not in bank.psi:
        raise ValueError(f"block {j} outside the window [{bank.j_min}, {bank.j_max}]")
    return inverse_fft(forward_fft(u).apply_multiplier(bank.psi[j]))


def low_pass(bank: FilterBank, u: FormField) -> FormField:
    """The remainder below the window, phi(2^(-j_min) xi) times the spectrum."""
    return inverse_fft(forward_fft(u).apply_multiplier(bank.low))


def _block_lp_norms(bank: FilterBank, u: FormField, p: float,
                    blocks) -> np.ndarray:
    """L^p norms of the requested blocks; p = 2 is evaluated by Parseval."""
    uh = forward_fft(u)
    grid = bank.grid
    out = []
    if p == 2.0:
        scale = grid.cell_volume / grid.points ** grid.n
        for sym in blocks:
            total = sum(float(np.sum(sym ** 2 * np.abs(a) ** 2))
                        for a in uh.comps.values())
            out.append(math.sqrt(total * scale))
    else:
        for sym in blocks:
            out.append(inverse_fft(uh.apply_multiplier(sym)).lp_norm(p))
    return np.asarray(out)


def _lq_aggregate(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(weights * values)) if values.size else 0.0
    return float(np.sum((weights * values) ** q) ** (1.0 / q))


def besov_norm(params: SpaceParams, u: FormField, bank: FilterBank) -> float:
    """Besov norm: the l^q aggregate of 2^{js} L^p block norms.

    Homogeneous: blocks over the window, with a leakage check at both ends.
    Inhomogeneous: the unit-scale low pass plays the block at j = -1 and
    only scales j >= 0 contribute.
    """
    if params.kind != "besov":
        raise ValueError("params.kind must be 'besov'")
    leak = bank.leakage(u, homogeneous=params.homogeneous)
    if leak > LEAK_TOL:
        raise ValueError(f"spectral mass fraction {leak:.3e} escapes the bank "
                         f"window [{bank.j_min}, {bank.j_max}]")
    if params.homogeneous:
        js = list(bank.window)
        blocks = [bank.psi[j] for j in js]
        weights = 2.0 ** (params.s * np.asarray(js, dtype=float))
    else:
        js = [j for j in bank.window if j >= 0]
        blocks = [bank.phi_unit] + [bank.psi[j] for j in js]
        weights = 2.0 ** (params.s * np.asarray([-1] + js, dtype=float))
    norms = _block_lp_norms(bank, u, params.p, blocks)
    return _lq_aggregate(norms, weights, params.q)


def sobolev_norm(params: SpaceParams, u: FormField, bank: FilterBank) -> float:
    """Sobolev norm: L^p of the resummed |xi|^s-filtered blocks.

    Homogeneous: | sum_j (-Delta)^{s/2} block_j u |_p over the window.
    Inhomogeneous: | (I - Delta)^{s/2} u |_p directly.
    """
    if params.kind != "sobolev":
        raise ValueError("params.kind must be 'sobolev'")
    grid = bank.grid
    uh = forward_fft(u)
    if params.homogeneous:
        leak = bank.leakage(u, homogeneous=True)
        if leak > LEAK_TOL:
            raise ValueError(f"spectral mass fraction {leak:.3e} escapes the "
                             f"bank window [{bank.j_min}, {bank.j_max}]")
        window_sum = np.zeros(grid.shape)
        for j in bank.window:
            window_sum = window_sum + bank.psi[j]
        absxi = bank.abs_freq
        symbol = np.zeros(grid.shape)
        nz = absxi > 0
        symbol[nz] = absxi[nz] ** params.s
        filtered = uh.apply_multiplier(symbol * window_sum)
    else:
        symbol = (1.0 + bank.abs_freq ** 2) ** (params.s / 2.0)
        filtered = uh.apply_multiplier(symbol)
    if params.p == 2.0:
        return filtered.l2_norm()
    return inverse_fft(filtered).lp_norm(params.p)


def space_norm(params: SpaceParams, u: FormField, bank: FilterBank) -> float:
    """Dispatch on params.kind."""
    if params.kind == "besov":
        return besov_norm(params, u, bank)
    return sobolev_norm(params, u, bank)
