"""Whole-space differential operators realized as Fourier multipliers.

Everything here acts on the torus surrogate of R^n.  The exterior derivative
and coderivative act per frequency through the algebra symbols i xi ^ and
-i xi _| ; functions of the (Hodge) Laplacian are scalar radial multipliers
applied componentwise.

Zero-mode rule: every negative-power multiplier maps the xi = 0 coefficient
to 0, and operations that invert the Laplacian refuse inputs whose mean
exceeds MEAN_FREE_TOL times the L^2 norm.  This mirrors the restriction of
homogeneous calculus to fields whose spectrum avoids the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import insert_sign
from .fields import FormField, SpectralField, forward_fft, inverse_fft

MEAN_FREE_TOL = 1e-12


@dataclass(frozen=True)
class SectorPoint:
    """A spectral parameter lambda inside the open sector of half-angle mu."""

    lam: complex
    mu: float = 3.0 * np.pi / 4.0

    def __post_init__(self):
        lam = complex(self.lam)
        if not 0.0 <= self.mu < np.pi:
            raise ValueError("sector half-angle must lie in [0, pi)")
        if lam == 0:
            raise ValueError("lambda = 0 is not in any sector")
        if self.mu == 0.0:
            if not (lam.real > 0 and lam.imag == 0):
                raise ValueError("sector of angle 0 is the positive real axis")
        elif abs(np.angle(lam)) >= self.mu:
            raise ValueError(f"lambda = {lam} lies outside the sector of "
                             f"half-angle {self.mu}")


def _lam_value(lam) -> complex:
    """Accept a SectorPoint or a bare complex off the closed negative real axis."""
    if isinstance(lam, SectorPoint):
        return complex(lam.lam)
    lam = complex(lam)
    if lam != 0 and lam.imag == 0 and lam.real < 0:
        raise ValueError(f"lambda = {lam} lies on the negative real axis, "
                         "outside every sector")
    return lam


# ---------------------------------------------------------------------------
# d, delta, Hodge-Dirac
# ---------------------------------------------------------------------------

def _d_hat(uh: SpectralField) -> SpectralField:
    """Symbol i xi ^ . applied to the coefficient algebra at every frequency."""
    grid = uh.grid
    xi = grid.freqs()
    out: dict[int, np.ndarray] = {}
    for mask, arr in uh.comps.items():
        for axis in range(grid.n):
            s = insert_sign(axis, mask)
            if s == 0:
                continue
            target = mask | (1 << axis)
            term = (1j * s) * (xi[axis] * arr)
            if target in out:
                out[target] += term
            else:
                out[target] = term
    return SpectralField(grid, out)


def _delta_hat(uh: SpectralField) -> SpectralField:
    """Symbol -i xi _| . , the coderivative side of the same sign table."""
    grid = uh.grid
    xi = grid.freqs()
    out: dict[int, np.ndarray] = {}
    for mask, arr in uh.comps.items():
        m = mask
        while m:
            low = m & -m
            axis = low.bit_length() - 1
            target = mask ^ low
            s = insert_sign(axis, target)
            term = (-1j * s) * (xi[axis] * arr)
            if target in out:
                out[target] += term
            else:
                out[target] = term
            m ^= low
    return SpectralField(grid, out)


def d(u: FormField) -> FormField:
    """Exterior derivative; degree-raising, d o d = 0."""
    return inverse_fft(_d_hat(forward_fft(u)))


def delta(u: FormField) -> FormField:
    """Coderivative (interior derivative); degree-lowering, delta o delta = 0."""
    return inverse_fft(_delta_hat(forward_fft(u)))


def hodge_dirac(u: FormField) -> FormField:
    """d + delta; its square is minus the componentwise Laplacian."""
    uh = forward_fft(u)
    dh = _d_hat(uh)
    eh = _delta_hat(uh)
    comps = dict(dh.comps)
    for mask, arr in eh.comps.items():
        comps[mask] = comps[mask] + arr if mask in comps else arr
    return inverse_fft(SpectralField(u.grid, comps))


# ---------------------------------------------------------------------------
# functions of the Laplacian
# ---------------------------------------------------------------------------

def _require_mean_free(u: FormField, what: str):
    norm = u.l2_norm()
    worst = max((abs(u.mean(m)) for m in u.masks()), default=0.0)
    if worst > MEAN_FREE_TOL * max(norm, 1e-300):
        raise ValueError(f"{what} needs a mean-free field; component mean "
                         f"{worst:.3e} exceeds {MEAN_FREE_TOL:.0e} * |u|")


def laplacian(u: FormField) -> FormField:
    """Componentwise Laplacian Delta u (multiplier -|xi|^2)."""
    return inverse_fft(forward_fft(u).apply_multiplier(-u.grid.freq_sq()))


def resolvent(lam, f: FormField) -> FormField:
    """Solve lambda u - Delta u = f, i.e. apply (lambda + |xi|^2)^(-1).

    lam may be a complex number or a SectorPoint; lam = 0 is allowed only for
    mean-free f, in which case the zero mode of the output is set to 0.
    """
    lam = _lam_value(lam)
    absq = f.grid.freq_sq()
    if lam == 0:
        _require_mean_free(f, "the resolvent at lambda = 0")
        symbol = np.zeros(f.grid.shape, dtype=complex)
        nz = absq > 0
        symbol[nz] = 1.0 / absq[nz]
    else:
        symbol = 1.0 / (lam + absq)
    return inverse_fft(forward_fft(f).apply_multiplier(symbol))


def heat(t: float, u: FormField) -> FormField:
    """Heat semigroup e^{t Delta} u (multiplier e^{-t |xi|^2}), t >= 0."""
    if t < 0:
        raise ValueError("the heat semigroup needs t >= 0")
    return inverse_fft(forward_fft(u).apply_multiplier(np.exp(-t * u.grid.freq_sq())))


def frac_laplacian(s: float, u: FormField) -> FormField:
    """(-Delta)^{s/2} u (multiplier |xi|^s); the zero mode is mapped to 0."""
    if s < 0:
        _require_mean_free(u, f"(-Delta)^({s}/2)")
    absq = u.grid.freq_sq()
    symbol = np.zeros(u.grid.shape)
    nz = absq > 0
    symbol[nz] = absq[nz] ** (s / 2.0)
    return inverse_fft(forward_fft(u).apply_multiplier(symbol))


def riesz(axis: int, u: FormField) -> FormField:
    """Riesz transform along one axis (symbol i xi_axis / |xi|), zero mode 0."""
    grid = u.grid
    if not 0 <= axis < grid.n:
        raise ValueError(f"axis {axis} out of range for dimension {grid.n}")
    absxi = np.sqrt(grid.freq_sq())
    xi = np.broadcast_to(grid.freqs()[axis], grid.shape)
    symbol = np.zeros(grid.shape, dtype=complex)
    nz = absxi > 0
    symbol[nz] = 1j * xi[nz] / absxi[nz]
    return inverse_fft(forward_fft(u).apply_multiplier(symbol))


# ---------------------------------------------------------------------------
# constant-coefficient algebra actions on fields
# ---------------------------------------------------------------------------

def hodge_star_field(u: FormField) -> FormField:
    """Pointwise Hodge star: each component moves to its complement with
    the sign that makes dx_I ^ *dx_I the volume form."""
    from .algebra import wedge_sign

    full = (1 << u.grid.n) - 1
    out: dict[int, np.ndarray] = {}
    for mask, arr in u.comps.items():
        comp = full ^ mask
        term = wedge_sign(mask, comp) * arr
        out[comp] = out[comp] + term if comp in out else term
    return FormField(u.grid, out)


def wedge_const(vec, u: FormField) -> FormField:
    """Wedge a constant real covector onto a field, pointwise."""
    grid = u.grid
    a = np.asarray(vec)
    out: dict[int, np.ndarray] = {}
    for mask, arr in u.comps.items():
        for axis in range(grid.n):
            if a[axis] == 0:
                continue
            s = insert_sign(axis, mask)
            if s == 0:
                continue
            target = mask | (1 << axis)
            term = (s * a[axis]) * arr
            out[target] = out[target] + term if target in out else term
    return FormField(grid, out) if out else FormField.zero(grid)


def interior_const(vec, u: FormField) -> FormField:
    """Contract a field with a constant real covector, pointwise."""
    grid = u.grid
    a = np.asarray(vec)
    out: dict[int, np.ndarray] = {}
    for mask, arr in u.comps.items():
        m = mask
        while m:
            low = m & -m
            axis = low.bit_length() - 1
            m ^= low
            if a[axis] == 0:
                continue
            target = mask ^ low
            s = insert_sign(axis, target)
            term = (s * a[axis]) * arr
            out[target] = out[target] + term if target in out else term
    return FormField(grid, out) if out else FormField.zero(grid)


# ---------------------------------------------------------------------------
# Hodge decomposition on the whole space
# ---------------------------------------------------------------------------

def leray_wholespace(u: FormField) -> tuple[FormField, FormField]:
    """Split u = Pu + Gu with delta(Pu) = 0 and Gu = d (-Delta)^{-1} delta u.

    P is the generalized Helmholtz-Leray projector I - d (-Delta)^{-1} delta.
    The input must be mean-free (the projector is undefined on the zero mode).
    """
    _require_mean_free(u, "the Helmholtz-Leray projector")
    grid = u.grid
    uh = forward_fft(u)
    w = _delta_hat(uh)
    absq = grid.freq_sq()
    inv = np.zeros(grid.shape)
    nz = absq > 0
    inv[nz] = 1.0 / absq[nz]
    g = _d_hat(w.apply_multiplier(inv))
    gu = inverse_fft(g)
    pu_comps = {m: uh.component(m) - g.component(m)
                for m in set(uh.comps) | set(g.comps)}
    pu = inverse_fft(SpectralField(grid, pu_comps))
    return pu, gu


# ---------------------------------------------------------------------------
# spectral Sobolev seminorms
# ---------------------------------------------------------------------------

def grad_l2(u: FormField) -> float:
    """(sum_k |d_k u|_2^2)^(1/2), computed spectrally."""
    uh = forward_fft(u)
    absq = u.grid.freq_sq()
    total = sum(float(np.sum(absq * np.abs(a) ** 2)) for a in uh.comps.values())
    scale = u.grid.cell_volume / u.grid.points ** u.grid.n
    return float(np.sqrt(total * scale))


def hess_l2(u: FormField) -> float:
    """(sum_{k,l} |d_k d_l u|_2^2)^(1/2) = | |xi|^2 u^ |_2, computed spectrally."""
    uh = forward_fft(u)
    absq = u.grid.freq_sq()
    total = sum(float(np.sum(absq ** 2 * np.abs(a) ** 2)) for a in uh.comps.values())
    scale = u.grid.cell_volume / u.grid.points ** u.grid.n
    return float(np.sqrt(total * scale))


def resolvent_ratio(lam, f: FormField) -> float:
    """(|lam| |u|_2 + |lam|^(1/2) |grad u|_2 + |hess u|_2) / |f|_2 for the resolvent."""
    lam = _lam_value(lam)
    u = resolvent(lam, f)
    nf = f.l2_norm()
    return (abs(lam) * u.l2_norm() + abs(lam) ** 0.5 * grad_l2(u) + hess_l2(u)) / nf


def sector_sweep(f: FormField, radii=None, angles=None, solve=None) -> list[dict]:
    """Resolvent-estimate sweep over a sector sample; returns one row per lambda.

    Default sample: decade radii 1e-2 .. 1e2 and nine angles |theta| <= 3 pi/4.
    ``solve`` may replace the whole-space resolvent ratio (same signature).
    """
    if radii is None:
        radii = [10.0 ** e for e in range(-2, 3)]
    if angles is None:
        angles = list(np.linspace(-3 * np.pi / 4, 3 * np.pi / 4, 9))
    ratio_fn = solve if solve is not None else resolvent_ratio
    rows = []
    for r in radii:
        for th in angles:
            lam = r * np.exp(1j * th)
            rows.append({"radius": r, "angle": th, "lam": lam,
                         "ratio": ratio_fn(lam, f)})
    return rows
