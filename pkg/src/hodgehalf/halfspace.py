"""Half-space machinery: reflection extensions, traces, and Hodge operators.

The half-space sits inside the symmetric torus as the rows x_n >= 0 of the
last axis.  The boundary plane x_n = 0 is a grid plane, and the torus seam
x_n = -L (equivalently +L) is the second fixed point of the reflection
x_n -> -x_n.  A HalfField stores N/2 + 1 rows, x_n in {0, h, ..., L}; keeping
the seam row makes extension followed by restriction the identity on
symmetric fields, so reflection identities hold to round-off instead of to
quadrature accuracy.

Extension flavors follow the componentwise rule: under the tangential flavor
'Ht' a component whose multi-index contains the normal axis extends oddly
(Dirichlet reflection, boundary and seam rows forced to zero) and evenly
otherwise; the normal flavor 'Hn' swaps the rule; 'D' and 'N' force one rule
on every component.  Every half-space operator is extension, a whole-space
multiplier, then restriction, which is justified by the commutation of the
flavored extensions with d, delta, and functions of the Laplacian.
"""

from __future__ import annotations

import numpy as np

from .algebra import degree
from .fields import FormField, Grid, _check_same_grid, random_form
from .operators import _lam_value, d, delta, heat, leray_wholespace, resolvent

FLAVORS = ("D", "N", "Ht", "Hn")


def half_shape(grid: Grid) -> tuple[int, ...]:
    return (grid.points,) * (grid.n - 1) + (grid.points // 2 + 1,)


def component_parity(flavor: str, mask: int, n: int) -> int:
    """-1 for odd (Dirichlet) extension of this component, +1 for even."""
    if flavor == "D":
        return -1
    if flavor == "N":
        return 1
    normal_bit = mask >> (n - 1) & 1
    if flavor == "Ht":
        return -1 if normal_bit else 1
    if flavor == "Hn":
        return 1 if normal_bit else -1
    raise ValueError(f"unknown boundary flavor {flavor!r}")


class HalfField:
    """Algebra-valued samples on the half-grid x_n >= 0, tagged with a flavor."""

    def __init__(self, grid: Grid, flavor: str, comps: dict[int, np.ndarray]):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown boundary flavor {flavor!r}")
        if grid.n < 2:
            raise ValueError("half-space fields need dimension >= 2")
        self.grid = grid
        self.flavor = flavor
        self.comps = {}
        shape = half_shape(grid)
        for mask, arr in comps.items():
            arr = np.asarray(arr, dtype=complex)
            if arr.shape != shape:
                raise ValueError(f"component {mask}: shape {arr.shape} does not "
                                 f"match half-grid shape {shape}")
            self.comps[int(mask)] = arr

    @classmethod
    def zero(cls, grid: Grid, flavor: str, masks=(0,)) -> "HalfField":
        shape = half_shape(grid)
        return cls(grid, flavor, {m: np.zeros(shape, dtype=complex) for m in masks})

    def masks(self) -> list[int]:
        return sorted(self.comps)

    def degrees(self) -> list[int]:
        return sorted({degree(m) for m in self.comps})

    def component(self, mask: int) -> np.ndarray:
        if mask in self.comps:
            return self.comps[mask]
        return np.zeros(half_shape(self.grid), dtype=complex)

    def with_flavor(self, flavor: str) -> "HalfField":
        return HalfField(self.grid, flavor, self.comps)

    def copy(self) -> "HalfField":
        return HalfField(self.grid, self.flavor,
                         {m: a.copy() for m, a in self.comps.items()})

    def _check_flavor(self, other: "HalfField"):
        if self.flavor != other.flavor:
            raise ValueError(f"boundary flavor mismatch: {self.flavor} vs "
                             f"{other.flavor}")

    def __add__(self, other: "HalfField") -> "HalfField":
        _check_same_grid(self.grid, other.grid)
        self._check_flavor(other)
        masks = set(self.comps) | set(other.comps)
        return HalfField(self.grid, self.flavor,
                         {m: self.component(m) + other.component(m) for m in masks})

    def __sub__(self, other: "HalfField") -> "HalfField":
        return self + (-1.0) * other

    def __mul__(self, c) -> "HalfField":
        return HalfField(self.grid, self.flavor,
                         {m: a * c for m, a in self.comps.items()})

    __rmul__ = __mul__

    def boundary_row(self, mask: int) -> np.ndarray:
        return self.component(mask)[..., 0]

    def l2_inner(self, other: "HalfField") -> complex:
        """L^2(half-space) pairing: half the torus pairing of the extensions.

        Valid only for matching flavors (matching componentwise parities make
        every product even in x_n); mixed flavors are rejected.
        """
        _check_same_grid(self.grid, other.grid)
        self._check_flavor(other)
        return 0.5 * extend(self).l2_inner(extend(other))

    def l2_norm(self) -> float:
        return float(np.sqrt(max(self.l2_inner(self).real, 0.0)))


# ---------------------------------------------------------------------------
# extension / restriction / symmetrization
# ---------------------------------------------------------------------------

def _extend_array(arr: np.ndarray, parity: int, points: int) -> np.ndarray:
    half = points // 2
    shape = arr.shape[:-1] + (points,)
    out = np.zeros(shape, dtype=complex)
    out[..., half:] = arr[..., :half]
    out[..., 0] = parity * arr[..., half] if parity > 0 else 0.0
    out[..., 1:half] = parity * arr[..., half - 1:0:-1]
    if parity < 0:
        out[..., half] = 0.0  # odd reflection forces the boundary row to zero
    return out


def extend(u: HalfField) -> FormField:
    """Flavored reflection extension to the full symmetric torus."""
    comps = {}
    for mask, arr in u.comps.items():
        parity = component_parity(u.flavor, mask, u.grid.n)
        comps[mask] = _extend_array(arr, parity, u.grid.points)
    return FormField(u.grid, comps)


def restrict(U: FormField, flavor: str) -> HalfField:
    """Keep the rows x_n in {0, ..., L}; the seam row x_n = L wraps to -L."""
    half = U.grid.points // 2
    comps = {}
    for mask, arr in U.comps.items():
        parity = component_parity(flavor, mask, U.grid.n)
        block = np.empty(arr.shape[:-1] + (half + 1,), dtype=complex)
        block[..., :half] = arr[..., half:]
        block[..., half] = arr[..., 0] if parity > 0 else 0.0
        comps[mask] = block
    return HalfField(U.grid, flavor, comps)


def reflect_normal(arr: np.ndarray) -> np.ndarray:
    """Samples of x -> arr at the reflected point (x', -x_n) on the torus."""
    points = arr.shape[-1]
    idx = (points - np.arange(points)) % points
    return np.take(arr, idx, axis=-1)


def symmetrize(U: FormField, flavor: str) -> FormField:
    """Project a torus field onto the exact symmetry class of a flavor."""
    comps = {}
    for mask, arr in U.comps.items():
        parity = component_parity(flavor, mask, U.grid.n)
        comps[mask] = 0.5 * (arr + parity * reflect_normal(arr))
    return FormField(U.grid, comps)


def random_half_field(grid: Grid, flavor: str, masks, seed: int = 0,
                      **kwargs) -> HalfField:
    """Random smooth half-field whose extension is exactly symmetric."""
    full = random_form(grid, masks, seed=seed, **kwargs)
    return restrict(symmetrize(full, flavor), flavor)


# ---------------------------------------------------------------------------
# derivatives and the commutation route
# ---------------------------------------------------------------------------

def d_half(u: HalfField) -> HalfField:
    """Exterior derivative through the extension; the flavor is preserved."""
    return restrict(d(extend(u)), u.flavor)


def delta_half(u: HalfField) -> HalfField:
    """Coderivative through the extension; the flavor is preserved."""
    return restrict(delta(extend(u)), u.flavor)


def hodge_resolvent(lam, f: HalfField) -> HalfField:
    """Resolvent of the Hodge Laplacian with the boundary flavor of f.

    Realized by the reflection identity: extend, solve on the torus, restrict.
    The output satisfies the flavored boundary conditions exactly because the
    normal-bearing (resp. normal-free) components of the extension are odd.
    """
    _lam_value(lam)
    return restrict(resolvent(lam, extend(f)), f.flavor)


def hodge_heat(t: float, u0: HalfField) -> HalfField:
    """Heat semigroup of the Hodge Laplacian via the same reflection route."""
    return restrict(heat(t, extend(u0)), u0.flavor)


def scalar_resolvent(lam, f_rows: np.ndarray, grid: Grid, bc: str) -> np.ndarray:
    """Per-component Dirichlet ('D') or Neumann ('N') resolvent on half rows."""
    hf = HalfField(grid, bc, {0: f_rows})
    return hodge_resolvent(lam, hf).comps[0]


# ---------------------------------------------------------------------------
# boundary traces
# ---------------------------------------------------------------------------

class BoundaryForm:
    """A form on the boundary plane, indexed by tangential multi-indices.

    For tangential traces the stored mask is the surviving index I' of a
    component u_{I', n}; for normal traces it is the tangential index I of a
    component that got wedged into dx_{(I, n)} (``wedged_normal=True``).
    """

    def __init__(self, grid: Grid, comps: dict[int, np.ndarray],
                 wedged_normal: bool = False):
        self.grid = grid
        self.comps = {int(m): np.asarray(a, dtype=complex)
                      for m, a in comps.items()}
        self.wedged_normal = wedged_normal

    def component(self, mask: int) -> np.ndarray:
        shape = (self.grid.points,) * (self.grid.n - 1)
        if mask in self.comps:
            return self.comps[mask]
        return np.zeros(shape, dtype=complex)

    def l2_norm(self) -> float:
        cell = self.grid.spacing ** (self.grid.n - 1)
        total = sum(float(np.sum(np.abs(a) ** 2)) for a in self.comps.values())
        return float(np.sqrt(total * cell))

    def pair_with_boundary_values(self, values: dict[int, np.ndarray]) -> complex:
        """Integral over the boundary of <self, values>, exact for band-limited rows.

        ``values`` maps ambient masks to boundary-row samples; for a normal
        trace the stored tangential mask I pairs with the ambient mask (I, n).
        """
        nbit = 1 << (self.grid.n - 1)
        cell = self.grid.spacing ** (self.grid.n - 1)
        acc = 0.0 + 0.0j
        for mask, arr in self.comps.items():
            ambient = (mask | nbit) if self.wedged_normal else mask
            if ambient in values:
                acc += np.sum(arr * np.conj(values[ambient]))
        return complex(acc * cell)


def _boundary_values(u) -> dict[int, np.ndarray]:
    """Boundary-plane samples per ambient mask, from a HalfField or FormField."""
    if isinstance(u, HalfField):
        return {m: u.comps[m][..., 0] for m in u.comps}
    half = u.grid.points // 2
    return {m: u.comps[m][..., half] for m in u.comps}


def tangential_trace(u) -> BoundaryForm:
    """nu _| u at the boundary: (-1)^k sum over I' of u_{I', n}(., 0) dx_{I'}."""
    grid = u.grid
    nbit = 1 << (grid.n - 1)
    rows = _boundary_values(u)
    comps = {}
    for mask, row in rows.items():
        if mask & nbit:
            k = degree(mask)
            sign = -1 if k & 1 else 1
            comps[mask ^ nbit] = sign * row
    return BoundaryForm(grid, comps, wedged_normal=False)


def normal_trace(u) -> BoundaryForm:
    """nu ^ u at the boundary: (-1)^{k+1} sum over n-free I of u_I(., 0) dx_{(I, n)}."""
    grid = u.grid
    nbit = 1 << (grid.n - 1)
    rows = _boundary_values(u)
    comps = {}
    for mask, row in rows.items():
        if not mask & nbit:
            k = degree(mask)
            sign = 1 if k & 1 else -1
            comps[mask] = sign * row
    return BoundaryForm(grid, comps, wedged_normal=True)


# ---------------------------------------------------------------------------
# half-domain quadrature (exact for band-limited integrands)
# ---------------------------------------------------------------------------

def half_domain_integral(values: np.ndarray, grid: Grid) -> complex:
    """Integral over x_n in [0, L] of the trigonometric interpolant of samples.

    Exact for integrands resolved on the lattice: tangential axes integrate
    to their zero modes, and the normal axis uses the closed-form integral of
    each Fourier mode over half the period.
    """
    if values.shape != grid.shape:
        raise ValueError("values must be sampled on the full grid")
    spectrum = np.fft.fftn(values)
    line = spectrum[(0,) * (grid.n - 1)]
    points = grid.points
    k = np.fft.fftfreq(points) * points
    # int_0^L of one mode: L at k = 0, 0 for even k, and the e^{i pi k} phase
    # of the x = -L grid origin makes the odd-k weight -2 L i / (pi k).
    coeff = np.zeros(points, dtype=complex)
    coeff[0] = grid.length
    odd = (np.abs(k) % 2) == 1
    coeff[odd] = -2.0 * grid.length * 1j / (np.pi * k[odd])
    tangential_volume = (2.0 * grid.length) ** (grid.n - 1)
    return complex(tangential_volume * np.sum(line * coeff) / points ** grid.n)


def pointwise_pairing(u: FormField, v: FormField) -> np.ndarray:
    """<u(x), v(x)> at every grid point (Hermitian in the second argument)."""
    _check_same_grid(u.grid, v.grid)
    acc = np.zeros(u.grid.shape, dtype=complex)
    for m in set(u.comps) & set(v.comps):
        acc += u.comps[m] * np.conj(v.comps[m])
    return acc


def half_l2_inner(u: FormField, v: FormField) -> complex:
    """L^2 pairing over the half-domain of two full-grid fields."""
    return half_domain_integral(pointwise_pairing(u, v), u.grid)


# ---------------------------------------------------------------------------
# Hodge decomposition on the half-space
# ---------------------------------------------------------------------------

def remove_extended_mean(u: HalfField) -> tuple[HalfField, float]:
    """Subtract each component's extension mean; returns (field, worst mean).

    Odd-extending components have mean zero already; subtracting a constant
    from an even one preserves its symmetry class.  Used to re-anchor the
    zero mode of fields that passed through the single-precision container.
    """
    comps = {}
    worst = 0.0
    for mask, arr in u.comps.items():
        parity = component_parity(u.flavor, mask, u.grid.n)
        if parity > 0:
            mean = complex(np.mean(_extend_array(arr, parity, u.grid.points)))
            comps[mask] = arr - mean
            worst = max(worst, abs(mean))
        else:
            comps[mask] = arr
    return HalfField(u.grid, u.flavor, comps), worst


def leray_halfspace(u: HalfField) -> tuple[HalfField, HalfField]:
    """Helmholtz-Leray split of a tangential-flavor field: u = Pu + Gu.

    Pu is divergence-free with vanishing tangential trace; Gu is exact.
    Realized as restriction of the whole-space projector applied to the
    tangential extension, which commutes with the flavored symmetry.
    """
    if u.flavor != "Ht":
        raise ValueError("the Leray projector acts on tangential-flavor fields")
    pu, gu = leray_wholespace(extend(u))
    return restrict(pu, "Ht"), restrict(gu, "Ht")


def q_projector(u: HalfField) -> tuple[HalfField, HalfField]:
    """Mirror split of a normal-flavor field: u = Qu + Ru.

    Qu is divergence-free (no boundary condition); Ru is exact with vanishing
    normal trace.  Same whole-space projector, normal-flavor extension.
    """
    if u.flavor != "Hn":
        raise ValueError("the mirror projector acts on normal-flavor fields")
    qu, ru = leray_wholespace(extend(u))
    return restrict(qu, "Hn"), restrict(ru, "Hn")


def hodge_stokes_apply(u: HalfField, tol: float = 1e-9) -> HalfField:
    """The Stokes operator delta d on the projected class; equals -Delta there.

    Rejects inputs outside the domain (fields the projector moves).
    """
    if u.flavor != "Ht":
        raise ValueError("the Hodge-Stokes operator uses the tangential flavor")
    pu, _ = leray_halfspace(u)
    defect = (u - pu).l2_norm()
    scale = max(u.l2_norm(), 1e-300)
    if defect > tol * scale:
        raise ValueError(f"field is not solenoidal: projector moves it by "
                         f"{defect / scale:.3e} relative")
    return delta_half(d_half(u))


# ---------------------------------------------------------------------------
# Navier-slip boundary conditions for vector fields
# ---------------------------------------------------------------------------

def _onesided_derivative_coeffs(order: int = 8) -> np.ndarray:
    """Weights of the one-sided first-derivative stencil on nodes 0..order."""
    nodes = np.arange(order + 1, dtype=float)
    rhs = np.zeros(order + 1)
    rhs[1] = 1.0
    vand = np.vander(nodes, increasing=True).T
    return np.linalg.solve(vand, rhs)


def normal_derivative_at_boundary(rows: np.ndarray, grid: Grid,
                                  order: int = 8) -> np.ndarray:
    """One-sided finite-difference d/dx_n at x_n = 0 of half-grid samples.

    Honest for any smooth half-space data: no symmetry assumption enters.
    """
    w = _onesided_derivative_coeffs(order)
    out = np.zeros(rows.shape[:-1], dtype=complex)
    for i, c in enumerate(w):
        out += c * rows[..., i]
    return out / grid.spacing


def _tangential_derivative_row(row: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Spectral tangential derivative of a boundary-plane sample array."""
    xi = grid.freq_axis()
    shape = [1] * (grid.n - 1)
    shape[axis] = grid.points
    mult = 1j * xi.reshape(shape)
    return np.fft.ifftn(np.fft.fftn(row) * mult)


def navier_slip_residual(u: HalfField, order: int = 8) -> tuple[float, float]:
    """Boundary L^2 norms of (nu . u, tangential part of (grad u + grad u^T) nu).

    For a flat boundary with nu = -e_n the tangential stress rows are
    -(d_k u_n + d_n u_k) for k < n; the normal derivative is evaluated by a
    one-sided stencil so the check stays honest on generic fields.
    """
    grid = u.grid
    if u.degrees() != [1]:
        raise ValueError("Navier-slip conditions apply to vector fields")
    nbit = 1 << (grid.n - 1)
    cell = grid.spacing ** (grid.n - 1)
    un_row = u.component(nbit)[..., 0]
    normal_part = float(np.sqrt(np.sum(np.abs(un_row) ** 2) * cell))
    stress = 0.0
    for axis in range(grid.n - 1):
        dk_un = _tangential_derivative_row(un_row, grid, axis)
        dn_uk = normal_derivative_at_boundary(u.component(1 << axis), grid, order)
        row = dk_un + dn_uk
        stress += float(np.sum(np.abs(row) ** 2) * cell)
    return normal_part, float(np.sqrt(stress))


def hodge_bc_residual(u: HalfField) -> tuple[float, float]:
    """Boundary L^2 norms of (nu _| u, nu _| d u) for a tangential-flavor field."""
    return tangential_trace(u).l2_norm(), tangential_trace(d_half(u)).l2_norm()
