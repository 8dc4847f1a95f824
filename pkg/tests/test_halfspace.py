"""Reflection extensions, traces, half-space Hodge machinery, Navier-slip."""

import numpy as np
import pytest

from hodgehalf.fields import Grid, TestFunctionSpec, random_form, synthesize
from hodgehalf.halfspace import (HalfField, component_parity, d_half,
                                 delta_half, extend, half_domain_integral,
                                 half_l2_inner, hodge_bc_residual, hodge_heat,
                                 hodge_resolvent, hodge_stokes_apply,
                                 leray_halfspace, navier_slip_residual,
                                 normal_derivative_at_boundary, normal_trace,
                                 q_projector, random_half_field, reflect_normal,
                                 restrict, scalar_resolvent, symmetrize,
                                 tangential_trace)
from hodgehalf.operators import d, delta, grad_l2, hess_l2, laplacian, resolvent


@pytest.fixture
def grid2():
    return Grid(2, 64, 16.0)


@pytest.fixture
def grid3():
    return Grid(3, 32, 16.0)


def rel(a, b):
    return a / max(b, 1e-300)


# ---------------------------------------------------------------------------
# flavors, extension, restriction
# ---------------------------------------------------------------------------

def test_component_parity_table():
    n = 3
    normal = 1 << (n - 1)
    assert component_parity("Ht", 0, n) == 1          # scalar: even
    assert component_parity("Ht", normal, n) == -1    # contains the normal: odd
    assert component_parity("Hn", 0, n) == -1
    assert component_parity("Hn", normal, n) == 1
    assert component_parity("D", 0b010, n) == -1
    assert component_parity("N", normal, n) == 1


def test_extension_is_even_for_scalars(grid2):
    u = random_half_field(grid2, "Ht", [0], seed=0, width=2.0)
    U = extend(u)
    refl = reflect_normal(U.comps[0])
    assert np.abs(U.comps[0] - refl).max() < 1e-15


def test_extension_odd_forces_boundary_zero(grid2):
    # a normal-bearing component extends oddly with a zero boundary row
    u = random_half_field(grid2, "Ht", [0b10], seed=1, width=2.0)
    U = extend(u)
    half = grid2.points // 2
    assert np.abs(U.comps[0b10][..., half]).max() == 0.0
    refl = reflect_normal(U.comps[0b10])
    assert np.abs(U.comps[0b10] + refl).max() < 1e-15


def test_restrict_extend_identity(grid2):
    u = random_half_field(grid2, "Ht", [0b01, 0b10], seed=2, width=2.0)
    v = restrict(extend(u), "Ht")
    for m in u.comps:
        assert np.abs(v.comps[m] - u.comps[m]).max() == 0.0


def test_extend_restrict_identity_on_symmetric(grid2):
    V = symmetrize(random_form(grid2, [0b01, 0b10], seed=3, width=2.0), "Hn")
    W = extend(restrict(V, "Hn"))
    for m in V.comps:
        assert np.abs(W.comps[m] - V.comps[m]).max() == 0.0


def test_extension_of_interior_support_is_mirror_pair(grid2):
    # data supported away from the boundary extends to two disjoint copies
    spec = TestFunctionSpec("gaussian_bump", center=(0.0, 8.0), width=1.0)
    full = synthesize(spec, grid2, (0,))
    u = restrict(full, "Ht")
    U = extend(u)
    half = grid2.points // 2
    upper = U.comps[0][..., half:]
    lower = U.comps[0][..., 1:half]
    assert np.abs(upper - u.comps[0][..., :half]).max() == 0.0
    assert np.abs(lower - u.comps[0][..., half - 1:0:-1]).max() < 1e-15
    # the two copies overlap nowhere above round-off
    assert np.abs(upper[..., 0]).max() < 1e-12


def test_odd_full_field_restricts_to_zero_boundary_row(grid2):
    U = symmetrize(random_form(grid2, [0b10], seed=4, width=2.0), "Ht")
    u = restrict(U, "Ht")
    assert np.abs(u.boundary_row(0b10)).max() < 1e-15


def test_half_field_shape_validation(grid2):
    with pytest.raises(ValueError):
        HalfField(grid2, "Ht", {0: np.zeros(grid2.shape)})
    with pytest.raises(ValueError):
        HalfField(grid2, "X", {})


# ---------------------------------------------------------------------------
# derivatives through the extension
# ---------------------------------------------------------------------------

def test_d_half_scalar_gradient_symmetry(grid2):
    u = random_half_field(grid2, "Ht", [0], seed=5, width=2.0)
    du = d_half(u)
    # the normal component of the gradient of an even function is odd:
    # its boundary row vanishes
    assert np.abs(du.boundary_row(0b10)).max() < 1e-13


def test_commutation_residual_random_fields(grid2):
    worst = 0.0
    for trial in range(20):
        masks = [0, 0b01, 0b10, 0b11]
        u = random_half_field(grid2, "Ht", masks, seed=100 + trial, width=2.0)
        lhs = d(extend(u))
        rhs = extend(d_half(u))
        worst = max(worst, rel((lhs - rhs).l2_norm(), grad_l2(extend(u))))
        lhs2 = delta(extend(u))
        rhs2 = extend(delta_half(u))
        worst = max(worst, rel((lhs2 - rhs2).l2_norm(), grad_l2(extend(u))))
    assert worst < 1e-9


def test_d_half_flavor_mirror(grid2):
    u = random_half_field(grid2, "Hn", [0b01, 0b10], seed=6, width=2.0)
    lhs = d(extend(u))
    rhs = extend(d_half(u))
    assert (lhs - rhs).l2_norm() < 1e-9 * grad_l2(extend(u))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

def test_tangential_trace_zero_when_no_normal_components(grid2):
    u = random_half_field(grid2, "Ht", [0, 0b01], seed=7, width=2.0)
    assert tangential_trace(u).l2_norm() == 0.0


def test_tangential_trace_vector_sign(grid2):
    # on 1-forms nu _| u is -(-u_n)(., 0) = u_n(., 0) up to the stated sign
    u = random_half_field(grid2, "Hn", [0b10], seed=8, width=2.0)
    tr = tangential_trace(u)
    expected = -u.boundary_row(0b10)  # (-1)^k with k = 1
    assert np.abs(tr.component(0) - expected).max() < 1e-15


def test_normal_trace_picks_tangential_components(grid2):
    u = random_half_field(grid2, "Hn", [0, 0b01], seed=9, width=2.0)
    tr = normal_trace(u)
    assert tr.wedged_normal
    # 0-form: sign (-1)^(0+1) = -1; 1-form dx1: sign (-1)^(1+1) = +1
    assert np.abs(tr.component(0) + u.boundary_row(0)).max() < 1e-15
    assert np.abs(tr.component(0b01) - u.boundary_row(0b01)).max() < 1e-15


def test_normal_trace_vanishes_for_odd_components(grid2):
    u = random_half_field(grid2, "Ht", [0b01, 0b10], seed=10, width=2.0)
    v = q_projector_free_trace = normal_trace(
        restrict(symmetrize(extend(u), "Hn"), "Hn"))
    # symmetrizing to the normal flavor kills tangential boundary rows
    assert v.l2_norm() < 1e-13


@pytest.mark.parametrize("n,points", [(2, 128), (3, 64)])
def test_trace_duality_tangential(n, points):
    grid = Grid(n, points, 16.0)
    rng = np.random.default_rng(42 + n)
    masks_u = [m for m in range(1 << n) if bin(m).count("1") in (1, 2)]
    masks_psi = [m for m in range(1 << n) if bin(m).count("1") in (0, 1)]
    worst = 0.0
    for trial in range(10):
        center_u = tuple(rng.uniform(-2, 2, n - 1)) + (rng.uniform(0.5, 2.5),)
        center_p = tuple(rng.uniform(-2, 2, n - 1)) + (rng.uniform(0.5, 2.5),)
        u = random_form(grid, masks_u, seed=1000 + trial,
                        kind="gaussian_bump", width=2.0, center=center_u)
        psi = random_form(grid, masks_psi, seed=2000 + trial,
                          kind="gaussian_bump", width=2.0, center=center_p)
        boundary = {m: psi.comps[m][..., grid.points // 2] for m in psi.comps}
        lhs = tangential_trace(u).pair_with_boundary_values(boundary)
        rhs = half_l2_inner(u, d(psi)) - half_l2_inner(delta(u), psi)
        worst = max(worst, rel(abs(lhs - rhs), u.l2_norm() * psi.l2_norm()))
    assert worst < 1e-6


@pytest.mark.parametrize("n,points", [(2, 128), (3, 64)])
def test_trace_duality_normal(n, points):
    grid = Grid(n, points, 16.0)
    rng = np.random.default_rng(52 + n)
    masks_u = [m for m in range(1 << n) if bin(m).count("1") == 1]
    masks_psi = [m for m in range(1 << n) if bin(m).count("1") == 2]
    worst = 0.0
    for trial in range(10):
        center_u = tuple(rng.uniform(-2, 2, n - 1)) + (rng.uniform(0.5, 2.5),)
        center_p = tuple(rng.uniform(-2, 2, n - 1)) + (rng.uniform(0.5, 2.5),)
        u = random_form(grid, masks_u, seed=3000 + trial,
                        kind="gaussian_bump", width=2.0, center=center_u)
        psi = random_form(grid, masks_psi, seed=4000 + trial,
                          kind="gaussian_bump", width=2.0, center=center_p)
        boundary = {m: psi.comps[m][..., grid.points // 2] for m in psi.comps}
        lhs = normal_trace(u).pair_with_boundary_values(boundary)
        rhs = half_l2_inner(d(u), psi) - half_l2_inner(u, delta(psi))
        worst = max(worst, rel(abs(lhs - rhs), u.l2_norm() * psi.l2_norm()))
    assert worst < 1e-6


def test_half_domain_integral_oracle(grid2):
    # separable erf closed form for a shifted gaussian over the half-domain
    from math import erf, pi, sqrt

    spec = TestFunctionSpec("gaussian_bump", center=(1.0, 2.0), width=2.0)
    g = synthesize(spec, grid2, (0,))
    got = half_domain_integral(g.comps[0], grid2)

    def gauss_between(a, b, c, w):
        return w * sqrt(pi) / 2.0 * (erf((b - c) / w) - erf((a - c) / w))

    oracle = gauss_between(-16, 16, 1.0, 2.0) * gauss_between(0, 16, 2.0, 2.0)
    assert abs(got - oracle) < 1e-10 * abs(oracle)


# ---------------------------------------------------------------------------
# Hodge resolvent and heat through the reflection identity
# ---------------------------------------------------------------------------

def test_reflection_identity_sector_samples(grid2):
    f = random_half_field(grid2, "Ht", [0b01, 0b10], seed=11,
                          kind="annulus_band", radii=(1.0, 3.0))
    radii = (0.1, 1.0, 10.0, 100.0)
    angles = (0.0, 2.3, -2.3)
    worst = 0.0
    worst_bc = 0.0
    for r in radii:
        for th in angles:
            lam = r * np.exp(1j * th)
            u = hodge_resolvent(lam, f)
            lhs = extend(u)
            rhs = resolvent(lam, extend(f))
            worst = max(worst, rel((lhs - rhs).l2_norm(), rhs.l2_norm()))
            bc = (tangential_trace(u).l2_norm()
                  + tangential_trace(d_half(u)).l2_norm())
            worst_bc = max(worst_bc, rel(bc, u.l2_norm()))
    assert worst < 1e-12
    assert worst_bc < 1e-8


def test_hodge_resolvent_scalar_neumann(grid2):
    # scalars under Ht feel the Neumann Laplacian: normal derivative vanishes
    f = random_half_field(grid2, "Ht", [0], seed=12, width=2.0)
    u = hodge_resolvent(2.0, f)
    du = d_half(u)
    assert np.abs(du.boundary_row(0b10)).max() < 1e-10
    # matches the scalar Neumann resolvent componentwise
    per = scalar_resolvent(2.0, f.comps[0], grid2, "N")
    assert np.abs(u.comps[0] - per).max() < 1e-13


def test_hodge_resolvent_dirichlet_components(grid3):
    # normal-bearing components solve Dirichlet problems: boundary rows vanish
    nbit = 1 << 2
    masks = [nbit, nbit | 0b001]
    f = random_half_field(grid3, "Ht", masks, seed=13, width=2.0)
    lam = 1.5 * np.exp(0.4j)
    u = hodge_resolvent(lam, f)
    for m in masks:
        assert np.abs(u.boundary_row(m)).max() < 1e-13
        per = scalar_resolvent(lam, f.comps[m], grid3, "D")
        assert np.abs(u.comps[m] - per).max() <= 1e-10 * np.abs(per).max()


def test_hodge_resolvent_pde_residual(grid2):
    f = random_half_field(grid2, "Ht", [0b01, 0b10], seed=14, width=2.0)
    lam = 1.0
    u = hodge_resolvent(lam, f)
    U, F = extend(u), extend(f)
    resid = (lam * U - laplacian(U) - F).l2_norm()
    assert resid < 1e-9 * F.l2_norm()


def test_hodge_resolvent_estimate_sweep(grid2):
    f = random_half_field(grid2, "Ht", [0b01, 0b10], seed=15,
                          kind="annulus_band", radii=(1.5, 2.5))
    ratios = []
    for r in [10.0 ** e for e in range(-2, 3)]:
        for th in np.linspace(-3 * np.pi / 4, 3 * np.pi / 4, 9):
            lam = r * np.exp(1j * th)
            u = hodge_resolvent(lam, f)
            U = extend(u)
            F = extend(f)
            val = (abs(lam) * U.l2_norm() + abs(lam) ** 0.5 * grad_l2(U)
                   + hess_l2(U)) / F.l2_norm()
            ratios.append(val)
    ratios = np.array(ratios)
    assert np.all(np.isfinite(ratios))
    assert ratios.max() / ratios.min() < 3.0


def test_hodge_heat_identity_semigroup_commutation(grid2):
    u0 = random_half_field(grid2, "Ht", [0, 0b01, 0b10], seed=16, width=2.0)
    assert (hodge_heat(0.0, u0) - u0).l2_norm() < 1e-14
    a = hodge_heat(0.4, hodge_heat(0.6, u0))
    b = hodge_heat(1.0, u0)
    assert (a - b).l2_norm() <= 1e-12 * u0.l2_norm()
    lhs = d_half(hodge_heat(0.5, u0))
    rhs = hodge_heat(0.5, d_half(u0))
    assert (lhs - rhs).l2_norm() <= 1e-9 * grad_l2(extend(u0))


# ---------------------------------------------------------------------------
# Hodge decomposition on the half-space
# ---------------------------------------------------------------------------

def make_tangential_field(grid, seed):
    return random_half_field(grid, "Ht", [0b01, 0b10], seed=seed,
                             kind="annulus_band", radii=(1.0, 3.0))


def test_leray_halfspace_properties(grid2):
    u = make_tangential_field(grid2, 17)
    pu, gu = leray_halfspace(u)
    nu = u.l2_norm()
    assert (pu + gu - u).l2_norm() <= 1e-13 * nu
    assert delta_half(pu).l2_norm() <= 1e-9 * nu
    assert d_half(gu).l2_norm() <= 1e-9 * nu
    assert tangential_trace(pu).l2_norm() <= 1e-8 * nu
    assert abs(pu.l2_inner(gu)) <= 1e-8 * nu ** 2
    pp, _ = leray_halfspace(pu)
    assert (pp - pu).l2_norm() <= 1e-9 * nu


def test_leray_halfspace_fixes_solenoidal(grid2):
    u = make_tangential_field(grid2, 18)
    pu, _ = leray_halfspace(u)
    again, moved = leray_halfspace(pu)
    assert (again - pu).l2_norm() <= 1e-9 * pu.l2_norm()
    assert moved.l2_norm() <= 1e-9 * pu.l2_norm()


def test_leray_halfspace_kills_gradients(grid2):
    phi = random_half_field(grid2, "Ht", [0], seed=19, kind="annulus_band",
                            radii=(1.0, 3.0))
    u = d_half(phi)
    pu, gu = leray_halfspace(u)
    assert pu.l2_norm() <= 1e-9 * u.l2_norm()
    assert (gu - u).l2_norm() <= 1e-9 * u.l2_norm()


def test_leray_halfspace_requires_tangential_flavor(grid2):
    u = random_half_field(grid2, "Hn", [0b01, 0b10], seed=20, width=2.0)
    with pytest.raises(ValueError):
        leray_halfspace(u)


def test_leray_decompose_recombine_idempotent(grid2):
    u = make_tangential_field(grid2, 21)
    pu, gu = leray_halfspace(u)
    pu2, gu2 = leray_halfspace(pu + gu)
    assert (pu2 - pu).l2_norm() <= 1e-9 * u.l2_norm()
    assert (gu2 - gu).l2_norm() <= 1e-9 * u.l2_norm()


def test_q_projector_mirror(grid2):
    u = random_half_field(grid2, "Hn", [0b01, 0b10], seed=22,
                          kind="annulus_band", radii=(1.0, 3.0))
    qu, ru = q_projector(u)
    nu = u.l2_norm()
    assert (qu + ru - u).l2_norm() <= 1e-13 * nu
    assert delta_half(qu).l2_norm() <= 1e-9 * nu
    assert d_half(ru).l2_norm() <= 1e-9 * nu
    assert normal_trace(ru).l2_norm() <= 1e-8 * nu
    assert abs(qu.l2_inner(ru)) <= 1e-8 * nu ** 2
    # solenoidal fields are fixed
    qq, rr = q_projector(qu)
    assert (qq - qu).l2_norm() <= 1e-9 * nu
    # exact fields with the normal condition are annihilated
    psi = random_half_field(grid2, "Hn", [0], seed=23, kind="annulus_band",
                            radii=(1.0, 3.0))
    w = d_half(psi)
    qw, rw = q_projector(w)
    assert qw.l2_norm() <= 1e-9 * w.l2_norm()


def test_hodge_stokes_apply(grid2):
    u = make_tangential_field(grid2, 24)
    pu, gu = leray_halfspace(u)
    au = hodge_stokes_apply(pu)
    target = restrict(-1 * laplacian(extend(pu)), "Ht")
    assert (au - target).l2_norm() <= 1e-9 * hess_l2(extend(pu))
    with pytest.raises(ValueError):
        hodge_stokes_apply(gu)  # gradients are outside the domain


# ---------------------------------------------------------------------------
# Navier-slip boundary conditions
# ---------------------------------------------------------------------------

def test_onesided_derivative_oracle():
    # the one-sided stencil reproduces the analytic normal derivative
    grid = Grid(2, 256, 16.0)
    x = grid.axis_coords()
    xn = grid.spacing * np.arange(grid.points // 2 + 1)
    field = (np.exp(-np.square(x[:, None]) / 9.0)
             * np.sin(0.7 * xn[None, :] + 0.3))
    got = normal_derivative_at_boundary(field.astype(complex), grid)
    expected = np.exp(-np.square(x) / 9.0) * 0.7 * np.cos(0.3)
    assert np.abs(got - expected).max() < 1e-8


def test_navier_slip_residual_on_hodge_fields():
    grid = Grid(2, 256, 16.0)
    f = random_half_field(grid, "Ht", [0b01, 0b10], seed=25,
                          kind="annulus_band", radii=(0.7, 1.8))
    u = hodge_resolvent(1.0, f)
    normal_part, stress = navier_slip_residual(u)
    scale = max(u.l2_norm(), 1e-300)
    assert normal_part / scale < 1e-7
    assert stress / scale < 1e-7


def test_navier_slip_residual_generic_field_nonzero():
    grid = Grid(2, 256, 16.0)
    # generic smooth field with no particular boundary behavior
    full = random_form(grid, [0b01, 0b10], seed=26, kind="gaussian_bump",
                       width=3.0, center=(0.0, 2.0))
    u = restrict(full, "Ht")
    normal_part, stress = navier_slip_residual(u)
    assert stress > 1e-3 * u.l2_norm()


def test_navier_slip_equivalence_converse():
    # fields built to satisfy the slip conditions pass the Hodge check
    grid = Grid(2, 256, 16.0)
    w = random_half_field(grid, "Ht", [0b01, 0b10], seed=27,
                          kind="annulus_band", radii=(0.7, 1.8))
    normal_part, stress = navier_slip_residual(w)
    scale = w.l2_norm()
    assert normal_part / scale < 1e-7 and stress / scale < 1e-7
    bc_u, bc_du = hodge_bc_residual(w)
    assert bc_u / scale < 1e-7 and bc_du / scale < 1e-7


def test_navier_slip_residual_requires_vectors(grid2):
    u = random_half_field(grid2, "Ht", [0], seed=28, width=2.0)
    with pytest.raises(ValueError):
        navier_slip_residual(u)


def test_navier_slip_zero_normal_even_tangential():
    # u_n identically zero with even tangential components: the normal part
    # vanishes exactly and the stress residual is stencil truncation only
    grid = Grid(2, 256, 16.0)
    u = random_half_field(grid, "Ht", [0b01], seed=29, kind="annulus_band",
                          radii=(0.7, 1.8))
    u = u + HalfField.zero(grid, "Ht", [0b10])
    normal_part, stress = navier_slip_residual(u)
    assert normal_part == 0.0
    assert stress < 1e-7 * u.l2_norm()


def test_half_field_flavor_mismatch_guarded(grid2):
    a = random_half_field(grid2, "Ht", [0b01], seed=30, width=2.0)
    b = random_half_field(grid2, "Hn", [0b01], seed=31, width=2.0)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a.l2_inner(b)
