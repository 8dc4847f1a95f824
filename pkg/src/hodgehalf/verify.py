"""Named verification suites: each runs a batch of identity checks at desk scale.

A check records its worst residual against a tolerance; a suite aggregates
checks into a VerifyOutcome.  Tolerances scale uniformly with tol_scale so a
caller can tighten or loosen a whole run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from .fields import Grid, random_form
from .halfspace import (d_half, extend, half_l2_inner, hodge_resolvent,
                        leray_halfspace, normal_trace, random_half_field,
                        restrict, scalar_resolvent, tangential_trace)
from .operators import (d, delta, grad_l2, hess_l2, leray_wholespace,
                        resolvent, sector_sweep)

SUITES = ("algebra", "symbols", "decomposition", "halfspace", "traces",
          "evolution")


@dataclass
class VerifyOutcome:
    """Aggregated result of one suite run."""

    suite: str
    passed: int = 0
    failed: int = 0
    worst: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "ok" if self.failed == 0 else "fail"

    def record(self, name: str, residual: float, tol: float):
        self.worst[name] = {"residual": float(residual), "tol": float(tol)}
        if residual <= tol:
            self.passed += 1
        else:
            self.failed += 1


def _rel(num: float, den: float) -> float:
    return num / max(den, 1e-300)


# ---------------------------------------------------------------------------

def suite_algebra(seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    out = VerifyOutcome("algebra")
    rng = np.random.default_rng(seed)
    worst_anti = worst_star = worst_adj = worst_lagr = worst_nilp = 0.0
    for n in range(1, alg.MAX_DIM + 1):
        dim = 1 << n
        for ma, mb in itertools.product(range(dim), repeat=2):
            ka, kb = alg.degree(ma), alg.degree(mb)
            ab = alg.wedge(alg.AlgebraElement.basis(n, ma),
                           alg.AlgebraElement.basis(n, mb))
            ba = alg.wedge(alg.AlgebraElement.basis(n, mb),
                           alg.AlgebraElement.basis(n, ma))
            sign = -1.0 if (ka * kb) % 2 else 1.0
            worst_anti = max(worst_anti,
                             float(np.abs(ab.coeffs - sign * ba.coeffs).max()))
        for mask in range(dim):
            u = alg.AlgebraElement.basis(n, mask)
            k = alg.degree(mask)
            ss = alg.hodge_star(alg.hodge_star(u))
            sign = -1.0 if (k * (n - k)) % 2 else 1.0
            worst_star = max(worst_star,
                             float(np.abs(ss.coeffs - sign * u.coeffs).max()))
        a = rng.standard_normal(n)
        for mu, mv in itertools.product(range(dim), repeat=2):
            u = alg.AlgebraElement.basis(n, mu)
            v = alg.AlgebraElement.basis(n, mv)
            lhs = alg.inner(alg.wedge(alg.AlgebraElement.one_form(a), u), v)
            rhs = alg.inner(u, alg.interior(a, v))
            worst_adj = max(worst_adj, abs(lhs - rhs))
        vvec = rng.standard_normal(n)
        vform = alg.AlgebraElement.one_form(vvec)
        vnorm2 = float(np.dot(vvec, vvec))
        for mask in range(dim):
            u = alg.AlgebraElement.basis(n, mask)
            lag = (alg.wedge(vform, alg.interior(vvec, u))
                   + alg.interior(vvec, alg.wedge(vform, u)))
            worst_lagr = max(worst_lagr,
                             _rel(float(np.abs(lag.coeffs - vnorm2 * u.coeffs).max()),
                                  vnorm2))
            nil_w = alg.wedge(vform, alg.wedge(vform, u))
            nil_i = alg.interior(vvec, alg.interior(vvec, u))
            worst_nilp = max(worst_nilp, float(np.abs(nil_w.coeffs).max()),
                             float(np.abs(nil_i.coeffs).max()))
    out.record("wedge_anticommutativity", worst_anti, 1e-12 * tol_scale)
    out.record("star_involution_sign", worst_star, 1e-12 * tol_scale)
    out.record("wedge_interior_adjointness", worst_adj, 1e-12 * tol_scale)
    out.record("lagrange_identity", worst_lagr, 1e-12 * tol_scale)
    out.record("nilpotence", worst_nilp, 1e-12 * tol_scale)
    return out


def _fd8_derivative(arr: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0,
                  4 / 5, -1 / 5, 4 / 105, -1 / 280])
    out = np.zeros_like(arr)
    for off, c in zip(range(-4, 5), w):
        if c:
            out += c * np.roll(arr, -off, axis=axis)
    return out / spacing


def suite_symbols(seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    out = VerifyOutcome("symbols")
    grid = Grid(2, 128, 16.0)
    u = random_form(grid, [0], seed=seed, width=2.0)
    v = random_form(grid, [1, 2], seed=seed + 1, width=2.0)

    # d of a scalar against 8th-order finite differences
    du = d(u)
    worst = 0.0
    for axis in range(2):
        oracle = _fd8_derivative(u.comps[0], axis, grid.spacing)
        worst = max(worst, _rel(
            float(np.abs(du.component(1 << axis) - oracle).max()),
            float(np.abs(oracle).max())))
    out.record("d_vs_fd8", worst, 1e-6 * tol_scale)

    ddu = d(d(v))
    surrogate = v.l2_norm() + grad_l2(v) + hess_l2(v)
    out.record("d_squared_zero", _rel(ddu.l2_norm(), surrogate), 1e-10 * tol_scale)
    dde = delta(delta(d(v)))
    out.record("delta_squared_zero", _rel(dde.l2_norm(), surrogate),
               1e-10 * tol_scale)

    lhs = d(v).l2_inner(v)
    rhs = v.l2_inner(delta(v))
    out.record("d_delta_adjoint", _rel(abs(lhs - rhs), v.l2_norm() ** 2),
               1e-10 * tol_scale)

    rows = sector_sweep(random_form(grid, [0], seed=seed + 2,
                                    kind="annulus_band", radii=(1.5, 2.5)))
    ratios = [r["ratio"] for r in rows]
    out.record("resolvent_sweep_spread", max(ratios) / min(ratios),
               3.0 * tol_scale)
    return out


def suite_decomposition(seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    out = VerifyOutcome("decomposition")
    grid = Grid(2, 128, 16.0)
    worst_split = worst_sol = worst_curl = worst_orth = worst_idem = 0.0
    for trial in range(5):
        u = random_form(grid, [1, 2], seed=seed + 10 * trial,
                        kind="annulus_band", radii=(1.0, 3.0))
        pu, gu = leray_wholespace(u)
        nu = u.l2_norm()
        worst_split = max(worst_split, _rel((pu + gu - u).l2_norm(), nu))
        worst_sol = max(worst_sol, _rel(delta(pu).l2_norm(), grad_l2(u)))
        worst_curl = max(worst_curl, _rel(d(gu).l2_norm(), grad_l2(u)))
        worst_orth = max(worst_orth, _rel(abs(pu.l2_inner(gu)), nu ** 2))
        pp, _ = leray_wholespace(pu)
        worst_idem = max(worst_idem, _rel((pp - pu).l2_norm(), nu))
    out.record("split_reconstructs", worst_split, 1e-14 * tol_scale)
    out.record("p_part_divergence_free", worst_sol, 1e-10 * tol_scale)
    out.record("g_part_curl_free", worst_curl, 1e-10 * tol_scale)
    out.record("orthogonality", worst_orth, 1e-10 * tol_scale)
    out.record("idempotence", worst_idem, 1e-10 * tol_scale)
    return out


def suite_halfspace(seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    out = VerifyOutcome("halfspace")
    grid = Grid(2, 128, 16.0)
    masks = [1, 2]
    f = random_half_field(grid, "Ht", masks, seed=seed, kind="annulus_band",
                          radii=(1.0, 3.0))

    worst_reflex = worst_bc = 0.0
    for lam in (1.0, 10.0 * np.exp(0.5j), 0.1 * np.exp(-2.0j)):
        u = hodge_resolvent(lam, f)
        lhs = extend(u)
        rhs = resolvent(lam, extend(f))
        worst_reflex = max(worst_reflex,
                           _rel((lhs - rhs).l2_norm(), rhs.l2_norm()))
        tt = tangential_trace(u).l2_norm() + tangential_trace(d_half(u)).l2_norm()
        worst_bc = max(worst_bc, _rel(tt, u.l2_norm()))
    out.record("reflection_identity", worst_reflex, 1e-12 * tol_scale)
    out.record("boundary_conditions", worst_bc, 1e-8 * tol_scale)

    # componentwise Dirichlet / Neumann decoupling
    lam = 2.0 * np.exp(0.3j)
    u = hodge_resolvent(lam, f)
    worst_dec = 0.0
    for mask in masks:
        bc = "D" if mask >> (grid.n - 1) & 1 else "N"
        per = scalar_resolvent(lam, f.comps[mask], grid, bc)
        worst_dec = max(worst_dec, _rel(float(np.abs(u.comps[mask] - per).max()),
                                        float(np.abs(per).max())))
    out.record("neumann_dirichlet_decoupling", worst_dec, 1e-10 * tol_scale)

    pu, gu = leray_halfspace(f)
    nf = f.l2_norm()
    out.record("half_split_reconstructs", _rel((pu + gu - f).l2_norm(), nf),
               1e-13 * tol_scale)
    out.record("half_orthogonality", _rel(abs(pu.l2_inner(gu)), nf ** 2),
               1e-8 * tol_scale)
    pp, _ = leray_halfspace(pu)
    out.record("half_idempotence", _rel((pp - pu).l2_norm(), nf),
               1e-9 * tol_scale)
    out.record("half_p_boundary", _rel(tangential_trace(pu).l2_norm(), nf),
               1e-8 * tol_scale)
    return out


def suite_traces(seed: int = 0, tol_scale: float = 1.0,
                 pairs: int = 10) -> VerifyOutcome:
    out = VerifyOutcome("traces")
    grid = Grid(2, 128, 16.0)
    worst_tan = worst_nor = 0.0
    rng = np.random.default_rng(seed)
    for trial in range(pairs):
        center_u = (rng.uniform(-3, 3), rng.uniform(0.5, 3.0))
        center_v = (rng.uniform(-3, 3), rng.uniform(0.5, 3.0))
        u = random_form(grid, [1, 2], seed=seed + 100 + trial,
                        kind="gaussian_bump", width=2.0, center=center_u)
        psi = random_form(grid, [0, 1], seed=seed + 200 + trial,
                          kind="gaussian_bump", width=2.0, center=center_v)
        scale = u.l2_norm() * psi.l2_norm()

        lhs = tangential_trace(u).pair_with_boundary_values(
            {m: psi.comps[m][..., grid.points // 2] for m in psi.comps})
        rhs = half_l2_inner(u, d(psi)) - half_l2_inner(delta(u), psi)
        worst_tan = max(worst_tan, _rel(abs(lhs - rhs), scale))

        psi_up = random_form(grid, [2], seed=seed + 300 + trial,
                             kind="gaussian_bump", width=2.0, center=center_v)
        lhs2 = normal_trace(u).pair_with_boundary_values(
            {m: psi_up.comps[m][..., grid.points // 2] for m in psi_up.comps})
        rhs2 = half_l2_inner(d(u), psi_up) - half_l2_inner(u, delta(psi_up))
        worst_nor = max(worst_nor, _rel(abs(lhs2 - rhs2), scale))
    out.record("tangential_trace_duality", worst_tan, 1e-6 * tol_scale)
    out.record("normal_trace_duality", worst_nor, 1e-6 * tol_scale)
    return out


def suite_evolution(seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    from .evolution import solve_hodge_stokes, solve_navier_slip

    out = VerifyOutcome("evolution")
    grid = Grid(2, 64, 8.0)
    masks = [1, 2]
    u0 = random_half_field(grid, "Ht", masks, seed=seed, kind="annulus_band",
                           radii=(1.0, 2.5))
    u0, _ = leray_halfspace(u0)
    fconst = random_half_field(grid, "Ht", masks, seed=seed + 1,
                               kind="annulus_band", radii=(1.0, 2.5))

    traj = solve_hodge_stokes(fconst, u0, 1.0, 32)
    worst_sol = 0.0
    from .halfspace import delta_half
    for um in traj.u:
        worst_sol = max(worst_sol,
                        _rel(delta_half(um).l2_norm(), max(um.l2_norm(), 1e-300)))
    out.record("solenoidality", worst_sol, 1e-9 * tol_scale)

    # pressure gradient is curl-free
    _, grad_p = solve_navier_slip(fconst, u0, 1.0, 8)
    worst_curl = max(_rel(d_half(gp).l2_norm(), max(gp.l2_norm(), 1e-300))
                     for gp in grad_p)
    out.record("pressure_curl_free", worst_curl, 1e-9 * tol_scale)

    # second-order self-convergence of the momentum residual
    ratios = momentum_residual_ratios(grid, seed=seed, steps0=16)
    for i, r in enumerate(ratios):
        out.record(f"self_convergence_doubling_{i}", abs(r - 4.0),
                   0.4 * tol_scale)

    # semigroup consistency with f = 0
    traj_a = solve_hodge_stokes(None, u0, 0.5, 16)
    traj_b = solve_hodge_stokes(None, traj_a.u[-1], 0.5, 16)
    traj_c = solve_hodge_stokes(None, u0, 1.0, 32)
    diff = (traj_b.u[-1] - traj_c.u[-1]).l2_norm()
    out.record("semigroup_consistency", _rel(diff, u0.l2_norm()),
               1e-10 * tol_scale)
    return out


def momentum_residual_ratios(grid: Grid, seed: int = 0, steps0: int = 16,
                             doublings: int = 2, horizon: float = 1.0) -> list[float]:
    """Momentum-residual reduction factors under time-step doubling."""
    from .evolution import solve_navier_slip
    from .operators import laplacian

    masks = [1 << a for a in range(grid.n)]
    u0 = random_half_field(grid, "Ht", masks, seed=seed, kind="annulus_band",
                           radii=(1.0, 2.5))
    u0, _ = leray_halfspace(u0)
    g = random_half_field(grid, "Ht", masks, seed=seed + 1,
                          kind="annulus_band", radii=(1.0, 2.5))

    def forcing(t):
        return (1.0 + 0.5 * np.sin(2.0 * np.pi * t / horizon)) * g

    residuals = []
    for level in range(doublings + 1):
        steps = steps0 * 2 ** level
        traj, grad_p = solve_navier_slip(forcing, u0, horizon, steps)
        dt = traj.time_grid.dt
        worst = 0.0
        times = traj.times()
        for m in range(steps):
            t_mid = times[m] + 0.5 * dt
            fmid = forcing(t_mid)
            pf, gp = leray_halfspace(fmid)
            du = (1.0 / dt) * (traj.u[m + 1] - traj.u[m])
            mid = 0.5 * (traj.u[m + 1] + traj.u[m])
            lap = restrict(laplacian(extend(mid)), "Ht")
            resid = du - lap + gp - fmid
            worst = max(worst, resid.l2_norm())
        residuals.append(worst)
    return [residuals[i] / residuals[i + 1] for i in range(doublings)]


def run_suite(name: str, seed: int = 0, tol_scale: float = 1.0) -> VerifyOutcome:
    table = {"algebra": suite_algebra, "symbols": suite_symbols,
             "decomposition": suite_decomposition, "halfspace": suite_halfspace,
             "traces": suite_traces, "evolution": suite_evolution}
    if name not in table:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return table[name](seed=seed, tol_scale=tol_scale)
