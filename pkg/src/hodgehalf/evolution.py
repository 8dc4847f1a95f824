"""Time-dependent solvers on the half-space and the maximal-regularity harness.

All solvers are exact in space (spectral multipliers on the flavored
extension) and second order in time: one step of the mild solution reads

    u_{m+1} = e^{dt Delta} u_m + dt e^{(dt/2) Delta} f(t_m + dt/2),

the exponential-midpoint quadrature of the Duhamel integral.  Stepping the
semigroup itself is exact, so the only time error is the forcing quadrature.

The regularity reports measure the trajectory in time-Lebesgue / space-Besov
norms.  Spatial Besov norms of half-space fields are computed on the flavored
extension (a fixed bounded extension standing in for the quotient norm), and
the time derivative is evaluated through the mild identity du/dt = Delta u + f
rather than by finite differences, so the report never mixes time-stepping
error into the estimate it measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import FormField, Grid
from .halfspace import HalfField, extend, leray_halfspace, restrict
from .littlewood_paley import FilterBank, SpaceParams, besov_norm, completeness_ok
from .operators import resolvent


@dataclass(frozen=True)
class TimeGrid:
    """Uniform nodes t_m = m T / M on [0, T]."""

    horizon: float
    steps: int

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("final time must be positive")
        if self.steps < 1:
            raise ValueError("need at least one step")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)


@dataclass
class Trajectory:
    """Node snapshots of a solve: solution, forcing, and the initial datum."""

    time_grid: TimeGrid
    u: list
    f: list
    u0: HalfField
    flavor: str = "Ht"

    def times(self) -> np.ndarray:
        return self.time_grid.nodes()


def _forcing_callable(f):
    """Normalize a forcing argument to a callable t -> HalfField or None.

    Snapshot lists come back as a callable carrying a .snapshots attribute;
    the solvers read the nodes directly and average adjacent pairs for the
    step midpoints.
    """
    if f is None:
        return None
    if isinstance(f, HalfField):
        return lambda t: f
    if callable(f):
        return f
    if isinstance(f, (list, tuple)):
        snapshots = list(f)

        def from_snapshots(t):
            raise TypeError("snapshot forcing is only defined at solver nodes")

        from_snapshots.snapshots = snapshots
        return from_snapshots
    raise TypeError("forcing must be None, a HalfField, a callable, or snapshots")


class _Stepper:
    """Shared spectral stepping core working on extended spectra."""

    def __init__(self, u0: HalfField, time_grid: TimeGrid):
        self.grid = u0.grid
        self.flavor = u0.flavor
        self.time_grid = time_grid
        self.absq = self.grid.freq_sq()
        dt = time_grid.dt
        self.full_step = np.exp(-dt * self.absq)
        self.half_step = np.exp(-0.5 * dt * self.absq)
        self.state = {m: np.fft.fftn(a) for m, a in extend(u0).comps.items()}

    def field(self) -> HalfField:
        full = FormField(self.grid, {m: np.fft.ifftn(a)
                                     for m, a in self.state.items()})
        return restrict(full, self.flavor)

    def spectra(self) -> dict[int, np.ndarray]:
        return {m: a.copy() for m, a in self.state.items()}

    def advance(self, f_mid_hat: dict[int, np.ndarray] | None):
        dt = self.time_grid.dt
        for m in self.state:
            self.state[m] = self.full_step * self.state[m]
        if f_mid_hat is not None:
            for m, spec in f_mid_hat.items():
                term = dt * self.half_step * spec
                if m in self.state:
                    self.state[m] = self.state[m] + term
                else:
                    self.state[m] = term


def _spectra_of(u: HalfField) -> dict[int, np.ndarray]:
    return {m: np.fft.fftn(a) for m, a in extend(u).comps.items()}


def solve_hodge_heat(f, u0: HalfField, horizon: float, steps: int,
                     observer=None, store: bool = True) -> Trajectory:
    """Mild solution of the flavored Hodge-heat system du/dt - Delta u = f.

    The boundary conditions ride on the flavor of u0 and hold at every node.
    ``f`` may be None, a constant HalfField, a callable t -> HalfField, or a
    list of node snapshots (midpoints are then averaged, still second order).
    ``observer(m, t, stepper)`` runs at every node when provided; pass
    store=False to keep only the endpoint snapshots (streaming use).
    """
    tg = TimeGrid(horizon, steps)
    forcing = _forcing_callable(f)
    snaps_in = getattr(forcing, "snapshots", None)
    if snaps_in is not None and len(snaps_in) != steps + 1:
        raise ValueError(f"need {steps + 1} forcing snapshots, got {len(snaps_in)}")
    constant = f if isinstance(f, HalfField) else None
    constant_hat = _spectra_of(constant) if constant is not None else None
    stepper = _Stepper(u0, tg)
    times = tg.nodes()

    def f_at(t, m):
        if forcing is None:
            return None
        if constant is not None:
            return constant
        if snaps_in is not None:
            return snaps_in[m]
        return forcing(t)

    def f_mid_hat(m, t_mid):
        if forcing is None:
            return None
        if constant_hat is not None:
            return constant_hat
        if snaps_in is not None:
            return _spectra_of(0.5 * (snaps_in[m] + snaps_in[m + 1]))
        return _spectra_of(forcing(t_mid))

    u_nodes = [stepper.field()]
    f_nodes = [f_at(times[0], 0)]
    if observer is not None:
        observer(0, times[0], stepper)
    for m in range(steps):
        t_mid = times[m] + 0.5 * tg.dt
        stepper.advance(f_mid_hat(m, t_mid))
        if store:
            u_nodes.append(stepper.field())
            f_nodes.append(f_at(times[m + 1], m + 1))
        if observer is not None:
            observer(m + 1, times[m + 1], stepper)
    if not store:
        u_nodes.append(stepper.field())
        f_nodes.append(f_at(times[-1], steps))
    return Trajectory(tg, u_nodes, f_nodes, u0, u0.flavor)


def _project_half(u: HalfField) -> HalfField:
    return leray_halfspace(u)[0]


def solve_hodge_stokes(f, u0: HalfField, horizon: float, steps: int,
                       auto_project: bool = False, observer=None,
                       sol_tol: float = 1e-9, store: bool = True) -> Trajectory:
    """Mild solution of the Hodge-Stokes system: heat flow of projected data.

    u0 must be solenoidal with vanishing tangential trace (checked via the
    Leray projector; pass auto_project=True to project instead of failing).
    The forcing is projected at every evaluation.
    """
    if u0.flavor != "Ht":
        raise ValueError("the Hodge-Stokes solver uses the tangential flavor")
    pu0 = _project_half(u0)
    defect = (u0 - pu0).l2_norm()
    if defect > sol_tol * max(u0.l2_norm(), 1e-300):
        if not auto_project:
            raise ValueError(f"initial datum is not solenoidal (projector moves "
                             f"it by {defect:.3e}); pass auto_project=True")
        u0 = pu0
    else:
        u0 = pu0

    forcing = _forcing_callable(f)
    snaps = getattr(forcing, "snapshots", None)
    if snaps is not None:
        projected = [None if s is None else _project_half(s) for s in snaps]
        traj = solve_hodge_heat(projected, u0, horizon, steps,
                                observer=observer, store=store)
    elif forcing is None:
        traj = solve_hodge_heat(None, u0, horizon, steps, observer=observer,
                                store=store)
    elif isinstance(f, HalfField):
        traj = solve_hodge_heat(_project_half(f), u0, horizon, steps,
                                observer=observer, store=store)
    else:
        traj = solve_hodge_heat(lambda t: _project_half(forcing(t)), u0,
                                horizon, steps, observer=observer, store=store)
    return traj


def solve_navier_slip(f, u0: HalfField, horizon: float, steps: int,
                      auto_project: bool = False) -> tuple[Trajectory, list]:
    """Stokes flow of a vector field under Navier-slip boundary conditions.

    Returns the velocity trajectory and the pressure-gradient snapshots
    grad p(t_m) = (I - P) f(t_m), the exact complement of the projected
    forcing; on the flat boundary the slip conditions coincide with the
    tangential Hodge conditions, so the velocity solve is the Stokes one.
    """
    if u0.degrees() != [1]:
        raise ValueError("the Navier-slip system runs on vector fields")
    forcing = _forcing_callable(f)
    traj = solve_hodge_stokes(f, u0, horizon, steps, auto_project=auto_project)
    snaps = getattr(forcing, "snapshots", None)
    grad_p = []
    for m, t in enumerate(traj.times()):
        if forcing is None:
            grad_p.append(HalfField.zero(u0.grid, u0.flavor, u0.masks()))
        else:
            ft = snaps[m] if snaps is not None else forcing(t)
            grad_p.append(leray_halfspace(ft)[1])
    return traj, grad_p


# ---------------------------------------------------------------------------
# maximal-regularity reports
# ---------------------------------------------------------------------------

@dataclass
class MaxRegReport:
    """One maximal-regularity measurement of a trajectory."""

    system: str
    s: float
    p: float
    q: float
    horizon: float
    sup_interp_norm: float
    lq_evolution_norm: float
    rhs_forcing_norm: float
    rhs_initial_norm: float
    ratio: float
    extras: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = {"system": self.system, "s": self.s, "p": self.p,
               "q": self.q, "T": self.horizon,
               "lhs_sup": self.sup_interp_norm,
               "lhs_lq": self.lq_evolution_norm,
               "rhs_f": self.rhs_forcing_norm,
               "rhs_u0": self.rhs_initial_norm,
               "ratio": self.ratio}
        out.update(self.extras)
        return out


def _besov_of_extension(comps_hat: dict[int, np.ndarray], grid: Grid,
                        bank: FilterBank, params: SpaceParams) -> float:
    """Besov norm from extended spectra; p = 2 stays fully spectral."""
    if params.p != 2.0 or not params.homogeneous:
        full = FormField(grid, {m: np.fft.ifftn(a) for m, a in comps_hat.items()})
        return besov_norm(params, full, bank)
    js = list(bank.window)
    scale = grid.cell_volume / grid.points ** grid.n
    norms = []
    for j in js:
        sym = bank.psi[j]
        total = sum(float(np.sum(sym ** 2 * np.abs(a) ** 2))
                    for a in comps_hat.values())
        norms.append(math.sqrt(total * scale))
    weights = 2.0 ** (params.s * np.asarray(js, dtype=float))
    vals = weights * np.asarray(norms)
    if math.isinf(params.q):
        return float(vals.max()) if vals.size else 0.0
    return float(np.sum(vals ** params.q) ** (1.0 / params.q))


def _hessian_spectra(comps_hat: dict[int, np.ndarray], grid: Grid) -> dict:
    """Spectra of all second derivatives, stacked as extra components."""
    out = {}
    xi = grid.freqs()
    key = 0
    for _, arr in sorted(comps_hat.items()):
        for a in range(grid.n):
            for b in range(a, grid.n):
                w = 2.0 if b > a else 1.0  # off-diagonal pairs counted twice
                out[key] = math.sqrt(w) * (-(xi[a] * xi[b]) * arr)
                key += 1
    return out


class _MaxRegAccumulator:
    """Streams node data into the three norms of the regularity estimate."""

    def __init__(self, grid: Grid, bank: FilterBank, params: SpaceParams,
                 tg: TimeGrid, forcing_hat):
        self.grid = grid
        self.bank = bank
        self.params = params
        self.interp = SpaceParams(params.s + 2.0 - 2.0 / params.q, params.p,
                                  params.q, homogeneous=params.homogeneous)
        self.tg = tg
        self.forcing_hat = forcing_hat  # callable t -> dict of spectra, or None
        self.absq = grid.freq_sq()
        self.sup_norm = 0.0
        self.evol_acc = 0.0
        self.evol_max = 0.0
        self.rhs_acc = 0.0
        self.rhs_max = 0.0

    def _weight(self, m: int) -> float:
        if m == 0 or m == self.tg.steps:
            return 0.5 * self.tg.dt
        return self.tg.dt

    def node(self, m: int, t: float, state: dict[int, np.ndarray]):
        grid, bank, params = self.grid, self.bank, self.params
        self.sup_norm = max(self.sup_norm,
                            _besov_of_extension(state, grid, bank, self.interp))
        fhat = self.forcing_hat(t) if self.forcing_hat is not None else None
        # mild identity: du/dt = Delta u + f, both spectral
        dudt = {k: -self.absq * a for k, a in state.items()}
        if fhat is not None:
            for k, a in fhat.items():
                dudt[k] = dudt[k] + a if k in dudt else a
        dt_norm = _besov_of_extension(dudt, grid, bank, params)
        if params.p == 2.0 and params.homogeneous:
            # the pointwise Hessian magnitude collapses to the |xi|^2 multiplier
            hess = {k: self.absq * a for k, a in state.items()}
        else:
            hess = _hessian_spectra(state, grid)
        hess_norm = _besov_of_extension(hess, grid, bank, params)
        evol = dt_norm + hess_norm
        rhs = (_besov_of_extension(fhat, grid, bank, params)
               if fhat is not None else 0.0)
        w = self._weight(m)
        if math.isinf(params.q):
            self.evol_max = max(self.evol_max, evol)
            self.rhs_max = max(self.rhs_max, rhs)
        else:
            self.evol_acc += w * evol ** params.q
            self.rhs_acc += w * rhs ** params.q

    def lq_evolution(self) -> float:
        if math.isinf(self.params.q):
            return self.evol_max
        return self.evol_acc ** (1.0 / self.params.q)

    def lq_forcing(self) -> float:
        if math.isinf(self.params.q):
            return self.rhs_max
        return self.rhs_acc ** (1.0 / self.params.q)


def _check_completeness(params: SpaceParams, n: int):
    interp = SpaceParams(params.s + 2.0 - 2.0 / params.q, params.p, params.q)
    if not completeness_ok(interp, n):
        raise ValueError(
            f"refusing the report: the space with s = {interp.s}, p = {interp.p}, "
            f"q = {interp.q} fails the completeness predicate in dimension {n} "
            f"(needs s < n/p, or q = 1 and s <= n/p)")


def make_a_regular(seed_field: HalfField, lam: float = 1.0) -> HalfField:
    """Apply the resolvent twice; regular enough data for q = infinity reports."""
    pu, _ = leray_halfspace(seed_field)
    once = restrict(resolvent(lam, extend(pu)), pu.flavor)
    return restrict(resolvent(lam, extend(once)), pu.flavor)


def max_reg_report(traj: Trajectory, params: SpaceParams, system: str,
                   bank: FilterBank, a_regular_checked: bool = False) -> MaxRegReport:
    """Measure a stored trajectory against the maximal-regularity estimate.

    lhs: sup-in-time interpolation norm plus the L^q-in-time norm of the pair
    (du/dt, second derivatives), each in the base Besov norm.  rhs: L^q-in-time
    forcing norm plus the interpolation norm of the initial datum.  The ratio
    of the two sides is the reported quantity.
    """
    grid = traj.u0.grid
    _check_completeness(params, grid.n)
    if math.isinf(params.q) and not a_regular_checked:
        raise ValueError("q = infinity reports need operator-regular initial "
                         "data; build it with make_a_regular and pass "
                         "a_regular_checked=True")
    tg = traj.time_grid

    f_spectra = {}
    for m, fm in enumerate(traj.f):
        if fm is not None:
            f_spectra[m] = {k: np.fft.fftn(a) for k, a in extend(fm).comps.items()}

    acc = _MaxRegAccumulator(grid, bank, params, tg, None)
    nodes = tg.nodes()
    for m, um in enumerate(traj.u):
        state = {k: np.fft.fftn(a) for k, a in extend(um).comps.items()}
        acc.forcing_hat = (lambda t, _m=m: f_spectra.get(_m)) \
            if f_spectra else None
        acc.node(m, nodes[m], state)

    u0_hat = {k: np.fft.fftn(a) for k, a in extend(traj.u0).comps.items()}
    rhs_u0 = _besov_of_extension(u0_hat, grid, bank, acc.interp)
    lhs = acc.sup_norm + acc.lq_evolution()
    rhs = acc.lq_forcing() + rhs_u0
    ratio = 0.0 if lhs == 0.0 else lhs / rhs
    return MaxRegReport(system, params.s, params.p, params.q, tg.horizon,
                        acc.sup_norm, acc.lq_evolution(), acc.lq_forcing(),
                        rhs_u0, ratio)


def streaming_max_reg(system: str, f, u0: HalfField, horizon: float, steps: int,
                      params: SpaceParams, bank: FilterBank,
                      a_regular_checked: bool = False) -> MaxRegReport:
    """Solve and measure in one pass without storing the trajectory.

    Produces the same numbers as max_reg_report on the stored trajectory;
    used for sweeps whose snapshots would not fit comfortably in memory.
    """
    grid = u0.grid
    _check_completeness(params, grid.n)
    if math.isinf(params.q) and not a_regular_checked:
        raise ValueError("q = infinity reports need operator-regular initial "
                         "data; build it with make_a_regular and pass "
                         "a_regular_checked=True")
    if system == "hodge_stokes" or system == "navier_slip":
        solver = solve_hodge_stokes
        if f is None:
            eff = None
        elif isinstance(f, HalfField):
            eff = _project_half(f)
        else:
            eff = lambda t: _project_half(f(t))
    elif system == "hodge_heat":
        solver, eff = solve_hodge_heat, f
    else:
        raise ValueError(f"unknown system {system!r}")

    tg = TimeGrid(horizon, steps)

    if eff is None:
        forcing_hat = None
    elif isinstance(eff, HalfField):
        const_hat = _spectra_of(eff)

        def forcing_hat(t):
            return const_hat
    else:
        cache = {}

        def forcing_hat(t):
            if t not in cache:
                cache.clear()  # keep at most one node in memory
                cache[t] = _spectra_of(eff(t))
            return cache[t]

    acc = _MaxRegAccumulator(u0.grid, bank, params, tg, forcing_hat)

    def observer(m, t, stepper):
        acc.node(m, t, stepper.state)

    if system == "hodge_heat":
        solve_hodge_heat(eff, u0, horizon, steps, observer=observer,
                         store=False)
        u0_eff = u0
    else:
        solve_hodge_stokes(f, u0, horizon, steps, observer=observer,
                           auto_project=True, store=False)
        u0_eff = _project_half(u0)

    u0_hat = {k: np.fft.fftn(a) for k, a in extend(u0_eff).comps.items()}
    rhs_u0 = _besov_of_extension(u0_hat, u0.grid, bank, acc.interp)
    lhs = acc.sup_norm + acc.lq_evolution()
    rhs = acc.lq_forcing() + rhs_u0
    ratio = 0.0 if lhs == 0.0 else lhs / rhs
    return MaxRegReport(system, params.s, params.p, params.q, horizon,
                        acc.sup_norm, acc.lq_evolution(), acc.lq_forcing(),
                        rhs_u0, ratio)
