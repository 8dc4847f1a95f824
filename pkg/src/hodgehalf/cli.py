"""Command-line front end: verify / decompose / solve / maxreg / normtable.

Configuration is JSON, tabular reports are CSV (12 significant digits), and
fields travel in the binary container with a JSON sidecar.  Exit codes:
0 all checks passed, 1 a tolerance was violated, 2 configuration error.
The environment variable HODGEHALF_THREADS caps the worker pool used for
independent sweep runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .evolution import (SpaceParams, solve_hodge_heat, solve_hodge_stokes,
                        solve_navier_slip, streaming_max_reg)
from .fields import Grid, load_field, random_form, save_field
from .halfspace import (HalfField, d_half, delta_half, leray_halfspace,
                        random_half_field, remove_extended_mean,
                        tangential_trace)
from .littlewood_paley import build_bank, completeness_ok, default_bank, space_norm
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_TOL = 1
EXIT_CONFIG = 2


def max_threads() -> int | None:
    """Worker cap from HODGEHALF_THREADS; None means executor default."""
    raw = os.environ.get("HODGEHALF_THREADS", "").strip()
    if not raw:
        return None
    value = int(raw)
    return max(1, value)


@dataclass
class RunConfig:
    """Parsed run configuration shared by all commands."""

    command: str
    grid_n: int = 2
    grid_points: int = 128
    grid_length: float = 16.0
    suites: list = field(default_factory=lambda: list(SUITES))
    seed: int = 0
    tol_scale: float = 1.0
    out_dir: str = "."
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, command: str, args) -> "RunConfig":
        options = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    options = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}")
        grid = options.get("grid", {})
        cfg = cls(command=command,
                  grid_n=int(grid.get("n", 2)),
                  grid_points=int(grid.get("points", 128)),
                  grid_length=float(grid.get("length", 16.0)),
                  seed=args.seed if args.seed is not None else int(options.get("seed", 0)),
                  tol_scale=args.tol_scale * float(options.get("tol_scale", 1.0)),
                  out_dir=args.out or options.get("out", "."),
                  options=options)
        if args.suite:
            cfg.suites = [args.suite]
        elif "suites" in options:
            cfg.suites = list(options["suites"])
        if cfg.tol_scale <= 0:
            raise ConfigError("tolerance scale must be positive")
        return cfg

    def grid(self) -> Grid:
        return Grid(self.grid_n, self.grid_points, self.grid_length)


class ConfigError(Exception):
    pass


def _write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        with open(path, "w", newline="") as fh:
            fh.write("")
        return
    keys = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, complex):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    return str(value)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_verify(cfg: RunConfig) -> int:
    """Run the named suites; print one line per check and a summary."""
    failed = 0
    rows = []
    workers = max_threads()
    suites = list(cfg.suites)
    for name in suites:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from "
                              f"{', '.join(SUITES)}")

    def one(name):
        return run_suite(name, seed=cfg.seed, tol_scale=cfg.tol_scale)

    if workers == 1 or len(suites) == 1:
        outcomes = [one(name) for name in suites]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, suites))

    for outcome in outcomes:
        for check, info in outcome.worst.items():
            ok = info["residual"] <= info["tol"]
            print(f"[{outcome.suite}] {check}: residual {info['residual']:.3e} "
                  f"(tol {info['tol']:.1e}) {'ok' if ok else 'FAIL'}")
            rows.append({"suite": outcome.suite, "check": check,
                         "residual": info["residual"], "tol": info["tol"],
                         "status": "ok" if ok else "fail"})
        failed += outcome.failed
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.out_dir, "verify.csv"), rows)
    print(f"verify: {sum(o.passed for o in outcomes)} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_TOL


def run_decompose(cfg: RunConfig) -> int:
    """Split a stored tangential half-field and write parts plus a report."""
    path = cfg.options.get("field")
    if not path:
        raise ConfigError("decompose needs config key 'field' (container path)")
    if not os.path.exists(path):
        raise ConfigError(f"field container {path} does not exist")
    u = load_field(path)
    if not isinstance(u, HalfField):
        raise ConfigError("decompose expects a half-space field container")
    # the container is single precision; re-anchor the zero mode before
    # projecting so the strict mean-free guard sees clean input
    u, removed_mean = remove_extended_mean(u)
    pu, gu = leray_halfspace(u)
    os.makedirs(cfg.out_dir, exist_ok=True)
    save_field(os.path.join(cfg.out_dir, "p_part.hhf"), pu)
    save_field(os.path.join(cfg.out_dir, "g_part.hhf"), gu)
    norm = max(u.l2_norm(), 1e-300)
    report = {
        "input": path,
        "norm": u.l2_norm(),
        "zero_mode_removed": removed_mean,
        "p_mass_fraction": (pu.l2_norm() / norm) ** 2,
        "g_mass_fraction": (gu.l2_norm() / norm) ** 2,
        "split_residual": (pu + gu - u).l2_norm() / norm,
        "p_divergence": delta_half(pu).l2_norm() / norm,
        "g_curl": d_half(gu).l2_norm() / norm,
        "orthogonality_defect": abs(pu.l2_inner(gu)) / norm ** 2,
        "p_tangential_trace": tangential_trace(pu).l2_norm() / norm,
    }
    with open(os.path.join(cfg.out_dir, "decompose.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    print(json.dumps(report, indent=2, sort_keys=True))
    tol = 1e-8 * cfg.tol_scale
    bad = max(report["split_residual"], report["p_divergence"],
              report["g_curl"], report["orthogonality_defect"]) > tol
    return EXIT_TOL if bad else EXIT_OK


def _corpus_field(cfg: RunConfig, grid: Grid, flavor: str = "Ht") -> HalfField:
    opts = cfg.options
    masks = [1 << a for a in range(grid.n)]
    kind = opts.get("corpus_kind", "annulus_band")
    radii = tuple(opts.get("radii", (1.0, 2.5)))
    return random_half_field(grid, flavor, masks, seed=cfg.seed, kind=kind,
                             radii=radii)


def run_solve(cfg: RunConfig) -> int:
    """Drive one evolution run and emit per-node diagnostics as CSV."""
    opts = cfg.options
    system = opts.get("system", "hodge_stokes")
    grid = cfg.grid()
    horizon = float(opts.get("T", 1.0))
    steps = int(opts.get("M", 64))
    flavor = opts.get("flavor", "Ht")
    u0 = _corpus_field(cfg, grid, flavor=flavor)
    if system != "hodge_heat":
        if flavor != "Ht":
            raise ConfigError("Stokes-type systems use the tangential flavor")
        u0, _ = leray_halfspace(u0)
    forcing = None
    if opts.get("forcing", "random") != "none":
        forcing = random_half_field(grid, flavor, u0.masks(), seed=cfg.seed + 1,
                                    kind=opts.get("corpus_kind", "annulus_band"),
                                    radii=tuple(opts.get("radii", (1.0, 2.5))))
    if system == "hodge_heat":
        traj = solve_hodge_heat(forcing, u0, horizon, steps)
        grad_p = None
    elif system == "hodge_stokes":
        traj = solve_hodge_stokes(forcing, u0, horizon, steps, auto_project=True)
        grad_p = None
    elif system == "navier_slip":
        traj, grad_p = solve_navier_slip(forcing, u0, horizon, steps,
                                         auto_project=True)
    else:
        raise ConfigError(f"unknown system {system!r}")
    rows = []
    for m, t in enumerate(traj.times()):
        um = traj.u[m]
        row = {"t": t, "l2": um.l2_norm(),
               "divergence": delta_half(um).l2_norm(),
               "tangential_trace": tangential_trace(um).l2_norm()}
        if grad_p is not None:
            row["grad_p_l2"] = grad_p[m].l2_norm()
        rows.append(row)
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.out_dir, "solve.csv"), rows)
    if opts.get("save_snapshots"):
        for m in range(0, steps + 1, max(1, steps // 4)):
            save_field(os.path.join(cfg.out_dir, f"snapshot_{m:05d}.hhf"),
                       traj.u[m], metadata={"t": traj.times()[m]})
    print(f"solve: {system}, T={horizon}, M={steps}, wrote "
          f"{os.path.join(cfg.out_dir, 'solve.csv')}")
    return EXIT_OK


def run_maxreg(cfg: RunConfig) -> int:
    """Sweep maximal-regularity reports over (s, p, q) and T; emit CSV."""
    opts = cfg.options
    grid = cfg.grid()
    spq = opts.get("spq", [[0.0, 2.0, 2.0]])
    horizons = opts.get("T", [1.0, 10.0, 100.0])
    steps = int(opts.get("M", 256))
    system = opts.get("system", "hodge_stokes")
    window = opts.get("bank")
    bank = (build_bank(grid, *window) if window else default_bank(grid))
    u0_seed = _corpus_field(cfg, grid)
    forcing = random_half_field(grid, "Ht", u0_seed.masks(), seed=cfg.seed + 1,
                                kind=opts.get("corpus_kind", "annulus_band"),
                                radii=tuple(opts.get("radii", (1.0, 1.3))))
    u0 = _steady_initial_datum(forcing)

    jobs = []
    rows = []
    for s, p, q in spq:
        params = SpaceParams(float(s), float(p), float(q))
        gate = SpaceParams(params.s + 2.0 - 2.0 / params.q, params.p, params.q)
        if not completeness_ok(gate, grid.n):
            rows.append({"system": system, "s": s, "p": p, "q": q, "T": "",
                         "lhs_sup": "", "lhs_lq": "", "rhs_f": "", "rhs_u0": "",
                         "ratio": "", "status": "rejected",
                         "reason": f"completeness predicate fails for "
                                   f"s={gate.s:g} p={p:g} q={q:g} n={grid.n}"})
            continue
        for horizon in horizons:
            jobs.append((params, float(horizon)))

    def one(job):
        params, horizon = job
        report = streaming_max_reg(system, forcing, u0, horizon, steps,
                                   params, bank)
        row = report.row()
        row["status"] = "ok"
        row["reason"] = ""
        return row

    workers = max_threads()
    if workers == 1 or len(jobs) <= 1:
        done = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(one, jobs))
    rows.extend(done)

    # flag ratio drift across the horizon sweep per parameter set
    spread_rows = []
    for s, p, q in spq:
        got = [r for r in done if r["s"] == float(s) and r["p"] == float(p)
               and r["q"] == float(q)]
        if len(got) >= 2:
            ratios = [r["ratio"] for r in got]
            spread_rows.append({"s": s, "p": p, "q": q,
                                "ratio_min": min(ratios),
                                "ratio_max": max(ratios),
                                "spread": max(ratios) / max(min(ratios), 1e-300)})
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.out_dir, "maxreg.csv"), rows)
    if spread_rows:
        _write_csv(os.path.join(cfg.out_dir, "maxreg_spread.csv"), spread_rows)
    print(f"maxreg: {len(rows)} rows -> {os.path.join(cfg.out_dir, 'maxreg.csv')}")
    drift = any(r["spread"] > 1.1 * cfg.tol_scale for r in spread_rows)
    return EXIT_TOL if drift else EXIT_OK


def _steady_initial_datum(forcing: HalfField) -> HalfField:
    """Initial datum in equilibrium with the forcing: u0 = A^{-1} P f."""
    from .halfspace import extend, restrict
    from .operators import frac_laplacian

    pf, _ = leray_halfspace(forcing)
    return restrict(frac_laplacian(-2.0, extend(pf)), forcing.flavor)


def run_normtable(cfg: RunConfig) -> int:
    """Besov / Sobolev norm table of a randomized corpus, one CSV row per norm."""
    opts = cfg.options
    grid = cfg.grid()
    window = opts.get("bank")
    bank = (build_bank(grid, *window) if window else default_bank(grid))
    entries = opts.get("norms", [
        {"kind": "besov", "s": 0.0, "p": 2.0, "q": 2.0, "homogeneous": True}])
    count = int(opts.get("corpus_size", 3))
    radii = tuple(opts.get("radii", (1.0, 2.5)))
    rows = []
    for i in range(count):
        u = random_form(grid, [0], seed=cfg.seed + i, kind="annulus_band",
                        radii=radii)
        for e in entries:
            params = SpaceParams(float(e["s"]), float(e["p"]),
                                 float(e.get("q", 2.0)),
                                 homogeneous=bool(e.get("homogeneous", True)),
                                 kind=e.get("kind", "besov"))
            rows.append({"field_id": i, "kind": params.kind, "s": params.s,
                         "p": params.p, "q": params.q,
                         "homogeneous": params.homogeneous,
                         "value": space_norm(params, u, bank)})
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.out_dir, "normtable.csv"), rows)
    print(f"normtable: {len(rows)} rows -> "
          f"{os.path.join(cfg.out_dir, 'normtable.csv')}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgehalf",
        description="spectral exterior-calculus verification and solver driver")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("verify", "run identity-check suites"),
            ("decompose", "Hodge-split a stored half-space field"),
            ("solve", "run an evolution system and emit diagnostics"),
            ("maxreg", "maximal-regularity ratio sweep"),
            ("normtable", "emit a Besov/Sobolev norm table")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON configuration path")
        p.add_argument("--suite", default=None,
                       help="restrict verify to one suite")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="corpus seed")
        p.add_argument("--tol-scale", type=float, default=1.0,
                       help="multiply every tolerance by this factor")
    return parser


COMMANDS = {"verify": run_verify, "decompose": run_decompose,
            "solve": run_solve, "maxreg": run_maxreg,
            "normtable": run_normtable}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args.command, args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, KeyError, ValueError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
