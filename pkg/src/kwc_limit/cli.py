"""Command line entry point ``kwc-limit``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks
from . import epsilon_pde as pde
from .experiments import (
    REFERENCE_C,
    REFERENCE_EPS,
    REFERENCE_TABLE,
    ExperimentConfig,
    emit_csv,
    run_error_table,
    run_graph_distance,
    write_error_table,
    write_manifest,
)
from .fractional_limit import closed_form_xi, solve_limit
from .grain_dynamics import GrainState, WeightProfile, step_grains, verify_stationary

COMMANDS = {
    "kernel-check": "kernel_check",
    "laplace-check": "laplace_check",
    "pde-solve": "pde_solve",
    "limit-solve": "limit_solve",
    "error-table": "error_table",
    "graph-distance": "graph_distance",
    "grains": "grains",
    "stationary-tv": "stationary_tv",
}

# flag dest -> config key
FLAG_KEYS = {
    "a": "a", "b": "b", "c": "c", "mu": "mu", "epsilon": "epsilon", "tau1": "tau1", "L": "L",
    "N": "N", "dt": "dt", "t_end": "t_end", "theta": "theta", "out": "output_dir", "seed": "seed",
    "eps_list": "eps_list", "c_list": "c_list", "t_min": "t_min", "workers": "workers",
    "beta": "beta", "boundary": "boundary", "facets": "facets", "steps": "grain_steps",
    "limit_dt": "limit_dt",
}

WEIGHTS = {
    "one": lambda x: np.ones_like(x),
    "quadratic": lambda x: 1.0 + x * x,
    "tent": lambda x: 2.0 - np.abs(x),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key-value config file with an [experiment] section")
    for name in ("a", "b", "c", "mu", "epsilon", "tau1", "L", "dt", "theta", "t_min", "limit_dt"):
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=str)
    common.add_argument("--t-end", dest="t_end", type=str)
    common.add_argument("--N", dest="N", type=str, help="number of grid intervals on [0, L]")
    common.add_argument("--out", dest="out", type=str, help="output directory")
    common.add_argument("--seed", type=str)
    common.add_argument("--eps-list", dest="eps_list", type=str, help="comma separated epsilons")
    common.add_argument("--c-list", dest="c_list", type=str, help="comma separated amplitudes")
    common.add_argument("--workers", type=str, help="parallel sweep workers")
    common.add_argument("--beta", choices=sorted(WEIGHTS), help="weight for stationary-tv")
    common.add_argument("--boundary", choices=("periodic", "dirichlet", "neumann"))
    common.add_argument("--facets", type=str)
    common.add_argument("--steps", type=str, help="grain steps")

    parser = argparse.ArgumentParser(prog="kwc-limit", description="Singular-limit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig(experiment=COMMANDS[args.command])
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise SystemExit(f"cannot read config {args.config}: {exc}")
        base = ExperimentConfig.from_ini(text).with_(experiment=COMMANDS[args.command])
    overrides = {FLAG_KEYS[k]: v for k, v in vars(args).items() if k in FLAG_KEYS and v is not None}
    return ExperimentConfig.from_mapping(overrides, base)


def _report(ok: bool, label: str) -> int:
    print(f"{label}: {'ok' if ok else 'FAILED'}")
    return 0 if ok else 1


def cmd_kernel_check(cfg: ExperimentConfig, out: Path) -> int:
    t = checks.kernel_grid()
    rows = []
    from .special_functions import KernelParams, eval_f, eval_m

    for a in checks.KERNEL_AS:
        m = eval_m(a, t)
        f2 = 2.0 * eval_f(KernelParams(a * a, 0.5), t)
        rows.extend(zip([a] * t.size, t, m, f2))
    emit_csv(["a", "t", "m", "two_f"], rows, out / "kernel_check.csv")
    rep = checks.kernel_report()
    print(rep)
    return _report(rep.ok, "kernel properties")


def cmd_laplace_check(cfg: ExperimentConfig, out: Path) -> int:
    rows = checks.laplace_identities()
    emit_csv(["identity", "lambda", "quadrature", "exact", "rel_error"],
             [(r.name, r.lam, r.numeric, r.exact, r.rel_error) for r in rows], out / "laplace_identities.csv")
    tal = checks.talbot_rows()
    emit_csv(["a", "b", "c", "mu", "t", "talbot", "closed_form", "abs_error"],
             [(r.params.a, r.params.b, r.params.c, r.params.mu, r.t, r.inverted, r.closed, r.abs_error)
              for r in tal], out / "talbot_eta.csv")
    worst_id = max(r.rel_error for r in rows)
    worst_tal = max(r.abs_error for r in tal)
    print(f"max identity rel. error {worst_id:.3e}; max Talbot error {worst_tal:.3e}")
    return _report(worst_id <= 1e-7 and worst_tal <= 1e-7, "laplace identities")


def cmd_pde_solve(cfg: ExperimentConfig, out: Path) -> int:
    sol = pde.solve(cfg.params, cfg.scheme, cfg.n)
    emit_csv(["t", "xi"], zip(sol.trace.times, sol.trace.values), out / "trace.csv")
    emit_csv(["x", "v"], zip(sol.final.x, sol.final.values), out / "profile.csv")
    ok = bool(np.all(np.isfinite(sol.final.values)))
    print(f"xi^eps(t_end) = {sol.trace.values[-1]:.10g}")
    return _report(ok, "pde solve")


def cmd_limit_solve(cfg: ExperimentConfig, out: Path) -> int:
    ser = solve_limit(cfg.params, cfg.limit_dt, cfg.scheme.t_end)
    exact = closed_form_xi(cfg.params, ser.times)
    emit_csv(["t", "xi", "xi_closed_form"], zip(ser.times, ser.values, exact), out / "limit_trace.csv")
    err = float(np.max(np.abs(ser.values - exact)))
    print(f"max |xi - closed form| = {err:.3e}")
    return _report(err <= 5e-3, "limit solve")


def cmd_error_table(cfg: ExperimentConfig, out: Path) -> int:
    table = run_error_table(cfg)
    write_error_table(table, cfg, out)
    mat = table.matrix()
    print("epsilon  " + "  ".join(f"c={c:g}".rjust(10) for c in table.c_list))
    for e, row in zip(table.eps_list, mat):
        print(f"{e:<8g} " + "  ".join(f"{v:10.3e}" for v in row))
    ok = table.columns_decreasing(mat)
    if table.eps_list == REFERENCE_EPS and table.c_list == REFERENCE_C:
        ratio = mat / REFERENCE_TABLE
        print(f"ratio to published table: min {ratio.min():.2f}, max {ratio.max():.2f}")
        ok &= bool(np.all((ratio >= 0.5) & (ratio <= 2.0)))
    return _report(ok, "error table")


def cmd_graph_distance(cfg: ExperimentConfig, out: Path) -> int:
    cols = []
    times = None
    for eps in cfg.eps_list:
        ser = run_graph_distance(cfg, cfg.params.with_(epsilon=eps))
        times = ser.times
        cols.append(ser.values)
    emit_csv(["t"] + [f"eps={e:g}" for e in cfg.eps_list], zip(times, *cols), out / "graph_distance.csv")
    sups = [float(c.max()) for c in cols]
    for e, s in zip(cfg.eps_list, sups):
        print(f"eps={e:g}: sup distance {s:.4e}")
    return _report(all(np.isfinite(sups)), "graph distance")


def _initial_grains(cfg: ExperimentConfig) -> GrainState:
    rng = np.random.default_rng(cfg.seed)
    m = cfg.facets
    inner = np.sort(rng.uniform(0.1, 0.9, m - 1))
    partition = np.concatenate([[0.0], inner, [1.0]])
    if np.any(np.diff(partition) <= 1e-3):
        partition = np.linspace(0.0, 1.0, m + 1)
    heights = rng.uniform(0.0, 1.0, m)
    nj = m if cfg.boundary == "periodic" else m - 1
    xis = np.full(nj, 1.0 - cfg.params.c)
    return GrainState(partition, heights, xis, alpha_w1=1.0, a=cfg.params.a, boundary=cfg.boundary)


def cmd_grains(cfg: ExperimentConfig, out: Path) -> int:
    state = _initial_grains(cfg)
    dt = cfg.scheme.dt or 1e-3
    rows = [state.record()]
    drift = 0.0
    for _ in range(cfg.grain_steps):
        before = state.mass()
        step_grains(state, dt)
        drift = max(drift, abs(state.mass() - before))
        rows.append(state.record())
    emit_csv(state.columns(), rows, out / "grains.csv")
    ok = bool(np.all(np.isfinite(rows[-1])))
    if cfg.boundary == "periodic":
        print(f"max per-step change of sum l_j h_j: {drift:.3e}")
        ok &= drift <= 1e-12
    return _report(ok, "grains")


def cmd_stationary_tv(cfg: ExperimentConfig, out: Path) -> int:
    prof = WeightProfile.from_function(WEIGHTS[cfg.beta], cfg.params.L, 2 * cfg.n * 10 + 1)
    rep = verify_stationary(prof, cfg.params.b)
    emit_csv(["x", "beta", "z"], zip(prof.x, prof.beta, rep.field.z), out / "stationary_tv.csv")
    for name, passed in rep.checks.items():
        print(f"{name}: {'holds' if passed else 'violated'}")
    if rep.violation is not None:
        v = rep.violation
        print(f"first violation: {v.condition} at x = {v.x:.6g} (value {v.value:.6g})")
    return _report(rep.ok, f"u^b stationary for beta={cfg.beta}")


HANDLERS = {
    "kernel-check": cmd_kernel_check,
    "laplace-check": cmd_laplace_check,
    "pde-solve": cmd_pde_solve,
    "limit-solve": cmd_limit_solve,
    "error-table": cmd_error_table,
    "graph-distance": cmd_graph_distance,
    "grains": cmd_grains,
    "stationary-tv": cmd_stationary_tv,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.output_dir)
    write_manifest(cfg, out, " ".join(["kwc-limit", args.command] + list(argv if argv is not None else sys.argv[2:])))
    try:
        return HANDLERS[args.command](cfg, out)
    except (ArithmeticError, ValueError, OSError) as exc:
        print(f"{args.command} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
