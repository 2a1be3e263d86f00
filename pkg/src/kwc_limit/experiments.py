"""Experiment drivers: configuration, sweeps and CSV output."""
from __future__ import annotations

import configparser
import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import epsilon_pde as pde
from .fractional_limit import closed_form_xi
from .params import ModelParams, TimeSeries

EXPERIMENTS = (
    "error_table",
    "trace_compare",
    "kernel_check",
    "laplace_check",
    "grains",
    "stationary_tv",
    "graph_distance",
    "pde_solve",
    "limit_solve",
)

# published L-infinity errors, rows eps = 1, 1/2, 1/4, 1/8; columns c = 0, 1/4, 2
REFERENCE_TABLE = np.array([
    [6.8e-2, 6.8e-2, 6.7e-2],
    [9.1e-3, 9.1e-3, 9.3e-3],
    [1.4e-4, 1.5e-4, 2.6e-4],
    [4.6e-5, 4.6e-5, 4.6e-5],
])
REFERENCE_EPS = (1.0, 0.5, 0.25, 0.125)
REFERENCE_C = (0.0, 0.25, 2.0)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(s) for s in text.replace(",", " ").split())


def _fmt(x) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run."""

    experiment: str = "error_table"
    params: ModelParams = field(default_factory=ModelParams)
    n: int = 200
    scheme: pde.SchemeConfig = field(default_factory=pde.SchemeConfig)
    eps_list: tuple = REFERENCE_EPS
    c_list: tuple = REFERENCE_C
    t_min: float = 0.5
    horizons: tuple = (2.0, 5.0, 10.0)
    sample_times: tuple = (0.0, 0.5, 1.0, 2.0, 5.0)
    output_dir: str = "out"
    seed: int = 0
    workers: int = 1
    limit_dt: float = 5e-4
    beta: str = "quadratic"
    boundary: str = "periodic"
    facets: int = 5
    grain_steps: int = 1000

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if not self.eps_list or not self.c_list:
            raise ValueError("sweep lists must be nonempty")
        if self.n < 1 or self.workers < 1 or self.facets < 2:
            raise ValueError("n, workers must be >= 1 and facets >= 2")
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        object.__setattr__(self, "c_list", tuple(float(c) for c in self.c_list))
        object.__setattr__(self, "horizons", tuple(float(h) for h in self.horizons))
        object.__setattr__(self, "sample_times", tuple(float(h) for h in self.sample_times))

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_ini(self) -> str:
        p, s = self.params, self.scheme
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["experiment"] = {
            "experiment": self.experiment,
            "a": _fmt(p.a), "b": _fmt(p.b), "c": _fmt(p.c), "mu": _fmt(p.mu),
            "tau1": _fmt(p.tau1), "L": _fmt(p.L), "epsilon": _fmt(p.epsilon),
            "N": str(self.n),
            "dt": "" if s.dt is None else _fmt(s.dt),
            "t_end": _fmt(s.t_end), "theta": _fmt(s.theta),
            "eps_list": " ".join(_fmt(e) for e in self.eps_list),
            "c_list": " ".join(_fmt(c) for c in self.c_list),
            "t_min": _fmt(self.t_min),
            "horizons": " ".join(_fmt(h) for h in self.horizons),
            "sample_times": " ".join(_fmt(h) for h in self.sample_times),
            "output_dir": self.output_dir,
            "seed": str(self.seed),
            "workers": str(self.workers),
            "limit_dt": _fmt(self.limit_dt),
            "beta": self.beta,
            "boundary": self.boundary,
            "facets": str(self.facets),
            "grain_steps": str(self.grain_steps),
        }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp.read_string(text)
        if "experiment" not in cp:
            raise ValueError("config needs an [experiment] section")
        return cls.from_mapping(dict(cp["experiment"]))

    @classmethod
    def from_mapping(cls, d: dict, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        """Overlay string-valued settings (file keys or CLI flags) on ``base``."""
        base = base or cls()
        known = {"experiment", "a", "b", "c", "mu", "tau1", "L", "epsilon", "N", "dt", "t_end", "theta",
                 "eps_list", "c_list", "t_min", "horizons", "sample_times", "output_dir", "seed",
                 "workers", "limit_dt", "beta", "boundary", "facets", "grain_steps"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        p = base.params.as_dict()
        if "a" in d and "mu" not in d and base.params.mu == base.params.a:
            p["mu"] = None
        for key in ("a", "b", "c", "tau1", "L", "epsilon"):
            if key in d:
                p[key] = float(d[key])
        if "mu" in d:
            p["mu"] = None if d["mu"] in ("", None) else float(d["mu"])
        s = base.scheme
        scheme = pde.SchemeConfig(
            dt=(None if d["dt"] in ("", None) else float(d["dt"])) if "dt" in d else s.dt,
            t_end=float(d.get("t_end", s.t_end)),
            theta=float(d.get("theta", s.theta)),
        )
        return cls(
            experiment=d.get("experiment", base.experiment),
            params=ModelParams(**p),
            n=int(d.get("N", base.n)),
            scheme=scheme,
            eps_list=_floats(d["eps_list"]) if "eps_list" in d else base.eps_list,
            c_list=_floats(d["c_list"]) if "c_list" in d else base.c_list,
            t_min=float(d.get("t_min", base.t_min)),
            horizons=_floats(d["horizons"]) if "horizons" in d else base.horizons,
            sample_times=_floats(d["sample_times"]) if "sample_times" in d else base.sample_times,
            output_dir=d.get("output_dir", base.output_dir),
            seed=int(d.get("seed", base.seed)),
            workers=int(d.get("workers", base.workers)),
            limit_dt=float(d.get("limit_dt", base.limit_dt)),
            beta=d.get("beta", base.beta),
            boundary=d.get("boundary", base.boundary),
            facets=int(d.get("facets", base.facets)),
            grain_steps=int(d.get("grain_steps", base.grain_steps)),
        )


def emit_csv(header, rows, path) -> Path:
    """Write a header plus rows; floats with 17 significant digits, LF line ends."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(header))
            for row in rows:
                w.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return v


def series_csv(series: TimeSeries, path, value_name: str = "xi") -> Path:
    return emit_csv(["t", value_name], zip(series.times, series.values), path)


# error table


@dataclass(frozen=True)
class CellResult:
    epsilon: float
    c: float
    window_error: float  # sup over [t_min, t_end]
    full_error: float  # sup over [0, t_end]
    horizon_errors: tuple  # sup over [t_min, T] for each horizon
    argmax_time: float


def _error_cell(args) -> CellResult:
    config, eps, c = args
    params = config.params.with_(epsilon=eps, c=c)
    t_run = max((config.scheme.t_end,) + config.horizons)
    sol = pde.solve(params, replace(config.scheme, t_end=t_run), config.n)
    tr = sol.trace
    err = TimeSeries(tr.times, np.abs(tr.values - closed_form_xi(params, tr.times)))
    main = err.window(config.t_min, config.scheme.t_end)
    full = err.window(0.0, config.scheme.t_end)
    hor = tuple(float(err.window(config.t_min, T).values.max()) for T in config.horizons)
    return CellResult(eps, c, float(main.values.max()), float(full.values.max()), hor,
                      float(main.times[np.argmax(main.values)]))


def _map(func, items, workers: int):
    if workers <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


@dataclass
class ErrorTable:
    eps_list: tuple
    c_list: tuple
    cells: list

    def matrix(self, kind: str = "window", horizon: int | None = None) -> np.ndarray:
        out = np.empty((len(self.eps_list), len(self.c_list)))
        for cell in self.cells:
            i = self.eps_list.index(cell.epsilon)
            j = self.c_list.index(cell.c)
            if horizon is not None:
                out[i, j] = cell.horizon_errors[horizon]
            else:
                out[i, j] = cell.window_error if kind == "window" else cell.full_error
        return out

    def header(self) -> list[str]:
        return ["epsilon"] + [f"c={c:g}" for c in self.c_list]

    def rows(self, matrix: np.ndarray):
        return [[e] + list(r) for e, r in zip(self.eps_list, matrix)]

    def columns_decreasing(self, matrix: np.ndarray | None = None) -> bool:
        m = self.matrix() if matrix is None else matrix
        order = np.argsort(self.eps_list)[::-1]
        return bool(np.all(np.diff(m[order], axis=0) < 0))


def run_error_table(config: ExperimentConfig) -> ErrorTable:
    """sup |xi^eps - xi| over the comparison window for every (eps, c) cell."""
    cells = [(config, e, c) for e in config.eps_list for c in config.c_list]
    return ErrorTable(config.eps_list, config.c_list, _map(_error_cell, cells, config.workers))


def write_error_table(table: ErrorTable, config: ExperimentConfig, out: Path) -> list[Path]:
    paths = [emit_csv(table.header(), table.rows(table.matrix()), out / "error_table.csv"),
             emit_csv(table.header(), table.rows(table.matrix("full")), out / "error_table_full_window.csv")]
    for k, T in enumerate(config.horizons):
        paths.append(emit_csv(table.header(), table.rows(table.matrix(horizon=k)),
                              out / f"error_table_T{T:g}.csv"))
    return paths


# graph distance


def limit_graph_points(xi: float, L: float, n: int = 4001) -> np.ndarray:
    """Dense samples of Xi(., t): the line y = 1 on [-L, L] plus {0} x [xi, 1]."""
    x = np.linspace(-L, L, n)
    horizontal = np.column_stack([x, np.ones_like(x)])
    lo = min(xi, 1.0)
    m = max(2, int(math.ceil((1.0 - lo) / (2 * L / (n - 1)))) + 1)
    vertical = np.column_stack([np.zeros(m), np.linspace(lo, 1.0, m)])
    return np.vstack([horizontal, vertical])


def function_graph_points(field: pde.GridField, refine: int = 20) -> np.ndarray:
    """Polyline graph of the even extension, refined between nodes."""
    x, v = field.mirrored()
    xf = np.linspace(x[0], x[-1], refine * (x.size - 1) + 1)
    return np.column_stack([xf, np.interp(xf, x, v)])


def hausdorff(p: np.ndarray, q: np.ndarray) -> float:
    d1 = cKDTree(q).query(p)[0].max()
    d2 = cKDTree(p).query(q)[0].max()
    return float(max(d1, d2))


def graph_distance(field: pde.GridField, xi: float, L: float) -> float:
    pts = function_graph_points(field)
    spacing = pts[1, 0] - pts[0, 0]
    lim = limit_graph_points(xi, L, max(4001, int(2 * L / spacing) + 1))
    return hausdorff(pts, lim)


def run_graph_distance(config: ExperimentConfig, params: ModelParams | None = None) -> TimeSeries:
    """Hausdorff distance between the graph of v^eps(., t) and Xi(., t) at the sample times."""
    params = params or config.params
    times = tuple(t for t in config.sample_times if t <= config.scheme.t_end)
    sol = pde.solve(params, config.scheme, config.n, snapshot_times=times)
    xis = closed_form_xi(params, np.array([s.time for s in sol.snapshots]))
    d = [graph_distance(s, float(x), params.L) for s, x in zip(sol.snapshots, xis)]
    return TimeSeries(np.array([s.time for s in sol.snapshots]), np.array(d))


def layer_width(params: ModelParams, threshold: float = 0.01) -> float:
    """Width of the e^{-a|x|/eps} layer at the given threshold: (eps/a) ln(1/threshold)."""
    return params.epsilon / params.a * math.log(1.0 / threshold)


def write_manifest(config: ExperimentConfig, out: Path, command: str, extra: dict | None = None) -> Path:
    from . import __version__

    out.mkdir(parents=True, exist_ok=True)
    path = out / "manifest.txt"
    lines = [f"command = {command}", f"version = {__version__}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n\n" + config.to_ini())
    return path


def default_output(config: ExperimentConfig) -> Path:
    return Path(os.path.expanduser(config.output_dir))
