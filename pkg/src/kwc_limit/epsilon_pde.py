"""Implicit finite differences for the reduced epsilon-problem.

The unknown v solves

    (tau1/eps) v_t = eps v_xx - a^2 (v - 1)/eps - 2 b delta_0 v      on (-L, L)

with homogeneous Neumann data at x = +-L.  For even data this is the Robin
problem on [0, L]

    -v_x(0) + (b/eps) v(0) = 0,    v_x(L) = 0,

discretised with central differences at the nodes x_i = i dx, i = 0..N.  The
ghost values v_{-1} and v_{N+1} are eliminated through the two boundary
relations, so each time level is one tridiagonal solve of size N + 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .params import ModelParams, TimeSeries


@dataclass
class GridField:
    """Nodal values v_i at x_i = i dx, i = 0..n, at one time level."""

    n: int
    dx: float
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.values.shape != (self.n + 1,):
            raise ValueError(f"expected {self.n + 1} nodal values, got {self.values.shape}")
        if self.time < 0:
            raise ValueError("time must be nonnegative")

    @property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.n + 1)

    @property
    def length(self) -> float:
        return self.dx * self.n

    @property
    def trace(self) -> float:
        return float(self.values[0])

    def mirrored(self) -> tuple[np.ndarray, np.ndarray]:
        """Even extension to [-L, L] as (x, v)."""
        x = self.x
        return np.concatenate([-x[:0:-1], x]), np.concatenate([self.values[:0:-1], self.values])


@dataclass(frozen=True)
class SchemeConfig:
    """Time discretisation.  ``dt=None`` means dt = dx^2."""

    dt: float | None = None
    t_end: float = 5.0
    theta: float = 1.0

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.dt is not None and self.t_end < self.dt:
            raise ValueError("t_end must be >= dt")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")

    def resolve_dt(self, dx: float) -> float:
        return dx * dx if self.dt is None else float(self.dt)

    def n_steps(self, dx: float) -> int:
        return int(round(self.t_end / self.resolve_dt(dx)))


def grid_spacing(params: ModelParams, n: int) -> float:
    if n < 1:
        raise ValueError("n must be a positive integer")
    return params.L / n


def initial_data(params: ModelParams, n: int) -> GridField:
    """v_0(x_i) = 1 - c exp(-mu x_i / eps) on the half grid."""
    dx = grid_spacing(params, n)
    x = dx * np.arange(n + 1)
    return GridField(n, dx, 1.0 - params.c * np.exp(-params.mu * x / params.epsilon), 0.0)


@dataclass(frozen=True)
class Tridiagonal:
    """Rows (lower, diag, upper) of a tridiagonal matrix; lower[0] and upper[-1] unused."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.lower[1:] * v[:-1]
        out[:-1] += self.upper[:-1] * v[1:]
        return out

    def shifted(self, shift: float, scale: float = 1.0) -> "Tridiagonal":
        return Tridiagonal(scale * self.lower, shift + scale * self.diag, scale * self.upper)

    def is_diagonally_dominant(self) -> bool:
        off = np.abs(self.lower) + np.abs(self.upper)
        off[0] = abs(self.upper[0])
        off[-1] = abs(self.lower[-1])
        return bool(np.all(np.abs(self.diag) > off))


def _spatial_operator(params: ModelParams, n: int) -> tuple[Tridiagonal, np.ndarray]:
    """Half-domain operator A and source s with dv/dt-part  (tau1/eps) v_t = -A v + s."""
    eps, a, b = params.epsilon, params.a, params.b
    dx = grid_spacing(params, n)
    sig = eps / dx**2
    react = a * a / eps
    lower = np.full(n + 1, -sig)
    upper = np.full(n + 1, -sig)
    diag = np.full(n + 1, 2.0 * sig + react)
    # ghost v_{-1} = v_1 - 2 dx (b/eps) v_0
    upper[0] = -2.0 * sig
    diag[0] += 2.0 * b / dx
    # ghost v_{N+1} = v_{N-1}
    lower[n] = -2.0 * sig
    lower[0] = 0.0
    upper[n] = 0.0
    return Tridiagonal(lower, diag, upper), np.full(n + 1, react)


def _full_operator(params: ModelParams, n: int) -> tuple[Tridiagonal, np.ndarray]:
    """Operator on [-L, L] (2n + 1 nodes) with the delta term as a flux jump at node n."""
    eps, a, b = params.epsilon, params.a, params.b
    dx = grid_spacing(params, n)
    sig = eps / dx**2
    react = a * a / eps
    size = 2 * n + 1
    lower = np.full(size, -sig)
    upper = np.full(size, -sig)
    diag = np.full(size, 2.0 * sig + react)
    # [v_x](0) = (2b/eps) v(0)
    diag[n] += 2.0 * b / dx
    upper[0] = -2.0 * sig
    lower[-1] = -2.0 * sig
    lower[0] = 0.0
    upper[-1] = 0.0
    return Tridiagonal(lower, diag, upper), np.full(size, react)


@numba.njit(cache=True)
def _thomas_factor(lower, diag, upper):
    n = diag.size
    piv = np.empty(n)
    cp = np.empty(n)
    piv[0] = diag[0]
    cp[0] = upper[0] / piv[0]
    for i in range(1, n):
        piv[i] = diag[i] - lower[i] * cp[i - 1]
        cp[i] = upper[i] / piv[i] if i < n - 1 else 0.0
    return piv, cp


@numba.njit(cache=True)
def _thomas_solve(lower, piv, cp, rhs, out):
    n = rhs.size
    out[0] = rhs[0] / piv[0]
    for i in range(1, n):
        out[i] = (rhs[i] - lower[i] * out[i - 1]) / piv[i]
    for i in range(n - 2, -1, -1):
        out[i] -= cp[i] * out[i + 1]


@numba.njit(cache=True)
def _march(v, lower, piv, cp, exp_lower, exp_diag, exp_upper, c0, source,
           nsteps, probe, snap_steps, dt):
    # exp_*: explicit part (1 - theta) A; zero rows for backward Euler
    n = v.size
    trace = np.empty(nsteps + 1)
    trace[0] = v[probe]
    snaps = np.empty((snap_steps.size, n))
    js = 0
    while js < snap_steps.size and snap_steps[js] == 0:
        snaps[js] = v
        js += 1
    rhs = np.empty(n)
    new = np.empty(n)
    dsup = 0.0
    for k in range(nsteps):
        for i in range(n):
            acc = c0 * v[i] + source[i] - exp_diag[i] * v[i]
            if i > 0:
                acc -= exp_lower[i] * v[i - 1]
            if i < n - 1:
                acc -= exp_upper[i] * v[i + 1]
            rhs[i] = acc
        _thomas_solve(lower, piv, cp, rhs, new)
        t = (k + 1) * dt
        dmax = 0.0
        for i in range(n):
            d = abs(new[i] - v[i])
            if d > dmax:
                dmax = d
            v[i] = new[i]
        val = np.sqrt(t) * dmax / dt
        if val > dsup:
            dsup = val
        trace[k + 1] = v[probe]
        while js < snap_steps.size and snap_steps[js] == k + 1:
            snaps[js] = v
            js += 1
    return trace, snaps, dsup


class _Stepper:
    """Factored theta-scheme for one operator; reused across steps."""

    def __init__(self, op: Tridiagonal, source: np.ndarray, params: ModelParams, dt: float, theta: float):
        self.dt = dt
        self.c0 = params.tau1 / (params.epsilon * dt)
        self.source = source
        lhs = op.shifted(self.c0, theta)
        if not lhs.is_diagonally_dominant():
            raise ArithmeticError("implicit matrix is not strictly diagonally dominant")
        self.lower = lhs.lower
        self.piv, self.cp = _thomas_factor(lhs.lower, lhs.diag, lhs.upper)
        ex = op.shifted(0.0, 1.0 - theta)
        self.exp = (ex.lower, ex.diag, ex.upper)

    def run(self, v: np.ndarray, nsteps: int, probe: int = 0, snap_steps=()):
        snap_steps = np.asarray(sorted(snap_steps), dtype=np.int64)
        return _march(v, self.lower, self.piv, self.cp, *self.exp, self.c0, self.source,
                      nsteps, probe, snap_steps, self.dt)


def step(field: GridField, params: ModelParams, config: SchemeConfig) -> GridField:
    """Advance one time level."""
    if abs(field.dx * field.n - params.L) > 1e-12 * params.L:
        raise ValueError("grid does not match params.L")
    dt = config.resolve_dt(field.dx)
    op, src = _spatial_operator(params, field.n)
    v = field.values.copy()
    _Stepper(op, src, params, dt, config.theta).run(v, 1)
    return GridField(field.n, field.dx, v, field.time + dt)


@dataclass
class PDESolution:
    trace: TimeSeries
    snapshots: list[GridField] = field(default_factory=list)
    final: GridField | None = None
    derivative_sup: float = float("nan")


def _snapshot_steps(times, dt: float, nsteps: int) -> list[int]:
    steps = []
    for t in times:
        k = int(round(t / dt))
        if k < 0 or k > nsteps:
            raise ValueError(f"snapshot time {t} outside [0, t_end]")
        steps.append(k)
    return steps


def solve(params: ModelParams, config: SchemeConfig, n: int, snapshot_times=(),
          initial: GridField | None = None) -> PDESolution:
    """Run the scheme to t_end recording xi^eps(t_k) = v(0, t_k) at every level."""
    field0 = initial_data(params, n) if initial is None else initial
    dt = config.resolve_dt(field0.dx)
    nsteps = config.n_steps(field0.dx)
    op, src = _spatial_operator(params, n)
    steps = _snapshot_steps(snapshot_times, dt, nsteps)
    v = field0.values.copy()
    trace, snaps, dsup = _Stepper(op, src, params, dt, config.theta).run(v, nsteps, 0, steps)
    times = field0.time + dt * np.arange(nsteps + 1)
    order = np.argsort(steps, kind="stable")
    snapshots = [None] * len(steps)
    for row, idx in enumerate(order):
        snapshots[idx] = GridField(n, field0.dx, snaps[row].copy(), field0.time + dt * steps[idx])
    final = GridField(n, field0.dx, v, float(times[-1]))
    return PDESolution(TimeSeries(times, trace), snapshots, final, float(dsup))


def solve_full_domain(params: ModelParams, config: SchemeConfig, n: int, values=None) -> PDESolution:
    """Same problem on [-L, L] with the delta term as an interior flux jump.

    ``values`` are nodal data at x = -L..L (2n + 1 points); the default is the
    even profile 1 - c exp(-mu |x| / eps).
    """
    dx = grid_spacing(params, n)
    if values is None:
        x = dx * np.arange(-n, n + 1)
        values = 1.0 - params.c * np.exp(-params.mu * np.abs(x) / params.epsilon)
    v = np.array(values, dtype=float)
    if v.shape != (2 * n + 1,):
        raise ValueError("full-domain data needs 2n + 1 values")
    dt = config.resolve_dt(dx)
    nsteps = config.n_steps(dx)
    op, src = _full_operator(params, n)
    trace, _, dsup = _Stepper(op, src, params, dt, config.theta).run(v, nsteps, n)
    times = dt * np.arange(nsteps + 1)
    right = GridField(n, dx, v[n:].copy(), float(times[-1]))
    return PDESolution(TimeSeries(times, trace), [], right, float(dsup))


def rescale(params: ModelParams) -> ModelParams:
    """Parameters of the problem in y = x/eps, s = t: eps -> 1, L -> L/eps."""
    return params.with_(epsilon=1.0, L=params.L / params.epsilon)


def steady_state(params: ModelParams, n: int) -> GridField:
    """Fixed point v* of the scheme: A v* = s."""
    op, src = _spatial_operator(params, n)
    if params.a == 0 and params.b == 0:
        raise ArithmeticError("stationary system is singular for a = b = 0")
    piv, cp = _thomas_factor(op.lower, op.diag, op.upper)
    out = np.empty(n + 1)
    _thomas_solve(op.lower, piv, cp, src, out)
    return GridField(n, grid_spacing(params, n), out, 0.0)


def trapezoid_mass(field: GridField) -> float:
    w = np.full(field.n + 1, field.dx)
    w[0] = w[-1] = 0.5 * field.dx
    return float(w @ field.values)


@dataclass(frozen=True)
class DerivativeBoundReport:
    sup: float  # max_k t_k^{1/2} ||(v^k - v^{k-1}) / dt||_inf
    data_norm: float  # ||d_y w0||_inf + ||w0||_inf + 1
    ratio: float
    constant: float | None
    ok: bool


def data_norm(params: ModelParams) -> float:
    """||d_y w_0|| + ||w_0|| + 1 for w_0(y) = -c exp(-mu |y|) in the fast variable."""
    return abs(params.c) * params.mu + abs(params.c) + 1.0


def time_derivative_bound_check(params: ModelParams, config: SchemeConfig, n: int,
                                constant: float | None = None) -> DerivativeBoundReport:
    """Report sup_t t^{1/2} ||v_t||_inf against C (||d_y w0|| + ||w0|| + 1)."""
    sol = solve(params, config, n)
    norm = data_norm(params)
    ratio = sol.derivative_sup / norm
    ok = True if constant is None else ratio <= constant
    return DerivativeBoundReport(sol.derivative_sup, norm, ratio, constant, ok)
