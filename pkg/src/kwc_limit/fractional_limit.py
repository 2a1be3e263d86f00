"""The limit equation with memory and its closed-form solution.

The limit of the boundary trace solves the Volterra equation

    (M_a xi_t)(t) := int_0^t m_a(t - s) xi_t(s) ds = -grad E(xi) + f(t),
    grad E(xi) = 2 ((b + a) xi - a),

where f is the (bounded) contribution of non-well-prepared initial data.
A generic solution starts like sqrt(t), so a scheme with piecewise-constant
xi_t is only half-order accurate.  ``solve_volterra`` removes the singular
part first: with phi the unit response (M_a phi' = 1),

    xi = xi_0 + R_0 phi + zeta,    R_0 = -grad E(xi_0) + f(0),

and zeta, which is one order smoother, is integrated by product integration
with the exact kernel moments int m_a over each subinterval.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy import integrate, special

from .params import ModelParams, TimeSeries
from .special_functions import (
    SQRT_PI,
    DomainError,
    eval_m,
    kernel_antiderivative,
    unit_response,
)


@dataclass(frozen=True)
class LimitEnergy:
    """E(xi) = b xi^2 + a (xi - 1)^2."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError("a must be nonnegative")
        if not self.b >= 0:
            raise DomainError("b must be nonnegative")

    def __call__(self, xi):
        return self.b * xi * xi + self.a * (xi - 1.0) ** 2

    def grad(self, xi):
        return 2.0 * ((self.b + self.a) * xi - self.a)

    @property
    def stiffness(self) -> float:
        return 2.0 * (self.b + self.a)

    @property
    def minimiser(self) -> float:
        if self.a + self.b == 0:
            raise DomainError("energy is identically zero for a = b = 0")
        return self.a / (self.a + self.b)

    @classmethod
    def from_params(cls, params: ModelParams) -> "LimitEnergy":
        return cls(params.a, params.b)


def grad_energy(energy: LimitEnergy, xi):
    return energy.grad(xi)


_KINDS = ("well_prepared", "exponential", "constant", "general")


@dataclass(frozen=True)
class ForcingSpec:
    """Initial perturbation w_0(y) of the fast profile.

    well_prepared: w_0 = -c e^{-a|y|};  exponential: w_0 = -c e^{-mu|y|};
    constant: w_0 = -c;  general: samples of w_0 on an increasing grid (a grid
    with min >= 0 is read as the half of an even profile).
    """

    kind: str = "well_prepared"
    c: float = 0.0
    mu: float | None = None
    grid: tuple | None = None
    samples: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.kind == "exponential" and not (self.mu is not None and self.mu >= 0):
            raise DomainError("exponential data needs mu >= 0")
        if self.kind == "general":
            if self.grid is None or self.samples is None:
                raise ValueError("general data needs grid and samples")
            y = np.asarray(self.grid, dtype=float)
            w = np.asarray(self.samples, dtype=float)
            if y.ndim != 1 or y.shape != w.shape or y.size < 2:
                raise ValueError("grid and samples must be 1-D of equal length >= 2")
            if np.any(np.diff(y) <= 0):
                raise ValueError("grid must be strictly increasing")
            if not np.all(np.isfinite(w)):
                raise DomainError("w0 samples must be finite")
            if not (y[0] <= 0.0 <= y[-1]):
                raise ValueError("grid must contain y = 0")
            object.__setattr__(self, "grid", tuple(y))
            object.__setattr__(self, "samples", tuple(w))

    @classmethod
    def well_prepared(cls, c: float) -> "ForcingSpec":
        return cls("well_prepared", c)

    @classmethod
    def exponential(cls, c: float, mu: float) -> "ForcingSpec":
        return cls("exponential", c, mu)

    @classmethod
    def constant(cls, c: float) -> "ForcingSpec":
        return cls("constant", c)

    @classmethod
    def general(cls, grid, samples) -> "ForcingSpec":
        return cls("general", 0.0, None, tuple(np.asarray(grid, float)), tuple(np.asarray(samples, float)))

    @classmethod
    def from_params(cls, params: ModelParams) -> "ForcingSpec":
        if params.well_prepared:
            return cls.well_prepared(params.c)
        return cls.exponential(params.c, params.mu)

    def decay_rate(self, a: float) -> float | None:
        """mu of an exponential profile (None for sampled data)."""
        if self.kind == "well_prepared":
            return a
        if self.kind == "constant":
            return 0.0
        if self.kind == "exponential":
            return self.mu
        return None

    def w0(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "general":
            grid = np.asarray(self.grid)
            vals = np.asarray(self.samples)
            if grid[0] >= 0.0:
                return np.interp(np.abs(y), grid, vals)
            return np.interp(y, grid, vals)
        raise TypeError("w0 is only sampled for general data; use decay_rate")

    def eta0(self) -> float:
        """eta(0) = w_0(0)."""
        if self.kind == "general":
            return float(self.w0(0.0))
        return -self.c


_Z = np.linspace(-8.0, 8.0, 4001)
_ZW = np.abs(_Z) * np.exp(-_Z * _Z)


def _general_forcing(spec: ForcingSpec, a: float, t: np.ndarray) -> np.ndarray:
    # f(t) = 2 e^{-a^2 t}/sqrt(pi t) int (w0(2 sqrt(t) z) - w0(0)) |z| e^{-z^2} dz + 2 a w0(0) erfc(a sqrt t)
    w00 = spec.eta0()
    out = np.empty_like(t)
    grid = np.asarray(spec.grid)
    for i, ti in enumerate(t.ravel()):
        if ti == 0.0:
            h = 1e-3 * np.min(np.diff(grid))
            slopes = (spec.w0(h) - w00) / h + (spec.w0(-h) - w00) / h
            out.flat[i] = slopes + 2.0 * a * w00
            continue
        st = np.sqrt(ti)
        integrand = (spec.w0(2.0 * st * _Z) - w00) * _ZW
        integral = integrate.trapezoid(integrand, _Z)
        out.flat[i] = 2.0 * np.exp(-a * a * ti) / (SQRT_PI * st) * integral \
            + 2.0 * a * w00 * special.erfc(a * st)
    return out


def forcing(spec: ForcingSpec, params: ModelParams, t):
    """Bounded inhomogeneous term f(t) of M_a xi_t = -grad E(xi) + f.

    It collects the Laplace-inverse term L^{-1}[2 sqrt(lambda + a^2) g^a] and
    -m_a(t) eta(0), whose t^{-1/2} singularities cancel.  For exponential data

        f(t) = -2 c a erfc(a sqrt t) + 2 c mu e^{-a^2 t} erfcx(mu sqrt t),

    which vanishes identically when mu = a and is finite at t = 0.
    """
    a = params.a
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)):
        raise DomainError("t must be >= 0")
    if spec.kind == "general":
        val = _general_forcing(spec, a, t)
    else:
        mu = spec.decay_rate(a)
        if mu == a:
            val = np.zeros_like(t)
        else:
            st = np.sqrt(t)
            val = -2.0 * spec.c * a * special.erfc(a * st) \
                + 2.0 * spec.c * mu * np.exp(-a * a * t) * special.erfcx(mu * st)
    if not np.all(np.isfinite(val)):
        raise DomainError("non-finite forcing")
    return float(val) if val.ndim == 0 else val


def laplace_forcing(spec: ForcingSpec, params: ModelParams, t):
    """L^{-1}[2 sqrt(lambda + a^2) g^a](t) = f(t) + m_a(t) eta(0); singular at t = 0."""
    return forcing(spec, params, t) + eval_m(params.a, t) * spec.eta0()


@numba.njit(cache=True)
def _zeta_march(w, phi, f, g, r0, dt):
    n = phi.size - 1
    zeta = np.zeros(n + 1)
    dz = np.zeros(n + 1)
    w0 = w[0]
    denom = w0 / dt + g
    for k in range(1, n + 1):
        hist = 0.0
        for j in range(1, k):
            hist += w[k - j] * dz[j]
        rhs = -g * r0 * phi[k] + f[k] - f[0]
        zeta[k] = (w0 * zeta[k - 1] / dt - hist / dt + rhs) / denom
        dz[k] = zeta[k] - zeta[k - 1]
    return zeta


def _grid(dt: float, t_end: float) -> np.ndarray:
    if not dt > 0:
        raise DomainError("dt must be positive")
    if not t_end >= dt:
        raise DomainError("t_end must be >= dt")
    n = int(round(t_end / dt))
    return dt * np.arange(n + 1)


@dataclass
class VolterraSolution:
    """Solution pieces on t_k = k dt: xi = xi0 + r0 phi + zeta."""

    times: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray
    phi: np.ndarray
    forcing: np.ndarray
    xi0: float
    r0: float
    weights: np.ndarray

    @property
    def series(self) -> TimeSeries:
        return TimeSeries(self.times, self.xi)


def solve_volterra_detailed(energy: LimitEnergy, spec: ForcingSpec, dt: float, t_end: float) -> VolterraSolution:
    t = _grid(dt, t_end)
    a = energy.a
    params = ModelParams(a=a, b=energy.b)
    w = np.diff(np.asarray(kernel_antiderivative(a, t)))
    f = np.asarray(forcing(spec, params, t), dtype=float)
    phi = np.asarray(unit_response(a, t), dtype=float)
    xi0 = 1.0 + spec.eta0()
    r0 = -energy.grad(xi0) + f[0]
    zeta = _zeta_march(w, phi, f, energy.stiffness, r0, dt)
    xi = xi0 + r0 * phi + zeta
    return VolterraSolution(t, xi, zeta, phi, f, xi0, r0, w)


def solve_volterra(energy: LimitEnergy, spec: ForcingSpec, params: ModelParams | None,
                   dt: float, t_end: float) -> TimeSeries:
    """xi on t_k = k dt, k = 0..round(t_end/dt)."""
    if params is not None and (params.a != energy.a or params.b != energy.b):
        raise ValueError("energy and params disagree on (a, b)")
    return solve_volterra_detailed(energy, spec, dt, t_end).series


def solve_limit(params: ModelParams, dt: float, t_end: float) -> TimeSeries:
    """Volterra solution for exponential data taken from ``params``."""
    return solve_volterra(LimitEnergy.from_params(params), ForcingSpec.from_params(params), params, dt, t_end)


def volterra_residual(energy: LimitEnergy, sol: VolterraSolution) -> np.ndarray:
    """Residual of the discrete equation at t_k, k >= 1, recomputed from the output.

    r_k = sum_{j<=k} w_{k-j} (zeta_j - zeta_{j-1}) / dt
          - [-g zeta_k - g r0 phi_k + f_k - f_0],   g = 2 (b + a).
    """
    dz = np.diff(sol.zeta)
    lhs = np.convolve(sol.weights, dz)[: dz.size] / sol.times[1]
    g = energy.stiffness
    rhs = -g * sol.zeta[1:] - g * sol.r0 * sol.phi[1:] + sol.forcing[1:] - sol.forcing[0]
    return lhs - rhs


class MemoryHistory:
    """Growing product-integration history for one scalar unknown.

    Stores increments d_j and returns  sum_{j<k} w_{k-j} d_j  for the next
    level k, with w_i = int_{i dt}^{(i+1) dt} m_a extended on demand.
    """

    def __init__(self, a: float, dt: float, capacity: int = 1024):
        if not dt > 0:
            raise DomainError("dt must be positive")
        self.a = float(a)
        self.dt = float(dt)
        self._inc = np.zeros(capacity)
        self._w = np.zeros(0)
        self.size = 0
        self._ensure_weights(capacity)

    def _ensure_weights(self, n: int):
        if self._w.size >= n:
            return
        n = max(n, 2 * self._w.size)
        self._w = np.diff(np.asarray(kernel_antiderivative(self.a, self.dt * np.arange(n + 1))))

    @property
    def w0(self) -> float:
        return float(self._w[0])

    def sum_for_next(self) -> float:
        k = self.size + 1
        self._ensure_weights(k)
        if self.size == 0:
            return 0.0
        # increments d_1..d_{k-1} against w_{k-1}..w_1
        return float(np.dot(self._w[k - 1:0:-1], self._inc[: self.size]))

    def push(self, increment: float):
        if self.size == self._inc.size:
            self._inc = np.concatenate([self._inc, np.zeros(self._inc.size)])
        self._inc[self.size] = increment
        self.size += 1


class JunctionIntegrator:
    """Step-by-step solver of M_a xi_t = -2((b_k + a) xi - a) with b_k set per step.

    Uses the same splitting xi = xi0 + r0 phi + zeta as ``solve_volterra``;
    r0 is fixed by the jump at t = 0.
    """

    def __init__(self, a: float, b0: float, xi0: float, dt: float):
        self.a = float(a)
        self.dt = float(dt)
        self.xi0 = float(xi0)
        self.r0 = -LimitEnergy(a, b0).grad(xi0)
        self.hist = MemoryHistory(a, dt)
        self.zeta = 0.0
        self.k = 0

    @property
    def xi(self) -> float:
        return self.xi0 + self.r0 * float(unit_response(self.a, self.k * self.dt)) + self.zeta

    def step(self, b: float) -> float:
        k = self.k + 1
        g = 2.0 * (b + self.a)
        phi_k = float(unit_response(self.a, k * self.dt))
        rhs = -g * (self.xi0 + self.r0 * phi_k) + 2.0 * self.a - self.r0
        w0 = self.hist.w0
        hist = self.hist.sum_for_next()
        new = (w0 * self.zeta / self.dt - hist / self.dt + rhs) / (w0 / self.dt + g)
        self.hist.push(new - self.zeta)
        self.zeta = new
        self.k = k
        return self.xi


# closed form

def _h_divided(x0, x1, st):
    """[x1 erfcx(x1 s) - x0 erfcx(x0 s)] / (x1 - x0), s = sqrt(t); smooth at x0 = x1."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    z0 = x0 * st
    z1 = x1 * st
    near = np.abs(z1 - z0) < 1e-5
    zm = 0.5 * (z0 + z1)
    deriv = (1.0 + 2.0 * zm * zm) * special.erfcx(zm) - 2.0 * zm / SQRT_PI
    diff = np.where(near, 1.0, x1 - x0)
    quot = (x1 * special.erfcx(z1) - x0 * special.erfcx(z0)) / diff
    return np.where(near, deriv, quot)


def eta_decomposition(params: ModelParams, t):
    """(eta_bar, eta_e) with eta = eta_bar + eta_e.

    eta_bar = -b int_0^t e^{-a^2 s} q^b ds    (c-independent, decreasing to -b/(a+b)),
    eta_e   = -c e^{-a^2 t} (mu + b) S(b, mu, t),
    S(b, nu, t) = [b erfcx(b sqrt t) - nu erfcx(nu sqrt t)] / (b^2 - nu^2).
    """
    a, b, c, mu = params.a, params.b, params.c, params.mu
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)):
        raise DomainError("t must be >= 0")
    st = np.sqrt(t)
    decay = np.exp(-a * a * t)
    if b == 0:
        bar = np.zeros_like(t)
    else:
        bar = -b / (a + b) * (1.0 - decay * _h_divided(a, b, st))
    if c == 0:
        e = np.zeros_like(t)
    else:
        e = -c * decay * _h_divided(mu, b, st)
    if bar.ndim == 0:
        return float(bar), float(e)
    return bar, e


def closed_form_eta(params: ModelParams, t):
    bar, e = eta_decomposition(params, t)
    return bar + e


def closed_form_xi(params: ModelParams, t):
    return 1.0 + closed_form_eta(params, t)


def caputo_reference(b: float, xi0: float, t):
    """xi0 e^{b^2 t} erfc(b sqrt t): solves the Caputo equation d^{1/2} xi = -b xi."""
    t = np.asarray(t, dtype=float)
    val = xi0 * special.erfcx(b * np.sqrt(t))
    return float(val) if val.ndim == 0 else val
