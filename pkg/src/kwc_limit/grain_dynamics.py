"""Stationary weighted-TV check and the limit grain system.

The grain system couples piecewise-constant facet heights h_j of u on a
partition p_0 < ... < p_m with one order parameter xi_j per junction p_j:

    alpha_w(1) dh_j/dt = (xi_j^2 chi_j - xi_{j-1}^2 chi_{j-1}) / (p_j - p_{j-1}),
    M_a d_t xi_j = -2 ((b_j + a) xi_j - a),   b_j = |h_{j+1} - h_j|,

with chi_j = sign(h_{j+1} - h_j).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fractional_limit import JunctionIntegrator
from .special_functions import DomainError

BOUNDARIES = ("periodic", "dirichlet", "neumann")


@dataclass(frozen=True)
class WeightProfile:
    """Samples of a continuous weight beta >= 0 on a uniform grid of [-L, L] containing 0."""

    x: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if x.ndim != 1 or x.shape != beta.shape or x.size < 3:
            raise ValueError("x and beta must be 1-D of equal length >= 3")
        if np.any(np.diff(x) <= 0):
            raise ValueError("grid must be increasing")
        if not np.allclose(np.diff(x), x[1] - x[0], rtol=1e-9, atol=0.0):
            raise ValueError("grid must be uniform")
        if not np.isclose(x[0], -x[-1], rtol=1e-12, atol=1e-14):
            raise ValueError("grid must be symmetric about 0")
        if np.any(beta < 0) or not np.all(np.isfinite(beta)):
            raise ValueError("beta must be finite and nonnegative")
        if np.min(np.abs(x)) > 1e-12 * max(1.0, x[-1]):
            raise ValueError("grid must contain x = 0")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_function(cls, func, L: float = 1.0, n: int = 2001) -> "WeightProfile":
        if n % 2 == 0:
            raise ValueError("use an odd number of points so that 0 is a node")
        x = np.linspace(-L, L, n)
        x[n // 2] = 0.0
        return cls(x, np.asarray(func(x), dtype=float) * np.ones_like(x))

    @property
    def origin(self) -> int:
        return int(np.argmin(np.abs(self.x)))


@dataclass(frozen=True)
class CahnHoffmanField:
    x: np.ndarray
    z: np.ndarray


@dataclass(frozen=True)
class Violation:
    condition: str
    index: int
    x: float
    value: float


@dataclass(frozen=True)
class StationaryReport:
    """Outcome of the three solution conditions for the single jump u^b."""

    ok: bool
    field: CahnHoffmanField
    checks: dict
    violation: Violation | None = None
    pairing: float = 0.0  # -int u (beta z)_x
    energy: float = 0.0  # int beta |u_x| + boundary terms


def verify_stationary(beta: WeightProfile, b: float, tol: float = 1e-12) -> StationaryReport:
    """Check that u^b = b 1_{x > 0} with boundary data (0, b) is stationary for the weighted TV flow.

    The candidate field is z = beta(0)/beta (z = 0 when beta(0) = 0), for
    which beta z is constant.  Conditions: beta z constant (u_t = 0),
    |z| <= 1, and the energy identity, in which the pairing reduces to
    (beta z)(0) b and the energy to beta(0) b because u^b matches the boundary
    data at both ends.
    """
    if not b > 0:
        raise DomainError("b must be positive")
    x, w = beta.x, beta.beta
    i0 = beta.origin
    b0 = w[i0]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(w > 0, b0 / w, np.inf if b0 > 0 else 0.0)
    if b0 == 0:
        z = np.zeros_like(w)
    flux = np.where(np.isfinite(z), w * z, np.inf)
    scale = max(1.0, b0)

    checks = {}
    violation = None

    bad1 = np.flatnonzero(~(np.abs(flux - b0) <= tol * scale))
    checks["constant_flux"] = bad1.size == 0
    if bad1.size:
        violation = Violation("constant_flux", int(bad1[0]), float(x[bad1[0]]), float(flux[bad1[0]]))

    bad2 = np.flatnonzero(~(np.abs(z) <= 1.0 + tol))
    checks["bounded"] = bad2.size == 0
    if bad2.size and violation is None:
        violation = Violation("bounded", int(bad2[0]), float(x[bad2[0]]), float(z[bad2[0]]))

    # u^b: 0 on x <= 0, b on x > 0; Du = b delta_0, traces (0, b) equal the data (0, b)
    u = np.where(x > 0, b, 0.0)
    jumps = np.diff(u)
    jump_at = np.flatnonzero(jumps)
    boundary = abs(u[0] - 0.0) * w[0] + abs(u[-1] - b) * w[-1]
    pairing = float(sum(flux[i0] * jumps[k] for k in jump_at)) if np.isfinite(flux[i0]) else np.inf
    energy = float(sum(w[i0] * abs(jumps[k]) for k in jump_at)) + boundary
    checks["energy_identity"] = bool(abs(pairing - energy) <= tol * scale * b)
    if not checks["energy_identity"] and violation is None:
        violation = Violation("energy_identity", i0, float(x[i0]), pairing - energy)

    ok = all(checks.values())
    return StationaryReport(ok, CahnHoffmanField(x, z), checks, violation, pairing, energy)


def jump_signs(jumps: np.ndarray) -> np.ndarray:
    return np.sign(jumps).astype(int)


@dataclass
class GrainState:
    """Facet heights on a partition plus one order parameter per junction.

    Junction j (1 <= j <= m - 1) sits at p_j between facets j and j + 1.  For
    periodic data junction m joins facet m to facet 1 and ``xis`` has m entries;
    otherwise it has m - 1.
    """

    partition: np.ndarray
    heights: np.ndarray
    xis: np.ndarray
    alpha_w1: float = 1.0
    a: float = 1.0
    boundary: str = "periodic"
    time: float = 0.0
    chis: np.ndarray = field(default=None)
    integrators: list = field(default=None, repr=False)
    dt: float | None = None
    residual_jump: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.partition = np.asarray(self.partition, dtype=float)
        self.heights = np.asarray(self.heights, dtype=float)
        self.xis = np.asarray(self.xis, dtype=float)
        m = self.heights.size
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.partition.shape != (m + 1,):
            raise ValueError("partition needs m + 1 points for m facets")
        if np.any(np.diff(self.partition) <= 0):
            raise DomainError("partition points must be strictly increasing")
        if self.xis.shape != (self.n_junctions,):
            raise ValueError(f"expected {self.n_junctions} junction values")
        if not self.alpha_w1 > 0:
            raise ValueError("alpha_w1 must be positive")
        if not self.a >= 0:
            raise ValueError("a must be nonnegative")
        if self.chis is None:
            self.chis = jump_signs(self.jumps())
        if self.residual_jump is None:
            self.residual_jump = np.zeros(self.n_junctions)

    @property
    def m(self) -> int:
        return self.heights.size

    @property
    def n_junctions(self) -> int:
        return self.m if self.boundary == "periodic" else self.m - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.partition)

    def jumps(self) -> np.ndarray:
        h = self.heights
        if self.boundary == "periodic":
            return np.roll(h, -1) - h
        return h[1:] - h[:-1]

    def mass(self) -> float:
        """sum_j (p_j - p_{j-1}) h_j."""
        return float(self.lengths @ self.heights)

    def fluxes(self) -> np.ndarray:
        """F_0..F_m with F_j = xi_j^2 chi_j at junction j and the boundary rule at the ends."""
        m = self.m
        out = np.zeros(m + 1)
        inner = self.xis**2 * self.chis
        if self.boundary == "periodic":
            out[1:] = inner
            out[0] = inner[-1]
        else:
            out[1:m] = inner
        return out

    def record(self) -> np.ndarray:
        return np.concatenate([[self.time], self.heights, self.xis])

    def columns(self) -> list[str]:
        return ["t"] + [f"h_{j}" for j in range(1, self.m + 1)] + \
            [f"xi_{j}" for j in range(1, self.n_junctions + 1)]


def _start(state: GrainState, dt: float):
    if state.integrators is None:
        b0 = np.abs(state.jumps())
        state.integrators = [JunctionIntegrator(state.a, bj, xj, dt) for bj, xj in zip(b0, state.xis)]
        state.dt = dt
    elif state.dt != dt:
        raise ValueError("the memory history requires a fixed step size")


def step_grains(state: GrainState, dt: float) -> GrainState:
    """Advance one step in place and return the state.

    xi_j takes one product-integration step with b_j frozen at its start-of-step
    value; heights take one explicit Euler step with start-of-step xi.  A
    junction whose jump reaches or crosses zero gets chi = 0 and carries no
    flux until the jump reopens beyond twice the residual left at the crossing.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    _start(state, dt)
    b_now = np.abs(state.jumps())
    b_now = np.where(state.chis == 0, 0.0, b_now)
    flux = state.fluxes()
    rate = (flux[1:] - flux[:-1]) / (state.alpha_w1 * state.lengths)
    if state.boundary == "dirichlet":
        rate[0] = 0.0
        rate[-1] = 0.0
    new_xi = np.array([integ.step(bj) for integ, bj in zip(state.integrators, b_now)])
    old_chi = state.chis
    state.heights = state.heights + dt * rate
    state.xis = new_xi
    state.time += dt

    jumps = state.jumps()
    sign = jump_signs(jumps)
    chis = sign.copy()
    for j in range(state.n_junctions):
        if old_chi[j] != 0 and sign[j] != old_chi[j]:
            chis[j] = 0
            state.residual_jump[j] = abs(jumps[j])
        elif old_chi[j] == 0 and abs(jumps[j]) <= 2.0 * state.residual_jump[j] + 1e-14:
            chis[j] = 0
    state.chis = chis
    return state


def run_grains(state: GrainState, dt: float, n_steps: int) -> np.ndarray:
    """Rows (t, h_1..h_m, xi_1..) for the initial state and every step."""
    rows = [state.record()]
    for _ in range(n_steps):
        step_grains(state, dt)
        rows.append(state.record())
    return np.array(rows)
