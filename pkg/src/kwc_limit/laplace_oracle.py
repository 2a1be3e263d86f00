"""Brute-force Laplace transforms used to certify the closed forms.

``forward_laplace`` integrates e^{-lambda t} g(t) by adaptive quadrature after
removing an integrable t^{-p} singularity at the origin.  ``talbot_invert``
evaluates the inverse transform on the fixed Talbot contour

    s(theta) = r theta (cot theta + i),   r = 2 M / (5 t),

in multiprecision arithmetic, so that cancellation in the contour sum does not
limit the attainable accuracy.  Evaluators passed to ``talbot_invert`` must
therefore accept mpmath complex numbers; everything written with ``**0.5``
and plain arithmetic does.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath as mp
import numpy as np
from scipy import integrate

from .params import ModelParams
from .special_functions import DomainError

DEFAULT_NODES = 32
QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class LaplaceFunction:
    """F(lambda), analytic for Re lambda > abscissa."""

    evaluator: Callable
    abscissa: float = 0.0

    def __call__(self, lam):
        return self.evaluator(lam)


def _quad(func, lo, hi):
    val, _ = integrate.quad(func, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL, limit=400)
    return val


def forward_laplace(g: Callable[[float], float], lam: float, singular_exponent: float = 0.0,
                    split: float = 1.0) -> float:
    """int_0^inf e^{-lam t} g(t) dt for g = O(t^{-p}) at 0, p = singular_exponent < 1."""
    p = float(singular_exponent)
    if not 0.0 <= p < 1.0:
        raise DomainError("singular_exponent must lie in [0, 1)")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if not split > 0:
        raise DomainError("split point must be positive")
    q = 1.0 / (1.0 - p)

    # t = u^q turns t^{-p} dt into q du
    def head(u):
        if u == 0.0:
            u = 1e-300
        t = u**q
        return np.exp(-lam * t) * g(t) * q * u ** (q - 1.0)

    return _quad(head, 0.0, split ** (1.0 - p)) + _quad(lambda t: np.exp(-lam * t) * g(t), split, np.inf)


def convolve(g1: Callable, g2: Callable, t: float, p1: float = 0.0, p2: float = 0.0) -> float:
    """(g1 * g2)(t) = int_0^t g1(t - s) g2(s) ds with g_i = O(s^{-p_i}) at 0."""
    if not t > 0:
        raise DomainError("t must be positive")
    half = 0.5 * t
    q1 = 1.0 / (1.0 - p1)
    q2 = 1.0 / (1.0 - p2)

    def left(u):  # s = u^{q2}
        s = max(u, 1e-300) ** q2
        return g1(t - s) * g2(s) * q2 * max(u, 1e-300) ** (q2 - 1.0)

    def right(u):  # t - s = u^{q1}
        r = max(u, 1e-300) ** q1
        return g1(r) * g2(t - r) * q1 * max(u, 1e-300) ** (q1 - 1.0)

    return _quad(left, 0.0, half ** (1.0 - p2)) + _quad(right, 0.0, half ** (1.0 - p1))


def talbot_invert(F: LaplaceFunction | Callable, t: float, nodes: int = DEFAULT_NODES,
                  dps: int | None = None) -> float:
    """Fixed-Talbot approximation of L^{-1}[F](t)."""
    if not t > 0:
        raise DomainError("t must be positive")
    if nodes < 16:
        raise DomainError("nodes must be >= 16")
    abscissa = F.abscissa if isinstance(F, LaplaceFunction) else 0.0
    M = int(nodes)
    with mp.workdps(dps or max(15, M)):
        tt = mp.mpf(t)
        r = 2 * mp.mpf(M) / (5 * tt)
        if r <= abscissa:
            raise DomainError("Talbot contour does not enclose the singularities; decrease t")
        total = mp.mpf(0.5) * mp.re(F(mp.mpc(r, 0))) * mp.exp(r * tt)
        for k in range(1, M):
            theta = k * mp.pi / M
            cot = mp.cot(theta)
            s = r * theta * mp.mpc(cot, 1)
            sigma = theta + (theta * cot - 1) * cot
            total += mp.re(mp.exp(tt * s) * F(s) * mp.mpc(1, sigma))
        return float(r / M * total)


# Laplace-domain closed forms of the limit problem (principal square root).


def _on_cut(lam, a: float) -> bool:
    z = complex(lam)
    return z == 0 or (z.imag == 0 and z.real <= -a * a)


def eval_g_hat(params: ModelParams, lam):
    """g^a(lambda) = (G^a_lambda *_x w_0)(0) for w_0 = -c e^{-mu|y|}."""
    r = (lam + params.a**2) ** 0.5
    return -params.c / (r * (params.mu + r))


def eval_eta_hat(params: ModelParams, lam):
    """Transform of eta = xi - 1: [-c/(mu + R) - b/lambda] / (R + b), R = sqrt(lambda + a^2)."""
    if _on_cut(lam, params.a):
        raise DomainError("lambda is 0 or on the branch cut (-inf, -a^2]")
    r = (lam + params.a**2) ** 0.5
    return (-params.c / (params.mu + r) - params.b / lam) / (r + params.b)


def eval_eta_hat_general(params: ModelParams, lam):
    """Same transform written through g^a: -b/(R + b) (g^a + 1/lambda) + g^a."""
    if _on_cut(lam, params.a):
        raise DomainError("lambda is 0 or on the branch cut (-inf, -a^2]")
    r = (lam + params.a**2) ** 0.5
    g = eval_g_hat(params, lam)
    return -params.b / (r + params.b) * (g + 1 / lam) + g


def eta_transform(params: ModelParams) -> LaplaceFunction:
    return LaplaceFunction(lambda lam: eval_eta_hat(params, lam), 0.0)


def forcing_transform(params: ModelParams) -> LaplaceFunction:
    """2 sqrt(lambda + a^2) g^a(lambda) = -2c / (mu + sqrt(lambda + a^2))."""
    a, c, mu = params.a, params.c, params.mu
    return LaplaceFunction(lambda lam: -2 * c / (mu + (lam + a * a) ** 0.5), -a * a)


def invert_eta(params: ModelParams, t, nodes: int = DEFAULT_NODES):
    F = eta_transform(params)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.array([talbot_invert(F, ti, nodes) for ti in t])
