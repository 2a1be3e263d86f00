"""Kernels and special functions of the limit problem.

All routines accept scalars or numpy arrays and are pure functions.  The
memory kernel

    m_a(t) = 2 (f_{1/2}^{a^2}(t) - a erfc(a sqrt(t)))

and everything derived from it (moments, antiderivatives, the unit response)
is evaluated in closed form through ``erf``/``erfc``/``erfcx`` so that no
quadrature ever touches the t^{-1/2} singularity at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

SQRT_PI = np.sqrt(np.pi)


class DomainError(ValueError):
    """Argument outside the domain where a formula is defined."""


def _positive(t, name="t"):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError(f"{name} must be > 0")
    return t


def _nonnegative(t, name="t"):
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)):
        raise DomainError(f"{name} must be >= 0")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class KernelParams:
    """Parameters (alpha, beta) of f_beta^alpha(t) = e^{-alpha t} t^{beta-1} / Gamma(beta)."""

    alpha: float = 0.0
    beta: float = 0.5

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if not self.alpha >= 0:
            raise DomainError("alpha must be nonnegative")


def eval_f(params: KernelParams, t):
    t = _positive(t)
    logv = -params.alpha * t + (params.beta - 1.0) * np.log(t) - special.gammaln(params.beta)
    return _out(np.exp(logv))


def eval_erfc(s):
    return _out(special.erfc(np.asarray(s, dtype=float)))


def eval_erfcx(s):
    """Scaled complementary error function e^{s^2} erfc(s)."""
    return _out(special.erfcx(np.asarray(s, dtype=float)))


def exp_erfc(mu, t):
    """e^{mu^2 t} erfc(mu sqrt(t)), always through the scaled routine."""
    t = _nonnegative(t)
    return _out(special.erfcx(mu * np.sqrt(t)))


def eval_q(mu: float, t):
    """q^mu(t) = f_{1/2}^0(t) - mu e^{mu^2 t} erfc(mu sqrt t); Laplace transform 1/(sqrt(lambda) + mu)."""
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    t = _positive(t)
    return _out(1.0 / np.sqrt(np.pi * t) - mu * special.erfcx(mu * np.sqrt(t)))


def eval_m(a: float, t):
    """Memory kernel m_a(t) in its erfc form."""
    if a < 0:
        raise DomainError("a must be nonnegative")
    t = _positive(t)
    val = 2.0 * np.exp(-a * a * t) / np.sqrt(np.pi * t)
    if a > 0:
        val = val - 2.0 * a * special.erfc(a * np.sqrt(t))
    return _out(val)


def eval_m_definition(a: float, t):
    """m_a from its defining form 2{f(t) + a^2 int_0^t f - a} with the integral done analytically.

    Loses accuracy at large t because of cancellation; meant for cross-checks.
    """
    t = _positive(t)
    st = np.sqrt(t)
    f = np.exp(-a * a * t) / (SQRT_PI * st)
    return _out(2.0 * (f + a * a * integral_f_half(a, t) - a))


def _erf_over_2x(x):
    # erf(x) / (2x), finite at x = 0
    x = np.asarray(x, dtype=float)
    small = x < 1e-2
    xs = np.where(small, 1.0, x)
    x2 = x * x
    series = (1.0 - x2 / 3.0 + x2 * x2 / 10.0 - x2**3 / 42.0 + x2**4 / 216.0) / SQRT_PI
    return np.where(small, series, special.erf(xs) / (2.0 * xs))


def integral_f_half(a: float, t):
    """int_0^t f_{1/2}^{a^2}(s) ds = erf(a sqrt t) / a (and 2 sqrt(t/pi) for a = 0)."""
    t = _nonnegative(t)
    st = np.sqrt(t)
    return _out(2.0 * st * _erf_over_2x(a * st))


def kernel_antiderivative(a: float, t):
    """K_a(t) = int_0^t m_a(s) ds.

    K_a(t) = 2 [erf(a sqrt t)/(2a) - a t erfc(a sqrt t) + sqrt(t/pi) e^{-a^2 t}],
    which tends to 1/a as t -> infinity and to 4 sqrt(t/pi) for a = 0.
    """
    if a < 0:
        raise DomainError("a must be nonnegative")
    t = _nonnegative(t)
    st = np.sqrt(t)
    x = a * st
    val = st * _erf_over_2x(x) + st * np.exp(-x * x) / SQRT_PI
    if a > 0:
        val = val - a * t * special.erfc(x)
    return _out(2.0 * val)


def kernel_moment(a: float, t0, t1):
    """int_{t0}^{t1} m_a(s) ds for 0 <= t0 < t1."""
    t0 = _nonnegative(t0, "t0")
    t1 = np.asarray(t1, dtype=float)
    if np.any(~(t1 > t0)):
        raise DomainError("need t1 > t0")
    return _out(kernel_antiderivative(a, t1) - kernel_antiderivative(a, t0))


def unit_response(a: float, t):
    """phi(t) with phi(0) = 0 and (m_a * phi')(t) = 1 for every t > 0.

    In the Laplace domain phi = (sqrt(lambda + a^2) + a) / (2 lambda^2),
    which gives phi = K_a / 4 + a t.  Near the origin phi ~ sqrt(t/pi), the
    singular start of every solution of the limit equation.
    """
    t = _nonnegative(t)
    return _out(kernel_antiderivative(a, t) / 4.0 + a * t)


def eval_gauss_kernel(x, t, a: float = 0.0):
    """E^a(x, t) = e^{-a^2 t} (4 pi t)^{-1/2} e^{-x^2/(4t)}."""
    t = _positive(t)
    x = np.asarray(x, dtype=float)
    return _out(np.exp(-a * a * t - x * x / (4.0 * t)) / np.sqrt(4.0 * np.pi * t))


# Laplace-domain counterparts.  All accept complex lambda (principal branch).


def laplace_f(params: KernelParams, lam):
    return (lam + params.alpha) ** (-params.beta)


def laplace_m(a: float, lam):
    return 2.0 / ((lam + a * a) ** 0.5 + a)


def laplace_q(mu: float, lam):
    return 1.0 / (lam**0.5 + mu)


def green_function(y, lam, a: float = 0.0):
    """G_lambda^a(y), the Green function of -d^2/dy^2 + lambda + a^2 on the line."""
    r = (lam + a * a) ** 0.5
    return np.exp(-r * np.abs(y)) / (2.0 * r)


@dataclass(frozen=True)
class MemoryKernel:
    """The memory kernel m_a together with its exact moments."""

    a: float

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError("a must be nonnegative")

    def __call__(self, t):
        return eval_m(self.a, t)

    def cumulative_moment(self, t):
        return kernel_antiderivative(self.a, t)

    def moment(self, t0, t1):
        return kernel_moment(self.a, t0, t1)

    def weights(self, dt: float, n: int) -> np.ndarray:
        """w_i = int_{i dt}^{(i+1) dt} m_a, i = 0..n-1 (one uniform-grid table)."""
        if not dt > 0:
            raise DomainError("dt must be positive")
        grid = dt * np.arange(n + 1)
        return np.diff(np.asarray(kernel_antiderivative(self.a, grid)))

    def laplace(self, lam):
        return laplace_m(self.a, lam)

    @property
    def total_mass(self) -> float:
        return np.inf if self.a == 0 else 1.0 / self.a
