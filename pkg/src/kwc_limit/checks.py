"""Self-checks shared by the test-suite and the ``kernel-check``/``laplace-check`` commands."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from . import laplace_oracle as lo
from . import special_functions as sf
from .fractional_limit import closed_form_eta
from .params import ModelParams

LAMBDAS = (0.5, 1.0, 2.0, 5.0)
TALBOT_TIMES = (0.25, 1.0, 4.0)
TALBOT_SETS = (
    ModelParams(a=1.0, b=1.0, c=0.25, mu=2.0),
    ModelParams(a=0.5, b=2.0, c=2.0, mu=0.5),
    ModelParams(a=0.0, b=1.0, c=2.0, mu=0.0),
)
KERNEL_AS = (0.0, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class IdentityRow:
    name: str
    lam: float
    numeric: float
    exact: float

    @property
    def rel_error(self) -> float:
        return abs(self.numeric - self.exact) / max(abs(self.exact), 1e-300)


def laplace_identities(lambdas=LAMBDAS) -> list[IdentityRow]:
    """Forward-quadrature checks of the transform identities used by the limit problem."""
    f_half = sf.KernelParams(1.0, 0.5)
    f_32 = sf.KernelParams(0.5, 1.5)
    rows = []
    for lam in lambdas:
        def fl(g, p=0.0):
            return lo.forward_laplace(g, lam, p)

        for a in (0.5, 1.0):
            rows.append(IdentityRow(f"L[m_a], a={a:g}", lam, fl(lambda t, a=a: sf.eval_m(a, t), 0.5),
                                    2.0 * (np.sqrt(lam + a * a) - a) / lam))
        rows.append(IdentityRow("L[f_1/2^1]", lam, fl(lambda t: sf.eval_f(f_half, t), 0.5),
                                sf.laplace_f(f_half, lam)))
        rows.append(IdentityRow("L[f_3/2^0.5]", lam, fl(lambda t: sf.eval_f(f_32, t)), sf.laplace_f(f_32, lam)))
        rows.append(IdentityRow("shift e^{-2t} q^1", lam, fl(lambda t: np.exp(-2 * t) * sf.eval_q(1.0, t), 0.5),
                                lo.forward_laplace(lambda t: sf.eval_q(1.0, t), lam + 2.0, 0.5)))
        rows.append(IdentityRow("L[int_0^t m_1]", lam, fl(lambda t: sf.kernel_antiderivative(1.0, t)),
                                sf.laplace_m(1.0, lam) / lam))
        rows.append(IdentityRow("L[erfc(sqrt t)]", lam, fl(lambda t: special.erfc(np.sqrt(t))),
                                (1.0 - 1.0 / np.sqrt(lam + 1.0)) / lam))
        for mu in (0.5, 1.0, 2.0):
            rows.append(IdentityRow(f"L[q^mu], mu={mu:g}", lam, fl(lambda t, mu=mu: sf.eval_q(mu, t), 0.5),
                                    sf.laplace_q(mu, lam)))
        rows.append(IdentityRow("L[e^{-t} q^1]", lam, fl(lambda t: np.exp(-t) * sf.eval_q(1.0, t), 0.5),
                                0.5 * sf.laplace_m(1.0, lam)))
        rows.append(IdentityRow("L[E^1(1,.)]", lam, fl(lambda t: sf.eval_gauss_kernel(1.0, t, 1.0)),
                                sf.green_function(1.0, lam, 1.0)))
        conv = lambda t: lo.convolve(lambda s: sf.eval_f(f_half, s),  # noqa: E731
                                     lambda s: sf.eval_q(1.0, s), t, 0.5, 0.5)
        rows.append(IdentityRow("L[f_1/2^1 * q^1]", lam, fl(conv),
                                sf.laplace_f(f_half, lam) * sf.laplace_q(1.0, lam)))
    return rows


@dataclass(frozen=True)
class TalbotRow:
    params: ModelParams
    t: float
    inverted: float
    closed: float

    @property
    def abs_error(self) -> float:
        return abs(self.inverted - self.closed)


def talbot_rows(sets=TALBOT_SETS, times=TALBOT_TIMES, nodes: int = lo.DEFAULT_NODES) -> list[TalbotRow]:
    out = []
    for p in sets:
        F = lo.eta_transform(p)
        for t in times:
            out.append(TalbotRow(p, t, lo.talbot_invert(F, t, nodes), float(closed_form_eta(p, t))))
    return out


@dataclass(frozen=True)
class KernelReport:
    positive: bool
    decreasing: bool
    bounded: bool
    decay: float  # m_1(50)
    definition_gap: float  # max |erfc form - defining form|

    @property
    def ok(self) -> bool:
        return self.positive and self.decreasing and self.bounded and self.decay < 1e-6 \
            and self.definition_gap <= 1e-12


def kernel_grid() -> np.ndarray:
    return np.logspace(-4, np.log10(20.0), 400)


def kernel_report(as_=KERNEL_AS) -> KernelReport:
    t = kernel_grid()
    pos = dec = bnd = True
    gap = 0.0
    for a in as_:
        m = sf.eval_m(a, t)
        pos &= bool(np.all(m > 0))
        dec &= bool(np.all(np.diff(m) < 0))
        bnd &= bool(np.all(m <= 2.0 * sf.eval_f(sf.KernelParams(a * a, 0.5), t) * (1.0 + 1e-14)))
        if a > 0:
            tt = np.logspace(-3, 1, 200)
            gap = max(gap, float(np.max(np.abs(sf.eval_m(a, tt) - sf.eval_m_definition(a, tt)))))
    return KernelReport(pos, dec, bnd, float(sf.eval_m(1.0, 50.0)), gap)
