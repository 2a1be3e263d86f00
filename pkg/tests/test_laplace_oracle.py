import mpmath as mp
import numpy as np
import pytest

from kwc_limit import laplace_oracle as lo
from kwc_limit import special_functions as sf
from kwc_limit.fractional_limit import closed_form_eta
from kwc_limit.params import ModelParams
from kwc_limit.special_functions import DomainError

F_HALF = sf.KernelParams(1.0, 0.5)

# (g, singular exponent, transform written with mpmath-compatible arithmetic)
ROUND_TRIP = {
    "exp": (lambda t: np.exp(-t), 0.0, lambda s: 1 / (s + 1)),
    "f_half": (lambda t: sf.eval_f(F_HALF, t), 0.5, lambda s: (s + 1) ** -0.5),
    "m_1": (lambda t: sf.eval_m(1.0, t), 0.5, lambda s: 2 * ((s + 1) ** 0.5 - 1) / s),
    "q_1": (lambda t: sf.eval_q(1.0, t), 0.5, lambda s: 1 / (s**0.5 + 1)),
}


def test_forward_examples():
    assert lo.forward_laplace(lambda t: 1.0, 2.0) == pytest.approx(0.5, rel=1e-12)
    assert lo.forward_laplace(lambda t: sf.eval_f(F_HALF, t), 1.0, 0.5) == pytest.approx(0.70710678, abs=1e-8)
    assert lo.forward_laplace(lambda t: sf.eval_m(1.0, t), 3.0, 0.5) == pytest.approx(2 / 3, rel=1e-10)


def test_forward_domain_errors():
    with pytest.raises(DomainError):
        lo.forward_laplace(lambda t: 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        lo.forward_laplace(lambda t: 1.0, 0.0)
    with pytest.raises(DomainError):
        lo.forward_laplace(lambda t: 1.0, 1.0, -0.1)


def test_convolution_of_half_integrals():
    # (t^{-1/2} / sqrt(pi)) * (t^{-1/2} / sqrt(pi)) = 1
    g = lambda s: 1 / np.sqrt(np.pi * s)  # noqa: E731
    assert lo.convolve(g, g, 0.7, 0.5, 0.5) == pytest.approx(1.0, rel=1e-10)


def test_talbot_examples():
    assert lo.talbot_invert(lambda s: 1 / s, 2.3) == pytest.approx(1.0, rel=1e-12)
    val = lo.talbot_invert(lambda s: (s + 1) ** -0.5, 1.0)
    assert val == pytest.approx(np.exp(-1) / np.sqrt(np.pi), rel=1e-10)


def test_talbot_domain_errors():
    with pytest.raises(DomainError):
        lo.talbot_invert(lambda s: 1 / s, 0.0)
    with pytest.raises(DomainError):
        lo.talbot_invert(lambda s: 1 / s, 1.0, nodes=8)
    with pytest.raises(DomainError):
        lo.talbot_invert(lo.LaplaceFunction(lambda s: 1 / (s - 50), 50.0), 1.0)


@pytest.mark.parametrize("name", sorted(ROUND_TRIP))
def test_round_trip(name):
    g, p, F = ROUND_TRIP[name]
    # the transform is pinned to forward quadrature on the real axis, then inverted
    for lam in (0.5, 1.0, 2.0, 5.0):
        assert float(F(mp.mpf(lam))) == pytest.approx(lo.forward_laplace(g, lam, p), rel=1e-9)
    for t in (0.1, 1.0, 5.0):
        assert lo.talbot_invert(F, t) == pytest.approx(g(t), abs=1e-6)


@pytest.mark.parametrize("name", sorted(ROUND_TRIP))
def test_node_doubling_stable(name):
    _, _, F = ROUND_TRIP[name]
    for t in (0.1, 1.0, 5.0):
        assert abs(lo.talbot_invert(F, t, 32) - lo.talbot_invert(F, t, 64)) <= 1e-9


def test_eta_hat_examples():
    p = ModelParams(a=1.0, b=1.0, c=0.0)
    assert lo.eval_eta_hat(p, 1.0) == pytest.approx(-1 / (np.sqrt(2) + 1), rel=1e-15)
    assert lo.eval_eta_hat(p, 1.0) == pytest.approx(-0.41421356, abs=1e-8)
    q = ModelParams(a=1.0, b=1.0, c=0.25, mu=2.0)
    assert 1e6 * lo.eval_eta_hat(q, 1e6) == pytest.approx(-0.25, abs=1e-3)


def test_eta_hat_forms_agree():
    rng = np.random.default_rng(7)
    p = ModelParams(a=0.5, b=2.0, c=2.0, mu=0.5)
    lams = rng.uniform(0.05, 10, 20) + 1j * rng.uniform(-10, 10, 20)
    for lam in lams:
        assert abs(lo.eval_eta_hat(p, lam) - lo.eval_eta_hat_general(p, lam)) <= 1e-13 * max(1, abs(lo.eval_eta_hat(p, lam)))


def test_eta_hat_domain():
    p = ModelParams(a=1.0, b=1.0, c=1.0)
    for lam in (0.0, -1.0, -3.0):
        with pytest.raises(DomainError):
            lo.eval_eta_hat(p, lam)
        with pytest.raises(DomainError):
            lo.eval_eta_hat_general(p, lam)


@pytest.mark.parametrize("p", [ModelParams(a=1.0, b=1.0, c=0.25, mu=2.0), ModelParams(a=0.5, b=2.0, c=2.0, mu=0.5),
                               ModelParams(a=0.0, b=1.0, c=2.0, mu=0.0)])
def test_inverted_eta_matches_closed_form(p):
    t = np.array([0.25, 1.0, 4.0])
    assert np.allclose(lo.invert_eta(p, t), closed_form_eta(p, t), rtol=0, atol=1e-7)


def test_eta_transform_matches_forward_quadrature():
    p = ModelParams(a=1.0, b=1.0, c=0.25, mu=2.0)
    for lam in (0.5, 2.0):
        fwd = lo.forward_laplace(lambda t: closed_form_eta(p, t), lam)
        assert fwd == pytest.approx(lo.eval_eta_hat(p, lam), rel=1e-9)
