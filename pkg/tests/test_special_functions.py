import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from kwc_limit import special_functions as sf
from kwc_limit.laplace_oracle import forward_laplace

import oracles

# frozen from the 60-digit series oracle before the implementation was written
ERFC_ONE = 0.15729920705028513
ERFC_FIVE = 1.537459794428035e-12


def test_eval_f_examples():
    assert sf.eval_f(sf.KernelParams(0.0, 0.5), 1.0) == pytest.approx(1 / np.sqrt(np.pi), rel=1e-15)
    assert sf.eval_f(sf.KernelParams(0.0, 1.0), 7.3) == pytest.approx(1.0, rel=1e-15)
    assert sf.eval_f(sf.KernelParams(1.0, 0.5), 1.0) == pytest.approx(np.exp(-1) / np.sqrt(np.pi), rel=1e-15)
    assert sf.eval_f(sf.KernelParams(0.0, 0.5), 1.0) == pytest.approx(0.56418958, abs=1e-8)


def test_eval_f_domain():
    with pytest.raises(sf.DomainError):
        sf.eval_f(sf.KernelParams(), 0.0)
    with pytest.raises(sf.DomainError):
        sf.KernelParams(beta=0.0)
    with pytest.raises(sf.DomainError):
        sf.KernelParams(alpha=-1.0)


def test_erfc_frozen_values():
    assert sf.eval_erfc(0.0) == 1.0
    assert sf.eval_erfc(40.0) < 1e-300
    assert sf.eval_erfc(1.0) == pytest.approx(ERFC_ONE, rel=1e-14)
    assert sf.eval_erfc(5.0) == pytest.approx(ERFC_FIVE, rel=1e-14)


def test_oracles_agree():
    for s in (0.5, 1.0, 2.5, 4.0, 6.0):
        assert oracles.erfc_continued_fraction(s) == pytest.approx(oracles.erfc_taylor(s), rel=1e-14)


@pytest.mark.parametrize("s", np.linspace(-6, 6, 49))
def test_erfc_against_series(s):
    assert sf.eval_erfc(s) == pytest.approx(oracles.erfc_taylor(s), rel=1e-14)


def test_erfcx_is_scaled():
    s = np.array([0.1, 1.0, 3.0, 5.0])
    assert np.allclose(sf.eval_erfcx(s), np.exp(s * s) * sf.eval_erfc(s), rtol=1e-13)
    # no overflow where e^{s^2} alone would
    assert np.isfinite(sf.exp_erfc(10.0, 100.0))
    assert sf.exp_erfc(10.0, 100.0) == pytest.approx(1 / (100 * np.sqrt(np.pi)), rel=1e-4)


def test_q_examples():
    t = np.array([0.01, 0.1, 1.0, 10.0])
    assert np.allclose(sf.eval_q(0.0, t), 1 / np.sqrt(np.pi * t), rtol=1e-15)
    assert np.all(sf.eval_q(1.0, t) > 0)
    assert forward_laplace(lambda s: sf.eval_q(1.0, s), 1.0, 0.5) == pytest.approx(0.5, rel=1e-10)
    assert np.isfinite(sf.eval_q(3.0, 1e4))
    with pytest.raises(sf.DomainError):
        sf.eval_q(1.0, 0.0)


def test_m_examples():
    assert sf.eval_m(0.0, 1.0) == pytest.approx(2 / np.sqrt(np.pi), rel=1e-15)
    assert sf.eval_m(0.0, 1.0) == pytest.approx(1.1283792, abs=1e-7)
    val = forward_laplace(lambda s: sf.eval_m(1.0, s), 1.0, 0.5)
    assert val == pytest.approx(2 * (np.sqrt(2) - 1), rel=1e-10)
    assert val == pytest.approx(0.82842712, abs=1e-8)
    with pytest.raises(sf.DomainError):
        sf.eval_m(1.0, -1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_m_definition_with_quadrature(a):
    t = np.logspace(-3, 1, 25)
    fpar = sf.KernelParams(a * a, 0.5)
    for ti in t:
        # substitute s = u^2 to remove the s^{-1/2} singularity
        integral = integrate.quad(lambda u: 2 * u * sf.eval_f(fpar, max(u * u, 1e-300)), 0, np.sqrt(ti),
                                  epsabs=1e-15, epsrel=1e-12)[0]
        definition = 2 * (sf.eval_f(fpar, ti) + a * a * integral - a)
        assert abs(sf.eval_m(a, ti) - definition) <= 1e-12
        assert abs(sf.eval_m_definition(a, ti) - sf.eval_m(a, ti)) <= 1e-12


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0])
def test_m_matches_multiprecision(a):
    for t in (1e-4, 0.3, 2.0, 15.0):
        assert sf.eval_m(a, t) == pytest.approx(oracles.m_kernel_reference(a, t), rel=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0])
def test_m_positive_decreasing_bounded(a):
    t = np.logspace(-4, np.log10(20), 300)
    m = sf.eval_m(a, t)
    assert np.all(m > 0)
    assert np.all(np.diff(m) < 0)
    assert np.all(m <= 2 * sf.eval_f(sf.KernelParams(a * a, 0.5), t) * (1 + 1e-14))


def test_m_decay():
    assert sf.eval_m(1.0, 50.0) < 1e-6


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_erfc_complement_identity(a):
    fpar = sf.KernelParams(a * a, 0.5)
    for t in (0.01, 0.5, 3.0):
        integral = integrate.quad(lambda u: 2 * u * sf.eval_f(fpar, max(u * u, 1e-300)), 0, np.sqrt(t),
                                  epsabs=1e-15, epsrel=1e-12)[0]
        assert abs(sf.eval_erfc(a * np.sqrt(t)) - (1 - a * integral)) <= 1e-10


def test_kernel_moment_examples():
    T = 3.7
    assert sf.kernel_moment(0.0, 0.0, T) == pytest.approx(4 * np.sqrt(T) / np.sqrt(np.pi), rel=1e-14)
    assert sf.kernel_moment(1.0, 0.0, 1e4) == pytest.approx(1.0, rel=1e-12)
    assert sf.laplace_m(1.0, 1e-8) == pytest.approx(1.0, rel=1e-7)
    assert sf.MemoryKernel(2.0).total_mass == 0.5
    with pytest.raises(sf.DomainError):
        sf.kernel_moment(1.0, 1.0, 1.0)


def test_kernel_moment_against_quadrature():
    for a in (0.0, 0.5, 1.0, 2.0):
        for t0, t1 in ((0.0, 0.01), (0.0, 1.0), (0.3, 0.7), (2.0, 9.0)):
            if t0 == 0:
                ref = integrate.quad(lambda u: 2 * u * sf.eval_m(a, max(u * u, 1e-300)), 0, np.sqrt(t1),
                                     epsabs=1e-15, epsrel=1e-13)[0]
            else:
                ref = integrate.quad(lambda s: sf.eval_m(a, s), t0, t1, epsabs=1e-15, epsrel=1e-13)[0]
            assert sf.kernel_moment(a, t0, t1) == pytest.approx(ref, rel=1e-11)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=12), st.sampled_from([0.0, 0.5, 1.0, 2.0]))
def test_kernel_moment_additive(cuts, a):
    pts = np.unique(np.concatenate([[0.0, 5.0], cuts]))
    pts = pts[np.concatenate([[True], np.diff(pts) > 1e-9])]
    parts = sum(sf.kernel_moment(a, x0, x1) for x0, x1 in zip(pts[:-1], pts[1:]))
    assert abs(parts - sf.kernel_moment(a, 0.0, pts[-1])) <= 1e-13 * max(1.0, parts)


def test_unit_response_solves_memory_equation():
    # int_0^t m_a(t - s) phi'(s) ds = 1 with phi' = m_a / 4 + a
    for a in (0.0, 0.7, 1.5):
        for t in (0.2, 1.0, 3.0):
            def dphi(s):
                return sf.eval_m(a, s) / 4 + a

            # split at t/2; substitute u^2 at each singular end
            left = integrate.quad(lambda u: 2 * u * sf.eval_m(a, t - u * u) * dphi(max(u * u, 1e-300)), 0,
                                  np.sqrt(t / 2), epsrel=1e-12, limit=200)[0]
            right = integrate.quad(lambda u: 2 * u * sf.eval_m(a, max(u * u, 1e-300)) * dphi(t - u * u), 0,
                                   np.sqrt(t / 2), epsrel=1e-12, limit=200)[0]
            assert left + right == pytest.approx(1.0, abs=1e-10)
    assert sf.unit_response(1.0, 0.0) == 0.0


def test_weights_table():
    k = sf.MemoryKernel(1.0)
    w = k.weights(0.01, 50)
    assert w.shape == (50,)
    assert np.all(np.diff(w) < 0)
    assert w.sum() == pytest.approx(k.cumulative_moment(0.5), rel=1e-14)
    # a = 0: Riemann-Liouville half-integral weights
    w0 = sf.MemoryKernel(0.0).weights(0.01, 20)
    i = np.arange(20)
    assert np.allclose(w0, 4 * np.sqrt(0.01 / np.pi) * (np.sqrt(i + 1) - np.sqrt(i)), rtol=1e-13)


def test_gauss_kernel():
    assert sf.eval_gauss_kernel(0.0, 1 / (4 * np.pi), 0.0) == pytest.approx(1.0, rel=1e-15)
    for t in (0.1, 1.0):
        mass = integrate.quad(lambda x: sf.eval_gauss_kernel(x, t), -np.inf, np.inf, epsrel=1e-12)[0]
        assert mass == pytest.approx(1.0, rel=1e-10)
    lap = forward_laplace(lambda s: sf.eval_gauss_kernel(1.0, s, 1.0), 1.0)
    assert lap == pytest.approx(np.exp(-np.sqrt(2)) / (2 * np.sqrt(2)), rel=1e-9)
    with pytest.raises(sf.DomainError):
        sf.eval_gauss_kernel(0.0, 0.0)


def test_vectorised_and_scalar_outputs():
    assert isinstance(sf.eval_m(1.0, 0.5), float)
    assert sf.eval_m(1.0, np.array([0.5, 1.0])).shape == (2,)
    assert isinstance(sf.kernel_antiderivative(0.0, 0.0), float)
    assert sf.kernel_antiderivative(1.0, 0.0) == 0.0
