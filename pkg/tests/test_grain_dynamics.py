import numpy as np
import pytest

from kwc_limit import grain_dynamics as gd
from kwc_limit.fractional_limit import closed_form_xi, solve_limit
from kwc_limit.params import ModelParams
from kwc_limit.special_functions import DomainError


@pytest.mark.parametrize("func", [lambda x: np.ones_like(x), lambda x: 1 + x * x])
def test_stationary_holds(func):
    prof = gd.WeightProfile.from_function(func, 1.0, 2001)
    rep = gd.verify_stationary(prof, 1.0)
    assert rep.ok and rep.violation is None
    assert np.allclose(rep.field.z, 1 / func(prof.x), rtol=1e-15)
    assert np.max(np.abs(rep.field.z)) <= 1.0
    assert rep.pairing == pytest.approx(rep.energy)


def test_stationary_violation_detected():
    prof = gd.WeightProfile.from_function(lambda x: 2 - np.abs(x), 1.0, 2001)
    rep = gd.verify_stationary(prof, 1.0)
    assert not rep.ok
    assert not rep.checks["bounded"]
    assert rep.violation.condition == "bounded"
    assert rep.violation.x == pytest.approx(-1.0)
    assert rep.violation.value == pytest.approx(2.0)


def test_stationary_degenerate_weight():
    prof = gd.WeightProfile.from_function(lambda x: np.abs(x), 1.0, 101)
    rep = gd.verify_stationary(prof, 0.5)
    assert np.all(rep.field.z == 0.0)
    assert rep.checks["energy_identity"]
    assert rep.pairing == 0.0 and rep.energy == 0.0


def test_weight_profile_validation():
    with pytest.raises(ValueError):
        gd.WeightProfile.from_function(lambda x: 1 + 0 * x, 1.0, 100)
    with pytest.raises(ValueError):
        gd.WeightProfile(np.linspace(0, 1, 5), np.ones(5))
    with pytest.raises(ValueError):
        gd.WeightProfile(np.linspace(-1, 1, 5), -np.ones(5))
    with pytest.raises(DomainError):
        gd.verify_stationary(gd.WeightProfile.from_function(lambda x: 1 + 0 * x), 0.0)


def test_fixed_point():
    st = gd.GrainState(np.linspace(0, 1, 5), np.full(4, 0.3), np.ones(4), a=0.0, boundary="periodic")
    gd.run_grains(st, 1e-3, 50)
    assert np.all(st.heights == 0.3)
    assert np.all(st.xis == 1.0)


def test_periodic_conservation_random():
    rng = np.random.default_rng(11)
    part = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, 4)), [1.0]])
    st = gd.GrainState(part, rng.uniform(0, 1, 5), rng.uniform(0.5, 1, 5), a=1.0, boundary="periodic")
    prev = st.mass()
    for _ in range(1000):
        gd.step_grains(st, 1e-3)
        cur = st.mass()
        assert abs(cur - prev) <= 1e-12
        prev = cur


def _two_facet(a, b, c, dt, steps):
    st = gd.GrainState(np.array([0.0, 0.5, 1.0]), np.array([0.0, b]), np.array([1.0 - c]), a=a,
                       boundary="dirichlet")
    return gd.run_grains(st, dt, steps)


def test_two_facet_dirichlet_matches_limit_solver():
    a, b, c = 1.0, 2.0, 0.25
    errs = []
    for dt in (2e-3, 1e-3):
        steps = int(round(2.0 / dt))
        rows = _two_facet(a, b, c, dt, steps)
        ser = solve_limit(ModelParams(a=a, b=b, c=c), dt, 2.0)
        assert np.max(np.abs(rows[:, 3] - ser.values)) <= 1e-6
        assert np.all(rows[:, 1] == 0.0) and np.all(rows[:, 2] == b)
        errs.append(np.max(np.abs(rows[:, 3] - closed_form_xi(ModelParams(a=a, b=b, c=c), rows[:, 0]))))
    assert errs[0] / errs[1] >= 1.8


def test_sign_dissipation_three_facets():
    st = gd.GrainState(np.array([0.0, 1 / 3, 2 / 3, 1.0]), np.array([0.0, 1.0, 0.0]), np.ones(2), a=1.0,
                       boundary="neumann")
    chis0 = st.chis.copy()
    prev = np.abs(st.jumps())
    m0 = st.mass()
    for _ in range(200):
        gd.step_grains(st, 1e-3)
        if not np.array_equal(st.chis, chis0):
            break
        cur = np.abs(st.jumps())
        assert np.all(cur <= prev + 1e-15)
        prev = cur
    assert np.all(prev < 1.0)
    assert st.mass() == pytest.approx(m0, abs=1e-12)


def test_collision_freezes_junction():
    st = gd.GrainState(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.01]), np.ones(1), a=1.0, boundary="neumann")
    gd.run_grains(st, 1e-3, 200)
    assert st.chis[0] == 0
    assert np.all(st.fluxes() == 0.0)


def test_xi_range_preserved():
    a, dt = 1.0, 1e-3
    h = np.array([0.0, 0.5, 1.5, 1.0])
    b0 = np.abs(np.diff(h))
    xi0 = np.array([0.9, 0.6, 1.0])
    st = gd.GrainState(np.linspace(0, 1, 5), h, xi0, a=a, boundary="neumann")
    rows = gd.run_grains(st, dt, 1000)
    xis = rows[:, 5:]
    floor = np.minimum(xi0, a / (a + b0.max()))
    assert np.all(xis >= floor - dt)
    assert np.all(xis <= 1.0 + dt)


def test_columns_and_record():
    st = gd.GrainState(np.linspace(0, 1, 4), np.zeros(3), np.ones(2), boundary="dirichlet")
    assert st.columns() == ["t", "h_1", "h_2", "h_3", "xi_1", "xi_2"]
    assert st.record().shape == (6,)


def test_state_validation():
    with pytest.raises(DomainError):
        gd.GrainState(np.array([0.0, 0.5, 0.5, 1.0]), np.zeros(3), np.ones(3))
    with pytest.raises(ValueError):
        gd.GrainState(np.linspace(0, 1, 4), np.zeros(3), np.ones(2), boundary="periodic")
    with pytest.raises(ValueError):
        gd.GrainState(np.linspace(0, 1, 4), np.zeros(3), np.ones(2), boundary="open")
    st = gd.GrainState(np.linspace(0, 1, 3), np.zeros(2), np.ones(1), boundary="neumann")
    gd.step_grains(st, 1e-3)
    with pytest.raises(ValueError):
        gd.step_grains(st, 2e-3)
    with pytest.raises(DomainError):
        gd.step_grains(st, 0.0)
