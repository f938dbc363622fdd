import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinsqueeze.dynamics import (ConstantField, ModePairState, RampSchedule, evolve,
                                  ground_state_pairs, integrate_step, pair_observables, smooth_step)
from spinsqueeze.model import ModelSpec
from spinsqueeze.spinwave import solve

from oracles import harmonic_ramp


@given(st.floats(-1.0, 2.0))
def test_smooth_step_bounds(x):
    y = smooth_step(x)
    assert 0.0 <= y <= 1.0


def test_smooth_step_shape():
    x = np.linspace(0, 1, 201)
    y = smooth_step(x)
    assert y[0] == 0.0 and y[-1] == pytest.approx(1.0)
    assert np.all(np.diff(y) >= 0)
    assert smooth_step(0.5) == pytest.approx(0.5)


def test_ramp_schedule_validation():
    ramp = RampSchedule(10.0, 0.5, 20.0, hold=5.0)
    assert ramp(0.0) == 10.0 and ramp(20.0) == pytest.approx(0.5) and ramp(24.0) == pytest.approx(0.5)
    assert ramp.duration == 25.0
    for bad in [(0.5, 10.0, 1.0), (1.0, 0.0, 1.0), (2.0, 1.0, 0.0)]:
        with pytest.raises(ValueError):
            RampSchedule(*bad)


def test_single_mode_without_pairing_rotates():
    A = np.array([1.3])
    state = ModePairState(np.array([0.2]), np.array([0.1 + 0.3j]))
    f0 = state.F.copy()
    dt, steps = 1e-3, 2000
    for n in range(steps):
        state = integrate_step(state, lambda t: A, np.zeros(1), dt, t=n * dt, neg=np.array([0]))
    assert state.G[0] == pytest.approx(0.2, abs=1e-14)
    assert abs(state.F[0]) == pytest.approx(abs(f0[0]), rel=1e-10)
    assert state.F[0] == pytest.approx(f0[0] * np.exp(-2j * A[0] * dt * steps), abs=1e-10)


@given(st.integers(1, 3), st.floats(-0.9, 1.0), st.floats(0.05, 20.0))
def test_ground_state_is_stationary(d, delta, omega):
    model = ModelSpec.hypercubic(d, 4, delta, omega)
    trace = evolve(model, ConstantField(omega, 2.0), stride=50)
    start = pair_observables(ground_state_pairs(model), model.n_sites)
    assert trace.final.var_jz == pytest.approx(start.var_jz, rel=1e-9)
    assert trace.final.jx == pytest.approx(start.jx, rel=1e-12)
    assert start.var_jz == pytest.approx(solve(model).var_jz, rel=1e-12)


@pytest.mark.parametrize("extents,delta", [((4,), 1.0), ((3, 3), 0.0)])
def test_matches_exact_quadratic_dynamics(extents, delta):
    ramp = RampSchedule(5.0, 0.5, 6.0, hold=2.0)
    model = ModelSpec.hypercubic(len(extents), max(extents), delta, 0.5, extents=extents)
    trace = evolve(model, ramp, dt=1e-3, stride=200)
    jx, vz = harmonic_ramp(extents, delta, ramp, ramp.duration, trace.t)
    np.testing.assert_allclose(trace.column("jx"), jx, atol=1e-9)
    np.testing.assert_allclose(trace.column("var_jz"), vz, atol=1e-9)


def test_literal_k0_variant_departs_from_exact_dynamics():
    ramp = RampSchedule(5.0, 0.5, 6.0, hold=2.0)
    model = ModelSpec.hypercubic(1, 4, 1.0, 0.5)
    trace = evolve(model, ramp, dt=1e-3, stride=200, literal_k0=True)
    _, vz = harmonic_ramp((4,), 1.0, ramp, ramp.duration, trace.t)
    assert np.max(np.abs(trace.column("var_jz") - vz)) > 1e-2


def test_rk4_fourth_order():
    model = ModelSpec.hypercubic(1, 4, 1.0, 0.5)
    ramp = RampSchedule(5.0, 0.5, 4.0)
    finals = [evolve(model, ramp, dt=dt).final.var_jz for dt in (0.014, 0.007, 0.0035)]
    ratio = (finals[0] - finals[1]) / (finals[1] - finals[2])
    assert ratio == pytest.approx(16.0, rel=0.1)


def test_coarse_step_rejected():
    with pytest.raises(ValueError):
        evolve(ModelSpec.hypercubic(2, 4, 1.0, 0.5), RampSchedule(10.0, 0.5, 5.0), dt=0.1)


def test_trace_rows_and_sampling():
    model = ModelSpec.hypercubic(2, 4, 1.0, 0.5)
    trace = evolve(model, RampSchedule(10.0, 0.5, 5.0), dt=0.005, stride=100)
    assert trace.t[0] == 0.0 and trace.t[-1] == pytest.approx(5.0)
    rows = trace.rows()
    assert len(rows) == len(trace.t) == 11
    assert set(rows[0]) == {"method", "t", "omega", "jx_per_spin", "var_jz", "xi2"}
    assert isinstance(rows[1]["t"], float)
