import math

import numpy as np
import pytest

from spinsqueeze.dynamics import RampSchedule
from spinsqueeze.ed import (SpinOperators, ThermalSolver, build_hamiltonian, evolve_ramp,
                            ground_and_gap, ground_observables)
from spinsqueeze.model import ModelSpec, NormDriftError

from oracles import dense_ground_moments, thermal_qfi

CASES = [((8,), 1.0, 0.7), ((2, 3), 0.0, 0.3), ((2, 2, 2), 0.5, 1.2), ((3, 3), -0.4, 2.0)]


def model_for(extents, delta, omega):
    return ModelSpec.hypercubic(len(extents), max(extents), delta, omega, extents=extents)


@pytest.mark.parametrize("extents,delta,omega", CASES)
def test_matches_kronecker_oracle(extents, delta, omega):
    E, jx, vx, vy, vz = dense_ground_moments(extents, delta, omega)
    model = model_for(extents, delta, omega)
    H = build_hamiltonian(model)
    np.testing.assert_allclose(np.linalg.eigvalsh(H.toarray()), E, atol=1e-10)
    obs = ground_observables(model)
    assert (obs.jx, obs.var_jx, obs.var_jy, obs.var_jz) == pytest.approx((jx, vx, vy, vz), abs=1e-9)
    assert obs.gap == pytest.approx(E[1] - E[0], abs=1e-9)


def test_hamiltonian_is_real_symmetric():
    H = build_hamiltonian(ModelSpec.hypercubic(2, 3, 0.3, 0.9))
    assert H.dtype == np.float64
    assert abs(H - H.T).max() < 1e-14


def test_two_site_dimer():
    gs = ground_and_gap(ModelSpec.hypercubic(1, 2, 1.0, 0.0))
    assert gs.e0 == pytest.approx(-0.75)
    assert gs.gap == pytest.approx(1.0)


@pytest.mark.parametrize("extents", [(8,), (2, 4)])
def test_sublattice_rotation_preserves_spectrum(extents):
    model = model_for(extents, 0.6, 0.8)
    a = np.linalg.eigvalsh(build_hamiltonian(model).toarray())
    b = np.linalg.eigvalsh(build_hamiltonian(model, staggered=True).toarray())
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_lanczos_agrees_with_dense():
    model = ModelSpec.hypercubic(1, 10, 1.0, 0.3)
    lanczos = ground_and_gap(model, dense=False)
    dense = ground_and_gap(model, dense=True)
    assert lanczos.e0 == pytest.approx(dense.e0, abs=1e-10)
    assert lanczos.gap == pytest.approx(dense.gap, abs=1e-8)
    assert lanczos.residuals.max() < 1e-8


def test_matrix_free_operator_matches_sparse():
    model = ModelSpec.hypercubic(2, 3, 0.4, 0.7)
    x = np.random.default_rng(1).normal(size=2**9)
    np.testing.assert_allclose(build_hamiltonian(model, matrix_free=True) @ x,
                               build_hamiltonian(model) @ x, atol=1e-12)


def test_collective_operators_algebra():
    ops = SpinOperators(5)
    psi = np.random.default_rng(0).normal(size=32) + 1j * np.random.default_rng(1).normal(size=32)
    jx_jy = ops.jx @ ops.apply_jy(psi) - ops.apply_jy(ops.jx @ psi)
    np.testing.assert_allclose(jx_jy, 1j * ops.jz * psi, atol=1e-12)


@pytest.mark.parametrize("T", [0.05, 0.5, 3.0])
def test_thermal_qfi_matches_double_loop(T):
    solver = ThermalSolver(ModelSpec.hypercubic(1, 4, 0.3, 0.8))
    assert solver.at(T)[0].fq == pytest.approx(thermal_qfi((4,), 0.3, 0.8, T), abs=1e-12)


def test_thermal_limits():
    model = ModelSpec.hypercubic(1, 8, 1.0, 1.0)
    solver = ThermalSolver(model)
    cold, e0, s0 = solver.at(1e-3)
    ground = ground_observables(model)
    assert cold.fq == pytest.approx(ground.fq, rel=1e-9)
    assert cold.xi2 == pytest.approx(ground.xi2, rel=1e-9)
    assert s0 == pytest.approx(0.0, abs=1e-12)
    hot = solver.at(1e4)
    assert hot[2] == pytest.approx(math.log(2), abs=1e-4)
    assert abs(hot[0].jx) < 1e-3


def test_thermal_size_guard():
    with pytest.raises(ValueError):
        ThermalSolver(ModelSpec.hypercubic(1, 14, 1.0, 1.0))


def test_slow_ramp_follows_ground_state():
    template = ModelSpec.hypercubic(1, 8, 1.0, 1.0)
    trace = evolve_ramp(template, RampSchedule(10.0, 1.0, 30.0), dt=0.005, stride=200)
    target = ground_observables(template)
    assert trace.final.xi2 == pytest.approx(target.xi2, rel=2e-3)
    assert trace.final.jx == pytest.approx(target.jx, rel=1e-3)


def test_norm_drift_detected():
    template = ModelSpec.hypercubic(1, 8, 1.0, 1.0)
    with pytest.raises(NormDriftError):
        evolve_ramp(template, RampSchedule(10.0, 1.0, 5.0), dt=0.2)
