import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from conftest import random_hermitian
from crsim.calibrate import calibrate_perturbative
from crsim.errors import NotAntiHermitian, StepTooLarge
from crsim.model import DeviceParams, PAULI, build_static_hamiltonian
from crsim.propagator import (
    MagnusConfig, magnus_generators, matrix_exponential, oracle_hamiltonian, oracle_propagate,
    propagate, propagate_hamiltonian,
)
from crsim.pulses import ConstantPulse, SquareGaussian, ZeroEnvelope
from crsim.units import MHZ

SX, SY, SZ = PAULI["x"], PAULI["y"], PAULI["z"]


def max_unitarity_defect(u):
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))


@pytest.fixture(scope="module")
def calibrated50():
    p = DeviceParams.paper(50.0)
    control, target = calibrate_perturbative(p, 200.0, 26.0).envelopes()
    return p, control, target


@pytest.fixture(scope="module")
def oracle50(calibrated50):
    p, control, target = calibrated50
    return oracle_propagate(p, control, target, rtol=1e-12)


def test_config_validation():
    assert MagnusConfig().dt == 0.01 and MagnusConfig().quadrature == "gauss2"
    for bad in ({"dt": 0}, {"dt": -1}, {"quadrature": "simpson"}, {"expm_tol": 0}):
        with pytest.raises(ValueError):
            MagnusConfig(**bad)


def test_generators_of_constant_hamiltonian(rng):
    h = random_hermitian(rng, 4)
    k1, k2 = magnus_generators(lambda t: h, 1.0, 1.3)
    np.testing.assert_allclose(k1, 0.3 * h, atol=1e-14)
    np.testing.assert_allclose(k2, 0, atol=1e-14)


@given(a=st.floats(-3, 3), b=st.floats(-3, 3), t0=st.floats(-5, 5), h=st.floats(1e-3, 2))
def test_second_generator_of_linear_ramp(a, b, t0, h):
    # H(t) = a sx + b t sy: the commutator double integral is -a b h**3 / 6 sz
    k1, k2 = magnus_generators(lambda t: a * SX + b * t * SY, t0, t0 + h)
    np.testing.assert_allclose(k1, a * h * SX + b * (t0 * h + h * h / 2) * SY, atol=1e-12)
    np.testing.assert_allclose(k2, -a * b * h ** 3 / 6 * SZ, atol=1e-12)


@given(seed=st.integers(0, 2 ** 31), t0=st.floats(0, 190), h=st.floats(1e-3, 1.0))
def test_generators_are_hermitian(seed, t0, h):
    from crsim.propagator import DriveSampler
    p = DeviceParams.paper(50.0)
    rng = np.random.default_rng(seed)
    amp = rng.uniform(1, 60)
    pulse = SquareGaussian(amp, 200.0, 26.0)
    sampler = DriveSampler(p, pulse, SquareGaussian(0.07 * amp, 200.0, 26.0))
    k1, k2 = magnus_generators(lambda t: sampler.sample(t)[0], t0, t0 + h)
    scale = max(1.0, np.max(np.abs(k1)))
    assert np.max(np.abs(k1 - k1.conj().T)) < 1e-12 * scale
    assert np.max(np.abs(k2 - k2.conj().T)) < 1e-12 * scale


def test_zero_drive_is_identity():
    p = DeviceParams.paper(50.0)
    z = ZeroEnvelope(200.0)
    np.testing.assert_allclose(propagate(p, z, z, MagnusConfig(dt=0.1)), np.eye(p.dim),
                               atol=1e-13)
    np.testing.assert_allclose(oracle_propagate(p, z, z), np.eye(p.dim), atol=1e-13)


def rabi_excited(omega, delta, t):
    w = math.hypot(omega, delta)
    return omega ** 2 / w ** 2 * math.sin(w * t / 2) ** 2


@pytest.mark.parametrize("f_rabi,f_det,tau", [(20.0, 50.0, 200.0), (5.0, 1.0, 97.3),
                                              (30.0, -120.0, 60.0)])
def test_two_level_rabi_closed_form(f_rabi, f_det, tau):
    om, de = MHZ * f_rabi, MHZ * f_det

    def h(t):
        c = 0.5 * om * np.exp(-1j * de * t)
        return np.array([[0, np.conj(c)], [c, 0]])

    u = propagate_hamiltonian(h, tau, 2, MagnusConfig(dt=0.01))
    assert abs(u[1, 0]) ** 2 == pytest.approx(rabi_excited(om, de, tau), abs=1e-8)
    assert max_unitarity_defect(u) < 1e-9


def test_unitarity_at_paper_parameters(calibrated50):
    p, control, target = calibrated50
    for dt in (0.1, 0.05):
        assert max_unitarity_defect(propagate(p, control, target, MagnusConfig(dt=dt))) < 1e-9


def test_step_halving(calibrated50):
    p, control, target = calibrated50
    u1 = propagate(p, control, target, MagnusConfig(dt=0.01))
    u2 = propagate(p, control, target, MagnusConfig(dt=0.005))
    assert np.max(np.abs(u1 - u2)) < 1e-7


def test_agrees_with_ode_oracle(calibrated50, oracle50):
    p, control, target = calibrated50
    u = propagate(p, control, target, MagnusConfig(dt=0.01))
    assert np.max(np.abs(u - oracle50)) < 1e-6
    assert max_unitarity_defect(oracle50) < 1e-8


def test_convergence_order(calibrated50, oracle50):
    p, control, target = calibrated50
    dts = np.array([0.5, 0.25, 0.1, 0.05])
    err = [np.max(np.abs(propagate(p, control, target, MagnusConfig(dt=dt)) - oracle50))
           for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(err), 1)[0]
    assert slope >= 1.9


def test_midpoint_rule_is_second_order(calibrated50, oracle50):
    p, control, target = calibrated50
    dts = np.array([0.1, 0.05, 0.025])
    err = [np.max(np.abs(propagate(p, control, target,
                                   MagnusConfig(dt=dt, quadrature="midpoint")) - oracle50))
           for dt in dts]
    assert np.polyfit(np.log(dts), np.log(err), 1)[0] >= 1.9


def test_interaction_frame_matches_lab_frame():
    p = DeviceParams(omega_c=5050.0, omega_t=5000.0, alpha_c=-340, alpha_t=-340, J=3.5,
                     levels_c=3, levels_t=2)
    control = SquareGaussian(30.0, 40.0, 10.0)
    target = SquareGaussian(2.0, 40.0, 10.0)
    u_i = propagate(p, control, target, MagnusConfig(dt=0.005))
    h_s = build_static_hamiltonian(p)
    u_lab = oracle_propagate(p, control, target, rtol=1e-10, frame="lab")
    np.testing.assert_allclose(expm(-1j * h_s * 40.0) @ u_i, u_lab, atol=1e-6)


def test_step_too_large():
    p = DeviceParams.paper(50.0)
    huge = ConstantPulse(1e5, 10.0)
    with pytest.raises(StepTooLarge):
        propagate(p, huge, ZeroEnvelope(10.0), MagnusConfig(dt=1.0))


def test_generic_oracle_matches_generic_magnus(rng):
    a, b = random_hermitian(rng, 3, 0.3), random_hermitian(rng, 3, 0.3)

    def h(t):
        return a + math.sin(0.7 * t) * b

    u = propagate_hamiltonian(h, 10.0, 3, MagnusConfig(dt=0.01))
    np.testing.assert_allclose(u, oracle_hamiltonian(h, 10.0, 3), atol=1e-8)
    with pytest.raises(ValueError):
        oracle_hamiltonian(h, 10.0, 3, rtol=1e-6)


def test_matrix_exponential_examples():
    np.testing.assert_allclose(matrix_exponential(np.zeros((5, 5))), np.eye(5), atol=0)
    theta = 0.731
    rot = matrix_exponential(-1j * theta * SY)
    np.testing.assert_allclose(rot, [[math.cos(theta), -math.sin(theta)],
                                     [math.sin(theta), math.cos(theta)]], atol=1e-15)
    with pytest.raises(NotAntiHermitian):
        matrix_exponential(np.array([[1.0, 0], [0, 0]]))


@given(st.integers(0, 2 ** 31), st.floats(1e-3, 30))
def test_matrix_exponential_inverse_and_scipy(seed, scale):
    rng = np.random.default_rng(seed)
    a = -1j * random_hermitian(rng, 6, scale)
    e = matrix_exponential(a)
    np.testing.assert_allclose(e @ matrix_exponential(-a), np.eye(6), atol=1e-12)
    np.testing.assert_allclose(e, expm(a), atol=1e-10 * max(1, scale))


@given(st.integers(0, 2 ** 31), st.floats(1e-4, 6))
def test_taylor_step_exponential(seed, scale):
    from crsim.propagator import _expm_small
    rng = np.random.default_rng(seed)
    k = random_hermitian(rng, 5, scale)[None]
    np.testing.assert_allclose(_expm_small(k, 1e-12)[0], expm(-1j * k[0]), atol=1e-11)
