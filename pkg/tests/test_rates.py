import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from crsim.calibrate import calibrate_perturbative
from crsim.errors import NearPole, NonzeroEndpointAmplitude, ZeroCollectiveFrequency
from crsim.metrics import computational_block
from crsim.model import PAULI, DeviceParams, build_static_hamiltonian, dressed_basis
from crsim.propagator import MagnusConfig, propagate
from crsim.pulses import ConstantPulse
from crsim.rates import (
    COEFFICIENT_NAMES, EffectiveRates, coefficient, collective_frequencies, effective_unitary,
    effective_unitary_pauli, nonbd_elements, pauli_decompose, rates_up_to_order, static_zz0,
)
from crsim.units import MHZ


# Independently retyped energy-denominator table.  Each entry lists terms
# (numerator, [(linear factor, power), ...]) with d the detuning, p and q the
# control and target anharmonicities.
def _lin(d, p, q):
    return {"d": d, "p": p, "q": q, "d+p": d + p, "d+2p": d + 2 * p, "p+2d": p + 2 * d,
            "3p+2d": 3 * p + 2 * d, "d-q": d - q, "p+d-q": p + d - q}


def _terms(terms, d, p, q):
    f = _lin(d, p, q)
    total = 0.0
    for num, factors in terms:
        den = 1.0
        for name, power in factors:
            den *= f[name] ** power
        total += num / den
    return total


RETYPED = {
    "zi2_1": [(0.5, [("d+p", 1)]), (-0.5, [("d", 1)])],
    "zi2_2": [(-0.25, [("p", 1), ("d", 2)]), (1, [("p", 1), ("d+p", 2)]),
              (-0.75, [("p", 1), ("d+2p", 2)]), (1, [("p", 2), ("d", 1)]),
              (-2, [("p", 2), ("d+p", 1)]), (-3, [("p", 2), ("d+2p", 1)]),
              (-4, [("p", 2), ("p+2d", 1)]), (12, [("p", 2), ("3p+2d", 1)]),
              (1, [("q", 1), ("p+d-q", 2)]), (-1, [("p", 1), ("q", 1), ("d-q", 1)]),
              (1, [("p", 1), ("q", 1), ("p+d-q", 1)])],
    "zi2_4": [(0.5, [("d", 2)]), (-0.5, [("d+p", 2)])],
    "zi2_5": [(6, [("p", 3), ("d+p", 1)]), (-4.5, [("p", 3), ("d+2p", 1)]),
              (-0.5, [("p", 2), ("d+p", 2)]), (-0.75, [("p", 2), ("d+2p", 2)]),
              (4, [("p", 2), ("p+2d", 2)]), (-12, [("p", 2), ("3p+2d", 2)]),
              (-1.5, [("p", 3), ("d", 1)]), (0.25, [("p", 2), ("d", 2)]),
              (1, [("p", 1), ("q", 2), ("d-q", 1)]), (-1, [("p", 1), ("q", 2), ("p+d-q", 1)]),
              (-1, [("q", 2), ("p+d-q", 2)])],
    "iz2_2": [(0.25, [("p", 1), ("d", 2)]), (0.5, [("p", 1), ("d+p", 2)]),
              (-0.75, [("p", 1), ("d+2p", 2)]), (-1, [("p", 2), ("d", 1)]),
              (-4, [("p", 2), ("d+p", 1)]), (-3, [("p", 2), ("d+2p", 1)]),
              (4, [("p", 2), ("p+2d", 1)]), (12, [("p", 2), ("3p+2d", 1)]),
              (1, [("q", 1), ("p+d-q", 2)]), (-1, [("p", 1), ("q", 1), ("d-q", 1)]),
              (1, [("p", 1), ("q", 1), ("p+d-q", 1)]), (0.5, [("q", 1), ("d-q", 2)])],
    "iz2_5": [(3, [("p", 3), ("d+p", 1)]), (-4.5, [("p", 3), ("d+2p", 1)]),
              (-1, [("p", 2), ("d+p", 2)]), (-0.75, [("p", 2), ("d+2p", 2)]),
              (-4, [("p", 2), ("p+2d", 2)]), (-12, [("p", 2), ("3p+2d", 2)]),
              (1.5, [("p", 3), ("d", 1)]), (-0.25, [("p", 2), ("d", 2)]),
              (1, [("p", 1), ("q", 2), ("d-q", 1)]), (-1, [("p", 1), ("q", 2), ("p+d-q", 1)]),
              (-0.5, [("q", 2), ("d-q", 2)]), (-1, [("q", 2), ("p+d-q", 2)])],
    "zz2_2": [(0.25, [("p", 1), ("d", 2)]), (-1, [("p", 1), ("d+p", 2)]),
              (0.75, [("p", 1), ("d+2p", 2)]), (-1, [("p", 2), ("d", 1)]),
              (2, [("p", 2), ("d+p", 1)]), (3, [("p", 2), ("d+2p", 1)]),
              (4, [("p", 2), ("p+2d", 1)]), (-12, [("p", 2), ("3p+2d", 1)]),
              (-1, [("q", 1), ("p+d-q", 2)]), (1, [("p", 1), ("q", 1), ("d-q", 1)]),
              (-1, [("p", 1), ("q", 1), ("p+d-q", 1)])],
    "zz2_5": [(-6, [("p", 3), ("d+p", 1)]), (4.5, [("p", 3), ("d+2p", 1)]),
              (0.5, [("p", 2), ("d+p", 2)]), (0.75, [("p", 2), ("d+2p", 2)]),
              (-4, [("p", 2), ("p+2d", 2)]), (12, [("p", 2), ("3p+2d", 2)]),
              (1.5, [("p", 3), ("d", 1)]), (-0.25, [("p", 2), ("d", 2)]),
              (-1, [("p", 1), ("q", 2), ("d-q", 1)]), (1, [("p", 1), ("q", 2), ("p+d-q", 1)]),
              (1, [("q", 2), ("p+d-q", 2)])],
    "zz2_6": [(-0.5, [("d+p", 3)]), (-0.5, [("q", 1), ("d+p", 2)]),
              (-0.5, [("q", 2), ("d+p", 1)]), (0.5, [("d", 3)]), (0.5, [("d", 2), ("q", 1)]),
              (0.5, [("d", 1), ("q", 2)])],
    "ix3_2": [(-1, [("d+p", 5)]), (0.5, [("p", 1), ("d+p", 4)]),
              (1 / 12, [("p", 2), ("d", 3)]), (-5 / 24, [("p", 2), ("d+p", 3)]),
              (-1 / 3, [("p", 3), ("d", 2)]), (-71 / 24, [("p", 3), ("d+p", 2)]),
              (2 / 3, [("p", 3), ("p+2d", 2)]), (-12, [("p", 3), ("3p+2d", 2)]),
              (103 / 8, [("p", 4), ("d+p", 1)]), (9 / 8, [("p", 4), ("d", 1)]),
              (-4, [("p", 4), ("p+2d", 1)]), (-24, [("p", 4), ("3p+2d", 1)])],
    "zx3_2": [(1, [("d+p", 5)]), (0.5, [("p", 1), ("d", 4)]), (-0.5, [("p", 1), ("d+p", 4)]),
              (-0.5, [("p", 2), ("d", 3)]), (3 / 8, [("p", 2), ("d+p", 3)]),
              (0.25, [("p", 3), ("d", 2)]), (29 / 8, [("p", 3), ("d+p", 2)]),
              (-2, [("p", 3), ("p+2d", 2)]), (12, [("p", 3), ("3p+2d", 2)]),
              (5 / 8, [("p", 4), ("d", 1)]), (-85 / 8, [("p", 4), ("d+p", 1)]),
              (-4, [("p", 4), ("p+2d", 1)]), (24, [("p", 4), ("3p+2d", 1)]),
              (-0.5, [("d", 5)])],
}

# Coefficients that are single rational expressions.
RETYPED_RATIONAL = {
    "zi2_3": lambda d, p, q: p / (2 * d * q * (p + d)),
    "zi2_6": lambda d, p, q: -(p * p * d + p * d * d + 2 * p * d * q + p * p * q)
    / (2 * d * d * q * q * (p + d) ** 2),
    "iz2_1": lambda d, p, q: 0.0,
    "iz2_3": lambda d, p, q: -(d + p + q) / (2 * q * (p + d) ** 2),
    "iz2_4": lambda d, p, q: 0.0,
    "iz2_6": lambda d, p, q: (p * p + 2 * p * d + p * q + d * d + d * q + q * q)
    / (2 * q * q * (p + d) ** 3),
    "zz2_1": lambda d, p, q: 0.0,
    "zz2_3": lambda d, p, q: -(p * p * d + p * d * d + 2 * p * d * q + p * p * q)
    / (2 * d * d * q * (p + d) ** 2),
    "zz2_4": lambda d, p, q: 0.0,
    "ix3_1": lambda d, p, q: p * d / ((p + d) ** 3 * (p + 2 * d) * (3 * p + 2 * d)),
    "ix3_3": lambda d, p, q: p * (4 * p + 7 * d) / (24 * d * d * (p + d) ** 3 * (p + 2 * d) ** 2),
    "zx3_1": lambda d, p, q: p * p * (3 * p ** 3 + 11 * p * p * d + 15 * p * d * d + 9 * d ** 3)
    / (2 * d ** 3 * (p + d) ** 3 * (p + 2 * d) * (3 * p + 2 * d)),
    "zx3_3": lambda d, p, q: -p * (2 * p * p + 8 * p * d + 7 * d * d)
    / (8 * d ** 3 * (p + d) ** 3 * (p + 2 * d) ** 2),
    "zi4": lambda d, p, q: (3 * p ** 5 + 11 * p ** 4 * d + 15 * p ** 3 * d * d + 9 * p * p * d ** 3)
    / (8 * d ** 3 * (p + d) ** 3 * (p + 2 * d) * (3 * p + 2 * d)),
}


def retyped(name, d, p, q):
    if name in RETYPED:
        return _terms(RETYPED[name], d, p, q)
    return RETYPED_RATIONAL[name](d, p, q)


def test_retyped_table_is_complete():
    assert set(RETYPED) | set(RETYPED_RATIONAL) == set(COEFFICIENT_NAMES)


@pytest.mark.parametrize("name", COEFFICIENT_NAMES)
def test_coefficient_transcription(name):
    rng = np.random.default_rng(abs(hash(name)) % 2 ** 32)
    for _ in range(3):
        delta = rng.uniform(30, 260) * rng.choice([-1, 1])
        a_c, a_t = rng.uniform(-400, -200), rng.uniform(-400, -200)
        p = DeviceParams(5000 + delta, 5000, a_c, a_t, 3.5)
        want = retyped(name, MHZ * delta, MHZ * a_c, MHZ * a_t)
        assert coefficient(p, name) == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_static_zz_examples():
    assert static_zz0(DeviceParams.paper(50.0, J=0.0)) == 0
    assert 2 * static_zz0(DeviceParams.paper(50.0)) / MHZ * 1e3 == pytest.approx(147.3, abs=0.05)
    assert 2 * static_zz0(DeviceParams.paper(200.0)) / MHZ * 1e3 == pytest.approx(220.4, abs=0.05)
    with pytest.raises(NearPole):
        static_zz0(DeviceParams.paper(340.5))
    with pytest.raises(NearPole):
        static_zz0(DeviceParams.paper(-340.2))


def test_first_order_examples():
    p = DeviceParams.paper(50.0)
    r = rates_up_to_order(p, 20.0, 0.0, max_order=1)
    assert r.w_ix / MHZ == pytest.approx(3.5 / 290 * 20, rel=1e-12)
    assert r.w_ix / MHZ == pytest.approx(0.2414, abs=1e-4)
    assert r.w_zx / MHZ == pytest.approx(-1.641, abs=1e-3)
    assert r.w_iy == 0 and r.w_zy == 0


@pytest.mark.parametrize("order", range(5))
def test_zero_drive_leaves_static_zz(order):
    p = DeviceParams.paper(100.0)
    r = rates_up_to_order(p, 0.0, 0.0, max_order=order)
    d = r.as_dict()
    assert d.pop("w_zz") == static_zz0(p)
    assert all(v == 0 for v in d.values())


def test_near_pole_names_coefficient():
    with pytest.raises(NearPole) as info:
        rates_up_to_order(DeviceParams.paper(0.5), 10.0, max_order=1)
    assert info.value.coefficient == "first_order"
    with pytest.raises(NearPole) as info:
        coefficient(DeviceParams.paper(170.3), "ix3_1")
    assert info.value.denominator == "2D+a"


amps = st.floats(-60, 60)


@given(cx=amps, cy=amps, dcx=st.floats(-5, 5), dcy=st.floats(-5, 5))
def test_rate_parities(cx, cy, dcx, dcy):
    p = DeviceParams.paper(50.0)
    r = rates_up_to_order(p, complex(cx, cy), 0.0, complex(dcx, dcy), max_order=4)
    m = rates_up_to_order(p, complex(-cx, -cy), 0.0, complex(-dcx, -dcy), max_order=4)
    for name in ("w_zi", "w_iz", "w_zz"):
        assert getattr(m, name) == pytest.approx(getattr(r, name), rel=1e-12, abs=1e-15)
    for name in ("w_ix", "w_iy", "w_zx", "w_zy"):
        assert getattr(m, name) == pytest.approx(-getattr(r, name), rel=1e-12, abs=1e-15)
    for v in r.as_dict().values():
        assert isinstance(v, float) and math.isfinite(v)


@given(st.floats(1, 80))
def test_quartic_stark_term_reduces_magnitude(amp):
    p = DeviceParams.paper(50.0)
    tone = 3.5 / 50 * amp
    r2 = rates_up_to_order(p, amp, tone, max_order=2).w_zi
    r4 = rates_up_to_order(p, amp, tone, max_order=4).w_zi
    quartic = r4 - r2
    if abs(quartic) < 0.5 * abs(r2):
        assert abs(r4) < abs(r2)


def test_collective_frequency_examples():
    cf = collective_frequencies(EffectiveRates())
    assert cf.w_plus == 0 and cf.w_minus == 0
    cf = collective_frequencies(EffectiveRates(w_ix=0.3, w_zx=0.3))
    assert cf.w_plus == pytest.approx(0.6) and cf.w_minus == 0


rate_values = st.floats(-0.2, 0.2)


@given(st.lists(rate_values, min_size=7, max_size=7))
def test_collective_frequencies_sign_symmetry(vals):
    r = EffectiveRates(*vals)
    f = EffectiveRates(-vals[0], -vals[1], -vals[2], -vals[3], *vals[4:])
    a, b = collective_frequencies(r), collective_frequencies(f)
    assert a.w_plus == pytest.approx(b.w_plus) and a.w_minus == pytest.approx(b.w_minus)
    assert a.w_plus >= 0 and a.w_minus >= 0


def heff(r):
    h = np.zeros((4, 4), dtype=complex)
    for name, w in r.as_dict().items():
        m, n = name[2], name[3]
        h += 0.5 * w * np.kron(PAULI[m], PAULI[n])
    return h


@given(st.lists(rate_values, min_size=7, max_size=7), st.floats(0, 400))
def test_effective_unitary_is_exponential_of_rates(vals, t):
    r = EffectiveRates(*vals)
    u = effective_unitary(r, t)
    np.testing.assert_allclose(u, expm(-1j * heff(r) * t), atol=1e-10)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    coeffs = effective_unitary_pauli(r, t)
    numeric = pauli_decompose(u)
    for key in numeric:
        assert coeffs[key] == pytest.approx(numeric[key], abs=1e-12)
    rebuilt = sum(c * np.kron(PAULI[k[0]], PAULI[k[1]]) for k, c in coeffs.items())
    np.testing.assert_allclose(rebuilt, u, atol=1e-12)


def test_effective_unitary_examples():
    np.testing.assert_allclose(effective_unitary(EffectiveRates(), 200.0), np.eye(4))
    # ix + zx = 0 and (ix - zx) t = pi: identity on control 0, X flip on control 1
    t = 200.0
    w = np.pi / (2 * t)
    u = effective_unitary(EffectiveRates(w_ix=w, w_zx=-w), t)
    np.testing.assert_allclose(u[:2, :2], np.eye(2), atol=1e-15)
    np.testing.assert_allclose(np.abs(u[2:, 2:]), [[0, 1], [1, 0]], atol=1e-15)
    with pytest.raises(ZeroCollectiveFrequency):
        effective_unitary(EffectiveRates(w_ix=math.nan), 1.0)


class CubicRamp:
    """``A t (T - t)**2 / T**3``: slope ``A/T`` at the start, flat at the end."""

    def __init__(self, amp, tau_p):
        self.amp, self.tau_p = amp, tau_p

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amp * t * (self.tau_p - t) ** 2 / self.tau_p ** 3 + 0j

    def derivative(self, t, n=1):
        T = self.tau_p
        return self.amp * (T - t) * (T - 3 * t) / T ** 3 + 0j


def test_nonbd_elements():
    p = DeviceParams.paper(50.0)
    r = EffectiveRates()
    # zero slopes at both ends: every element vanishes
    flat = CubicRamp(0.0, 200.0)
    assert all(v == 0 for v in nonbd_elements(r, flat, p).values())
    pulse = CubicRamp(40.0, 200.0)
    xi = nonbd_elements(r, pulse, p)["xi"]
    slope = MHZ * 40.0 / 200.0
    assert abs(xi) == pytest.approx(slope / (2 * (MHZ * 50.0) ** 2), rel=1e-12)
    xi2 = nonbd_elements(r, pulse, DeviceParams.paper(100.0))["xi"]
    assert abs(xi) / abs(xi2) == pytest.approx(4.0, rel=1e-12)
    assert set(nonbd_elements(r, pulse, p)) == {"xi", "xx", "xy", "xz", "yi", "yx", "yy", "yz"}
    with pytest.raises(NonzeroEndpointAmplitude):
        nonbd_elements(r, ConstantPulse(10.0, 200.0), p)


@pytest.mark.parametrize("amp", [2.0, 5.0])
def test_weak_drive_rotation_angle_matches_simulation(amp):
    p = DeviceParams.paper(50.0)
    cal = calibrate_perturbative(p, 200.0, 26.0, amp=amp)
    control, target = cal.envelopes()
    t = np.linspace(0, 200.0, 8001)
    c, tg, dc = control(t), target(t), control.derivative(t)
    w = [rates_up_to_order(p, c[k], tg[k], dc[k], max_order=3) for k in range(t.size)]
    predicted = abs(np.trapezoid([r.w_ix - r.w_zx for r in w], t))
    u = propagate(p, control, target, MagnusConfig(dt=0.05))
    block = computational_block(u, dressed_basis(build_static_hamiltonian(p), p.levels))
    simulated = 2 * math.atan2(abs(block[3, 2]), abs(block[2, 2]))
    assert simulated == pytest.approx(predicted, rel=0.05)
