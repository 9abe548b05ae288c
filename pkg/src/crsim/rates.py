"""Closed-form effective cross-resonance rates and the resulting gate unitaries.

Rates follow the convention ``H_eff = sum_mn (w_mn / 2) sigma_m (x) sigma_n``
(control first).  Device parameters come in MHz and envelopes in MHz and
MHz/ns; all returned rates are angular (rad/ns).  Nothing here calls the
numerical propagator, so comparisons against simulation are independent.
"""

from dataclasses import dataclass, field, fields
import math

import numpy as np

from .errors import NearPole, NonzeroEndpointAmplitude, ZeroCollectiveFrequency
from .model import PAULI
from .units import MHZ

#: Smallest admissible energy denominator, in MHz.
POLE_GUARD_MHZ = 1.0

RATE_NAMES = ("ix", "iy", "zx", "zy", "zi", "iz", "zz")


def _factors(D, a, b):
    """Linear energy denominators (any consistent unit) keyed by name."""
    return {
        "D": D,
        "D+a": D + a,
        "2D+a": 2 * D + a,
        "D+2a": D + 2 * a,
        "2D+3a": 2 * D + 3 * a,
        "D-b": D - b,
        "D+a-b": D + a - b,
        "a": a,
        "b": b,
    }


# Each entry: name -> (denominator factors used, function of (D, a, b)).
# Arguments are angular detuning D and anharmonicities a (control), b (target).
_COEFFS = {
    "zi2_1": (("D", "D+a"), lambda D, a, b: 1 / (2 * (D + a)) - 1 / (2 * D)),
    "zi2_2": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  -1 / (4 * a * D ** 2) + 1 / (a * (a + D) ** 2) - 3 / (4 * a * (2 * a + D) ** 2)
                  + 1 / (a ** 2 * D) - 2 / (a ** 2 * (a + D)) - 3 / (a ** 2 * (2 * a + D))
                  - 4 / (a ** 2 * (a + 2 * D)) + 12 / (a ** 2 * (3 * a + 2 * D))
                  + 1 / (b * (a + D - b) ** 2) - 1 / (a * b * (D - b))
                  + 1 / (a * b * (a + D - b)))),
    "zi2_3": (("D", "D+a", "b"), lambda D, a, b: a / (2 * D * b * (a + D))),
    "zi2_4": (("D", "D+a"), lambda D, a, b: 1 / (2 * D ** 2) - 1 / (2 * (D + a) ** 2)),
    "zi2_5": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  6 / (a ** 3 * (a + D)) - 9 / (2 * a ** 3 * (2 * a + D))
                  - 1 / (2 * a ** 2 * (a + D) ** 2) - 3 / (4 * a ** 2 * (2 * a + D) ** 2)
                  + 4 / (a ** 2 * (a + 2 * D) ** 2) - 12 / (a ** 2 * (3 * a + 2 * D) ** 2)
                  - 3 / (2 * a ** 3 * D) + 1 / (4 * a ** 2 * D ** 2) + 1 / (a * b ** 2 * (D - b))
                  - 1 / (a * b ** 2 * (a + D - b)) - 1 / (b ** 2 * (a + D - b) ** 2))),
    "zi2_6": (("D", "D+a", "b"),
              lambda D, a, b: -(a ** 2 * D + a * D ** 2 + 2 * a * D * b + a ** 2 * b)
              / (2 * D ** 2 * b ** 2 * (a + D) ** 2)),
    "iz2_1": ((), lambda D, a, b: 0.0),
    "iz2_2": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  1 / (4 * a * D ** 2) + 1 / (2 * a * (a + D) ** 2) - 3 / (4 * a * (2 * a + D) ** 2)
                  - 1 / (a ** 2 * D) - 4 / (a ** 2 * (a + D)) - 3 / (a ** 2 * (2 * a + D))
                  + 4 / (a ** 2 * (a + 2 * D)) + 12 / (a ** 2 * (3 * a + 2 * D))
                  + 1 / (b * (a + D - b) ** 2) - 1 / (a * b * (D - b))
                  + 1 / (a * b * (a + D - b)) + 1 / (2 * b * (D - b) ** 2))),
    "iz2_3": (("D+a", "b"), lambda D, a, b: -(D + a + b) / (2 * b * (a + D) ** 2)),
    "iz2_4": ((), lambda D, a, b: 0.0),
    "iz2_5": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  3 / (a ** 3 * (a + D)) - 9 / (2 * a ** 3 * (2 * a + D))
                  - 1 / (a ** 2 * (a + D) ** 2) - 3 / (4 * a ** 2 * (2 * a + D) ** 2)
                  - 4 / (a ** 2 * (a + 2 * D) ** 2) - 12 / (a ** 2 * (3 * a + 2 * D) ** 2)
                  + 3 / (2 * a ** 3 * D) - 1 / (4 * a ** 2 * D ** 2) + 1 / (a * b ** 2 * (D - b))
                  - 1 / (a * b ** 2 * (a + D - b)) - 1 / (2 * b ** 2 * (D - b) ** 2)
                  - 1 / (b ** 2 * (a + D - b) ** 2))),
    "iz2_6": (("D+a", "b"),
              lambda D, a, b: (a ** 2 + 2 * a * D + a * b + D ** 2 + D * b + b ** 2)
              / (2 * b ** 2 * (a + D) ** 3)),
    "zz2_1": ((), lambda D, a, b: 0.0),
    "zz2_2": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  1 / (4 * a * D ** 2) - 1 / (a * (a + D) ** 2) + 3 / (4 * a * (2 * a + D) ** 2)
                  - 1 / (a ** 2 * D) + 2 / (a ** 2 * (a + D)) + 3 / (a ** 2 * (2 * a + D))
                  + 4 / (a ** 2 * (a + 2 * D)) - 12 / (a ** 2 * (3 * a + 2 * D))
                  - 1 / (b * (a + D - b) ** 2) + 1 / (a * b * (D - b))
                  - 1 / (a * b * (a + D - b)))),
    "zz2_3": (("D", "D+a", "b"),
              lambda D, a, b: -(a ** 2 * D + a * D ** 2 + 2 * a * D * b + a ** 2 * b)
              / (2 * D ** 2 * b * (a + D) ** 2)),
    "zz2_4": ((), lambda D, a, b: 0.0),
    "zz2_5": (("D", "D+a", "D+2a", "2D+a", "2D+3a", "D+a-b", "D-b", "a", "b"),
              lambda D, a, b: (
                  -6 / (a ** 3 * (a + D)) + 9 / (2 * a ** 3 * (2 * a + D))
                  + 1 / (2 * a ** 2 * (a + D) ** 2) + 3 / (4 * a ** 2 * (2 * a + D) ** 2)
                  - 4 / (a ** 2 * (a + 2 * D) ** 2) + 12 / (a ** 2 * (3 * a + 2 * D) ** 2)
                  + 3 / (2 * a ** 3 * D) - 1 / (4 * a ** 2 * D ** 2) - 1 / (a * b ** 2 * (D - b))
                  + 1 / (a * b ** 2 * (a + D - b)) + 1 / (b ** 2 * (a + D - b) ** 2))),
    "zz2_6": (("D", "D+a", "b"),
              lambda D, a, b: (
                  -1 / (2 * (a + D) ** 3) - 1 / (2 * b * (a + D) ** 2) - 1 / (2 * b ** 2 * (a + D))
                  + 1 / (2 * D ** 3) + 1 / (2 * D ** 2 * b) + 1 / (2 * D * b ** 2))),
    "ix3_1": (("D+a", "2D+a", "2D+3a"),
              lambda D, a, b: a * D / ((a + D) ** 3 * (a + 2 * D) * (3 * a + 2 * D))),
    "ix3_2": (("D", "D+a", "2D+a", "2D+3a", "a"),
              lambda D, a, b: (
                  -1 / (a + D) ** 5 + 1 / (2 * a * (a + D) ** 4)
                  + 1 / (12 * a ** 2 * D ** 3) - 5 / (24 * a ** 2 * (a + D) ** 3) - 1 / (3 * a ** 3 * D ** 2)
                  - 71 / (24 * a ** 3 * (a + D) ** 2) + 2 / (3 * a ** 3 * (a + 2 * D) ** 2)
                  - 12 / (a ** 3 * (3 * a + 2 * D) ** 2) + 103 / (8 * a ** 4 * (a + D))
                  + 9 / (8 * a ** 4 * D) - 4 / (a ** 4 * (a + 2 * D)) - 24 / (a ** 4 * (3 * a + 2 * D)))),
    "ix3_3": (("D", "D+a", "2D+a"),
              lambda D, a, b: a * (4 * a + 7 * D) / (24 * D ** 2 * (a + D) ** 3 * (a + 2 * D) ** 2)),
    "zx3_1": (("D", "D+a", "2D+a", "2D+3a"),
              lambda D, a, b: a ** 2 * (3 * a ** 3 + 11 * a ** 2 * D + 15 * a * D ** 2 + 9 * D ** 3)
              / (2 * D ** 3 * (a + D) ** 3 * (a + 2 * D) * (3 * a + 2 * D))),
    "zx3_2": (("D", "D+a", "2D+a", "2D+3a", "a"),
              lambda D, a, b: (
                  1 / (a + D) ** 5 + 1 / (2 * a * D ** 4) - 1 / (2 * a * (a + D) ** 4)
                  - 1 / (2 * a ** 2 * D ** 3) + 3 / (8 * a ** 2 * (a + D) ** 3) + 1 / (4 * a ** 3 * D ** 2)
                  + 29 / (8 * a ** 3 * (a + D) ** 2) - 2 / (a ** 3 * (a + 2 * D) ** 2)
                  + 12 / (a ** 3 * (3 * a + 2 * D) ** 2) + 5 / (8 * a ** 4 * D) - 85 / (8 * a ** 4 * (a + D))
                  - 4 / (a ** 4 * (a + 2 * D)) + 24 / (a ** 4 * (3 * a + 2 * D)) - 1 / (2 * D ** 5))),
    "zx3_3": (("D", "D+a", "2D+a"),
              lambda D, a, b: -a * (2 * a ** 2 + 8 * a * D + 7 * D ** 2)
              / (8 * D ** 3 * (a + D) ** 3 * (a + 2 * D) ** 2)),
    "zi4": (("D", "D+a", "2D+a", "2D+3a"),
            lambda D, a, b: (3 * a ** 5 + 11 * a ** 4 * D + 15 * a ** 3 * D ** 2 + 9 * a ** 2 * D ** 3)
            / (8 * D ** 3 * (a + D) ** 3 * (a + 2 * D) * (3 * a + 2 * D))),
}

COEFFICIENT_NAMES = tuple(_COEFFS)


def _check_poles(name, factor_names, factors_mhz):
    for key in factor_names:
        if abs(factors_mhz[key]) < POLE_GUARD_MHZ:
            raise NearPole(name, key)


def coefficient(p, name):
    """Evaluate one named energy-denominator coefficient in angular units.

    Names are ``zi2_1`` ... ``zz2_6``, ``ix3_1`` ... ``zx3_3`` and ``zi4``.

    Raises
    ------
    NearPole
        If one of the linear denominators it uses is within 1 MHz of zero.
    """
    factor_names, fn = _COEFFS[name]
    _check_poles(name, factor_names, _factors(p.delta_ct, p.alpha_c, p.alpha_t))
    return fn(MHZ * p.delta_ct, MHZ * p.alpha_c, MHZ * p.alpha_t)


def all_coefficients(p):
    """Dictionary of every coefficient (angular units)."""
    return {name: coefficient(p, name) for name in COEFFICIENT_NAMES}


def static_zz0(p):
    """Lowest-order static ZZ rate ``J**2 (1/(D - a_t) - 1/(D + a_c))`` in rad/ns.

    The spectroscopic shift ``E11 - E10 - E01 + E00`` equals twice this value.
    """
    _check_poles("zz0", ("D-b", "D+a"), _factors(p.delta_ct, p.alpha_c, p.alpha_t))
    D, a, b = MHZ * p.delta_ct, MHZ * p.alpha_c, MHZ * p.alpha_t
    j = MHZ * p.J
    return j ** 2 * (1 / (D - b) - 1 / (D + a))


@dataclass(frozen=True)
class EffectiveRates:
    """The seven block-diagonal rates (rad/ns).

    ``order_mask`` lists the perturbative orders summed into the values.
    """

    w_ix: float = 0.0
    w_iy: float = 0.0
    w_zx: float = 0.0
    w_zy: float = 0.0
    w_zi: float = 0.0
    w_iz: float = 0.0
    w_zz: float = 0.0
    order_mask: tuple = field(default=(), compare=False)

    def as_dict(self, unit="angular"):
        scale = 1.0 if unit == "angular" else 1.0 / MHZ
        return {f.name: getattr(self, f.name) * scale for f in fields(self)
                if f.name.startswith("w_")}


def rates_up_to_order(p, omega_c, omega_t=0.0, d_omega_c=0.0, d_omega_t=0.0,
                      max_order=4):
    """Sum the closed-form rates through ``max_order`` at one instant.

    Parameters
    ----------
    p : DeviceParams
    omega_c, omega_t : complex
        Control and target envelopes, MHz.  Real part is the X quadrature.
    d_omega_c, d_omega_t : complex
        Their time derivatives, MHz/ns.  ``d_omega_t`` is accepted for
        symmetry; no retained term depends on it.
    max_order : int
        0 to 4.

    Returns
    -------
    EffectiveRates
    """
    if not 0 <= max_order <= 4:
        raise ValueError("max_order must be between 0 and 4")
    j = MHZ * p.J
    D, a = MHZ * p.delta_ct, MHZ * p.alpha_c
    cx, cy = MHZ * np.real(omega_c), MHZ * np.imag(omega_c)
    tx, ty = MHZ * np.real(omega_t), MHZ * np.imag(omega_t)
    dcx, dcy = MHZ * np.real(d_omega_c), MHZ * np.imag(d_omega_c)
    out = dict.fromkeys(RATE_NAMES, 0.0)

    out["zz"] = static_zz0(p)
    if max_order >= 1:
        _check_poles("first_order", ("D", "D+a"), _factors(p.delta_ct, p.alpha_c, p.alpha_t))
        out["ix"] = tx - j / (D + a) * cx
        out["iy"] = ty - j / (D + a) * cy
        out["zx"] = (j / (D + a) - j / D) * cx
        out["zy"] = (j / (D + a) - j / D) * cy
    if max_order >= 2:
        power = cx ** 2 + cy ** 2
        monomials = (
            power,
            j ** 2 * power,
            j * (tx * cx + ty * cy),
            cx * dcy - cy * dcx,
            j ** 2 * (cx * dcy - cy * dcx),
            j * (tx * dcy - ty * dcx),
        )
        for rate in ("zi", "iz", "zz"):
            for k, mono in enumerate(monomials, start=1):
                c = coefficient(p, f"{rate}2_{k}")
                if c:
                    out[rate] = out[rate] + c * mono
    if max_order >= 3:
        power = cx ** 2 + cy ** 2
        c = {name: coefficient(p, name) for name in
             ("ix3_1", "ix3_2", "ix3_3", "zx3_1", "zx3_2", "zx3_3")}
        for rate in ("ix", "zx"):
            c1, c2, c3 = c[f"{rate}3_1"], c[f"{rate}3_2"], c[f"{rate}3_3"]
            out[rate] = out[rate] + j * cx * (c1 * power + c2 * dcx ** 2 + c3 * dcy ** 2)
            # quadrature partner: x and y swap roles
            partner = rate[0] + "y"
            out[partner] = out[partner] + j * cy * (c1 * power + c2 * dcy ** 2 + c3 * dcx ** 2)
    if max_order >= 4:
        out["zi"] = out["zi"] + coefficient(p, "zi4") * (cx ** 2 + cy ** 2) ** 2
    return EffectiveRates(**{f"w_{k}": v for k, v in out.items()},
                          order_mask=tuple(range(max_order + 1)))


@dataclass(frozen=True)
class CollectiveFrequencies:
    w_plus: float
    w_minus: float


def collective_frequencies(r):
    """Rotation frequencies of the control-0 (``w_plus``) and control-1 (``w_minus``) blocks."""
    w_plus = math.sqrt((r.w_ix + r.w_zx) ** 2 + (r.w_iy + r.w_zy) ** 2 + (r.w_iz + r.w_zz) ** 2)
    w_minus = math.sqrt((r.w_ix - r.w_zx) ** 2 + (r.w_iy - r.w_zy) ** 2 + (r.w_iz - r.w_zz) ** 2)
    return CollectiveFrequencies(w_plus, w_minus)


def _sin_over(w, t):
    """``sin(w t / 2) / w`` with the small-``w`` limit ``t / 2``."""
    return 0.5 * t * np.sinc(w * t / (2 * np.pi))


def _check_finite(r):
    values = [getattr(r, f"w_{k}") for k in RATE_NAMES]
    if not all(math.isfinite(v) for v in values):
        raise ZeroCollectiveFrequency("rates contain non-finite values")


def effective_unitary(r, t):
    """Block-diagonal 4x4 gate for constant rates over duration ``t`` (ns).

    Basis order is ``00, 01, 10, 11`` (control first).
    """
    _check_finite(r)
    cf = collective_frequencies(r)
    u = np.zeros((4, 4), dtype=complex)
    for block, sign, w, zi_phase in ((0, 1, cf.w_plus, np.exp(-0.5j * r.w_zi * t)),
                                     (2, -1, cf.w_minus, np.exp(0.5j * r.w_zi * t))):
        x = r.w_ix + sign * r.w_zx
        y = r.w_iy + sign * r.w_zy
        z = r.w_iz + sign * r.w_zz
        c = math.cos(0.5 * w * t)
        s = _sin_over(w, t)
        u[block, block] = zi_phase * (c - 1j * z * s)
        u[block, block + 1] = -zi_phase * (1j * x + y) * s
        u[block + 1, block] = -zi_phase * (1j * x - y) * s
        u[block + 1, block + 1] = zi_phase * (c + 1j * z * s)
    return u


def effective_unitary_pauli(r, t):
    """Pauli coefficients ``Tr(sigma_m (x) sigma_n U) / 4`` of :func:`effective_unitary`.

    Uses the closed forms; keys are two-letter labels such as ``"zx"``.
    """
    _check_finite(r)
    cf = collective_frequencies(r)
    ep, em = np.exp(-0.5j * r.w_zi * t), np.exp(0.5j * r.w_zi * t)
    cp, cm = math.cos(0.5 * cf.w_plus * t), math.cos(0.5 * cf.w_minus * t)
    sp, sm = _sin_over(cf.w_plus, t), _sin_over(cf.w_minus, t)
    out = {"ii": 0.5 * (em * cm + ep * cp), "zi": 0.5 * (ep * cp - em * cm)}
    pairs = {"x": (r.w_ix, r.w_zx), "y": (r.w_iy, r.w_zy), "z": (r.w_iz, r.w_zz)}
    for k, (wi, wz) in pairs.items():
        minus = 0.5 * (wi - wz) * em * sm
        plus = 0.5 * (wi + wz) * ep * sp
        out["i" + k] = -1j * (minus + plus)
        out["z" + k] = 1j * (minus - plus)
    for m in "xy":
        for n in "ixyz":
            out[m + n] = 0j
    return out


def pauli_decompose(u):
    """Numerical ``Tr(sigma_m (x) sigma_n U) / 4`` for a 4x4 matrix."""
    return {m + n: np.trace(np.kron(PAULI[m], PAULI[n]) @ u) / 4
            for m in "ixyz" for n in "ixyz"}


def nonbd_elements(r, pulse, p, endpoint_tol=1e-9):
    """Leading off-block (control-flip) Pauli elements of the gate at ``tau_p``.

    Built from the endpoint slopes of the control envelope, the qubit-qubit
    detuning and the plateau rates ``r``.  Returns a dict keyed
    ``xi, xx, xy, xz, yi, yx, yy, yz``.

    Raises
    ------
    NonzeroEndpointAmplitude
        If the control envelope does not vanish at both ends.
    """
    tau = float(pulse.tau_p)
    scale = max(1.0, float(np.max(np.abs(pulse(np.linspace(0, tau, 65))))))
    if abs(pulse(0.0)) > endpoint_tol * scale or abs(pulse(tau)) > endpoint_tol * scale:
        raise NonzeroEndpointAmplitude("control envelope must vanish at 0 and tau_p")
    D = MHZ * p.delta_ct
    d0 = MHZ * complex(pulse.derivative(0.0))
    d1 = MHZ * complex(pulse.derivative(tau))
    cf = collective_frequencies(r)
    ph_m = np.exp(0.5j * r.w_zi * tau)
    ph_p = np.exp(-0.5j * r.w_zi * tau)
    rot = np.exp(1j * D * tau)
    # endpoint slope combinations, conjugated (control-1 side) and plain
    diff_conj = np.conj(d0) - np.conj(rot) * np.conj(d1)
    diff = d0 - rot * d1
    summ_conj = np.conj(d0) + np.conj(rot) * np.conj(d1)
    summ = d0 + rot * d1
    den = 4 * D ** 2
    cm, cp = math.cos(0.5 * cf.w_minus * tau), math.cos(0.5 * cf.w_plus * tau)
    sm, sp = _sin_over(cf.w_minus, tau), _sin_over(cf.w_plus, tau)
    out = {
        "xi": 1j * diff_conj / den * ph_m * cm + 1j * diff / den * ph_p * cp,
        "yi": summ_conj / den * ph_m * cm - summ / den * ph_p * cp,
    }
    pairs = {"x": (r.w_ix, r.w_zx), "y": (r.w_iy, r.w_zy), "z": (r.w_iz, r.w_zz)}
    for k, (wi, wz) in pairs.items():
        out["x" + k] = ((wi - wz) * diff_conj / den * ph_m * sm
                        + (wi + wz) * diff / den * ph_p * sp)
        out["y" + k] = (-1j * (wi - wz) * summ_conj / den * ph_m * sm
                        + 1j * (wi + wz) * summ / den * ph_p * sp)
    return {k: out[k] for k in ("xi", "xx", "xy", "xz", "yi", "yx", "yy", "yz")}
