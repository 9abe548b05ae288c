"""Direct-CNOT calibration: target cancellation tone, pi-rotation amplitude, refinement."""

from dataclasses import dataclass, replace
import math
import warnings

import numpy as np
from scipy import optimize

from .errors import DidNotConverge, NearPole, NoRootInBracket
from .metrics import cnot_error
from .model import build_static_hamiltonian, dressed_basis
from .propagator import MagnusConfig, propagate
from .pulses import DragEnvelope, SquareGaussian, ToneEnvelope, reduced_ramp_area
from .rates import coefficient
from .units import MHZ

#: Largest control amplitude the pi-condition solver will consider, MHz.
DEFAULT_OMEGA_MAX = 200.0


def tone_coefficients(p):
    """``(linear, cubic)`` so that ``tone = linear * x + cubic * x**3`` for ``x`` in MHz.

    ``cubic`` is in 1/MHz**2.

    Raises
    ------
    NearPole
        If the detuning or ``2*delta + alpha_c`` is within 1 MHz of zero.
    """
    D, a, J = p.delta_ct, p.alpha_c, p.J
    if abs(D) < 1.0:
        raise NearPole("tone_linear", "D")
    if abs(2 * D + a) < 1.0:
        raise NearPole("tone_cubic", "2D+a")
    return J / D, -a * J / (2 * D ** 3 * (2 * D + a))


def cancellation_tone(p, omega_cx):
    """Target X-quadrature amplitude (MHz) that nulls the control-0 rotation."""
    lin, cub = tone_coefficients(p)
    x = np.asarray(omega_cx, dtype=float)
    return lin * x + cub * x ** 3


def pi_condition_coefficients(p):
    """Angular coefficients ``(a, b)`` of the rotation ``a W L1 - b W**3 L3``.

    ``W`` is the control amplitude in rad/ns and ``L_n = tau_p - s_n`` the
    effective lengths in ns.
    """
    D, al, J = MHZ * p.delta_ct, MHZ * p.alpha_c, MHZ * p.J
    if abs(p.delta_ct) < 1.0 or abs(p.delta_ct + p.alpha_c) < 1.0:
        raise NearPole("pi_linear", "D" if abs(p.delta_ct) < 1.0 else "D+a")
    a = 2 * al * J / (D * (D + al))
    b = 2 * J * coefficient(p, "zx3_1")
    return a, b


def rotation_angle(p, amp, l1, l3):
    """Control-1 rotation angle predicted for plateau amplitude ``amp`` (MHz)."""
    a, b = pi_condition_coefficients(p)
    w = MHZ * amp
    return a * w * l1 - b * w ** 3 * l3


@dataclass(frozen=True)
class CalibrationResult:
    """Calibrated direct-CNOT drive.

    Attributes
    ----------
    omega_cx_amp : float
        Plateau amplitude of the control drive, MHz (before ``amp_scale``).
    target_tone_coeffs : tuple
        ``(linear, cubic)`` tone map, cubic in 1/MHz**2.
    residual_ix_plus_zx : float
        ``P(00->01) + 1 - P(10->11)`` after refinement; ``nan`` when not simulated.
    method : str
        ``"perturbative"`` or ``"refined"``.
    """

    omega_cx_amp: float
    target_tone_coeffs: tuple
    tau_p: float
    tau_r: float
    sigma_r: float
    residual_ix_plus_zx: float = float("nan")
    method: str = "perturbative"
    tone_scale: float = 1.0
    amp_scale: float = 1.0
    converged: bool = True

    @property
    def amplitude(self):
        return self.omega_cx_amp * self.amp_scale

    def base_pulse(self):
        return SquareGaussian(self.amplitude, self.tau_p, self.tau_r, self.sigma_r)

    def envelopes(self, inv_delta_d=0.0):
        """``(control, target)`` envelopes, optionally with DRAG (``1/delta_d`` in 1/MHz)."""
        control = DragEnvelope.from_inverse(self.base_pulse(), inv_delta_d)
        lin, cub = self.target_tone_coeffs
        target = ToneEnvelope(control, lin, cub, self.tone_scale)
        return control, target

    def to_dict(self):
        return {
            "omega_cx_amp_mhz": self.omega_cx_amp,
            "amp_scale": self.amp_scale,
            "tone_scale": self.tone_scale,
            "tone_linear": self.target_tone_coeffs[0],
            "tone_cubic_per_mhz2": self.target_tone_coeffs[1],
            "tau_p_ns": self.tau_p,
            "tau_r_ns": self.tau_r,
            "sigma_r_ns": self.sigma_r,
            "residual_ix_plus_zx": self.residual_ix_plus_zx,
            "method": self.method,
            "converged": self.converged,
        }


def solve_pi_condition(p, template, omega_max=DEFAULT_OMEGA_MAX):
    """Smallest positive amplitude (MHz) whose predicted rotation is a pi flip.

    ``template`` supplies ``tau_p``, ``tau_r`` and ``sigma_r``; its amplitude
    is ignored.  The cubic correction bends the rotation curve over, so the
    search stops at its turning point.

    Raises
    ------
    NoRootInBracket
        If no amplitude in ``(0, omega_max]`` reaches the pi rotation.
    """
    unit = template.with_amp(1.0)
    l1 = template.tau_p - reduced_ramp_area(unit, 1)
    l3 = template.tau_p - reduced_ramp_area(unit, 3)
    a, b = pi_condition_coefficients(p)
    target = math.copysign(math.pi, a)

    def f(w):
        return a * w * l1 - b * w ** 3 * l3 - target

    def df(w):
        return a * l1 - 3 * b * w ** 2 * l3

    hi = MHZ * omega_max
    if b * a > 0:
        hi = min(hi, math.sqrt(a * l1 / (3 * b * l3)))
    if f(hi) * math.copysign(1.0, a) < 0:
        raise NoRootInBracket(
            f"no pi rotation below {hi / MHZ:.4g} MHz for tau_p={template.tau_p} ns"
        )
    root = optimize.brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    for _ in range(5):
        step = f(root) / df(root)
        root -= step
        if abs(f(root)) < 1e-12 * math.pi:
            break
    return root / MHZ


def solve_gate_time(p, amp, tau_r, sigma_r=None):
    """Gate time (ns) for which a plateau amplitude ``amp`` gives the pi rotation.

    Raises
    ------
    NoRootInBracket
        For zero amplitude or when the required time is shorter than the ramps.
    """
    if amp == 0:
        raise NoRootInBracket("zero amplitude cannot produce a rotation")
    sigma_r = sigma_r if sigma_r is not None else 0.5 * tau_r
    unit = SquareGaussian(1.0, 2 * tau_r, tau_r, sigma_r)
    s1, s3 = reduced_ramp_area(unit, 1), reduced_ramp_area(unit, 3)
    a, b = pi_condition_coefficients(p)
    w = MHZ * amp
    slope = a * w - b * w ** 3
    if slope == 0:
        raise NoRootInBracket("rotation does not grow with gate time")
    target = math.copysign(math.pi, slope)
    tau_p = (target + a * w * s1 - b * w ** 3 * s3) / slope
    if not tau_p >= 2 * tau_r:
        raise NoRootInBracket(f"required gate time {tau_p:.4g} ns is shorter than the ramps")
    return tau_p


def calibrate_perturbative(p, tau_p, tau_r, sigma_r=None, amp=None):
    """Perturbative direct-CNOT drive for a flat-top pulse.

    When ``amp`` is given it is used as is instead of solving the pi condition.
    """
    template = SquareGaussian(1.0, tau_p, tau_r, sigma_r)
    if amp is None:
        amp = solve_pi_condition(p, template)
    return CalibrationResult(
        omega_cx_amp=float(amp),
        target_tone_coeffs=tone_coefficients(p),
        tau_p=template.tau_p,
        tau_r=template.tau_r,
        sigma_r=template.sigma_r,
    )


def refine_numeric(p, initial, cfg=None, inv_delta_d=0.0, max_iter=50, tol=1e-8,
                   step=0.02, min_step=1e-6, objective=None):
    """Coordinate search over (tone scale, amplitude scale) against simulation.

    Minimises ``P(00->01) + 1 - P(10->11)``.  Each coordinate move probes
    ``+-step`` and jumps to the vertex of the parabola through the three
    samples.  A trial point is accepted only when it lowers the objective,
    so the result is never worse than the input.  The search stops when a
    full sweep improves by less than ``tol``, when both steps fall below
    ``min_step``, or after ``max_iter`` sweeps; the last case emits
    :class:`DidNotConverge` and clears ``converged``.
    """
    cfg = cfg or MagnusConfig(dt=0.05)
    if objective is None:
        basis = dressed_basis(build_static_hamiltonian(p), p.levels)

        def objective(cal):
            c, t = cal.envelopes(inv_delta_d)
            return cnot_error(propagate(p, c, t, cfg), basis)

    best = initial
    best_eps = objective(best)
    steps = {"tone_scale": step, "amp_scale": step}
    converged = False
    for _ in range(max_iter):
        start_eps = best_eps
        for name, h in steps.items():
            x0 = getattr(best, name)
            probes = {}
            for direction in (-1.0, 1.0):
                trial = replace(best, **{name: x0 * (1 + direction * h)})
                probes[direction] = (trial, objective(trial))
            e_lo, e_hi = probes[-1.0][1], probes[1.0][1]
            curvature = e_lo + e_hi - 2 * best_eps
            candidates = [probes[-1.0], probes[1.0]]
            if curvature > 0:
                shift = 0.5 * h * (e_lo - e_hi) / curvature
                shift = float(np.clip(shift, -4 * h, 4 * h))
                trial = replace(best, **{name: x0 * (1 + shift)})
                candidates.append((trial, objective(trial)))
                new_h = min(max(abs(shift), 0.25 * h), 2 * h)
            else:
                new_h = 2 * h
            trial, eps = min(candidates, key=lambda c: c[1])
            if eps < best_eps:
                best, best_eps = trial, eps
            else:
                new_h = 0.5 * h
            steps[name] = new_h
        if start_eps - best_eps < tol or max(steps.values()) < min_step:
            converged = True
            break
    if not converged:
        warnings.warn(f"refinement stopped after {max_iter} iterations", DidNotConverge)
    return replace(best, residual_ix_plus_zx=float(best_eps), method="refined",
                   converged=converged)
