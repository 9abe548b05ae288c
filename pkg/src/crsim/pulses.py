"""Pulse envelopes: flat-top Gaussian ramps, Y-DRAG, cancellation tones.

All envelopes are in MHz (linear) as functions of time in ns.  They share a
small duck-typed interface used by the propagator and the estimators:

``env(t)``
    complex amplitude, vectorised over ``t``; zero outside ``[0, tau_p]``.
``env.derivative(t, n=1)``
    ``n``-th time derivative in MHz/ns**n.
``env.pieces()``
    list of ``(t0, t1, value)`` covering ``[0, tau_p]`` where ``value`` is a
    constant amplitude or ``None`` for a smoothly varying piece.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate

from .errors import EmptyGrid, ZeroDragParameter
from .units import MHZ


def _as_time(t):
    t = np.asarray(t, dtype=float)
    return t


def _scalarize(out, t):
    return out[()] if np.ndim(t) == 0 else out


class Envelope:
    """Mixin providing the shared spectral and sampling helpers."""

    tau_p: float

    def __call__(self, t):
        raise NotImplementedError

    def derivative(self, t, n=1):
        raise NotImplementedError

    def pieces(self):
        return [(0.0, self.tau_p, None)]

    def sample(self, n=2001):
        t = np.linspace(0.0, self.tau_p, n)
        return t, self(t)


@dataclass(frozen=True)
class ConstantPulse(Envelope):
    """Rectangular pulse of constant (possibly complex) amplitude on ``[0, tau_p]``."""

    amp: complex
    tau_p: float

    def __post_init__(self):
        if not self.tau_p > 0:
            raise ValueError("tau_p must be positive")

    def __call__(self, t):
        t = _as_time(t)
        inside = (t >= 0) & (t <= self.tau_p)
        return _scalarize(np.where(inside, complex(self.amp), 0j), t)

    def derivative(self, t, n=1):
        t = _as_time(t)
        return _scalarize(np.zeros(t.shape, dtype=complex), t)

    def pieces(self):
        return [(0.0, self.tau_p, complex(self.amp))]


@dataclass(frozen=True)
class SquareGaussian(Envelope):
    """Flat-top pulse with truncated Gaussian rise and fall.

    Parameters
    ----------
    amp : float
        Plateau amplitude in MHz.
    tau_p : float
        Total duration in ns.
    tau_r : float
        Rise (and fall) time in ns.
    sigma_r : float, optional
        Gaussian width of the ramps; ``tau_r / 2`` when omitted.

    Notes
    -----
    The ramp is ``amp * (g(t) - g(0)) / (1 - g(0))`` with
    ``g(t) = exp(-(t - tau_r)**2 / (2 sigma_r**2))`` so the envelope starts
    and ends at exactly zero.
    """

    amp: float
    tau_p: float
    tau_r: float
    sigma_r: float = None

    def __post_init__(self):
        if self.sigma_r is None:
            object.__setattr__(self, "sigma_r", 0.5 * self.tau_r)
        for name in ("amp", "tau_p", "tau_r", "sigma_r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))
        if not (0 < 2 * self.tau_r <= self.tau_p):
            raise ValueError(
                f"need 0 < 2*tau_r <= tau_p, got tau_r={self.tau_r}, tau_p={self.tau_p}"
            )
        if not self.sigma_r > 0:
            raise ValueError("sigma_r must be positive")

    @property
    def offset(self):
        return math.exp(-self.tau_r ** 2 / (2 * self.sigma_r ** 2))

    @property
    def fall_start(self):
        return self.tau_p - self.tau_r

    def with_amp(self, amp):
        return SquareGaussian(amp, self.tau_p, self.tau_r, self.sigma_r)

    def _ramp_coordinate(self, t):
        """Scaled distance to the nearest plateau edge and region masks."""
        rise = (t >= 0) & (t < self.tau_r)
        fall = (t > self.fall_start) & (t <= self.tau_p)
        # measured from the nearer end so both endpoints land exactly on the offset
        x = np.where(rise, t - self.tau_r, self.tau_r - (self.tau_p - t)) / self.sigma_r
        return x, rise, fall

    def real(self, t):
        """Real-valued envelope, vectorised."""
        t = _as_time(t)
        x, rise, fall = self._ramp_coordinate(t)
        e0 = self.offset
        ramp = self.amp * (np.exp(-0.5 * x ** 2) - e0) / (1.0 - e0)
        flat = (t >= self.tau_r) & (t <= self.fall_start)
        out = np.where(rise | fall, ramp, 0.0)
        out = np.where(flat, self.amp, out)
        return _scalarize(out, t)

    def __call__(self, t):
        return self.real(t) + 0j

    def real_derivative(self, t, n=1):
        """``n``-th derivative, exactly zero on the plateau and outside the pulse.

        At ``t = 0`` and ``t = tau_p`` the interior one-sided limit is returned.
        """
        if n == 0:
            return self.real(t)
        t = _as_time(t)
        x, rise, fall = self._ramp_coordinate(t)
        coeffs = np.zeros(n + 1)
        coeffs[n] = 1.0
        scale = self.amp / (1.0 - self.offset) * (-1.0 / self.sigma_r) ** n
        ramp = scale * hermite_e.hermeval(x, coeffs) * np.exp(-0.5 * x ** 2)
        out = np.where(rise | fall, ramp, 0.0)
        return _scalarize(out, t)

    def derivative(self, t, n=1):
        return self.real_derivative(t, n) + 0j

    def pieces(self):
        out = [(0.0, self.tau_r, None)]
        if self.fall_start > self.tau_r:
            out.append((self.tau_r, self.fall_start, complex(self.amp)))
        out.append((self.fall_start, self.tau_p, None))
        return out

    def ramp_intervals(self):
        return [(0.0, self.tau_r), (self.fall_start, self.tau_p)]


@dataclass(frozen=True)
class DragEnvelope(Envelope):
    """Flat-top pulse with the scaled derivative added on the quadrature axis.

    ``delta_d`` is in MHz; the quadrature component is
    ``S'(t) / (2 pi 1e-3 delta_d)`` so that both quadratures are in MHz.
    """

    base: SquareGaussian
    delta_d: float = math.inf
    enabled: bool = True

    def __post_init__(self):
        if self.enabled and self.delta_d == 0:
            raise ZeroDragParameter("DRAG parameter must be nonzero")

    @classmethod
    def from_inverse(cls, base, inv_delta_d):
        """Build from ``1/delta_d`` in 1/MHz; zero disables the correction."""
        if inv_delta_d == 0:
            return cls(base, math.inf, enabled=False)
        return cls(base, 1.0 / inv_delta_d, enabled=True)

    @property
    def tau_p(self):
        return self.base.tau_p

    @property
    def inv_delta_d(self):
        return 1.0 / self.delta_d if self.enabled else 0.0

    @property
    def _quad_scale(self):
        return self.inv_delta_d / MHZ

    def __call__(self, t):
        out = self.base.real(t) + 1j * self._quad_scale * self.base.real_derivative(t, 1)
        return out

    def derivative(self, t, n=1):
        return (self.base.real_derivative(t, n)
                + 1j * self._quad_scale * self.base.real_derivative(t, n + 1))

    def pieces(self):
        return self.base.pieces()


@dataclass(frozen=True)
class ToneEnvelope(Envelope):
    """Target tone applied pointwise to the in-phase part of a control envelope.

    ``tone(t) = scale * (linear * x(t) + cubic * x(t)**3)`` with
    ``x = Re control(t)`` in MHz and ``cubic`` in 1/MHz**2.
    """

    control: Envelope
    linear: float
    cubic: float = 0.0
    scale: float = 1.0

    @property
    def tau_p(self):
        return self.control.tau_p

    def __call__(self, t):
        x = np.real(self.control(t))
        return self.scale * (self.linear * x + self.cubic * x ** 3) + 0j

    def derivative(self, t, n=1):
        x = np.real(self.control(t))
        dx = np.real(self.control.derivative(t, 1))
        if n == 1:
            return self.scale * (self.linear + 3 * self.cubic * x ** 2) * dx + 0j
        if n == 2:
            ddx = np.real(self.control.derivative(t, 2))
            return self.scale * ((self.linear + 3 * self.cubic * x ** 2) * ddx
                                 + 6 * self.cubic * x * dx ** 2) + 0j
        raise NotImplementedError("tone derivatives above second order")

    def pieces(self):
        out = []
        for t0, t1, value in self.control.pieces():
            if value is not None:
                x = value.real
                value = complex(self.scale * (self.linear * x + self.cubic * x ** 3))
            out.append((t0, t1, value))
        return out


@dataclass(frozen=True)
class ZeroEnvelope(Envelope):
    tau_p: float

    def __call__(self, t):
        t = _as_time(t)
        return _scalarize(np.zeros(t.shape, dtype=complex), t)

    def derivative(self, t, n=1):
        return self(t)

    def pieces(self):
        return [(0.0, self.tau_p, 0j)]


def evaluate(env, t):
    """Complex envelope value at ``t`` (ns), MHz."""
    return env(t)


def derivative(env, t, n=1):
    """``n``-th time derivative of the envelope, MHz/ns**n."""
    return env.derivative(t, n)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _panel_transform(env, t0, t1, omega, panels):
    edges = np.linspace(t0, t1, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    values = env(t) * w
    return np.exp(-1j * np.outer(omega, t)) @ values


def _flat_transform(value, t0, t1, omega):
    out = np.empty(omega.shape, dtype=complex)
    small = np.abs(omega) * (t1 - t0) < 1e-8
    out[small] = value * (t1 - t0) * np.exp(-1j * omega[small] * 0.5 * (t0 + t1))
    w = omega[~small]
    out[~small] = value * (np.exp(-1j * w * t0) - np.exp(-1j * w * t1)) / (1j * w)
    return out


def spectrum(env, omega_grid, rtol=1e-8):
    """Fourier transform ``int_0^tau_p env(t) exp(-i w t) dt`` on angular frequencies.

    Constant pieces are integrated in closed form; the others use composite
    Gauss-Legendre panels, refined by doubling until successive estimates
    agree to ``rtol`` relative to the pulse area.

    Raises
    ------
    EmptyGrid
        If ``omega_grid`` has no points.
    """
    omega = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    if omega.size == 0:
        raise EmptyGrid("spectrum needs at least one frequency")
    wmax = float(np.max(np.abs(omega)))
    total = np.zeros(omega.shape, dtype=complex)
    scale = 0.0
    for t0, t1, value in env.pieces():
        if t1 <= t0:
            continue
        if value is not None:
            total += _flat_transform(value, t0, t1, omega)
            scale += abs(value) * (t1 - t0)
            continue
        panels = max(2, int(math.ceil(wmax * (t1 - t0) / (4 * np.pi))) + 1)
        prev = _panel_transform(env, t0, t1, omega, panels)
        piece_scale = float(np.max(np.abs(env(np.linspace(t0, t1, 33))))) * (t1 - t0)
        scale += piece_scale
        for _ in range(12):
            panels *= 2
            cur = _panel_transform(env, t0, t1, omega, panels)
            done = np.max(np.abs(cur - prev)) <= rtol * max(piece_scale, 1e-300)
            prev = cur
            if done:
                break
        total += prev
    return total if np.ndim(omega_grid) else total[0]


def reduced_ramp_area(env, n):
    """Area deficit of the ``n``-th power of the normalised pulse over its ramps (ns).

    ``s_n = int_ramps (1 - (S(t)/amp)**n) dt`` so that
    ``int S**n dt = amp**n * (tau_p - s_n)``.
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    base = env.base if isinstance(env, DragEnvelope) else env
    unit = base.with_amp(1.0)
    total = 0.0
    for t0, t1 in unit.ramp_intervals():
        val, _ = integrate.quad(lambda t: 1.0 - unit.real(t) ** n,
                                t0, t1, epsabs=0.0, epsrel=1e-11, limit=200)
        total += val
    return total


def drag_transfer_function(delta_d, omega):
    """Spectral factor ``1 - omega / delta_d`` applied by the DRAG quadrature.

    ``delta_d`` is in MHz and ``omega`` in rad/ns.

    Raises
    ------
    ZeroDragParameter
        If ``delta_d == 0``.
    """
    if delta_d == 0:
        raise ZeroDragParameter("DRAG parameter must be nonzero")
    return 1.0 - np.asarray(omega) / (MHZ * delta_d)
