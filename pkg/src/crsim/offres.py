"""Off-resonant transition estimators for the control qubit.

Leading-order probabilities for a transmon ladder driven off resonance:

* type 1, ``|0> -> |1>``: ``(1/4) |int Omega(t) exp(i D t) dt|**2``
* type 2, ``|0> -> |2>``: ``(1/32) |int dt' int^t' dt'' Omega Omega [...]|**2``
* type 3, ``|1> -> |2>``: ``(1/2) |int Omega(t) exp(i (D + a) t) dt|**2``

Detunings are angular (rad/ns); pulse envelopes are in MHz as everywhere
else in the package and are converted internally.  Every estimator is
available as a time-domain quadrature and as a frequency-domain integral
over the pulse spectrum, the latter serving as an independent cross-check.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate, interpolate

from .errors import NearPole, WindowTooNarrow, ZeroDragParameter
from .pulses import DragEnvelope, SquareGaussian, spectrum
from .units import MHZ

KINDS = ("type1", "type2", "type3")
_PREFACTOR = {"type1": 0.25, "type2": 1.0 / 32.0, "type3": 0.5}
_POLE_GUARD = MHZ * 1.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class TransitionSpec:
    """An off-resonant control transition and its detuning(s) in rad/ns.

    ``delta`` is ``(D,)`` for type 1, ``(D, D + a)`` for type 2 and
    ``(D + a,)`` for type 3, with ``D`` the control-drive detuning.
    """

    kind: str
    delta: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        delta = tuple(float(d) for d in np.atleast_1d(self.delta))
        if len(delta) != (2 if self.kind == "type2" else 1):
            raise ValueError(f"{self.kind} needs {2 if self.kind == 'type2' else 1} detuning(s)")
        for name, value in zip(("delta", "delta_plus_alpha"), delta):
            if abs(value) < _POLE_GUARD:
                raise NearPole(self.kind, name)
        if self.kind == "type2" and abs(sum(delta)) < _POLE_GUARD:
            raise NearPole(self.kind, "2D+a")
        object.__setattr__(self, "delta", delta)

    @classmethod
    def for_device(cls, p, kind):
        """Transition of ``p`` with the drive at the bare target frequency."""
        d = MHZ * (p.omega_c - p.omega_d)
        a = MHZ * p.alpha_c
        return cls(kind, {"type1": (d,), "type2": (d, d + a), "type3": (d + a,)}[kind])

    @property
    def poles(self):
        """Angular frequencies where the sideband overlap is resonant."""
        if self.kind == "type2":
            return (-self.delta[0], -self.delta[1], -sum(self.delta))
        return (-self.delta[0],)


@dataclass(frozen=True)
class DragSuggestion:
    """Analytic DRAG parameter (rad/ns); ``heuristic`` marks the two-photon rule."""

    delta_d: float
    heuristic: bool = False

    @property
    def delta_d_mhz(self):
        return self.delta_d / MHZ

    @property
    def inv_delta_d_mhz(self):
        return 1.0 / self.delta_d_mhz


def _clip_pieces(pulse, tau_p):
    tau_p = pulse.tau_p if tau_p is None else float(tau_p)
    out = []
    for t0, t1, value in pulse.pieces():
        t1 = min(t1, tau_p)
        if t1 > t0:
            out.append((t0, t1, value))
    return out, tau_p


def _gl_piece(pulse, t0, t1, x, panels):
    edges = np.linspace(t0, t1, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
    w = (half[:, None] * _GL_WEIGHTS).ravel()
    return np.sum(w * pulse(t) * np.exp(1j * x * t))


def _piece_overlap(pulse, t0, t1, value, x, rtol):
    if value is not None:
        return value * _exp_integral(x, t0, t1)
    panels = max(2, int(math.ceil(abs(x) * (t1 - t0) / math.pi)) + 1)
    prev = _gl_piece(pulse, t0, t1, x, panels)
    for _ in range(16):
        panels *= 2
        cur = _gl_piece(pulse, t0, t1, x, panels)
        if abs(cur - prev) <= rtol * abs(cur) or cur == prev:
            return cur
        prev = cur
    return prev


def _exp_integral(x, t0, t1):
    """``int_t0^t1 exp(i x t) dt`` without cancellation near ``x = 0``."""
    length = t1 - t0
    return length * np.exp(0.5j * x * (t0 + t1)) * np.sinc(x * length / (2 * np.pi))


def overlap_integral(pulse, x, tau_p=None, rtol=1e-8):
    """``int_0^tau_p Omega(t) exp(i x t) dt`` with ``Omega`` in rad/ns.

    Smooth pieces use Gauss-Legendre panels refined until each piece is
    stable to a small fraction of ``rtol``; flat pieces are exact.
    """
    pieces, _ = _clip_pieces(pulse, tau_p)
    total = 0j
    for t0, t1, value in pieces:
        total += _piece_overlap(pulse, t0, t1, value, x, 1e-3 * rtol)
    return MHZ * total


def p_type1_time(pulse, delta, tau_p=None):
    """Type-1 (``|0> -> |1>``) probability from the time-domain overlap."""
    return 0.25 * abs(overlap_integral(pulse, delta, tau_p)) ** 2


def p_type3_time(pulse, delta_plus_alpha, tau_p=None):
    """Type-3 (``|1> -> |2>``) probability from the time-domain overlap."""
    return 0.5 * abs(overlap_integral(pulse, delta_plus_alpha, tau_p)) ** 2


def _cumulative_overlap(pulse, x, pieces, tau_p, spacing):
    """Hermite spline of ``t -> int_0^t Omega exp(i x t') dt'`` (rad/ns units)."""
    knots = [np.array([0.0])]
    for t0, t1, _ in pieces:
        n = max(2, int(math.ceil((t1 - t0) / spacing)))
        knots.append(np.linspace(t0, t1, n + 1)[1:])
    knots = np.concatenate(knots)
    a, b = knots[:-1], knots[1:]
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    t = mid[:, None] + half[:, None] * _GL_NODES
    seg = np.sum(half[:, None] * _GL_WEIGHTS * pulse(t) * np.exp(1j * x * t), axis=1)
    values = MHZ * np.concatenate([[0j], np.cumsum(seg)])
    slopes = MHZ * pulse(knots) * np.exp(1j * x * knots)
    # one-sided limits matter where the envelope jumps (DRAG endpoints)
    slopes[0] = MHZ * pulse(0.0)
    slopes[-1] = MHZ * pulse(tau_p) * np.exp(1j * x * tau_p)
    return interpolate.CubicHermiteSpline(knots, values, slopes)


def type2_amplitude(pulse, delta, alpha_c, tau_p=None, rtol=1e-6):
    """Two-time overlap ``int dt' int^t' dt'' Omega(t') Omega(t'') [...]`` (dimensionless).

    The bracket is ``exp(i(D+a)t') exp(iDt'') - exp(iDt') exp(i(D+a)t'')``.
    Inner integrals are tabulated once as cumulative sums and interpolated;
    the outer integral is adaptive.
    """
    pieces, tau_p = _clip_pieces(pulse, tau_p)
    d1, d2 = float(delta), float(delta + alpha_c)
    if alpha_c == 0:
        return 0j
    kmax = max(abs(d1), abs(d2), 1.0 / max(tau_p, 1e-12))
    if isinstance(pulse, (SquareGaussian, DragEnvelope)):
        base = pulse.base if isinstance(pulse, DragEnvelope) else pulse
        kmax = max(kmax, 1.0 / base.sigma_r)
    spacing = min(0.02 / kmax, tau_p / 8)
    inner1 = _cumulative_overlap(pulse, d1, pieces, tau_p, spacing)
    inner2 = _cumulative_overlap(pulse, d2, pieces, tau_p, spacing)

    def integrand(t):
        return MHZ * pulse(t) * (np.exp(1j * d2 * t) * inner1(t)
                                 - np.exp(1j * d1 * t) * inner2(t))

    total = 0j
    with warnings.catch_warnings():
        # the two bracket terms cancel to near roundoff on some pieces
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for t0, t1, _ in pieces:
            limit = max(200, int(4 * (t1 - t0) * (abs(d1) + abs(d2)) / math.pi))
            val, _ = integrate.quad(integrand, t0, t1, complex_func=True, epsabs=0.0,
                                    epsrel=0.1 * rtol, limit=limit)
            total += val
    return total


def p_type2_time(pulse, delta, alpha_c, tau_p=None):
    """Type-2 (``|0> -> |2>``) two-photon probability, commutator term only."""
    return abs(type2_amplitude(pulse, delta, alpha_c, tau_p)) ** 2 / 32.0


def type2_product_amplitude(pulse, delta, alpha_c, tau_p=None):
    """Product of the two single-photon overlaps, the term the type-2 estimate drops.

    On the same footing as :func:`type2_amplitude`: the full second-order
    ``|0> -> |2>`` amplitude is ``-(sqrt(2)/8) (type2 + product)``.
    """
    return (overlap_integral(pulse, delta, tau_p)
            * overlap_integral(pulse, delta + alpha_c, tau_p))


# Frequency domain -----------------------------------------------------------

def _bracket(y, tau_p):
    """``E(y) = (exp(i y tau_p) - 1) / (i y)``, regular at ``y = 0``."""
    return _exp_integral(np.asarray(y, dtype=float), 0.0, tau_p)


def _bracket_difference(x, y, tau_p):
    """``(E(x + y) - E(x)) / (i y)`` with the removable ``y -> 0`` limit."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(y) * tau_p < 1e-4
    big = ~small
    out[big] = (_bracket(x[big] + y[big], tau_p) - _bracket(x[big], tau_p)) / (1j * y[big])
    if np.any(small):
        # limit is int_0^tau t exp(i x t) dt, plus the first-order term in y
        xs, ys = x[small], y[small]
        out[small] = _moment(xs, tau_p, 1) + 0.5j * ys * _moment(xs, tau_p, 2)
    return out


def _moment(x, tau_p, k):
    """``int_0^tau t**k exp(i x t) dt`` by 16-point Gauss-Legendre (short, smooth)."""
    nodes, weights = np.polynomial.legendre.leggauss(16)
    t = 0.5 * tau_p * (nodes + 1)
    w = 0.5 * tau_p * weights
    return np.exp(1j * np.outer(x, t)) @ (w * t ** k)


def pulse_bandwidth(pulse):
    """Characteristic spectral width in rad/ns (inverse ramp width)."""
    base = pulse.base if isinstance(pulse, DragEnvelope) else pulse
    if isinstance(base, SquareGaussian):
        return 1.0 / base.sigma_r
    return 2 * np.pi / pulse.tau_p


class _SpectrumCache:
    """Pulse spectrum on Gauss-Legendre panels of width ``pi / tau_p``.

    Panels sit on a fixed lattice anchored at zero so widening the window
    only evaluates the new panels.
    """

    def __init__(self, pulse, tau_p):
        self.pulse = pulse
        self.tau_p = tau_p
        self.panel = math.pi / tau_p
        self._store = {}

    def grid(self, lo, hi):
        first = int(math.floor(lo / self.panel))
        last = int(math.ceil(hi / self.panel))
        missing = [k for k in range(first, last) if k not in self._store]
        if missing:
            mid = (np.asarray(missing, dtype=float) + 0.5) * self.panel
            om = (mid[:, None] + 0.5 * self.panel * _GL8_NODES).ravel()
            vals = spectrum(self.pulse, om).reshape(len(missing), -1)
            for k, row in zip(missing, vals):
                self._store[k] = row
        ks = np.arange(first, last)
        om = ((ks[:, None] + 0.5) * self.panel + 0.5 * self.panel * _GL8_NODES).ravel()
        w = np.tile(0.5 * self.panel * _GL8_WEIGHTS, ks.size)
        vals = np.concatenate([self._store[k] for k in ks])
        return om, w, vals


def _single_freq_amplitude(omega, weights, spec_vals, x, tau_p):
    return MHZ * np.sum(weights * spec_vals * _bracket(omega + x, tau_p)) / (2 * np.pi)


def _type2_freq_amplitude(omega, weights, spec_vals, d1, d2, tau_p, chunk=1024):
    """Double frequency integral with the regular two-photon kernel.

    For ``w'`` (rows) and ``w''`` (columns) the kernel is
    ``[E(s) - E(w'+D+a)] / (i(w''+D)) - [E(s) - E(w'+D)] / (i(w''+D+a))``
    with ``s = w' + w'' + 2D + a``; each bracket vanishes at its own pole.
    Away from the poles it is split into one coupled ``E(s)`` term and two
    separable products; columns sitting on a pole use the regular limit.
    """
    f = weights * spec_vals
    y1, y2 = omega + d1, omega + d2
    near = (np.abs(y1) * tau_p < 1e-3) | (np.abs(y2) * tau_p < 1e-3)
    far = ~near
    g = np.zeros(omega.shape, dtype=complex)
    g[far] = 1 / (1j * y1[far]) - 1 / (1j * y2[far])
    fg = f * g
    # separable parts: -E(w'+D+a)/(i(w''+D)) + E(w'+D)/(i(w''+D+a))
    total = (-(f @ _bracket(omega + d2, tau_p)) * np.sum(f[far] / (1j * y1[far]))
             + (f @ _bracket(omega + d1, tau_p)) * np.sum(f[far] / (1j * y2[far])))
    # coupled part: sum_jk f_j E(s_jk) fg_k with E(s) = (c p_j p_k - 1) / (i s)
    # and p = exp(i w tau); the 1/s matrix is real and applied to two vectors
    phase = np.exp(1j * omega * tau_p)
    c = np.exp(1j * (d1 + d2) * tau_p)
    rhs = np.stack([phase * fg, fg], axis=1)
    s0 = d1 + d2
    for start in range(0, omega.size, chunk):
        rows = slice(start, start + chunk)
        s = omega[rows, None] + omega[None, :] + s0
        small = np.abs(s) * tau_p < 1e-3
        inv = np.divide(1.0, s, out=np.zeros_like(s), where=~small)
        prod = inv @ rhs
        total += f[rows] @ ((c * phase[rows] * prod[:, 0] - prod[:, 1]) / 1j)
        if np.any(small):
            j, k = np.nonzero(small)
            total += np.sum(f[rows][j] * _bracket(s[j, k], tau_p) * fg[k])
    if np.any(near):
        cols = np.flatnonzero(near)
        for start in range(0, omega.size, chunk):
            rows = slice(start, start + chunk)
            wp = omega[rows, None]
            term = (_bracket_difference(wp + d2, y1[None, cols], tau_p)
                    - _bracket_difference(wp + d1, y2[None, cols], tau_p))
            total += f[rows] @ (term @ f[cols])
    return MHZ ** 2 * total / (2 * np.pi) ** 2


def p_freq_domain(pulse, spec, tau_p=None, window=None, rtol=None, max_margin=None):
    """Probability of ``spec`` from the pulse spectrum.

    Parameters
    ----------
    pulse : envelope
    spec : TransitionSpec
    tau_p : float, optional
        Integration horizon; defaults to the pulse duration.
    window : (float, float), optional
        Fixed frequency window in rad/ns.  It must cover every pole and the
        spectral centre by ten bandwidths on each side.
    rtol : float, optional
        Without an explicit window the margin around the poles is doubled
        until successive estimates agree to this tolerance (default 1e-4,
        1e-3 for the quadratic-cost two-photon kernel).
    max_margin : float, optional
        Cap on the automatic margin, rad/ns.

    Raises
    ------
    WindowTooNarrow
        If an explicit ``window`` misses the required coverage.
    """
    tau_p = pulse.tau_p if tau_p is None else float(tau_p)
    if rtol is None:
        rtol = 1e-3 if spec.kind == "type2" else 1e-4
    band = pulse_bandwidth(pulse)
    anchors = np.array(spec.poles + (0.0,))
    need_lo, need_hi = anchors.min() - 10 * band, anchors.max() + 10 * band
    cache = _SpectrumCache(pulse, tau_p)
    if window is not None:
        lo, hi = map(float, window)
        if lo > need_lo or hi < need_hi:
            raise WindowTooNarrow(
                f"window [{lo:.4g}, {hi:.4g}] must cover [{need_lo:.4g}, {need_hi:.4g}] rad/ns"
            )
        return _freq_probability(cache, spec, tau_p, lo, hi)
    margin = 20 * band
    cap = max_margin if max_margin is not None else max(400 * band, 20.0)
    prev = _freq_probability(cache, spec, tau_p, anchors.min() - margin, anchors.max() + margin)
    while margin < cap:
        margin = min(2 * margin, cap)
        cur = _freq_probability(cache, spec, tau_p, anchors.min() - margin,
                                anchors.max() + margin)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def _freq_probability(cache, spec, tau_p, lo, hi):
    omega, weights, vals = cache.grid(lo, hi)
    if spec.kind == "type2":
        d1, d2 = spec.delta
        amp = _type2_freq_amplitude(omega, weights, vals, d1, d2, tau_p)
    else:
        amp = _single_freq_amplitude(omega, weights, vals, spec.delta[0], tau_p)
    return _PREFACTOR[spec.kind] * abs(amp) ** 2


def p_time_domain(pulse, spec, tau_p=None):
    """Time-domain probability of ``spec``; dispatches on its kind."""
    if spec.kind == "type1":
        return p_type1_time(pulse, spec.delta[0], tau_p)
    if spec.kind == "type3":
        return p_type3_time(pulse, spec.delta[0], tau_p)
    d1, d2 = spec.delta
    return p_type2_time(pulse, d1, d2 - d1, tau_p)


def estimate_all(p, pulse, domains=("time", "frequency")):
    """All three probabilities for device ``p`` driven by ``pulse``.

    Returns
    -------
    dict
        ``{kind: {domain: probability}}``.
    """
    out = {}
    for kind in KINDS:
        spec = TransitionSpec.for_device(p, kind)
        row = {}
        if "time" in domains:
            row["time"] = p_time_domain(pulse, spec)
        if "frequency" in domains:
            row["frequency"] = p_freq_domain(pulse, spec)
        out[kind] = row
    return out


def sweep_estimates(p, make_pulse, values, kinds=KINDS):
    """Time-domain estimates along a parameter sweep.

    ``make_pulse(value)`` is the recalibration hook returning the drive for
    each sweep value, so the amplitude can follow the gate condition.
    """
    specs = {k: TransitionSpec.for_device(p, k) for k in kinds}
    rows = []
    for v in values:
        pulse = make_pulse(v)
        rows.append({k: p_time_domain(pulse, s) for k, s in specs.items()})
    return rows


# Structure of the type-1 amplitude ------------------------------------------

def ramp_flat_decomposition(pulse, delta, tau_p=None):
    """Type-1 amplitude ``-(i/2) int Omega exp(i D t)`` split over ramps and plateau.

    Returns
    -------
    (complex, complex, complex)
        ``(ramps, flat, total)`` with ``total`` the sum of the other two.
    """
    base = pulse.base if isinstance(pulse, DragEnvelope) else pulse
    if not isinstance(base, SquareGaussian):
        raise TypeError("ramp_flat_decomposition needs a flat-top Gaussian pulse")
    ramps = flat = 0j
    pieces, _ = _clip_pieces(pulse, tau_p)
    for t0, t1, value in pieces:
        part = -0.5j * MHZ * _piece_overlap(pulse, t0, t1, value, delta, 1e-11)
        if t0 >= base.tau_r and t1 <= base.fall_start:
            flat += part
        else:
            ramps += part
    return ramps, flat, ramps + flat


def _derivative_jumps(pulse, t, n):
    # one-sided limits; the offset stays ~1e3 ulp above the time resolution
    eps = 1e-12 * max(1.0, pulse.tau_p)
    left = pulse.derivative(t - eps, n) if n else pulse(t - eps)
    right = pulse.derivative(t + eps, n) if n else pulse(t + eps)
    return left - right


def adiabatic_series(pulse, delta, n_max, tau_p=None, joins=True):
    """Boundary (adiabatic) expansion of the type-1 amplitude.

    ``-(1/2) sum_{n<=n_max} (1/D) (i/D)**n [Omega^(n)(t) exp(i D t)]_0^tau``,
    using the envelope's analytic derivatives.  With ``joins`` the jumps of
    the derivatives at interior piece boundaries (ramp/plateau) are added,
    which is needed for the series to converge to the exact integral of a
    flat-top pulse.

    Returns
    -------
    complex
        Amplitude whose squared modulus approximates :func:`p_type1_time`.
    """
    pieces, tau_p = _clip_pieces(pulse, tau_p)
    joins_t = sorted({t1 for _, t1, _ in pieces[:-1]}) if joins else []
    total = 0j
    for n in range(int(n_max) + 1):
        coeff = (1.0 / delta) * (1j / delta) ** n
        end = pulse.derivative(tau_p, n) if n else pulse(tau_p)
        start = pulse.derivative(0.0, n) if n else pulse(0.0)
        term = end * np.exp(1j * delta * tau_p) - start
        for tj in joins_t:
            term += _derivative_jumps(pulse, tj, n) * np.exp(1j * delta * tj)
        total += coeff * term
    return -0.5 * MHZ * total


def adiabatic_terms(pulse, delta, n_max, tau_p=None, joins=True):
    """Individual terms of :func:`adiabatic_series` (``n = 0..n_max``)."""
    out = []
    prev = 0j
    for n in range(int(n_max) + 1):
        cur = adiabatic_series(pulse, delta, n, tau_p, joins)
        out.append(cur - prev)
        prev = cur
    return np.array(out)


# DRAG -----------------------------------------------------------------------

def drag_residual_type1(pulse_base, delta_ct, delta_d, tau_p=None):
    """Truncated boundary estimate of type-1 error under Y-DRAG.

    With ``lam = delta_ct / delta_d`` (both rad/ns) and ``S`` the real base
    envelope (vanishing at both ends), the estimate is::

        (1+lam)**2 / (4 D**4) * B(S')  + (1+lam)**2 / (4 D**6) * B(S'')
        + lam**2 / (4 D**8) * B(S''')
        - lam (1+lam) / (2 D**6) * C(S''', S')

    where ``B(f) = f(T)**2 + f(0)**2 - 2 cos(D T) f(T) f(0)`` and
    ``C(f, g) = f(T) g(T) + f(0) g(0) - cos(D T) (f(T) g(0) + f(0) g(T))``.
    ``delta_d = inf`` means no DRAG.

    Raises
    ------
    ZeroDragParameter
        If ``delta_d == 0``.
    """
    if delta_d == 0:
        raise ZeroDragParameter("DRAG parameter must be nonzero")
    T = pulse_base.tau_p if tau_p is None else float(tau_p)
    D = float(delta_ct)
    lam = D / delta_d
    c = math.cos(D * T)

    def ends(n):
        f = pulse_base.real_derivative(np.array([T, 0.0]), n) * MHZ
        return float(f[0]), float(f[1])

    def block(f):
        return f[0] ** 2 + f[1] ** 2 - 2 * c * f[0] * f[1]

    d1, d2, d3 = ends(1), ends(2), ends(3)
    cross = d3[0] * d1[0] + d3[1] * d1[1] - c * (d3[0] * d1[1] + d3[1] * d1[0])
    return ((1 + lam) ** 2 / (4 * D ** 4) * block(d1)
            + (1 + lam) ** 2 / (4 * D ** 6) * block(d2)
            + lam ** 2 / (4 * D ** 8) * block(d3)
            - lam * (1 + lam) / (2 * D ** 6) * cross)


def drag_optimum_analytic(spec):
    """Leading-order DRAG parameter that nulls the given transition.

    Single-photon transitions use ``delta_d = -detuning``; for the two-photon
    ``|0> -> |2>`` line the midpoint ``-(D + a/2)`` is returned as a heuristic.
    """
    if spec.kind == "type2":
        return DragSuggestion(-0.5 * sum(spec.delta), heuristic=True)
    return DragSuggestion(-spec.delta[0])


# Reference model -------------------------------------------------------------

def ladder_hamiltonian(pulse, delta, alpha_c, levels=3):
    """Interaction-frame Hamiltonian ``h(t)`` (rad/ns) of a driven transmon ladder.

    ``<n|H|n-1> = sqrt(n)/2 Omega(t) exp(i (D + (n-1) a) t)``.
    """
    n = np.arange(1, levels)
    amp = np.sqrt(n) / 2
    det = delta + (n - 1) * alpha_c

    def h(t):
        m = np.zeros((levels, levels), dtype=complex)
        vals = MHZ * pulse(t) * amp * np.exp(1j * det * t)
        m[n, n - 1] = vals
        m[n - 1, n] = np.conj(vals)
        return m

    return h
