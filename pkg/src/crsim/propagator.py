"""Second-order Magnus propagation in the interaction frame of the static Hamiltonian.

The drive is written in the eigenbasis of ``H_s`` where the frame rotation is a
diagonal phase, so each Hamiltonian sample costs O(dim**2).  Step unitaries
come from a batched Hermitian eigendecomposition and are multiplied together
with a pairwise tree reduction.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .errors import NotAntiHermitian, StepTooLarge, ToleranceNotReached
from .model import StaticFrame, build_static_hamiltonian, ladder_operators
from .units import MHZ

QUADRATURES = ("gauss2", "midpoint")
_GAUSS_OFFSETS = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)


@dataclass(frozen=True)
class MagnusConfig:
    """Solver settings.

    Parameters
    ----------
    dt : float
        Step size in ns.
    quadrature : str
        ``"gauss2"`` (two-point Gauss-Legendre with commutator correction) or
        ``"midpoint"`` (single sample, no commutator).
    expm_tol : float
        Unitarity tolerance for each step exponential.
    """

    dt: float = 0.01
    quadrature: str = "gauss2"
    expm_tol: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.quadrature not in QUADRATURES:
            raise ValueError(f"quadrature must be one of {QUADRATURES}")
        if not self.expm_tol > 0:
            raise ValueError("expm_tol must be positive")


def _hermitize(h):
    return 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))


def _commutator(a, b):
    return a @ b - b @ a


def magnus_generators(h_fn, t0, t1, quadrature="gauss2"):
    """First two Magnus generators of ``h_fn`` over ``[t0, t1]``.

    Returns Hermitian ``K1 ~ int H`` and ``K2 ~ -(i/2) int int [H(t'), H(t'')]``
    so that the step propagator is ``exp(-i (K1 + K2))``.
    """
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    h = t1 - t0
    if quadrature == "midpoint":
        k1 = h * np.asarray(h_fn(t0 + 0.5 * h))
        return k1, np.zeros_like(k1)
    if quadrature != "gauss2":
        raise ValueError(f"unknown quadrature {quadrature!r}")
    h1 = np.asarray(h_fn(t0 + _GAUSS_OFFSETS[0] * h))
    h2 = np.asarray(h_fn(t0 + _GAUSS_OFFSETS[1] * h))
    k1 = 0.5 * h * (h1 + h2)
    k2 = 1j * (math.sqrt(3) * h * h / 12.0) * _commutator(h1, h2)
    return k1, k2


def _expm_hermitian(k):
    """Batched ``exp(-i K)`` for Hermitian ``K`` via eigendecomposition."""
    w, v = np.linalg.eigh(k)
    return (v * np.exp(-1j * w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _taylor_order(norm, tol):
    """Smallest order whose Taylor remainder bound is below ``tol``."""
    term, m = 1.0, 0
    while True:
        m += 1
        term *= norm / m
        if term * norm / (m + 1) < tol:
            return m


def _expm_small(k, tol):
    """Batched ``exp(-i K)`` by truncated Taylor series with scaling and squaring.

    The order is set from a one-norm bound, so the truncation error of every
    matrix in the batch is below ``tol``.
    """
    norm = float(np.max(np.sum(np.abs(k), axis=-2), initial=0.0))
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = -1j * k / (2 ** squarings)
    order = _taylor_order(norm / 2 ** squarings, tol)
    eye = np.broadcast_to(np.eye(k.shape[-1], dtype=complex), k.shape)
    # Horner evaluation of sum_j a**j / j!
    out = eye + a / order
    for j in range(order - 1, 0, -1):
        out = eye + (a @ out) / j
    for _ in range(squarings):
        out = out @ out
    return out


def matrix_exponential(a, tol=1e-12):
    """Exponential of an anti-Hermitian matrix.

    Raises
    ------
    NotAntiHermitian
        If ``a + a^dagger`` exceeds ``tol`` relative to ``|a|``.
    """
    a = np.asarray(a, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a + np.conj(a.T)), initial=0.0) > tol * scale * 10:
        raise NotAntiHermitian("matrix is not anti-Hermitian")
    return _expm_hermitian(_hermitize(1j * a))


def _tree_product(mats):
    """Time-ordered product ``M[n-1] ... M[1] M[0]`` by pairwise reduction."""
    while len(mats) > 1:
        if len(mats) % 2:
            tail = mats[-1:]
            mats = mats[:-1]
        else:
            tail = None
        mats = mats[1::2] @ mats[0::2]
        if tail is not None:
            mats = np.concatenate([mats, tail])
    return mats[0]


class DriveSampler:
    """Interaction-frame drive evaluated in the static eigenbasis.

    ``sample(t)`` returns a stack of ``H_I(t)`` matrices (rad/ns) expressed in
    the eigenbasis of ``H_s``.
    """

    def __init__(self, p, control_env, target_env):
        self.p = p
        self.frame = StaticFrame(build_static_hamiltonian(p))
        v = self.frame.vectors
        b_c, b_t = ladder_operators(p)
        self.lower_c = v.conj().T @ b_c @ v
        self.lower_t = v.conj().T @ b_t @ v
        e = self.frame.energies
        self.omega_d = MHZ * p.omega_d
        self.freqs = e[:, None] - e[None, :] + self.omega_d
        self.control_env = control_env
        self.target_env = target_env

    def sample(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        oc = np.conj(self.control_env(t)) * (0.5 * MHZ)
        ot = np.conj(self.target_env(t)) * (0.5 * MHZ)
        # e^{i(E_m - E_n + w_d) t} factorises into row and column phases
        rows = np.exp(1j * np.outer(t, self.frame.energies + self.omega_d))
        cols = np.exp(-1j * np.outer(t, self.frame.energies))
        lower = (oc[:, None, None] * self.lower_c + ot[:, None, None] * self.lower_t)
        lower *= rows[:, :, None] * cols[:, None, :]
        return lower + np.conj(np.swapaxes(lower, -1, -2))

    def to_bare(self, u_eig):
        v = self.frame.vectors
        return v @ u_eig @ v.conj().T


def _step_unitaries(sampler, t0, dt, n, quadrature, tol=1e-12):
    starts = t0 + dt * np.arange(n)
    if quadrature == "midpoint":
        k = dt * sampler.sample(starts + 0.5 * dt)
    else:
        h1 = sampler.sample(starts + _GAUSS_OFFSETS[0] * dt)
        h2 = sampler.sample(starts + _GAUSS_OFFSETS[1] * dt)
        k = 0.5 * dt * (h1 + h2) + 1j * (math.sqrt(3) * dt * dt / 12.0) * _commutator(h1, h2)
    k = _hermitize(k)
    bound = np.max(np.sum(np.abs(k), axis=-2), initial=0.0)
    if bound > np.pi:
        # the one-norm only bounds the spectral norm; check the real thing
        norm = np.max(np.abs(np.linalg.eigvalsh(k)))
        if norm > np.pi:
            raise StepTooLarge(f"step generator norm {norm:.3g} exceeds pi; reduce dt")
    return _expm_small(k, tol)


def propagate(p, control_env, target_env, cfg=None, chunk=4096):
    """Interaction-frame propagator ``U_I(tau_p, 0)`` in the bare product basis.

    Parameters
    ----------
    p : DeviceParams
    control_env, target_env : envelope
        Complex drive envelopes in MHz; ``tau_p`` is taken from ``control_env``.
    cfg : MagnusConfig, optional
    chunk : int
        Number of steps exponentiated per batch.

    Returns
    -------
    ndarray
        ``(dim, dim)`` unitary.
    """
    cfg = cfg or MagnusConfig()
    tau_p = float(control_env.tau_p)
    if cfg.dt > tau_p:
        raise ValueError("dt must not exceed the pulse duration")
    n_steps = max(1, int(math.ceil(tau_p / cfg.dt - 1e-9)))
    dt = tau_p / n_steps
    sampler = DriveSampler(p, control_env, target_env)
    u = np.eye(p.dim, dtype=complex)
    for start in range(0, n_steps, chunk):
        n = min(chunk, n_steps - start)
        steps = _step_unitaries(sampler, start * dt, dt, n, cfg.quadrature, cfg.expm_tol)
        u = _tree_product(steps) @ u
    return sampler.to_bare(u)


def propagate_hamiltonian(h_fn, tau_p, dim, cfg=None):
    """Generic Magnus propagation of an arbitrary Hermitian ``h_fn(t)`` (rad/ns).

    ``h_fn`` is called with scalar times.  Used for small model problems.
    """
    cfg = cfg or MagnusConfig()
    n_steps = max(1, int(math.ceil(tau_p / cfg.dt - 1e-9)))
    dt = tau_p / n_steps
    u = np.eye(dim, dtype=complex)
    for i in range(n_steps):
        k1, k2 = magnus_generators(h_fn, i * dt, (i + 1) * dt, cfg.quadrature)
        u = _expm_hermitian(_hermitize(k1 + k2)) @ u
    return u


def _solve_matrix_ode(rhs_matrix, tau_p, dim, rtol, atol, method="DOP853"):
    def rhs(t, y):
        u = y.view(complex).reshape(dim, dim)
        return (-1j * rhs_matrix(t) @ u).ravel().view(float)

    y0 = np.eye(dim, dtype=complex).ravel().view(float)
    sol = integrate.solve_ivp(rhs, (0.0, tau_p), y0, method=method, rtol=rtol,
                              atol=atol)
    if not sol.success:
        raise ToleranceNotReached(sol.message)
    return sol.y[:, -1].copy().view(complex).reshape(dim, dim)


def oracle_propagate(p, control_env, target_env, rtol=1e-10, frame="interaction",
                     method="DOP853"):
    """Reference propagator from an adaptive Runge-Kutta integration.

    ``frame="interaction"`` integrates ``H_I(t)`` and returns ``U_I``;
    ``frame="lab"`` integrates ``H_s + H_d(t)`` and returns the lab-frame
    propagator.  Only intended for verification.
    """
    if rtol > 1e-8:
        raise ValueError("oracle rtol must be <= 1e-8")
    tau_p = float(control_env.tau_p)
    if frame == "interaction":
        sampler = DriveSampler(p, control_env, target_env)
        u = _solve_matrix_ode(lambda t: sampler.sample(t)[0], tau_p, p.dim, rtol,
                              rtol * 1e-2, method)
        return sampler.to_bare(u)
    if frame == "lab":
        h_s = build_static_hamiltonian(p)
        b_c, b_t = ladder_operators(p)
        w_d = MHZ * p.omega_d

        def h_lab(t):
            lower = 0.5 * MHZ * (np.conj(control_env(t)) * b_c
                                 + np.conj(target_env(t)) * b_t) * np.exp(1j * w_d * t)
            return h_s + lower + lower.conj().T

        return _solve_matrix_ode(h_lab, tau_p, p.dim, rtol, rtol * 1e-2, method)
    raise ValueError("frame must be 'interaction' or 'lab'")


def oracle_hamiltonian(h_fn, tau_p, dim, rtol=1e-10, method="DOP853"):
    """Adaptive-ODE propagator of an arbitrary ``h_fn(t)``."""
    if rtol > 1e-8:
        raise ValueError("oracle rtol must be <= 1e-8")
    return _solve_matrix_ode(h_fn, tau_p, dim, rtol, rtol * 1e-2, method)
