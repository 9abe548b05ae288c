"""Two-transmon Kerr model, drive Hamiltonian and dressed computational basis.

Basis ordering is control (outer) by target (inner): the bare state
``|n_c, n_t>`` sits at index ``n_c * levels_t + n_t``.  Public inputs are in
MHz / ns; every returned operator is in angular units (rad/ns).
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import AmbiguousAssignment
from .units import MHZ

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class DeviceParams:
    """Frequencies of the coupled control/target pair, all in MHz.

    ``omega_d`` defaults to the bare target frequency.
    """

    omega_c: float
    omega_t: float
    alpha_c: float
    alpha_t: float
    J: float
    levels_c: int = 5
    levels_t: int = 3
    omega_d: float = None
    delta_ct: float = field(init=False)

    def __post_init__(self):
        if self.omega_d is None:
            object.__setattr__(self, "omega_d", self.omega_t)
        for name in ("omega_c", "omega_t", "alpha_c", "alpha_t", "J", "omega_d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if int(self.levels_c) != self.levels_c or self.levels_c < 3:
            raise ValueError("levels_c must be an integer >= 3")
        if int(self.levels_t) != self.levels_t or self.levels_t < 2:
            raise ValueError("levels_t must be an integer >= 2")
        object.__setattr__(self, "levels_c", int(self.levels_c))
        object.__setattr__(self, "levels_t", int(self.levels_t))
        object.__setattr__(self, "delta_ct", self.omega_c - self.omega_t)

    @classmethod
    def paper(cls, delta_ct, omega_t=5000.0, alpha=-340.0, J=3.5, **kwargs):
        """Parameter family used for the rise-time and DRAG sweeps."""
        return cls(omega_c=omega_t + delta_ct, omega_t=omega_t, alpha_c=alpha,
                   alpha_t=alpha, J=J, **kwargs)

    @property
    def dim(self):
        return self.levels_c * self.levels_t

    @property
    def levels(self):
        return (self.levels_c, self.levels_t)

    def angular(self):
        """Return (w_c, w_t, a_c, a_t, J, w_d, delta_ct) in rad/ns."""
        return tuple(MHZ * v for v in (self.omega_c, self.omega_t, self.alpha_c,
                                       self.alpha_t, self.J, self.omega_d,
                                       self.delta_ct))

    def index(self, n_c, n_t):
        return n_c * self.levels_t + n_t


def _lowering(n):
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def ladder_operators(p):
    """Bare lowering operators ``(b_c, b_t)`` on the truncated product space."""
    b_c = np.kron(_lowering(p.levels_c), np.eye(p.levels_t))
    b_t = np.kron(np.eye(p.levels_c), _lowering(p.levels_t))
    return b_c, b_t


def build_static_hamiltonian(p):
    """Kerr oscillators plus RWA exchange, ``H_s = H_q + H_J`` in rad/ns."""
    w_c, w_t, a_c, a_t, j, _, _ = p.angular()
    b_c, b_t = ladder_operators(p)
    n_c = b_c.conj().T @ b_c
    n_t = b_t.conj().T @ b_t
    eye = np.eye(p.dim)
    h_q = w_c * n_c + 0.5 * a_c * n_c @ (n_c - eye) + w_t * n_t + 0.5 * a_t * n_t @ (n_t - eye)
    h_j = j * (b_c.conj().T @ b_t + b_c @ b_t.conj().T)
    return h_q + h_j


def build_drive_hamiltonian(p, omega_c_env, omega_t_env, t):
    """Lab-frame RWA drive Hamiltonian at time ``t`` (ns).

    ``omega_c_env`` and ``omega_t_env`` are the instantaneous complex
    envelopes in MHz.
    """
    b_c, b_t = ladder_operators(p)
    w_d = MHZ * p.omega_d
    phase = np.exp(1j * w_d * t)
    lower = 0.5 * MHZ * (np.conj(omega_c_env) * b_c + np.conj(omega_t_env) * b_t) * phase
    return lower + lower.conj().T


class StaticFrame:
    """Cached eigendecomposition of a static Hamiltonian.

    Conjugating by ``exp(i H_s t)`` then costs two matrix products with
    diagonal phases.
    """

    def __init__(self, h_s):
        self.h_s = np.asarray(h_s)
        self.energies, self.vectors = np.linalg.eigh(self.h_s)

    def rotation(self, t):
        """``exp(-i H_s t)``."""
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def to_interaction(self, h, t):
        u = self.rotation(t)
        return u.conj().T @ h @ u


def interaction_frame_hamiltonian(h_s, h_d_fn, t):
    """``exp(i H_s t) H_d(t) exp(-i H_s t)``.

    ``h_s`` may be a matrix or a precomputed :class:`StaticFrame`;
    ``h_d_fn`` maps time to the lab-frame drive Hamiltonian.
    """
    frame = h_s if isinstance(h_s, StaticFrame) else StaticFrame(h_s)
    return frame.to_interaction(h_d_fn(t), t)


@dataclass(frozen=True)
class DressedBasis:
    """Eigenstates of ``H_s`` reordered so column ``k`` carries bare label ``k``.

    Attributes
    ----------
    states : ndarray
        ``(dim, dim)`` matrix whose columns are the dressed states.
    energies : ndarray
        Eigenvalues in rad/ns, in the same order as ``states``.
    levels : tuple
        ``(levels_c, levels_t)``.
    """

    states: np.ndarray
    energies: np.ndarray
    levels: tuple

    @property
    def labels(self):
        nc, nt = self.levels
        return [f"{a}{b}" for a, b in itertools.product(range(nc), range(nt))]

    def index(self, label):
        n_c, n_t = int(label[0]), int(label[1])
        return n_c * self.levels[1] + n_t

    def state(self, label):
        return self.states[:, self.index(label)]

    def energy(self, label):
        return self.energies[self.index(label)]

    @property
    def computational(self):
        """Columns spanning the dressed two-qubit subspace (00, 01, 10, 11)."""
        return self.states[:, [self.index(s) for s in ("00", "01", "10", "11")]]


def dressed_basis(h_s, levels, tie_tol=1e-6):
    """Label the eigenvectors of ``h_s`` by maximum overlap with bare states.

    Raises
    ------
    AmbiguousAssignment
        When two eigenvectors claim the same bare state, or one eigenvector
        is split evenly between two bare states.
    """
    energies, vectors = np.linalg.eigh(h_s)
    weights = np.abs(vectors) ** 2
    order = np.argsort(weights, axis=0)
    best = order[-1]
    runner_up = order[-2]
    cols = np.arange(weights.shape[1])
    gap = weights[best, cols] - weights[runner_up, cols]
    if np.any(gap < tie_tol):
        k = int(np.argmin(gap))
        raise AmbiguousAssignment(
            f"eigenvector {k} overlaps bare states {best[k]} and {runner_up[k]} equally"
        )
    if len(set(best.tolist())) != len(best):
        raise AmbiguousAssignment("two dressed states map to the same bare label")
    states = np.empty_like(vectors)
    dressed_energies = np.empty_like(energies)
    for col, label in enumerate(best):
        v = vectors[:, col]
        v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
        states[:, label] = v
        dressed_energies[label] = energies[col]
    return DressedBasis(states=states, energies=dressed_energies, levels=tuple(levels))


def dressed_pauli(basis, label):
    """Two-qubit Pauli ``sigma_j (x) sigma_k`` on the dressed computational subspace."""
    j, k = label[0].lower(), label[1].lower()
    block = np.kron(PAULI[j], PAULI[k])
    c = basis.computational
    return c @ block @ c.conj().T


def static_zz(basis):
    """Spectroscopic ZZ ``E11 - E10 - E01 + E00`` of the dressed levels (rad/ns)."""
    e = basis.energy
    return e("11") - e("10") - e("01") + e("00")
