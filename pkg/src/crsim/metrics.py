"""Transition probabilities and the average population error of a gate."""

import numpy as np

COMPUTATIONAL = ("00", "01", "10", "11")

#: Ideal CNOT on (control, target) in the 00, 01, 10, 11 ordering.
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)


def dressed_matrix(u, basis):
    """Matrix elements ``<a|U|b>`` between dressed states (full truncated space)."""
    return basis.states.conj().T @ u @ basis.states


def transition_probabilities(u, basis):
    """``P[(mn, pq)] = |<pq|U|mn>|**2`` for computational ``mn`` and every final ``pq``.

    Returns
    -------
    dict
        Keyed by ``(initial_label, final_label)``.
    """
    m = np.abs(dressed_matrix(u, basis)) ** 2
    labels = basis.labels
    out = {}
    for init in COMPUTATIONAL:
        col = basis.index(init)
        for k, fin in enumerate(labels):
            out[(init, fin)] = float(m[k, col])
    return out


def computational_block(u, basis):
    idx = [basis.index(s) for s in COMPUTATIONAL]
    return dressed_matrix(u, basis)[np.ix_(idx, idx)]


def avg_population_error(u, target=CNOT, basis=None):
    """``1 - (1/4) sum_k |(target^dagger M)_kk|**2`` with ``M`` the computational block.

    ``u`` may be a 4x4 matrix (used directly) or a full-space propagator,
    in which case ``basis`` selects the dressed computational block.
    """
    u = np.asarray(u)
    m = u if basis is None else computational_block(u, basis)
    d = np.diag(np.asarray(target).conj().T @ m)
    return float(1.0 - 0.25 * np.sum(np.abs(d) ** 2))


def cnot_error(u, basis):
    """Calibration objective ``P(00->01) + 1 - P(10->11)``."""
    m = np.abs(dressed_matrix(u, basis)) ** 2
    i = basis.index
    return float(m[i("01"), i("00")] + 1.0 - m[i("11"), i("10")])
