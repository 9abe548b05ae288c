"""Optional PNG rendering of command outputs (non-interactive backend)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_LABELS = {
    "tau_r": r"rise time $\tau_r$ (ns)",
    "inv_delta_d": r"DRAG coefficient $1/\Delta_D$ (1/MHz)",
    "omega_cx": r"control amplitude (MHz)",
    "tau_p": r"gate time $\tau_p$ (ns)",
}
_SERIES = (("e_pop", r"$\bar{E}_{pop}$", "k-"),
           ("p00_10", r"$P_{00\to10}$", "C0--"),
           ("p00_20", r"$P_{00\to20}$", "C1--"),
           ("p10_20", r"$P_{10\to20}$", "C2--"),
           ("p00_01", r"$P_{00\to01}$", "C3:"))


def plot_sweep(result, path):
    """Log-scale error curves against the swept parameter."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8), constrained_layout=True)
    x = result.values
    for attr, label, style in _SERIES:
        y = np.array([getattr(r, attr) for r in result.records], dtype=float)
        y = np.where(y > 0, y, np.nan)
        if np.any(np.isfinite(y)):
            ax.semilogy(x, y, style, label=label, lw=1.2)
    ax.set_xlabel(_LABELS.get(result.name, result.name))
    ax.set_ylabel("probability")
    ax.legend(fontsize=8, frameon=False)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spectrum(freq_mhz, magnitude, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.8), constrained_layout=True)
    ax.semilogy(freq_mhz, magnitude, "k-", lw=1.0)
    ax.set_xlabel("frequency (MHz)")
    ax.set_ylabel(r"$|\tilde{\Omega}(\omega)|$ (MHz ns)")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_probabilities(probabilities, path):
    """Bar chart of ``P(initial -> final)`` for the computational inputs."""
    keys = sorted(probabilities)
    vals = np.array([probabilities[k] for k in keys], dtype=float)
    keep = vals > 1e-12
    fig, ax = plt.subplots(figsize=(7, 3.8), constrained_layout=True)
    ax.bar(range(int(keep.sum())), vals[keep], color="0.3", log=True)
    ax.set_xticks(range(int(keep.sum())))
    ax.set_xticklabels([f"{a}>{b}" for (a, b), k in zip(keys, keep) if k],
                       rotation=90, fontsize=7)
    ax.set_ylabel("probability")
    fig.savefig(path, dpi=150)
    plt.close(fig)
