"""Parameter sweeps of the calibrated direct-CNOT gate.

Each sweep point is an independent job: calibrate, propagate, and record the
transition probabilities and the average population error.  Failures are
recorded in the ``status`` field instead of aborting the sweep.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .calibrate import calibrate_perturbative, refine_numeric, solve_gate_time
from .errors import CRSimError
from .metrics import CNOT, avg_population_error, transition_probabilities
from .model import build_static_hamiltonian, dressed_basis
from .propagator import MagnusConfig, propagate
from .units import MHZ

__all__ = [
    "CSV_HEADER", "CnotTarget", "SweepRecord", "SweepResult", "SweepPoint",
    "avg_population_error", "transition_probabilities", "run_point",
    "run_sweep", "sweep_rise_time", "sweep_drag", "sweep_amplitude",
    "sweep_gate_time", "sweep_amplitude_and_gate_time", "default_grid",
]

CSV_HEADER = ("sweep_name", "sweep_value", "omega_cx_mhz", "omega_tx_mhz",
              "drag_inv_delta_d", "p00_01", "p00_10", "p00_20", "p10_20",
              "p10_11", "e_pop", "status")

#: Default sweep grids as (start, stop, step), endpoints included.
DEFAULT_GRIDS = {
    "rise": (4.0, 40.0, 1.0),
    "drag": (-0.05, 0.02, 5e-4),
    "gatetime": (160.0, 280.0, 2.0),
    "amp": (5.0, 60.0, 1.0),
}

#: Sweeps use a coarser step than single runs; the gate error is converged
#: to well below the plotted differences at this step.
SWEEP_DT = 0.05


def default_grid(name):
    start, stop, step = DEFAULT_GRIDS[name]
    return inclusive_range(start, stop, step)


def inclusive_range(start, stop, step):
    """``start, start+step, ...`` up to and including ``stop`` (rounded to the step)."""
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


@dataclass(frozen=True)
class CnotTarget:
    """Ideal CNOT on the dressed computational states, ordered 00, 01, 10, 11."""

    matrix: np.ndarray = field(default_factory=lambda: CNOT.copy())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4) or not np.allclose(m.conj().T @ m, np.eye(4), atol=1e-12):
            raise ValueError("CNOT target must be a 4x4 unitary")
        object.__setattr__(self, "matrix", m)


@dataclass
class SweepRecord:
    """Outcome of one sweep point.

    ``probabilities`` maps ``(initial, final)`` dressed labels to
    ``|<final|U|initial>|**2`` for every computational initial state.
    """

    sweep_name: str
    sweep_value: float
    omega_cx_mhz: float = math.nan
    omega_tx_mhz: float = math.nan
    drag_inv_delta_d: float = 0.0
    tau_p: float = math.nan
    tau_r: float = math.nan
    probabilities: dict = field(default_factory=dict)
    e_pop: float = math.nan
    status: str = "ok"
    calibration: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "ok"

    def p(self, initial, final):
        return self.probabilities.get((initial, final), math.nan)

    @property
    def p00_01(self):
        return self.p("00", "01")

    @property
    def p00_10(self):
        return self.p("00", "10")

    @property
    def p00_20(self):
        return self.p("00", "20")

    @property
    def p10_20(self):
        return self.p("10", "20")

    @property
    def p10_11(self):
        return self.p("10", "11")

    def row(self):
        """Values in :data:`CSV_HEADER` order."""
        return (self.sweep_name, self.sweep_value, self.omega_cx_mhz, self.omega_tx_mhz,
                self.drag_inv_delta_d, self.p00_01, self.p00_10, self.p00_20,
                self.p10_20, self.p10_11, self.e_pop, self.status)

    def to_dict(self):
        out = dict(zip(CSV_HEADER, self.row()))
        out["tau_p_ns"] = self.tau_p
        out["tau_r_ns"] = self.tau_r
        out["probabilities"] = {f"{a}->{b}": v for (a, b), v in self.probabilities.items()}
        out["calibration"] = self.calibration
        return out


@dataclass
class SweepResult:
    name: str
    records: list

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def values(self):
        return np.array([r.sweep_value for r in self.records])

    @property
    def e_pop(self):
        return np.array([r.e_pop for r in self.records])

    def argmin(self):
        """``(value, e_pop)`` of the best successful point."""
        ok = [r for r in self.records if r.ok and np.isfinite(r.e_pop)]
        if not ok:
            raise ValueError(f"sweep {self.name!r} has no successful points")
        best = min(ok, key=lambda r: r.e_pop)
        return best.sweep_value, best.e_pop

    def local_minima(self):
        """Sweep values at interior local minima of ``e_pop``."""
        return local_minima(self.values, self.e_pop)


def local_minima(x, y):
    x, y = np.asarray(x), np.asarray(y)
    return [float(x[i]) for i in range(1, len(y) - 1)
            if y[i] < y[i - 1] and y[i] < y[i + 1]]


@dataclass(frozen=True)
class SweepPoint:
    """One job.  ``amp`` or ``tau_p`` may be ``None`` to solve the pi condition for it."""

    name: str
    value: float
    p: object
    tau_p: float = None
    tau_r: float = 26.0
    sigma_r: float = None
    amp: float = None
    inv_delta_d: float = 0.0
    dt: float = SWEEP_DT
    quadrature: str = "gauss2"
    refine: bool = False


def run_point(job):
    """Calibrate, propagate and score one sweep point; never raises on physics errors."""
    rec = SweepRecord(job.name, float(job.value), drag_inv_delta_d=job.inv_delta_d,
                      tau_r=job.tau_r)
    try:
        tau_p = job.tau_p
        if tau_p is None:
            tau_p = solve_gate_time(job.p, job.amp, job.tau_r, job.sigma_r)
        rec.tau_p = tau_p
        cal = calibrate_perturbative(job.p, tau_p, job.tau_r, job.sigma_r, amp=job.amp)
        cfg = MagnusConfig(dt=job.dt, quadrature=job.quadrature)
        if job.refine:
            cal = refine_numeric(job.p, cal, cfg, inv_delta_d=job.inv_delta_d)
        control, target = cal.envelopes(job.inv_delta_d)
        lin, cub = cal.target_tone_coeffs
        rec.omega_cx_mhz = cal.amplitude
        rec.omega_tx_mhz = cal.tone_scale * (lin * cal.amplitude + cub * cal.amplitude ** 3)
        rec.calibration = cal.to_dict()
        u = propagate(job.p, control, target, cfg)
        basis = dressed_basis(build_static_hamiltonian(job.p), job.p.levels)
        rec.probabilities = transition_probabilities(u, basis)
        rec.e_pop = avg_population_error(u, CNOT, basis)
    except (CRSimError, ValueError) as exc:
        rec.status = getattr(exc, "code", type(exc).__name__)
    return rec


def run_sweep(name, jobs, workers=1):
    """Run jobs, in parallel when ``workers > 1``; records keep the job order."""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_point, jobs))
    else:
        records = [run_point(j) for j in jobs]
    return SweepResult(name, records)


def _solver_kwargs(cfg):
    cfg = cfg or MagnusConfig(dt=SWEEP_DT)
    return {"dt": cfg.dt, "quadrature": cfg.quadrature}


def sweep_rise_time(p, tau_p=200.0, tau_r_grid=None, inv_delta_d=0.0, cfg=None,
                    refine=False, workers=1):
    """Gate error against rise time at fixed gate time (``sigma_r = tau_r / 2``)."""
    grid = default_grid("rise") if tau_r_grid is None else tau_r_grid
    jobs = [SweepPoint("tau_r", float(v), p, tau_p=tau_p, tau_r=float(v),
                       inv_delta_d=inv_delta_d, refine=refine, **_solver_kwargs(cfg))
            for v in grid]
    return run_sweep("tau_r", jobs, workers)


def sweep_drag(p, tau_p=200.0, tau_r=26.0, inv_delta_d_grid=None, cfg=None,
               refine=False, workers=1):
    """Gate error against the DRAG coefficient ``1/delta_d`` (1/MHz)."""
    grid = default_grid("drag") if inv_delta_d_grid is None else inv_delta_d_grid
    jobs = [SweepPoint("inv_delta_d", float(v), p, tau_p=tau_p, tau_r=tau_r,
                       inv_delta_d=float(v), refine=refine, **_solver_kwargs(cfg))
            for v in grid]
    return run_sweep("inv_delta_d", jobs, workers)


def sweep_amplitude(p, amp_grid, tau_r=26.0, inv_delta_d=0.0, cfg=None, refine=False,
                    workers=1):
    """Gate error against control amplitude; the gate time follows the pi condition."""
    jobs = [SweepPoint("omega_cx", float(v), p, tau_p=None, tau_r=tau_r, amp=float(v),
                       inv_delta_d=inv_delta_d, refine=refine, **_solver_kwargs(cfg))
            for v in amp_grid]
    return run_sweep("omega_cx", jobs, workers)


def sweep_gate_time(p, tau_p_grid=None, tau_r=26.0, inv_delta_d=0.0, cfg=None,
                    refine=False, workers=1):
    """Gate error against gate time; the amplitude is re-solved at each point."""
    grid = default_grid("gatetime") if tau_p_grid is None else tau_p_grid
    jobs = [SweepPoint("tau_p", float(v), p, tau_p=float(v), tau_r=tau_r,
                       inv_delta_d=inv_delta_d, refine=refine, **_solver_kwargs(cfg))
            for v in grid]
    return run_sweep("tau_p", jobs, workers)


def sweep_amplitude_and_gate_time(p, inv_delta_d, amp_grid, tau_p_grid=None, tau_r=26.0,
                                  cfg=None, refine=False, workers=1):
    """Both one-dimensional cuts at a fixed DRAG coefficient."""
    return (sweep_amplitude(p, amp_grid, tau_r, inv_delta_d, cfg, refine, workers),
            sweep_gate_time(p, tau_p_grid, tau_r, inv_delta_d, cfg, refine, workers))


def offresonant_period(p):
    """Gate-time period (ns) of the type-1 interference, ``2 pi / delta_ct``."""
    return 2 * np.pi / abs(MHZ * p.delta_ct)
