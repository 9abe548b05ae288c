"""Command-line entry point.

Usage: ``crsim SUBCOMMAND --config run.toml [--out PATH] [--format csv|json]``.
Exit status is 0 on success, 1 on a runtime error (a JSON error object is
written to standard error) and 2 on a usage error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from .config import parse_config
from .errors import ConfigError, CRSimError, DidNotConverge

SUBCOMMANDS = ("simulate", "calibrate", "rates", "estimate", "spectrum",
               "sweep-rise", "sweep-drag", "sweep-amp", "sweep-gatetime")
_SWEEP_KIND = {"sweep-rise": "rise", "sweep-drag": "drag", "sweep-amp": "amp",
               "sweep-gatetime": "gatetime"}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _clean(obj):
    """JSON-safe copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, ".12g")) if math.isfinite(x) else None
    return obj


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _calibrate(cfg, refine):
    from .calibrate import calibrate_perturbative, refine_numeric

    pl = cfg.pulse
    cal = calibrate_perturbative(cfg.device, pl.tau_p, pl.tau_r, pl.sigma_r, amp=pl.amp)
    if refine:
        cal = refine_numeric(cfg.device, cal, cfg.solver, inv_delta_d=pl.inv_delta_d)
    return cal


def _device_dict(p):
    return {"omega_c_mhz": p.omega_c, "omega_t_mhz": p.omega_t, "alpha_c_mhz": p.alpha_c,
            "alpha_t_mhz": p.alpha_t, "j_mhz": p.J, "omega_d_mhz": p.omega_d,
            "delta_ct_mhz": p.delta_ct, "levels_c": p.levels_c, "levels_t": p.levels_t}


def cmd_simulate(cfg, args):
    from .experiments import CSV_HEADER, SweepRecord
    from .metrics import avg_population_error, transition_probabilities
    from .model import build_static_hamiltonian, dressed_basis
    from .propagator import propagate

    cal = _calibrate(cfg, args.refine)
    control, target = cal.envelopes(cfg.pulse.inv_delta_d)
    u = propagate(cfg.device, control, target, cfg.solver)
    basis = dressed_basis(build_static_hamiltonian(cfg.device), cfg.device.levels)
    probs = transition_probabilities(u, basis)
    e_pop = avg_population_error(u, basis=basis)
    lin, cub = cal.target_tone_coeffs
    rec = SweepRecord("single", 0.0, omega_cx_mhz=cal.amplitude,
                      omega_tx_mhz=cal.tone_scale * (lin * cal.amplitude
                                                     + cub * cal.amplitude ** 3),
                      drag_inv_delta_d=cfg.pulse.inv_delta_d, tau_p=cal.tau_p,
                      tau_r=cal.tau_r, probabilities=probs, e_pop=e_pop,
                      calibration=cal.to_dict())
    if args.format == "csv":
        _write_csv(args.out, CSV_HEADER, [rec.row()])
    else:
        _write_json(args.out, {"device": _device_dict(cfg.device), **rec.to_dict()})
    if args.plot:
        from .plotting import plot_probabilities
        plot_probabilities(probs, _png(args.out))
    return f"e_pop={_fmt(e_pop)}"


def cmd_calibrate(cfg, args):
    cal = _calibrate(cfg, args.refine)
    data = cal.to_dict()
    if args.format == "csv":
        _write_csv(args.out, list(data), [list(data.values())])
    else:
        _write_json(args.out, {"device": _device_dict(cfg.device), "calibration": data})
    return f"omega_cx_mhz={_fmt(cal.amplitude)} tau_p_ns={_fmt(cal.tau_p)}"


def cmd_rates(cfg, args):
    from .rates import collective_frequencies, rates_up_to_order, static_zz0
    from .units import MHZ

    cal = _calibrate(cfg, False)
    amp = cal.amplitude
    lin, cub = cal.target_tone_coeffs
    tone = lin * amp + cub * amp ** 3
    rows = []
    for order in range(5):
        r = rates_up_to_order(cfg.device, amp, tone, max_order=order)
        cf = collective_frequencies(r)
        rows.append({"order": order, **r.as_dict("mhz"),
                     "w_plus_mhz": cf.w_plus / MHZ, "w_minus_mhz": cf.w_minus / MHZ})
    if args.format == "csv":
        _write_csv(args.out, list(rows[0]), [list(r.values()) for r in rows])
    else:
        _write_json(args.out, {"omega_cx_mhz": amp, "omega_tx_mhz": tone,
                               "static_zz_mhz": 2 * static_zz0(cfg.device) / MHZ,
                               "rates_mhz": rows})
    return f"w_zx_mhz={_fmt(rows[-1]['w_zx'])}"


def cmd_estimate(cfg, args):
    from .offres import estimate_all

    cal = _calibrate(cfg, False)
    control, _ = cal.envelopes(cfg.pulse.inv_delta_d)
    est = estimate_all(cfg.device, control)
    if args.format == "csv":
        _write_csv(args.out, ("kind", "time", "frequency"),
                   [(k, v["time"], v["frequency"]) for k, v in est.items()])
    else:
        _write_json(args.out, {"omega_cx_mhz": cal.amplitude, "estimates": est})
    return " ".join(f"{k}={_fmt(v['time'])}" for k, v in est.items())


def cmd_spectrum(cfg, args):
    from .experiments import inclusive_range
    from .pulses import spectrum
    from .units import MHZ

    cal = _calibrate(cfg, False)
    control, _ = cal.envelopes(cfg.pulse.inv_delta_d)
    freq = (np.asarray(cfg.sweep.values) if cfg.sweep and cfg.sweep.values
            else inclusive_range(-200.0, 200.0, 0.5))
    mag = np.abs(spectrum(control, MHZ * freq))
    if args.format == "csv":
        _write_csv(args.out, ("freq_mhz", "abs_spectrum_mhz_ns"), zip(freq, mag))
    else:
        _write_json(args.out, {"freq_mhz": freq.tolist(), "abs_spectrum_mhz_ns": mag.tolist()})
    if args.plot:
        from .plotting import plot_spectrum
        plot_spectrum(freq, mag, _png(args.out))
    # report the spectral dip closest to the control-target detuning
    dips = [i for i in range(1, freq.size - 1) if mag[i] < mag[i - 1] and mag[i] < mag[i + 1]]
    if not dips:
        return "dip_near_delta_mhz=none"
    near = min(dips, key=lambda i: abs(abs(freq[i]) - abs(cfg.device.delta_ct)))
    return f"dip_near_delta_mhz={_fmt(freq[near])}"


def cmd_sweep(cfg, args):
    from . import experiments as ex

    kind = _SWEEP_KIND[args.command]
    values = cfg.sweep.values if cfg.sweep and cfg.sweep.name == kind else None
    if cfg.sweep and cfg.sweep.name != kind:
        raise ConfigError(f"[sweep] name {cfg.sweep.name!r} does not match {args.command}")
    workers = args.workers or (cfg.sweep.workers if cfg.sweep else 1)
    solver = cfg.solver
    pl, p = cfg.pulse, cfg.device
    common = {"cfg": solver, "refine": args.refine, "workers": workers}
    if kind == "rise":
        res = ex.sweep_rise_time(p, pl.tau_p, values, pl.inv_delta_d, **common)
    elif kind == "drag":
        res = ex.sweep_drag(p, pl.tau_p, pl.tau_r, values, **common)
    elif kind == "amp":
        res = ex.sweep_amplitude(p, values if values is not None else ex.default_grid("amp"),
                                 pl.tau_r, pl.inv_delta_d, **common)
    else:
        res = ex.sweep_gate_time(p, values, pl.tau_r, pl.inv_delta_d, **common)
    if args.format == "csv":
        _write_csv(args.out, ex.CSV_HEADER, [r.row() for r in res.records])
    else:
        try:
            best = dict(zip(("sweep_value", "e_pop"), res.argmin()))
        except ValueError:
            best = None
        _write_json(args.out, {"sweep_name": res.name, "argmin": best,
                               "device": _device_dict(p),
                               "records": [r.to_dict() for r in res.records]})
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(res, _png(args.out))
    value, e_pop = res.argmin()
    return f"argmin {res.name}={_fmt(value)} e_pop={_fmt(e_pop)}"


_HANDLERS = {"simulate": cmd_simulate, "calibrate": cmd_calibrate, "rates": cmd_rates,
             "estimate": cmd_estimate, "spectrum": cmd_spectrum,
             **{k: cmd_sweep for k in _SWEEP_KIND}}


def _png(out):
    return os.path.splitext(out)[0] + ".png"


def build_parser():
    ap = argparse.ArgumentParser(prog="crsim", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=SUBCOMMANDS, metavar="SUBCOMMAND",
                    help="one of: " + ", ".join(SUBCOMMANDS))
    ap.add_argument("--config", required=True, metavar="PATH", help="TOML run configuration")
    ap.add_argument("--out", metavar="PATH", help="output file (default from config)")
    ap.add_argument("--format", choices=("csv", "json"), help="output format")
    ap.add_argument("--workers", type=int, metavar="N", help="parallel sweep workers")
    ap.add_argument("--refine", action="store_true",
                    help="refine the calibration against simulation")
    ap.add_argument("--plot", action="store_true",
                    help="also render a PNG next to the output file")
    return ap


def dispatch(args):
    """Run one parsed command; returns the summary line."""
    cfg = parse_config(args.config)
    args.refine = args.refine or cfg.refine
    args.format = args.format or cfg.output_format
    if args.out is None:
        args.out = cfg.output_path or f"crsim_{args.command.replace('-', '_')}.{args.format}"
    if args.workers is not None and args.workers < 1:
        raise CRSimError("--workers must be at least 1")
    return _HANDLERS[args.command](cfg, args)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", DidNotConverge)
            summary = dispatch(args)
    except CRSimError as exc:
        err = {"error": {"code": exc.code, "message": str(exc)}}
        print(json.dumps(err), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        err = {"error": {"code": f"cli.{type(exc).__name__}", "message": str(exc)}}
        print(json.dumps(err), file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
