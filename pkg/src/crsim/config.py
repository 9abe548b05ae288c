"""Strict TOML run configuration.

Every key carries its unit in the name (``_mhz``, ``_ns``, ``_per_mhz``) and
unknown keys are rejected, so a value typed in the wrong unit or under a
misspelled name fails loudly instead of being ignored.
"""

from dataclasses import dataclass, field
import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, MissingTable, ParseError, UnknownKey
from .model import DeviceParams
from .propagator import MagnusConfig

SWEEP_NAMES = ("rise", "drag", "amp", "gatetime")
FORMATS = ("csv", "json")

_DEVICE_KEYS = {
    "omega_c_mhz": float, "delta_ct_mhz": float, "omega_t_mhz": float,
    "alpha_c_mhz": float, "alpha_t_mhz": float, "j_mhz": float,
    "levels_c": int, "levels_t": int, "omega_d_mhz": float,
}
_PULSE_KEYS = {
    "tau_p_ns": float, "tau_r_ns": float, "sigma_r_ns": float, "amp_mhz": float,
    "inv_delta_d_per_mhz": float,
}
_SOLVER_KEYS = {"dt_ns": float, "quadrature": str, "expm_tol": float, "refine": bool}
_SWEEP_KEYS = {"name": str, "start": float, "stop": float, "step": float,
               "values": list, "workers": int}
_OUTPUT_KEYS = {"path": str, "format": str}
_TABLES = {"device": _DEVICE_KEYS, "pulse": _PULSE_KEYS, "solver": _SOLVER_KEYS,
           "sweep": _SWEEP_KEYS, "output": _OUTPUT_KEYS}


@dataclass(frozen=True)
class PulseConfig:
    tau_p: float = 200.0
    tau_r: float = 26.0
    sigma_r: float = None
    amp: float = None
    inv_delta_d: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    name: str
    values: tuple = None
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    pulse: PulseConfig = field(default_factory=PulseConfig)
    solver: MagnusConfig = field(default_factory=MagnusConfig)
    refine: bool = False
    sweep: SweepConfig = None
    output_path: str = None
    output_format: str = "json"


def _check_table(name, table):
    if not isinstance(table, dict):
        raise ParseError(f"[{name}] must be a table")
    allowed = _TABLES[name]
    for key, value in table.items():
        if key not in allowed:
            raise UnknownKey(f"unknown key '{key}' in [{name}]")
        kind = allowed[key]
        if kind is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        elif kind is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, kind)
        if not ok:
            raise ConfigError(f"[{name}] {key} must be of type {kind.__name__}")
        if kind is float and not math.isfinite(value):
            raise ConfigError(f"[{name}] {key} must be finite")


def parse_config_text(text, source="<string>"):
    """Parse configuration text; see :func:`parse_config`."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from None
    for name, table in data.items():
        if name not in _TABLES:
            raise UnknownKey(f"unknown table [{name}]")
        _check_table(name, table)
    if "device" not in data:
        raise MissingTable("[device] table is required")
    return _build(data)


def parse_config(path):
    """Read and validate a run configuration file.

    Defaults: 5 control and 3 target levels, ``dt = 0.01`` ns,
    ``sigma_r = tau_r / 2``, drive at the bare target frequency.

    Raises
    ------
    ParseError
        Malformed TOML (message carries line and column) or bad values.
    UnknownKey
        A key or table that is not part of the schema.
    MissingTable
        No ``[device]`` table.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    return parse_config_text(text, str(path))


def _build(data):
    dev = dict(data["device"])
    if ("omega_c_mhz" in dev) == ("delta_ct_mhz" in dev):
        raise ConfigError("[device] needs exactly one of omega_c_mhz or delta_ct_mhz")
    omega_t = dev.get("omega_t_mhz", 5000.0)
    omega_c = dev["omega_c_mhz"] if "omega_c_mhz" in dev else omega_t + dev["delta_ct_mhz"]
    try:
        device = DeviceParams(
            omega_c=omega_c, omega_t=omega_t,
            alpha_c=dev.get("alpha_c_mhz", -340.0), alpha_t=dev.get("alpha_t_mhz", -340.0),
            J=dev.get("j_mhz", 3.5),
            levels_c=dev.get("levels_c", 5), levels_t=dev.get("levels_t", 3),
            omega_d=dev.get("omega_d_mhz"),
        )
    except ValueError as exc:
        raise ConfigError(f"[device] {exc}") from None

    pl = data.get("pulse", {})
    pulse = PulseConfig(
        tau_p=pl.get("tau_p_ns", 200.0), tau_r=pl.get("tau_r_ns", 26.0),
        sigma_r=pl.get("sigma_r_ns"), amp=pl.get("amp_mhz"),
        inv_delta_d=pl.get("inv_delta_d_per_mhz", 0.0),
    )
    if not (0 < 2 * pulse.tau_r <= pulse.tau_p):
        raise ConfigError("[pulse] need 0 < 2 * tau_r_ns <= tau_p_ns")

    sv = data.get("solver", {})
    try:
        solver = MagnusConfig(dt=sv.get("dt_ns", 0.01),
                              quadrature=sv.get("quadrature", "gauss2"),
                              expm_tol=sv.get("expm_tol", 1e-12))
    except ValueError as exc:
        raise ConfigError(f"[solver] {exc}") from None

    sweep = None
    if "sweep" in data:
        sw = data["sweep"]
        if "name" not in sw:
            raise ConfigError("[sweep] needs a name")
        if sw["name"] not in SWEEP_NAMES:
            raise ConfigError(f"[sweep] name must be one of {SWEEP_NAMES}")
        values = None
        if "values" in sw:
            if any(k in sw for k in ("start", "stop", "step")):
                raise ConfigError("[sweep] give either values or start/stop/step")
            values = tuple(float(v) for v in sw["values"])
        elif any(k in sw for k in ("start", "stop", "step")):
            if not all(k in sw for k in ("start", "stop", "step")) or sw["step"] <= 0:
                raise ConfigError("[sweep] start, stop and a positive step go together")
            from .experiments import inclusive_range
            values = tuple(float(v) for v in inclusive_range(sw["start"], sw["stop"],
                                                             sw["step"]))
        sweep = SweepConfig(sw["name"], values, sw.get("workers", 1))

    out = data.get("output", {})
    fmt = out.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError(f"[output] format must be one of {FORMATS}")
    return RunConfig(device=device, pulse=pulse, solver=solver,
                     refine=sv.get("refine", False), sweep=sweep,
                     output_path=out.get("path"), output_format=fmt)
