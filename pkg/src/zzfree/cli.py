"""Command-line front end: sweeps and device runs emitted as CSV or JSON.

Units on the command line and in config files: frequencies and
anharmonicities in GHz, couplings and drive amplitudes in MHz. Output
ZZ rates are in kHz.

Config files are INI-style::

    [circuit]
    w1 = 5.222
    w2 = 5.292
    wc = 6.492
    d1 = 0.6
    d2 = -0.33
    g1c = 80        ; MHz
    g2c = 80
    g12 = 0
    truncations = 5, 5, 5

    [sweep]
    axis = Delta
    start = 0.02
    stop = 0.3
    points = 29

    [drive]
    omega = 5, 10, 20     ; MHz
    method = LA

    [output]
    path = out.csv
    format = csv
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._pool import parallel_map
from .circuit import CircuitSpec
from .errors import ConfigError, ZZFreeError

# section -> allowed keys
SCHEMA = {
    "circuit": {"w1", "w2", "wc", "d1", "d2", "g1c", "g2c", "g12", "truncations", "q1_type", "model"},
    "sweep": {"axis", "start", "stop", "points"},
    "drive": {"omega", "method"},
    "output": {"path", "format"},
}
GHZ_KEYS = ("w1", "w2", "wc", "d1", "d2")
MHZ_KEYS = ("g1c", "g2c", "g12")
SWEEP_AXES = {"Delta": "GHz", "w1": "GHz", "wc": "GHz", "d1": "GHz", "d2": "GHz",
              "g1c": "MHz", "g2c": "MHz", "g12": "MHz"}


@dataclass
class RunConfig:
    """Parsed run configuration (internal units: GHz throughout)."""

    circuit: dict = field(default_factory=dict)
    sweep: dict = None
    drive: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)


def _float(section, key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None


def _floats(section, key, text):
    return [_float(section, key, t) for t in text.replace(";", ",").split(",") if t.strip()]


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse config: {e}") from None
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        bad = set(cp[sec]) - SCHEMA[sec]
        if bad:
            raise ConfigError(f"unknown keys in [{sec}]: {', '.join(sorted(bad))}")
    cfg = RunConfig()
    if cp.has_section("circuit"):
        c = cp["circuit"]
        for k in GHZ_KEYS:
            if k in c:
                cfg.circuit[k] = _float("circuit", k, c[k])
        for k in MHZ_KEYS:
            if k in c:
                cfg.circuit[k] = _float("circuit", k, c[k]) * 1e-3
        if "truncations" in c:
            t = _floats("circuit", "truncations", c["truncations"])
            if len(t) != 3 or any(x != int(x) or x < 2 for x in t):
                raise ConfigError("[circuit] truncations: expected three integers >= 2")
            cfg.circuit["truncations"] = tuple(int(x) for x in t)
        for k in ("q1_type", "model"):
            if k in c:
                cfg.circuit[k] = c[k].strip()
        if cfg.circuit.get("model", "circuit") not in ("circuit", "effective"):
            raise ConfigError("[circuit] model must be 'circuit' or 'effective'")
    if cp.has_section("sweep"):
        s = cp["sweep"]
        missing = SCHEMA["sweep"] - set(s)
        if missing:
            raise ConfigError(f"[sweep] missing keys: {', '.join(sorted(missing))}")
        axis = s["axis"].strip()
        if axis not in SWEEP_AXES:
            raise ConfigError(f"[sweep] axis must be one of {', '.join(SWEEP_AXES)}")
        pts = _float("sweep", "points", s["points"])
        if pts != int(pts) or pts < 1:
            raise ConfigError("[sweep] points must be a positive integer")
        scale = 1e-3 if SWEEP_AXES[axis] == "MHz" else 1.0
        cfg.sweep = {"axis": axis, "start": _float("sweep", "start", s["start"]) * scale,
                     "stop": _float("sweep", "stop", s["stop"]) * scale, "points": int(pts)}
    if cp.has_section("drive"):
        d = cp["drive"]
        if "omega" in d:
            om = _floats("drive", "omega", d["omega"])
            if any(o < 0 for o in om):
                raise ConfigError("[drive] omega values must be non-negative")
            cfg.drive["omega"] = [o * 1e-3 for o in om]
        if "method" in d:
            m = d["method"].strip().upper()
            if m not in ("LA", "SW"):
                raise ConfigError("[drive] method must be LA or SW")
            cfg.drive["method"] = m
    if cp.has_section("output"):
        o = cp["output"]
        if "format" in o and o["format"].strip() not in ("csv", "json"):
            raise ConfigError("[output] format must be csv or json")
        cfg.output = {k: o[k].strip() for k in o}
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None


def spec_from_config(cfg: RunConfig) -> CircuitSpec:
    c = cfg.circuit
    need = {"w1", "w2", "wc", "d1", "d2", "g1c", "g2c"}
    missing = need - set(c)
    if missing:
        raise ConfigError(f"[circuit] missing keys: {', '.join(sorted(missing))}")
    return CircuitSpec.from_params(c["w1"], c["d1"], c["w2"], c["d2"], c["wc"], c["g1c"], c["g2c"],
                                   c.get("g12", 0.0), c.get("truncations", (5, 5, 5)),
                                   q1_label=c.get("q1_type", "transmon"))


def spec_to_config(spec: CircuitSpec) -> str:
    """Serialise a Duffing-based spec as a ``[circuit]`` section."""
    lines = ["[circuit]"]
    for k in GHZ_KEYS:
        lines.append(f"{k} = {getattr(spec, k)!r}")
    for k in MHZ_KEYS:
        lines.append(f"{k} = {getattr(spec, k) * 1e3!r}")
    lines.append("truncations = " + ", ".join(str(t) for t in spec.truncations))
    lines.append(f"q1_type = {spec.q1.label}")
    return "\n".join(lines) + "\n"


# ---- output -----------------------------------------------------------------

def fmt(x):
    if x is None:
        return "none"
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.6g}"


def render(columns, rows, kind="csv", meta=None):
    if kind == "json":
        def num(v):
            if v is None or isinstance(v, str):
                return v
            v = float(fmt(v)) if fmt(v) != "nan" else None
            return v
        doc = {"columns": list(columns), "rows": [[num(v) for v in r] for r in rows]}
        if meta:
            doc["meta"] = meta
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


def emit(args, columns, rows, meta=None):
    kind = args.format or (args.cfg.output.get("format") if args.cfg else None) or "csv"
    path = args.output or (args.cfg.output.get("path") if args.cfg else None)
    text = render(columns, rows, kind, meta)
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---- device resolution ----------------------------------------------------------

def _truncations(args):
    if args.truncations is None:
        return None
    try:
        t = tuple(int(x) for x in args.truncations.split(","))
    except ValueError:
        raise ConfigError("--truncations expects three comma-separated integers") from None
    if len(t) != 3 or min(t) < 2:
        raise ConfigError("--truncations expects three integers >= 2")
    return t


def resolve_spec(args) -> CircuitSpec:
    from .devices import device_spec, figure_config, with_params

    tr = _truncations(args)
    if getattr(args, "preset", None) is not None:
        try:
            spec = device_spec(args.preset)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None
    elif getattr(args, "figure", None):
        try:
            spec = figure_config(args.figure).spec
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None
    elif args.cfg is not None:
        spec = spec_from_config(args.cfg)
    else:
        raise ConfigError("give --preset, --figure or --config")
    if tr is not None:
        spec = with_params(spec, truncations=tr)
    return spec


def _model(args):
    if args.model:
        return args.model
    if args.cfg is not None:
        return args.cfg.circuit.get("model", "circuit")
    return "circuit"


# ---- commands ---------------------------------------------------------------

def cmd_static_zz(args):
    from .devices import figure_config, with_params
    from .effective import static_zz_perturbative
    from .exact import static_zz_exact

    spec = resolve_spec(args)
    model = _model(args)
    axis, values = None, None
    if args.cfg is not None and args.cfg.sweep:
        s = args.cfg.sweep
        axis, values = s["axis"], np.linspace(s["start"], s["stop"], s["points"])
    elif args.figure:
        fc = figure_config(args.figure)
        axis = "Delta" if "Delta" in fc.axes else "g2c"
        values = fc.axes[axis]

    def point(v):
        s = spec if axis is None else with_params(spec, **{axis: float(v)})
        ze = static_zz_exact(s, model, warn=axis is None)
        try:
            zp = static_zz_perturbative(s)
        except ZZFreeError as e:
            if axis is None:
                raise
            print(f"warning [{e.guard}] at {axis} = {v:g}: {e}", file=sys.stderr)
            zp = float("nan")
        return ze * 1e6, zp * 1e6

    if axis is None:
        ze, zp = point(None)
        emit(args, ["zeta_exact_kHz", "zeta_pert_kHz"], [[ze, zp]], {"model": model})
        return 0
    res = parallel_map(point, list(values), args.workers)
    unit = SWEEP_AXES.get(axis, "GHz")
    scale = 1e3 if unit == "MHz" else 1.0
    rows = [[v * scale, ze, zp] for v, (ze, zp) in zip(values, res)]
    emit(args, [f"{axis}_{unit}", "zeta_exact_kHz", "zeta_pert_kHz"], rows, {"model": model})
    return 0


def cmd_boundary(args):
    from .devices import figure_config
    from .exact import zz_free_boundary

    fc = figure_config(args.figure)
    if "d1" not in fc.axes:
        raise ConfigError("boundary needs a figure with a d1 axis (fig3a)")
    spec = fc.spec
    tr = _truncations(args)
    if tr is not None:
        from .devices import with_params
        spec = with_params(spec, truncations=tr)
    lines = zz_free_boundary(fc.axes["d1"], fc.axes["Delta"], spec, _model(args), args.workers)
    rows = [[d1, r] for d1, roots in lines for r in roots]
    emit(args, ["d1_GHz", "Delta_star_GHz"], rows, {"model": _model(args)})
    return 0


def _omegas(args):
    if args.cfg is not None and args.cfg.drive.get("omega"):
        return np.asarray(args.cfg.drive["omega"])
    n = int(round(args.omega_max / args.omega_step))
    return np.arange(1, n + 1) * args.omega_step * 1e-3


def _method(args):
    if args.method:
        return args.method.upper()
    if args.cfg is not None:
        return args.cfg.drive.get("method", "LA")
    return "LA"


def cmd_cr_sweep(args):
    from .cr_gate import CRContext

    spec = resolve_spec(args)
    ctx = CRContext(spec, _model(args), sqrt_drive=args.sqrt_drive)
    method = _method(args)
    Om = _omegas(args)
    res = parallel_map(lambda O: ctx.coefficients(float(O), method, args.order), list(Om), args.workers)
    rows = [[O * 1e3, c.ZX * 1e3, c.ZZ * 1e6, method] for O, c in zip(Om, res)]
    emit(args, ["Omega_MHz", "alpha_ZX_MHz", "alpha_ZZ_kHz", "method"], rows,
         {"model": ctx.model, "zeta_kHz": ctx.zeta * 1e6, "omega_d_GHz": ctx.omega_d})
    return 0


def cmd_cancel_amp(args):
    from .cr_gate import cancellation_amplitude

    spec = resolve_spec(args)
    m = args.method.lower()
    kw = {}
    if m in ("la", "sw"):
        kw = dict(model=_model(args), sqrt_drive=args.sqrt_drive, omega_max=args.omega_max * 1e-3)
        if m == "sw":
            kw["order"] = args.order
    O = cancellation_amplitude(spec, m, **kw)
    print("none" if O is None else fmt(O * 1e3))
    return 0


def cmd_gate_error(args):
    from .cr_gate import CRContext
    from .gate_error import gate_error_curve

    spec = resolve_spec(args)
    ctx = CRContext(spec, _model(args), sqrt_drive=args.sqrt_drive)
    curve = gate_error_curve(spec, _omegas(args), _method(args), context=ctx, idle_zz=not args.no_idle_zz)
    if not args.no_idle_zz:
        print("note: static ZZ acts during the 40 ns pi pulses (disable with --no-idle-zz)", file=sys.stderr)
    rows = [[p.Omega * 1e3, p.t_g, p.error] for p in curve]
    emit(args, ["Omega_MHz", "t_g_ns", "error"], rows, {"model": ctx.model, "idle_zz": not args.no_idle_zz})
    return 0


def cmd_csfq(args):
    from .qubit_models import CSFQSpec, csfq_numeric_spectrum, csfq_optimize_xi, csfq_perturbative_spectrum

    if args.ec <= 0 or args.ej <= 0 or not (0 < args.alpha < 0.5):
        raise ConfigError("need E_C > 0, E_J > 0 and 0 < alpha < 1/2")
    s = CSFQSpec(args.ec, args.ej, args.alpha, args.flux)
    xi = csfq_optimize_xi(s)
    p = csfq_perturbative_spectrum(s, xi, 3)
    o = csfq_numeric_spectrum(s, n_levels=3)
    emit(args, ["xi", "f01_GHz", "delta_GHz", "f01_oracle_GHz", "delta_oracle_GHz"],
         [[xi, p.frequency, p.anharmonicity, o.frequency, o.anharmonicity]])
    return 0


# ---- parser -----------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="zzfree", description="Static and dynamical ZZ in coupler-mediated qubit pairs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, device=True, drive=False):
        p.add_argument("--config", help="INI run configuration")
        if device:
            p.add_argument("--preset", type=int, help="benchmark device id (1-10)")
            p.add_argument("--truncations", help="levels per mode, e.g. 5,5,5")
        p.add_argument("--model", choices=("circuit", "effective"), help="coupler treatment")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("-o", "--output", help="output path (default stdout)")
        p.add_argument("--workers", type=int, help="worker threads (default $ZZFREE_THREADS or 1)")
        if drive:
            p.add_argument("--omega-max", type=float, default=150.0, help="largest drive amplitude, MHz")
            p.add_argument("--omega-step", type=float, default=2.5, help="drive grid step, MHz")
            p.add_argument("--sqrt-drive", action="store_true", help="sqrt(n+1) drive matrix elements")
            p.add_argument("--order", type=int, default=4, help="perturbative order for SW")

    p = sub.add_parser("static-zz", help="static ZZ, exact and perturbative")
    common(p)
    p.add_argument("--figure", choices=("fig3b", "fig3d", "fig3e"))
    p.set_defaults(func=cmd_static_zz)

    p = sub.add_parser("boundary", help="ZZ-free detunings versus delta1")
    common(p)
    p.add_argument("--figure", default="fig3a", choices=("fig3a",))
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("cr-sweep", help="ZX and ZZ rates versus drive amplitude")
    common(p, drive=True)
    p.add_argument("--method", choices=("LA", "SW", "la", "sw"))
    p.set_defaults(func=cmd_cr_sweep, figure=None)

    p = sub.add_parser("cancel-amp", help="drive amplitude that cancels ZZ")
    common(p, drive=True)
    p.add_argument("--method", default="la", choices=("la", "sw", "on", "formula", "LA", "SW", "On"))
    p.set_defaults(func=cmd_cancel_amp, figure=None, omega_max=200.0)

    p = sub.add_parser("gate-error", help="echoed-CR error versus gate length")
    common(p, drive=True)
    p.add_argument("--method", choices=("LA", "SW", "la", "sw"))
    p.add_argument("--no-idle-zz", action="store_true", help="no static ZZ during the pi pulses")
    p.set_defaults(func=cmd_gate_error, figure=None, omega_max=200.0)

    p = sub.add_parser("csfq", help="CSFQ spectrum, perturbative and numeric")
    common(p, device=False)
    p.add_argument("--ec", type=float, default=0.292, help="E_C, GHz")
    p.add_argument("--ej", type=float, default=108.9, help="E_J, GHz")
    p.add_argument("--alpha", type=float, default=0.43)
    p.add_argument("--flux", type=float, default=0.5, help="reduced external flux f")
    p.set_defaults(func=cmd_csfq)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.cfg = load_config(args.config) if args.config else None
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ZZFreeError as e:
        print(f"numerical guard [{e.guard}]: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
