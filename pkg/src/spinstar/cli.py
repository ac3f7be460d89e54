"""Command-line front end.

Every subcommand writes its artifacts under an output prefix plus a
``<prefix>.manifest`` listing the resolved inputs and SHA-256 checksums.
Configuration comes from defaults, then an optional ``--config`` file of
``key = value`` lines, then flags (highest priority).

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration.
"""

import argparse
import math
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import io
from .collective_spin import SpinCoherentSpec, coherent_coeffs, m_values
from .effective_dynamics import truncated_propagate
from .exact_dynamics import ModelParams, build_initial, conserved_excitation, exact_propagate
from .phase_space import carpet, equatorial_slice, q_grid, theta_grid, worker_count
from .revival_analysis import (
    cat_count,
    fourier_component_phases,
    g_fourier_coefficients,
    gauss_sum_closed_form,
    gauss_sum_dft,
    revival_report,
    revival_time,
)
from .validation import defect_map, fidelity_map

COMMANDS = ("coeffs", "evolve", "qfunc", "carpet", "fidelity-map", "defect-map", "revival", "gauss")


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"invalid value for '{key}': {message}")
        self.key = key


@dataclass
class RunConfig:
    command: str = "coeffs"
    N: int = 100
    lam: float = 1.0
    theta0: float = math.pi / 2
    phi0: float = 0.0
    alpha: complex = 1.0 + 0j
    beta: complex = 0j
    p: int = 1
    q: int = 2
    time: str = "0.5T"
    t_max: float = 1.0
    n_t: int = 512
    n_theta: int = 256
    n_phi: int = 512
    n_values: tuple = (10, 20, 40, 80, 160)
    axis: str = "N"
    sign: int = 1
    method: str = "exact"
    prominence: float = 0.2
    out: str = ""

    def params(self):
        return ModelParams(self.N, self.lam, self.phi0)

    def spec(self):
        return SpinCoherentSpec.from_bloch(self.N, self.theta0, self.phi0)

    def resolve_time(self):
        return parse_time(self.time, revival_time(self.params())[0])


# config-file / flag key -> RunConfig attribute
KEY_ALIASES = {"lambda": "lam", "t-max": "t_max", "n-t": "n_t", "n-theta": "n_theta",
               "n-phi": "n_phi", "n-values": "n_values"}

_TIME_RE = re.compile(r"^\s*([0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*T\s*(?:/\s*([0-9]+))?\s*$")
_PI_RE = re.compile(r"^\s*([0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_time(text, T):
    """``"0.5T"``, ``"T/4"``, ``"4T/5"`` (units of ``T``) or a plain number (units of 1/lam)."""
    match = _TIME_RE.match(str(text))
    if match:
        coef = float(match.group(1)) if match.group(1) else 1.0
        den = int(match.group(2)) if match.group(2) else 1
        if den == 0:
            raise ValueError("zero denominator")
        return coef * T / den
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("time must be finite")
    return value


def parse_angle(text):
    """A float, or a multiple of ``pi`` such as ``pi/8`` or ``3pi/4``."""
    match = _PI_RE.match(str(text))
    if match:
        coef = float(match.group(1)) if match.group(1) else 1.0
        den = float(match.group(2)) if match.group(2) else 1.0
        return coef * math.pi / den
    return float(text)


def parse_complex(text):
    """``"re,im"`` or a bare real number."""
    parts = str(text).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError("expected 're,im'")


def parse_int_list(text):
    """``"10,20,40"`` or a range ``"start:stop:step"`` (stop inclusive)."""
    text = str(text).strip()
    if ":" in text:
        start, stop, step = (int(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        return tuple(range(start, stop + 1, step))
    return tuple(int(v) for v in text.split(",") if v.strip())


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise ValueError("must be a positive finite number")
    return v


def _grid_int(text):
    v = int(text)
    if v < 2:
        raise ValueError("must be >= 2")
    return v


def _sign(text):
    v = {"+": 1, "+1": 1, "1": 1, "plus": 1, "-": -1, "-1": -1, "minus": -1}.get(str(text).strip())
    if v is None:
        raise ValueError("must be +1 or -1")
    return v


def _choice(*options):
    def convert(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text

    return convert


def _theta0(text):
    v = parse_angle(text)
    if not 0.0 <= v < math.pi:
        raise ValueError("must lie in [0, pi)")
    return v


def _finite(text):
    v = parse_angle(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _fraction(text):
    v = float(text)
    if not 0.0 <= v < 1.0:
        raise ValueError("must lie in [0, 1)")
    return v


def _n_values(text):
    vals = parse_int_list(text)
    if not vals or min(vals) < 2 or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("must be a strictly increasing list of integers >= 2")
    return vals


CONVERTERS = {
    "N": _positive_int,
    "lam": _positive_float,
    "theta0": _theta0,
    "phi0": _finite,
    "alpha": parse_complex,
    "beta": parse_complex,
    "p": _positive_int,
    "q": _positive_int,
    "time": str,
    "t_max": _positive_float,
    "n_t": _grid_int,
    "n_theta": _grid_int,
    "n_phi": _grid_int,
    "n_values": _n_values,
    "axis": _choice("N", "theta"),
    "sign": _sign,
    "method": _choice("exact", "truncated"),
    "prominence": _fraction,
    "out": str,
}


def build_config(command, raw):
    """Turn raw string settings into a validated :class:`RunConfig`."""
    cfg = RunConfig(command=command)
    for key, value in raw.items():
        attr = KEY_ALIASES.get(key, key.replace("-", "_"))
        if attr not in CONVERTERS:
            raise ConfigError(key, "unknown key")
        try:
            setattr(cfg, attr, CONVERTERS[attr](value))
        except (ValueError, TypeError) as exc:
            raise ConfigError(key, str(exc) or "bad value") from None
    if abs(abs(cfg.alpha) ** 2 + abs(cfg.beta) ** 2 - 1.0) > 1e-10:
        raise ConfigError("alpha", "|alpha|^2 + |beta|^2 must equal 1")
    if math.gcd(cfg.p, cfg.q) != 1:
        raise ConfigError("p", f"p={cfg.p} and q={cfg.q} must be coprime")
    try:
        cfg.resolve_time()
    except ValueError as exc:
        raise ConfigError("time", str(exc)) from None
    if command == "revival" and abs(cfg.theta0 - math.pi / 2) > 1e-12:
        raise ConfigError("theta0", "fractional-revival analysis requires theta0 = pi/2")
    if command == "gauss" and cfg.N % 2:
        raise ConfigError("N", "closed-form Gauss sums need even N")
    if not cfg.out:
        cfg.out = f"spinstar_{command.replace('-', '_')}"
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    for flag in ("N", "lambda", "theta0", "phi0", "alpha", "beta", "p", "q", "time", "t-max",
                 "n-t", "n-theta", "n-phi", "n-values", "axis", "sign", "method", "prominence", "out"):
        common.add_argument(f"--{flag}", dest=f"opt:{flag}", default=argparse.SUPPRESS, metavar="VALUE")
    parser = _Parser(prog="spinstar", description="Spin-star dynamics: one qubit coupled to N qubits.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "coeffs": "Dicke coefficients of the initial coherent state",
        "evolve": "joint state at --time (exact or truncated)",
        "qfunc": "Husimi Q raster over (theta, phi) at --time",
        "carpet": "equatorial Q slices against t/T",
        "fidelity-map": "truncated-vs-exact fidelity over (N or theta0, t/T)",
        "defect-map": "eigenvalue-defect rasters over (N, theta0)",
        "revival": "fractional-revival report at t = pT/q",
        "gauss": "Gauss-sum Fourier coefficients, direct vs closed form",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _write(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    return data


def _raster_artifacts(prefix, raster):
    return {f"{prefix}.csv": io.raster_to_csv(raster), f"{prefix}.pgm": io.raster_to_pgm(raster)}


def _initial(cfg):
    return build_initial(cfg.params(), cfg.spec(), cfg.alpha, cfg.beta)


def _evolved(cfg, t):
    psi0 = _initial(cfg)
    if cfg.method == "truncated":
        return truncated_propagate(psi0, cfg.params(), t)
    return exact_propagate(psi0, cfg.params(), t)


def cmd_coeffs(cfg):
    amps = coherent_coeffs(cfg.spec()).amps
    lines = ["m,re,im,prob"]
    for m, a in zip(m_values(cfg.N), amps):
        lines.append(f"{m:g},{a.real:.17g},{a.imag:.17g},{abs(a) ** 2:.17g}")
    return {f"{cfg.out}.csv": "\n".join(lines) + "\n"}, {}


def cmd_evolve(cfg):
    t = cfg.resolve_time()
    psi0 = _initial(cfg)
    psi = _evolved(cfg, t)
    lines = ["m,down_re,down_im,up_re,up_im"]
    for m, (d, u) in zip(m_values(cfg.N), psi.amps):
        lines.append(f"{m:g},{d.real:.17g},{d.imag:.17g},{u.real:.17g},{u.imag:.17g}")
    expect, _ = conserved_excitation(psi)
    report = {
        "resolved_time": f"{t:.17g}",
        "norm": f"{psi.norm():.17g}",
        "excitation_expectation": f"{expect:.17g}",
        "overlap_with_initial": f"{abs(psi0.overlap(psi)):.17g}",
    }
    return {f"{cfg.out}.csv": "\n".join(lines) + "\n", f"{cfg.out}.report": io.to_keyvalue(report)}, {
        "resolved_time": f"{t:.17g}"
    }


def cmd_qfunc(cfg):
    t = cfg.resolve_time()
    psi = _evolved(cfg, t)
    raster = q_grid(psi, cfg.n_theta, cfg.n_phi)
    i, j = np.unravel_index(np.argmax(raster.values), raster.shape)
    report = {
        "resolved_time": f"{t:.17g}",
        "q_max": f"{raster.values.max():.17g}",
        "argmax_theta": f"{raster.axis0[i]:.17g}",
        "argmax_phi": f"{raster.axis1[j]:.17g}",
        "equatorial_peaks": cat_count(equatorial_slice(psi, cfg.n_phi), cfg.prominence),
    }
    artifacts = _raster_artifacts(cfg.out, raster)
    artifacts[f"{cfg.out}.report"] = io.to_keyvalue(report)
    return artifacts, {"resolved_time": f"{t:.17g}"}


def cmd_carpet(cfg):
    raster = carpet(cfg.params(), cfg.spec(), cfg.alpha, cfg.beta, cfg.n_t, cfg.n_phi, cfg.t_max)
    return _raster_artifacts(cfg.out, raster), {"T": f"{raster.meta['T']:.17g}"}


def cmd_fidelity_map(cfg):
    t_grid = np.linspace(0.0, cfg.t_max, cfg.n_t)
    if cfg.axis == "N":
        raster = fidelity_map("N", list(cfg.n_values), t_grid, lam=cfg.lam, phi0=cfg.phi0, sign=cfg.sign)
    else:
        raster = fidelity_map("theta", theta_grid(cfg.n_theta), t_grid, N=cfg.N, lam=cfg.lam,
                              phi0=cfg.phi0, sign=cfg.sign)
    return _raster_artifacts(cfg.out, raster), {}


def cmd_defect_map(cfg):
    dm = defect_map(theta_grid(cfg.n_theta), cfg.n_values, cfg.phi0)
    artifacts = {}
    artifacts.update(_raster_artifacts(f"{cfg.out}_e1", dm.e1))
    artifacts.update(_raster_artifacts(f"{cfg.out}_e2", dm.e2))
    lines = ["N,theta_lower,theta_upper"]
    lines += [f"{n},{lo:.17g},{hi:.17g}" for n, lo, hi in dm.boundary_rows()]
    artifacts[f"{cfg.out}_boundaries.csv"] = "\n".join(lines) + "\n"
    return artifacts, {}


def cmd_revival(cfg):
    report = revival_report(cfg.params(), cfg.p, cfg.q, cfg.sign, cfg.n_phi, cfg.prominence)
    return {f"{cfg.out}.report": report.to_keyvalue()}, {"resolved_time": f"{report.time:.17g}"}


def cmd_gauss(cfg):
    params = cfg.params()
    dft = gauss_sum_dft(cfg.p, cfg.q, params, cfg.sign)
    g = g_fourier_coefficients(cfg.p, cfg.q, params, cfg.sign)
    phis = fourier_component_phases(cfg.q)
    report = {"N": cfg.N, "p": cfg.p, "q": cfg.q, "sign": f"{cfg.sign:+d}"}
    g_res = float(np.max(np.abs(g - np.exp(-1j * phis) * dft)))
    cf_res = math.nan
    if cfg.p == 1:
        closed = np.array([gauss_sum_closed_form(cfg.q, l, params, cfg.sign) for l in range(cfg.q)])
        cf_res = float(np.max(np.abs(dft - closed)))
    for l in range(cfg.q):
        report[f"dft_{l}"] = f"{dft[l].real:.17g},{dft[l].imag:.17g}"
        if cfg.p == 1:
            report[f"closed_{l}"] = f"{closed[l].real:.17g},{closed[l].imag:.17g}"
    report["max_abs_dft_minus_closed"] = f"{cf_res:.17g}"
    report["max_abs_G_relation_residual"] = f"{g_res:.17g}"
    report["max_abs_modulus_error"] = f"{float(np.max(np.abs(np.abs(dft) - 1))):.17g}"
    return {f"{cfg.out}.report": io.to_keyvalue(report)}, {}


HANDLERS = {
    "coeffs": cmd_coeffs,
    "evolve": cmd_evolve,
    "qfunc": cmd_qfunc,
    "carpet": cmd_carpet,
    "fidelity-map": cmd_fidelity_map,
    "defect-map": cmd_defect_map,
    "revival": cmd_revival,
    "gauss": cmd_gauss,
}


def _manifest(cfg, extra, written):
    entries = {"command": cfg.command}
    for f in fields(cfg):
        if f.name == "command":
            continue
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, complex):
            value = f"{value.real:.17g},{value.imag:.17g}"
        elif isinstance(value, float):
            value = f"{value:.17g}"
        entries[f.name] = value
    entries.update(extra)
    for path, data in written.items():
        entries[f"sha256:{Path(path).name}"] = io.sha256(data)
    return io.to_keyvalue(entries)


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    raw = {}
    try:
        if args.config:
            raw.update(io.parse_keyvalue(Path(args.config).read_text()))
    except OSError as exc:
        print(f"spinstar: error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"spinstar: error: config file {exc}", file=sys.stderr)
        return 2
    raw.update({k[4:]: v for k, v in vars(args).items() if k.startswith("opt:")})
    try:
        cfg = build_config(args.command, raw)
        worker_count()
    except ConfigError as exc:
        print(f"spinstar: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"spinstar: error: invalid value for 'SPINSTAR_THREADS': {exc}", file=sys.stderr)
        return 2

    artifacts, extra = HANDLERS[cfg.command](cfg)
    try:
        written = {path: _write(path, data) for path, data in artifacts.items()}
        _write(f"{cfg.out}.manifest", _manifest(cfg, extra, written))
    except OSError as exc:
        print(f"spinstar: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
