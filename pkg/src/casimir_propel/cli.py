"""Command-line front end.

Every subcommand resolves a configuration (built-in defaults, then an
optional JSON file, then flags), runs one computation and writes CSV with a
``#`` provenance block. Exit codes: 0 success, 1 invalid configuration,
2 quadrature failure.

Examples
--------
  casimir-propel spheroid-lateral --plate plate1 --r-perp 10e-9
  casimir-propel sweep --param r_perp --from 1e-9 --to 40e-9 --points 80
  casimir-propel figure fig4 --output fig4.csv
"""
import argparse
import copy
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .constants import C
from .constants import as_dict as constants_dict
from .forces import (
    ThermalScene,
    gravity_ratio,
    isolated_force_z,
    janus_dilute_force,
    lateral_force_spheroid,
    two_temperature_force,
)
from .materials import ConstantPermittivity, fresnel_reflection, model_from_dict, PRESET_TABLE
from .polarizability import Orientation, SpheroidSpec, overlap_factor
from .quadrature import QuadratureSpec
from .scattering import BornJanusTMatrix, BornQuadrature, JanusSphere, QuadratureError, mie_coefficients
from .thermo import FrictionModel, additional_friction, friction_curve, heating_derivative
from .waves import Truncation

THREADS_ENV = "CASIMIR_PROPEL_THREADS"
RAD_PER_UM = 1e6

DEFAULTS = {
    "spheroid": {"R_par": 40e-9, "R_perp": 10e-9, "material": "spheroid"},
    "plate": "plate1",
    "scene": {"T_particle": 550.0, "T_plate": 300.0, "d": 400e-9},
    "orientation": {"theta": math.pi / 4, "phi": 0.0},
    "density": 3210.0,
    "quadrature": {"rel_tol": 1e-8, "x_max": 60.0, "max_panels": 4000},
    "janus": {
        "R": 0.5e-6,
        "eps_lower": "1.05",
        "eps_upper": "1.05+0.02j",
        "T": 300.0,
        "method": "closed-form",
        "l_max": 3,
    },
    "sweep": {"param": "ratio", "from": 0.01, "to": 1.0, "points": 100},
    "overlap": {"ratios": [0.2, 0.5, 0.8], "omega_c_from": 0.02, "omega_c_to": 0.06, "points": 401},
    "heat_transfer_k": None,
    "friction": {"C": 1e-15, "k": 1e-9, "tau1": 1e-14, "gamma_std": 1.0, "delta_gamma": 0.5,
                 "points": 200},
    "mie": {"R": 50e-9, "eps": "4", "mu": "1", "omega": 1e14, "l_max": 3},
    "fresnel": {"eps": "4", "mu": "1", "omega": 1e14, "k_perp": [0.0]},
    "output": None,
}

# flag -> (config path, type, help)
_COMMON_FLAGS = {
    "--r-par": (("spheroid", "R_par"), float, "spheroid semi-axis along the symmetry axis (m)"),
    "--r-perp": (("spheroid", "R_perp"), float, "spheroid semi-axis across the symmetry axis (m)"),
    "--material": (("spheroid", "material"), str, "spheroid material preset or permittivity"),
    "--plate": (("plate",), str, "plate material preset or permittivity"),
    "--T": (("scene", "T_particle"), float, "particle temperature (K)"),
    "--Tp": (("scene", "T_plate"), float, "plate temperature (K)"),
    "--d": (("scene", "d"), float, "center-to-surface distance (m)"),
    "--theta": (("orientation", "theta"), float, "polar tilt of the symmetry axis (rad)"),
    "--phi": (("orientation", "phi"), float, "azimuth of the symmetry axis (rad)"),
    "--density": (("density",), float, "mass density for the weight normalization (kg/m^3)"),
    "--rel-tol": (("quadrature", "rel_tol"), float, "quadrature relative tolerance"),
    "--x-max": (("quadrature", "x_max"), float, "upper cutoff in hbar w / k_B T"),
    "--max-panels": (("quadrature", "max_panels"), int, "quadrature panel budget"),
    "--output": (("output",), str, "CSV output path (default: stdout)"),
}

_SCENARIO_FLAGS = {
    "janus-force": {
        "--radius": (("janus", "R"), float, "sphere radius (m)"),
        "--eps-lower": (("janus", "eps_lower"), str, "permittivity of the z < 0 half"),
        "--eps-upper": (("janus", "eps_upper"), str, "permittivity of the z > 0 half"),
        "--temperature": (("janus", "T"), float, "particle temperature (K)"),
        "--method": (("janus", "method"), str, "closed-form or born"),
        "--l-max": (("janus", "l_max"), int, "multipole cutoff of the born route"),
    },
    "sweep": {
        "--param": (("sweep", "param"), str, "swept parameter"),
        "--from": (("sweep", "from"), float, "first value"),
        "--to": (("sweep", "to"), float, "last value"),
        "--points": (("sweep", "points"), int, "number of points"),
    },
    "overlap": {
        "--ratios": (("overlap", "ratios"), "floats", "R_perp/R_par values at fixed volume"),
        "--omega-c-from": (("overlap", "omega_c_from"), float, "first w/c (rad/um)"),
        "--omega-c-to": (("overlap", "omega_c_to"), float, "last w/c (rad/um)"),
        "--points": (("overlap", "points"), int, "number of frequencies"),
    },
    "heating": {
        "--k": (("heat_transfer_k",), float, "heat transfer coefficient (W/K) for the friction"),
    },
    "friction-curve": {
        "--C": (("friction", "C"), float, "heat capacity (J/K)"),
        "--k": (("friction", "k"), float, "heat transfer coefficient (W/K)"),
        "--tau1": (("friction", "tau1"), float, "fast time scale (s)"),
        "--gamma-std": (("friction", "gamma_std"), float, "standard friction (N s/m)"),
        "--delta-gamma": (("friction", "delta_gamma"), float, "additional friction (N s/m)"),
        "--points": (("friction", "points"), int, "number of time points"),
    },
    "mie": {
        "--radius": (("mie", "R"), float, "sphere radius (m)"),
        "--eps": (("mie", "eps"), str, "permittivity"),
        "--mu": (("mie", "mu"), str, "permeability"),
        "--omega": (("mie", "omega"), float, "angular frequency (rad/s)"),
        "--l-max": (("mie", "l_max"), int, "highest multipole"),
    },
    "fresnel": {
        "--eps": (("fresnel", "eps"), str, "permittivity"),
        "--mu": (("fresnel", "mu"), str, "permeability"),
        "--omega": (("fresnel", "omega"), float, "angular frequency (rad/s)"),
        "--k-perp": (("fresnel", "k_perp"), "floats", "parallel wave numbers (1/m)"),
    },
    "spheroid-lateral": {},
}

SWEEP_PARAMS = {
    "ratio": None,
    "r_perp": ("spheroid", "R_perp"),
    "r_par": ("spheroid", "R_par"),
    "d": ("scene", "d"),
    "theta": ("orientation", "theta"),
    "phi": ("orientation", "phi"),
    "T": ("scene", "T_particle"),
    "Tp": ("scene", "T_plate"),
}

FIGURES = ("fig3", "fig4", "fig5", "fig7")


class ConfigError(ValueError):
    """Invalid run configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# configuration

def _set_path(cfg, path, value):
    node = cfg
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value


def _merge(base, override):
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def resolve_config(args, flag_table):
    cfg = copy.deepcopy(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                _merge(cfg, json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for flag, (path, _, _) in flag_table.items():
        value = getattr(args, _dest(flag))
        if value is not None:
            _set_path(cfg, path, value)
    return cfg


def _dest(flag):
    return "opt_" + flag.lstrip("-").replace("-", "_")


def _model(value):
    if isinstance(value, str):
        if value in PRESET_TABLE:
            return model_from_dict(value)
        try:
            return ConstantPermittivity(complex(value.replace(" ", "")))
        except ValueError:
            raise ConfigError(
                f"material {value!r} is neither a preset ({', '.join(sorted(PRESET_TABLE))}) "
                "nor a complex number"
            ) from None
    try:
        return model_from_dict(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _complex(value):
    try:
        if isinstance(value, (list, tuple)):
            return complex(*value)
        return complex(str(value).replace(" ", ""))
    except (ValueError, TypeError):
        raise ConfigError(f"cannot parse complex number {value!r}") from None


def _quadrature(cfg):
    q = cfg["quadrature"]
    try:
        return QuadratureSpec(float(q["rel_tol"]), float(q["x_max"]), int(q["max_panels"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _spheroid(cfg):
    s = cfg["spheroid"]
    try:
        return SpheroidSpec(float(s["R_par"]), float(s["R_perp"]), _model(s["material"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _scene(cfg):
    s = cfg["scene"]
    try:
        return ThermalScene(float(s["T_particle"]), float(s["T_plate"]), float(s["d"]),
                            _model(cfg["plate"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _orientation(cfg):
    o = cfg["orientation"]
    try:
        return Orientation(float(o["theta"]), float(o["phi"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# computations

def _lateral_row(cfg):
    spheroid = _spheroid(cfg)
    scene = _scene(cfg)
    orient = _orientation(cfg)
    quad = _quadrature(cfg)
    result = two_temperature_force(
        lambda t: lateral_force_spheroid(spheroid, orient, scene, quad, temperature=t),
        scene.T_particle,
        scene.T_plate,
    )
    ratio = gravity_ratio(result.value, spheroid, float(cfg["density"]))
    v = result.validity
    return [result.value, ratio, abs(ratio), result.quadrature_error, v.R_over_d, v.d_over_lambdaT]


_LATERAL_HEADER = ["force_N", "force_over_weight", "abs_force_over_weight", "quadrature_error_N",
                   "R_over_d", "d_over_lambdaT"]


def _sweep_point(cfg, param, value):
    return [value] + _lateral_row(_point_cfg(cfg, param, value))


def _workers():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _map_ordered(fn, cfg, param, values):
    workers = min(_workers(), len(values))
    if workers <= 1:
        return [fn(cfg, param, v) for v in values]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * len(values), [param] * len(values), values))


def _check_sweep(cfg):
    s = cfg["sweep"]
    param = s["param"]
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    points = int(s["points"])
    if points < 1:
        raise ConfigError("sweep needs at least one point")
    lo, hi = float(s["from"]), float(s["to"])
    # shape validation up front so no point fails midway
    for v in (lo, hi):
        _spheroid(_point_cfg(cfg, param, v))
        _orientation(_point_cfg(cfg, param, v))
        _scene(_point_cfg(cfg, param, v))
    return param, np.linspace(lo, hi, points).tolist()


def _point_cfg(cfg, param, value):
    cfg = copy.deepcopy(cfg)
    if param == "ratio":
        cfg["spheroid"]["R_perp"] = value * float(cfg["spheroid"]["R_par"])
    else:
        _set_path(cfg, SWEEP_PARAMS[param], value)
    return cfg


def run_spheroid_lateral(cfg):
    return _LATERAL_HEADER, [_lateral_row(cfg)]


def run_sweep(cfg):
    param, values = _check_sweep(cfg)
    rows = _map_ordered(_sweep_point, cfg, param, values)
    return [param] + _LATERAL_HEADER, rows


def run_janus(cfg):
    j = cfg["janus"]
    e1, e2 = _complex(j["eps_lower"]), _complex(j["eps_upper"])
    R, T = float(j["R"]), float(j["T"])
    if not R > 0:
        raise ConfigError("janus radius must be positive")
    quad = _quadrature(cfg)
    method = j["method"]
    if method == "closed-form":
        res = janus_dilute_force(ConstantPermittivity(e1), ConstantPermittivity(e2), R, T, quad)
    elif method == "born":
        born = BornJanusTMatrix(JanusSphere(R, e1, e2), Truncation(int(j["l_max"])), BornQuadrature())
        res = isolated_force_z(born, T, quad)
    else:
        raise ConfigError(f"janus method must be 'closed-form' or 'born', got {method!r}")
    return ["force_N", "quadrature_error_N"], [[res.value, res.quadrature_error]]


def run_overlap(cfg, normalize=False):
    o = cfg["overlap"]
    base = _spheroid(cfg)
    volume = base.R_perp**2 * base.R_par
    w_over_c = np.linspace(float(o["omega_c_from"]), float(o["omega_c_to"]), int(o["points"]))
    omega = w_over_c * RAD_PER_UM * C
    cols = []
    for ratio in o["ratios"]:
        ratio = float(ratio)
        if not 0 < ratio <= 1:
            raise ConfigError("overlap ratios must lie in (0, 1]")
        r_par = (volume / ratio**2) ** (1.0 / 3.0)
        spec = SpheroidSpec(r_par, ratio * r_par, base.material)
        cols.append(np.asarray(overlap_factor(spec, omega), dtype=float))
    data = np.column_stack(cols)
    if normalize:
        peak = np.max(np.abs(data))
        data = data / peak if peak > 0 else data
    header = ["omega_over_c_rad_per_um"] + [f"ratio_{float(r):g}" for r in o["ratios"]]
    return header, np.column_stack([w_over_c, data]).tolist()


def run_heating(cfg):
    spheroid = _spheroid(cfg)
    scene = _scene(cfg)
    eq_scene = ThermalScene(scene.T_particle, scene.T_particle, scene.d, scene.plate)
    dhdv = heating_derivative(spheroid, eq_scene, _orientation(cfg), _quadrature(cfg))
    k = cfg.get("heat_transfer_k")
    if k is None:
        return ["dH_dv_W_per_m_per_s"], [[dhdv]]
    return ["dH_dv_W_per_m_per_s", "delta_gamma_N_s_per_m"], [
        [dhdv, additional_friction(dhdv, float(k), scene.T_particle)]
    ]


def run_friction_curve(cfg):
    f = cfg["friction"]
    try:
        model = FrictionModel(float(f["C"]), float(f["k"]), float(f["tau1"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    points = int(f["points"])
    if points < 2:
        raise ConfigError("friction curve needs at least two points")
    t = np.concatenate([[0.0], np.geomspace(model.tau1 / 10, 100 * model.tau2, points - 1)])
    rows = friction_curve(float(f["gamma_std"]), float(f["delta_gamma"]), model, t)
    return ["t_s", "gamma_N_s_per_m"], [list(r) for r in rows]


def run_mie(cfg):
    m = cfg["mie"]
    R, omega, lmax = float(m["R"]), float(m["omega"]), int(m["l_max"])
    if not (R > 0 and omega > 0 and lmax >= 1):
        raise ConfigError("mie needs radius > 0, omega > 0 and l_max >= 1")
    tm, tn = mie_coefficients(lmax, R, _complex(m["eps"]), _complex(m["mu"]), omega)
    rows = [[l, tm[l - 1].real, tm[l - 1].imag, tn[l - 1].real, tn[l - 1].imag]
            for l in range(1, lmax + 1)]
    return ["l", "TM_re", "TM_im", "TN_re", "TN_im"], rows


def run_fresnel(cfg):
    f = cfg["fresnel"]
    eps, mu, omega = _complex(f["eps"]), _complex(f["mu"]), float(f["omega"])
    if not omega > 0:
        raise ConfigError("fresnel needs omega > 0")
    rows = []
    for k in f["k_perp"]:
        k = float(k)
        if k < 0:
            raise ConfigError("k_perp must be non-negative")
        rn = fresnel_reflection("N", k, omega, eps, mu)
        rm = fresnel_reflection("M", k, omega, eps, mu)
        rows.append([k, rn.real, rn.imag, rm.real, rm.imag])
    return ["k_perp_per_m", "rN_re", "rN_im", "rM_re", "rM_im"], rows


def run_figure(cfg, figure):
    if figure == "fig3":
        return run_overlap(cfg, normalize=True)
    if figure in ("fig4", "fig5"):
        cfg = copy.deepcopy(cfg)
        cfg["plate"] = "plate1" if figure == "fig4" else "plate2"
        cfg["spheroid"].update(R_par=40e-9, material="spheroid")
        cfg["scene"].update(T_particle=550.0, T_plate=300.0, d=400e-9)
        cfg["orientation"].update(theta=math.pi / 4, phi=0.0)
        cfg["sweep"].update(param="ratio", **{"from": 0.01, "to": 1.0})
        header, rows = run_sweep(cfg)
        return ["r_perp_over_r_par"] + header[1:], rows
    if figure == "fig7":
        return run_friction_curve(cfg)
    raise ConfigError(f"unknown figure {figure!r}")


# output

def _fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return "%.12e" % float(value)


def render_csv(command, cfg, header, rows, generated_at=None):
    stamp = generated_at or datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [
        f"# casimir-propel {__version__}",
        f"# command: {command}",
        f"# config: {json.dumps(cfg, sort_keys=True, separators=(',', ':'))}",
        f"# constants: {json.dumps(constants_dict(), sort_keys=True, separators=(',', ':'))}",
        f"# generated-at: {stamp}",
        ",".join(header),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _warn_validity(header, rows):
    if "R_over_d" not in header:
        return
    i, j = header.index("R_over_d"), header.index("d_over_lambdaT")
    bad = [r for r in rows if not (r[i] < 0.2 and r[j] < 0.2)]
    if bad:
        print(
            f"warning: {len(bad)} of {len(rows)} points outside the near-field window "
            "(R/d < 0.2 and d/lambda_T < 0.2)",
            file=sys.stderr,
        )


RUNNERS = {
    "spheroid-lateral": run_spheroid_lateral,
    "sweep": run_sweep,
    "janus-force": run_janus,
    "overlap": run_overlap,
    "heating": run_heating,
    "friction-curve": run_friction_curve,
    "mie": run_mie,
    "fresnel": run_fresnel,
}


def _add_flags(parser, table):
    for flag, (_, kind, help_text) in table.items():
        if kind == "floats":
            parser.add_argument(flag, dest=_dest(flag), type=float, nargs="+", help=help_text)
        else:
            parser.add_argument(flag, dest=_dest(flag), type=kind, help=help_text)


def build_parser():
    parser = _Parser(prog="casimir-propel", description="Non-equilibrium Casimir self-propulsion")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in list(RUNNERS) + ["figure"]:
        p = sub.add_parser(name)
        if name == "figure":
            p.add_argument("figure", choices=FIGURES)
        p.add_argument("--config", help="JSON configuration file")
        table = dict(_COMMON_FLAGS)
        table.update(_SCENARIO_FLAGS.get(name, {}))
        if name == "figure":
            table["--points"] = (("sweep", "points"), int, "number of abscissa points")
        _add_flags(p, table)
        p.set_defaults(flag_table=table)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, args.flag_table)
        if args.command == "figure":
            if args.figure == "fig3" and args.opt_points is not None:
                cfg["overlap"]["points"] = args.opt_points
            if args.figure == "fig7" and args.opt_points is not None:
                cfg["friction"]["points"] = args.opt_points
            header, rows = run_figure(cfg, args.figure)
            command = f"figure {args.figure}"
        else:
            header, rows = RUNNERS[args.command](cfg)
            command = args.command
    except (ConfigError, KeyError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except QuadratureError as exc:
        print(f"error: quadrature failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    _warn_validity(header, rows)
    text = render_csv(command, cfg, header, rows)
    if cfg.get("output"):
        with open(cfg["output"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
