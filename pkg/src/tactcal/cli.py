"""``tactcal`` command-line entry point.

Subcommands::

    tactcal calibrate NORMAL.csv TORSION.csv [--repeat N.csv T.csv ...] --out record.json
    tactcal synth --out DIR
    tactcal sweep --out table.csv
    tactcal series --out table.csv
    tactcal reconstruct FIELD.txt (--record record.json | --e1-mpa E --nu1 NU) --out traction.txt

Settings resolve as built-in defaults, then a JSON config file
(``--config`` or ``$TACTCAL_CONFIG``), then command-line flags. Exit codes:
0 ok, 2 bad input or domain, 3 too little or degenerate data, 4 inversion
failure, 5 solver or root-finding failure.
"""

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import (
    CalibrationConfig,
    CalibrationDataset,
    aggregate_repeats,
    calibrate,
)
from .contact import (
    EXAMPLE_COEFFS,
    ContactGeometry,
    Material,
    derive_coefficients,
)
from .errors import (
    DegenerateDesignError,
    DomainError,
    InputFormatError,
    InsufficientDataError,
    InversionError,
    RootFindingError,
    SolverError,
    TactcalError,
)
from .fileio import (
    DEG,
    MM,
    read_field,
    read_json,
    read_normal_csv,
    read_torsion_csv,
    sha256_file,
    write_field,
    write_json,
    write_normal_csv,
    write_table,
    write_torsion_csv,
)
from .halfspace import (
    DEFAULT_LAMBDA,
    DEFAULT_MAX_DOF,
    DisplacementField,
    assemble_compliance,
    integrate_force,
    reconstruct_traction,
)
from .synthlab import (
    SIGMA_ANGLE_DEFAULT,
    SIGMA_DISP_DEFAULT,
    SweepConfig,
    run_sweep,
    series_vs_exact_report,
    synth_dataset,
    table_indenters,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DATA = 3
EXIT_INVERSION = 4
EXIT_SOLVER = 5

CONFIG_ENV = "TACTCAL_CONFIG"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings, in boundary units (mm, deg, MPa).

    ``soft_e1_mpa``/``soft_nu1`` of ``None`` mean "the command's own default"
    (the synth ground truth differs from the sweep's).
    """

    indenter_e2_mpa: float = 1.1035
    indenter_nu2: float = 0.3883
    indenter_r2_mm: float = 5.0
    elastomer_r1_mm: float = 15.0
    beta: float = 0.2
    range_mm: tuple = (0.2, 0.8)
    lambda_: float = DEFAULT_LAMBDA
    seed: int = 0
    n_bootstrap: int = 200
    soft_e1_mpa: float = None
    soft_nu1: float = None
    sigma_disp_mm: float = 0.0
    sigma_angle_deg: float = 0.0
    repeats: int = 1
    gamma1_grid_mm: tuple = tuple(np.linspace(0.2, 0.8, 12))
    theta1_grid_deg: tuple = tuple(np.linspace(5.0, 40.0, 12))
    normal_model: str = "exact"
    indenters: tuple = None
    grid: dict = None
    max_dof: int = DEFAULT_MAX_DOF

    def indenter(self):
        return Material.from_mpa(self.indenter_e2_mpa, self.indenter_nu2)

    def geometry(self):
        return ContactGeometry.from_mm(self.elastomer_r1_mm, self.indenter_r2_mm)

    def range_si(self):
        return (self.range_mm[0] * MM, self.range_mm[1] * MM)


# Config-file key -> RunConfig field. ``lambda`` is a Python keyword.
_CONFIG_KEYS = {f.name.rstrip("_"): f.name for f in fields(RunConfig)}
_GRID_KEYS = {"nx", "ny", "pitch_mm"}


def parse_range(text):
    """``"lo:hi"`` in mm to a float pair."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    if len(parts) != 2:
        raise DomainError(f"range must be 'lo:hi' in mm, got {text!r}")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise DomainError(f"range must be 'lo:hi' in mm, got {text!r}") from None
    if not (0 <= lo < hi and math.isfinite(hi)):
        raise DomainError(f"range needs 0 <= lo < hi, got {lo!r}:{hi!r}")
    return (lo, hi)


def _number(key, value, integer=False):
    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if integer:
        ok = ok and float(value).is_integer()
    if not ok:
        kind = "an integer" if integer else "a number"
        raise InputFormatError(f"config field {key!r} must be {kind}, got {value!r}")
    return int(value) if integer else float(value)


def _numbers(key, value):
    if not isinstance(value, list) or not value:
        raise InputFormatError(f"config field {key!r} must be a non-empty list of numbers")
    return tuple(_number(key, v) for v in value)


def config_from_mapping(data, base=None):
    """Overlay a parsed JSON object on ``base``; unknown keys are an error."""
    base = base or RunConfig()
    if not isinstance(data, dict):
        raise InputFormatError("config must be a JSON object")
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise InputFormatError(f"unknown config field {unknown[0]!r}")
    updates = {}
    for key, value in data.items():
        name = _CONFIG_KEYS[key]
        if key in ("seed", "n_bootstrap", "repeats", "max_dof"):
            updates[name] = _number(key, value, integer=True)
        elif key == "range_mm":
            try:
                updates[name] = parse_range(value)
            except DomainError as exc:
                raise InputFormatError(f"config field 'range_mm': {exc}") from None
        elif key in ("gamma1_grid_mm", "theta1_grid_deg"):
            updates[name] = _numbers(key, value)
        elif key == "normal_model":
            if value not in ("exact", "fit_form"):
                raise InputFormatError("config field 'normal_model' must be 'exact' or 'fit_form'")
            updates[name] = value
        elif key == "indenters":
            if not isinstance(value, list) or not value:
                raise InputFormatError("config field 'indenters' must be a list of [E2_mpa, nu2]")
            pairs = []
            for item in value:
                if not isinstance(item, list) or len(item) != 2:
                    raise InputFormatError(
                        f"config field 'indenters' entries must be [E2_mpa, nu2], got {item!r}"
                    )
                pairs.append((_number(key, item[0]), _number(key, item[1])))
            updates[name] = tuple(pairs)
        elif key == "grid":
            if not isinstance(value, dict):
                raise InputFormatError("config field 'grid' must be an object")
            extra = sorted(set(value) - _GRID_KEYS)
            if extra:
                raise InputFormatError(f"unknown config field 'grid.{extra[0]}'")
            updates[name] = {
                k: _number(f"grid.{k}", v, integer=(k != "pitch_mm")) for k, v in value.items()
            }
        else:
            updates[name] = _number(key, value)
    return replace(base, **updates)


def load_config(path):
    try:
        data = read_json(path)
    except FileNotFoundError:
        raise InputFormatError("config file not found", path) from None
    try:
        return config_from_mapping(data)
    except InputFormatError as exc:
        raise InputFormatError(str(exc), path) from None


# argparse dest -> RunConfig field for flags shared by every subcommand.
_FLAG_FIELDS = {
    "indenter_e2_mpa": "indenter_e2_mpa",
    "indenter_nu2": "indenter_nu2",
    "indenter_r2_mm": "indenter_r2_mm",
    "elastomer_r1_mm": "elastomer_r1_mm",
    "beta": "beta",
    "range_mm": "range_mm",
    "lambda_": "lambda_",
    "seed": "seed",
    "n_bootstrap": "n_bootstrap",
    "soft_e1_mpa": "soft_e1_mpa",
    "soft_nu1": "soft_nu1",
    "sigma_disp_mm": "sigma_disp_mm",
    "sigma_angle_deg": "sigma_angle_deg",
    "repeats": "repeats",
    "normal_model": "normal_model",
}


def resolve_config(args, environ=None):
    """Defaults, then config file, then flags; then validate."""
    environ = os.environ if environ is None else environ
    path = args.config or environ.get(CONFIG_ENV) or None
    cfg = load_config(path) if path else RunConfig()
    updates = {}
    for dest, name in _FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "device_noise", False):
        updates["sigma_disp_mm"] = SIGMA_DISP_DEFAULT / MM
        updates["sigma_angle_deg"] = math.degrees(SIGMA_ANGLE_DEFAULT)
    cfg = replace(cfg, **updates)
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    if not (0.0 < cfg.beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {cfg.beta!r}")
    if not (cfg.lambda_ >= 0 and math.isfinite(cfg.lambda_)):
        raise DomainError(f"lambda must be non-negative, got {cfg.lambda_!r}")
    if cfg.seed < 0:
        raise DomainError(f"seed must be non-negative, got {cfg.seed!r}")
    if cfg.repeats < 1:
        raise DomainError(f"repeats must be at least 1, got {cfg.repeats!r}")
    if cfg.sigma_disp_mm < 0 or cfg.sigma_angle_deg < 0:
        raise DomainError("noise levels must be non-negative")
    if cfg.n_bootstrap < 0:
        raise DomainError("n_bootstrap must be non-negative")
    parse_range(cfg.range_mm)
    cfg.indenter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg.geometry()


def _config_echo(cfg):
    return {
        "beta": cfg.beta,
        "range_mm": list(cfg.range_mm),
        "lambda": cfg.lambda_,
        "seed": cfg.seed,
        "n_bootstrap": cfg.n_bootstrap,
    }


def _indenter_echo(cfg):
    return {"E2_mpa": cfg.indenter_e2_mpa, "nu2": cfg.indenter_nu2, "R2_mm": cfg.indenter_r2_mm}


# ---------------------------------------------------------------- calibrate


def _load_dataset(normal_path, torsion_path, index):
    normal = read_normal_csv(normal_path)
    torsion = read_torsion_csv(torsion_path)
    if not normal:
        raise InsufficientDataError(f"{normal_path}: no normal samples")
    if not torsion:
        raise InsufficientDataError(f"{torsion_path}: no torsion samples")
    return CalibrationDataset(tuple(normal), tuple(torsion), index)


def build_record(cfg, result, inputs, timestamp=None):
    """CalibrationRecord as a JSON-ready dict."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    results = result.to_dict()
    results["E1_mpa"] = result.E1 / 1e6
    results["E1_std_mpa"] = result.E1_std / 1e6
    return {
        "schema_version": SCHEMA_VERSION,
        "timestamp": timestamp,
        "tool": {"name": "tactcal", "version": __version__},
        "indenter": _indenter_echo(cfg),
        "elastomer_geometry": {"R1_mm": cfg.elastomer_r1_mm},
        "config": _config_echo(cfg),
        "results": results,
        "provenance": [
            {"role": role, "path": str(p), "sha256": sha256_file(p)} for role, p in inputs
        ],
    }


def cmd_calibrate(args, cfg):
    pairs = [(args.normal, args.torsion)] + [tuple(p) for p in (args.repeat or [])]
    datasets = [_load_dataset(n, t, i) for i, (n, t) in enumerate(pairs)]
    dataset = aggregate_repeats(datasets)
    result = calibrate(
        dataset,
        cfg.indenter(),
        CalibrationConfig(cfg.range_si(), cfg.beta, cfg.n_bootstrap, cfg.seed),
    )
    inputs = []
    for i, (n, t) in enumerate(pairs):
        inputs += [(f"normal[{i}]", n), (f"torsion[{i}]", t)]
    print(f"E1  = {result.E1 / 1e6:.4f} MPa  (+/- {result.E1_std / 1e6:.2g})")
    print(f"nu1 = {result.nu1:.4f}  (+/- {result.nu1_std:.2g})")
    print(f"H1  = {result.H1:.6g}  H2 = {result.H2:.6g} m^-0.5  H3 = {result.H3:.6g}")
    print(
        f"rms residual: normal {result.rms_residual_normal / MM:.3g} mm "
        f"({result.n_normal} pts), torsion {math.degrees(result.rms_residual_torsion):.3g} deg "
        f"({result.n_torsion} pts)"
    )
    if args.out:
        write_json(args.out, build_record(cfg, result, inputs))
        print(f"record written to {args.out}")
    return EXIT_OK


# -------------------------------------------------------------------- synth


def cmd_synth(args, cfg):
    soft = Material.from_mpa(
        0.33 if cfg.soft_e1_mpa is None else cfg.soft_e1_mpa,
        0.39 if cfg.soft_nu1 is None else cfg.soft_nu1,
    )
    indenter = cfg.indenter()
    coeffs = derive_coefficients(soft, indenter, cfg.geometry(), cfg.beta)
    ds = synth_dataset(coeffs, _sweep_config(cfg), cfg.seed)
    normal, torsion = ds.normal_samples, ds.torsion_samples
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = f"synthetic, seed {cfg.seed}"
    write_normal_csv(out_dir / "normal.csv", normal, header)
    write_torsion_csv(out_dir / "torsion.csv", torsion, header)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "tactcal", "version": __version__},
        "truth": {
            "E1_mpa": soft.young_modulus / 1e6,
            "nu1": soft.poisson_ratio,
            "H1_theory": coeffs.H1_theory,
            "H3_theory": coeffs.H3_theory,
        },
        "indenter": _indenter_echo(cfg),
        "elastomer_geometry": {"R1_mm": cfg.elastomer_r1_mm},
        "config": {
            **_config_echo(cfg),
            "sigma_disp_mm": cfg.sigma_disp_mm,
            "sigma_angle_deg": cfg.sigma_angle_deg,
            "repeats": cfg.repeats,
            "normal_model": cfg.normal_model,
        },
        "files": {
            name: sha256_file(out_dir / name) for name in ("normal.csv", "torsion.csv")
        },
    }
    write_json(out_dir / "manifest.json", manifest)
    print(
        f"wrote {len(normal)} normal and {len(torsion)} torsion samples to {out_dir} "
        f"(E1 = {manifest['truth']['E1_mpa']:g} MPa, nu1 = {soft.poisson_ratio:g})"
    )
    return EXIT_OK


# -------------------------------------------------------------------- sweep

SWEEP_HEADER = (
    "E2_mpa", "nu2", "H1_true", "H1", "err_H1", "H3_true", "H3", "err_H3",
    "E1_mpa", "err_E1", "nu1", "err_nu1", "error",
)


def _sweep_config(cfg):
    kw = {}
    if cfg.soft_e1_mpa is not None or cfg.soft_nu1 is not None:
        kw["soft"] = Material.from_mpa(
            1.0 if cfg.soft_e1_mpa is None else cfg.soft_e1_mpa,
            0.48 if cfg.soft_nu1 is None else cfg.soft_nu1,
        )
    indenters = (
        table_indenters() if cfg.indenters is None
        else tuple(Material.from_mpa(e, nu) for e, nu in cfg.indenters)
    )
    return SweepConfig(
        indenter_grid=indenters,
        geometry=cfg.geometry(),
        beta=cfg.beta,
        gamma1_grid=tuple(np.array(cfg.gamma1_grid_mm) * MM),
        theta1_grid=tuple(np.array(cfg.theta1_grid_deg) * DEG),
        sigma_disp=cfg.sigma_disp_mm * MM,
        sigma_angle=math.radians(cfg.sigma_angle_deg),
        repeats=cfg.repeats,
        seed=cfg.seed,
        normal_model=cfg.normal_model,
        gamma1_range=cfg.range_si(),
        **kw,
    )


def cmd_sweep(args, cfg):
    report = run_sweep(_sweep_config(cfg))
    rows = []
    for r in report.rows:
        rows.append((
            r.indenter.young_modulus / 1e6, r.indenter.poisson_ratio,
            r.H1_true, r.H1, r.err_H1, r.H3_true, r.H3, r.err_H3,
            r.E1 / 1e6, r.err_E1, r.nu1, r.err_nu1, r.error,
        ))
    best = report.argmin("err_E1")
    soft = report.soft
    comment = [
        f"oracle: {report.note}",
        f"elastomer truth: E1 = {soft.young_modulus / 1e6:g} MPa, nu1 = {soft.poisson_ratio:g}",
    ]
    if best is None:
        comment.append("argmin err_E1: none (all rows failed)")
    else:
        ind = report.rows[best].indenter
        comment.append(
            f"argmin err_E1: row {best} (E2 = {ind.young_modulus / 1e6:g} MPa, "
            f"nu2 = {ind.poisson_ratio:g})"
        )
    if args.out:
        write_table(args.out, SWEEP_HEADER, rows, "\n".join(comment))
    for line in comment:
        print(line)
    for i, r in enumerate(report.rows):
        status = r.error or f"err_E1 = {r.err_E1:.3%}, err_nu1 = {r.err_nu1:.3%}"
        print(f"  [{i}] E2 = {r.indenter.young_modulus / 1e6:g} MPa, "
              f"nu2 = {r.indenter.poisson_ratio:g}: {status}")
    return EXIT_OK


# ------------------------------------------------------------------- series

SERIES_HEADER = (
    "gamma1", "exact", "series2", "series4", "err_series2", "err_series4",
    "exact_yoffe", "fit_form", "err_fit_form",
)


def cmd_series(args, cfg):
    if args.derived:
        soft = Material.from_mpa(
            1.0 if cfg.soft_e1_mpa is None else cfg.soft_e1_mpa,
            0.48 if cfg.soft_nu1 is None else cfg.soft_nu1,
        )
        coeffs = derive_coefficients(soft, cfg.indenter(), cfg.geometry(), cfg.beta)
        grid = np.linspace(cfg.range_mm[0], cfg.range_mm[1], 13) * MM
        unit, scale = "mm", MM
    else:
        coeffs = EXAMPLE_COEFFS
        grid = np.linspace(0.2, 1.0, 17)
        unit, scale = "cm", 1.0
    rows = series_vs_exact_report(coeffs, grid)
    table = [
        (r.gamma1 / scale, r.exact / scale, r.series2 / scale, r.series4 / scale,
         r.err_series2, r.err_series4, r.exact_yoffe / scale, r.fit_form / scale,
         r.err_fit_form)
        for r in rows
    ]
    comment = [f"lengths in {unit}; err_* are relative to the exact implicit root"]
    if math.isfinite(coeffs.H2_theory):
        comment.append(f"max err_series4 = {max(r.err_series4 for r in rows):.4%}")
    else:
        comment.append("series undefined for this pair (K1*K2 <= 0)")
    if math.isfinite(coeffs.H1_theory):
        comment.append(f"max err_fit_form = {max(r.err_fit_form for r in rows):.4%}")
    if args.out:
        write_table(args.out, SERIES_HEADER, table, "\n".join(comment))
    for line in comment:
        print(line)
    return EXIT_OK


# -------------------------------------------------------------- reconstruct


def _material_from_record(path):
    rec = read_json(path)
    try:
        if rec["schema_version"] != SCHEMA_VERSION:
            raise InputFormatError(f"unsupported schema_version {rec['schema_version']!r}", path)
        res = rec["results"]
        return Material.from_mpa(float(res["E1_mpa"]), float(res["nu1"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"not a calibration record ({exc})", path) from None


def cmd_reconstruct(args, cfg):
    if args.record:
        if args.e1_mpa is not None or args.nu1 is not None:
            raise DomainError("give either --record or --e1-mpa/--nu1, not both")
        material = _material_from_record(args.record)
    elif args.e1_mpa is not None and args.nu1 is not None:
        material = Material.from_mpa(args.e1_mpa, args.nu1)
    else:
        raise DomainError("elastomer material needed: --record or both --e1-mpa and --nu1")
    field = read_field(args.field)
    if not isinstance(field, DisplacementField):
        raise InputFormatError("expected a displacement_mm field", args.field)
    g = field.grid
    if cfg.grid:
        want = (cfg.grid.get("nx", g.nx), cfg.grid.get("ny", g.ny))
        pitch = cfg.grid.get("pitch_mm", g.pitch / MM)
        if want != g.shape or not math.isclose(pitch * MM, g.pitch, rel_tol=1e-9):
            raise DomainError(
                f"field grid {g.nx}x{g.ny} @ {g.pitch / MM:g} mm does not match configured "
                f"grid {want[0]}x{want[1]} @ {pitch:g} mm"
            )
    op = assemble_compliance(g, material, cfg.max_dof)
    traction = reconstruct_traction(op, field, cfg.lambda_)
    force = integrate_force(traction)
    mag = float(np.linalg.norm(force))
    comment = (
        f"reconstructed from {args.field}, E1 = {material.young_modulus / 1e6:g} MPa, "
        f"nu1 = {material.poisson_ratio:g}, lambda = {cfg.lambda_:g}\n"
        "force_N = " + ",".join(repr(float(f)) for f in force)
    )
    if args.out:
        write_field(args.out, traction, comment)
    print(f"F = ({force[0]:.6g}, {force[1]:.6g}, {force[2]:.6g}) N, |F| = {mag:.6g} N")
    return EXIT_OK


# -------------------------------------------------------------------- main


def _common(p):
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.add_argument("--indenter-e2-mpa", type=float, help="indenter Young's modulus (MPa)")
    p.add_argument("--indenter-nu2", type=float, help="indenter Poisson's ratio")
    p.add_argument("--indenter-r2-mm", type=float, help="indenter radius (mm)")
    p.add_argument("--elastomer-r1-mm", type=float, help="elastomer effective radius (mm)")
    p.add_argument("--beta", type=float, help="torsion indentation depth / R2 (default 0.2)")
    p.add_argument("--range-mm", type=parse_range, metavar="LO:HI",
                   help="gamma1 fit window in mm (default 0.2:0.8)")
    p.add_argument("--lambda", dest="lambda_", type=float,
                   help=f"relative Tikhonov weight (default {DEFAULT_LAMBDA:g})")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--out", help="output file or directory")


def _soft(p):
    p.add_argument("--soft-e1-mpa", type=float, help="elastomer truth E1 (MPa)")
    p.add_argument("--soft-nu1", type=float, help="elastomer truth nu1")


def _noise(p):
    p.add_argument("--sigma-disp-mm", type=float, help="displacement noise sd (mm)")
    p.add_argument("--sigma-angle-deg", type=float, help="angle noise sd (deg)")
    p.add_argument("--device-noise", action="store_true",
                   help="use device resolution as noise (0.001 mm, 2 deg)")
    p.add_argument("--repeats", type=int, help="runs averaged per grid point")
    p.add_argument("--normal-model", choices=("exact", "fit_form"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tactcal", description="In-situ elastomer calibration and force reconstruction."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate (E1, nu1) from normal and torsion series")
    p.add_argument("normal", help="normal series CSV (total_disp_mm,gamma1_mm)")
    p.add_argument("torsion", help="torsion series CSV (total_angle_deg,theta1_deg)")
    p.add_argument("--repeat", nargs=2, action="append", metavar=("NORMAL", "TORSION"),
                   help="additional repeat run on the same commanded grid")
    p.add_argument("--n-bootstrap", type=int, help="bootstrap resamples for uncertainty")
    _common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("synth", help="generate synthetic calibration series")
    _common(p)
    _soft(p)
    _noise(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sweep", help="calibration error across an indenter grid")
    _common(p)
    _soft(p)
    _noise(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("series", help="truncated expansion vs exact root table")
    p.add_argument("--derived", action="store_true",
                   help="use configured materials instead of the example coefficient set")
    _common(p)
    _soft(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("reconstruct", help="traction field from a displacement field")
    p.add_argument("field", help="grid-field file with displacement_mm values")
    p.add_argument("--record", help="calibration record JSON supplying E1, nu1")
    p.add_argument("--e1-mpa", type=float, help="elastomer E1 (MPa)")
    p.add_argument("--nu1", type=float, help="elastomer nu1")
    _common(p)
    p.set_defaults(func=cmd_reconstruct)
    return parser


def exit_code(exc):
    """Map an exception to the documented exit code."""
    if isinstance(exc, (InsufficientDataError, DegenerateDesignError)):
        return EXIT_DATA
    if isinstance(exc, InversionError):
        return EXIT_INVERSION
    if isinstance(exc, (SolverError, RootFindingError)):
        return EXIT_SOLVER
    # domain, alignment, resource and unreadable-file errors
    return EXIT_INPUT


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        try:
            cfg = resolve_config(args)
            return args.func(args, cfg)
        except (TactcalError, OSError, ValueError) as exc:
            step = getattr(exc, "step", None)
            where = f" [{step}]" if step else ""
            print(f"tactcal {args.command}{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
            unmatched = getattr(exc, "unmatched", None)
            for item in unmatched or ():
                print(f"  {item}", file=sys.stderr)
            return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
