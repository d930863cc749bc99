"""Synthetic calibration experiments generated from the forward contact models.

Errors here are measured against the semi-analytic models, not against a
finite-element reference, so they isolate truncation and rounding effects
plus whatever measurement noise is injected.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import (
    DEFAULT_RANGE,
    CalibrationConfig,
    CalibrationDataset,
    DisplacementSample,
    TorsionSample,
    calibrate,
    filter_range,
    fit_normal,
)
from .contact import (
    ContactGeometry,
    Material,
    derive_coefficients,
    series_gamma2,
    solve_gamma2_exact,
    torsion_ratio,
    yoffe_model_gamma2,
)
from .contact.normal import UPPER
from .contact.torsion import DEFAULT_BETA
from .errors import DomainError, TactcalError

ORACLE_NOTE = (
    "errors relative to the semi-analytic contact models (no finite-element reference); "
    "finite-element error magnitudes are not reproduced"
)

# Device resolutions: translation 0.001 mm, rotation 2 deg.
SIGMA_DISP_DEFAULT = 1e-6
SIGMA_ANGLE_DEFAULT = math.radians(2.0)

NORMAL_MODELS = ("exact", "fit_form")


def default_gamma1_grid():
    return tuple(np.linspace(0.2e-3, 0.8e-3, 12))


def default_theta1_grid():
    return tuple(np.radians(np.linspace(5.0, 40.0, 12)))


def table_indenters():
    """Indenter grid: E2 in {1,2,3,4} MPa at nu2 = 0.4, then nu2 in {0.45, 0.35} at 2 MPa."""
    return (
        Material.from_mpa(1.0, 0.4),
        Material.from_mpa(2.0, 0.4),
        Material.from_mpa(3.0, 0.4),
        Material.from_mpa(4.0, 0.4),
        Material.from_mpa(2.0, 0.45),
        Material.from_mpa(2.0, 0.35),
    )


@dataclass(frozen=True)
class SweepConfig:
    soft: Material = field(default_factory=lambda: Material.from_mpa(1.0, 0.48))
    indenter_grid: tuple = field(default_factory=table_indenters)
    geometry: ContactGeometry = field(default_factory=lambda: ContactGeometry.from_mm(15.0, 5.0))
    beta: float = DEFAULT_BETA
    gamma1_grid: tuple = field(default_factory=default_gamma1_grid)
    theta1_grid: tuple = field(default_factory=default_theta1_grid)
    sigma_disp: float = 0.0
    sigma_angle: float = 0.0
    repeats: int = 1
    seed: int = 0
    normal_model: str = "exact"
    branch: str = UPPER
    gamma1_range: tuple = DEFAULT_RANGE

    def __post_init__(self):
        if not self.indenter_grid or not self.gamma1_grid or not self.theta1_grid:
            raise DomainError("sweep grids must be non-empty")
        if self.sigma_disp < 0 or self.sigma_angle < 0:
            raise DomainError("noise sigmas must be non-negative")
        if self.repeats < 1:
            raise DomainError("repeats must be at least 1")
        if self.normal_model not in NORMAL_MODELS:
            raise DomainError(f"normal_model must be one of {NORMAL_MODELS}")
        if not (0.0 < self.beta < 1.0):
            raise DomainError(f"beta must lie in (0, 1), got {self.beta!r}")


@dataclass(frozen=True)
class SweepRow:
    indenter: Material
    H1_true: float
    H3_true: float
    H1: float = math.nan
    H3: float = math.nan
    E1: float = math.nan
    nu1: float = math.nan
    err_H1: float = math.nan
    err_H3: float = math.nan
    err_E1: float = math.nan
    err_nu1: float = math.nan
    error: str = ""


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    soft: Material
    note: str = ORACLE_NOTE

    def argmin(self, column="err_E1"):
        """Index of the row with the smallest finite value of ``column``."""
        vals = [getattr(r, column) for r in self.rows]
        finite = [(v, i) for i, v in enumerate(vals) if math.isfinite(v)]
        return min(finite)[1] if finite else None


def _children(seed, n):
    """``n`` independent child seed sequences of ``seed`` without mutating it."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [
        np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (i,), pool_size=ss.pool_size)
        for i in range(n)
    ]


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _noise(rng, sigma, n, repeats):
    if sigma == 0:
        return np.zeros(n)
    return rng.normal(0.0, sigma, size=(repeats, n)).mean(axis=0)


def true_gamma2(coeffs, gamma1_grid, normal_model="exact", branch=UPPER):
    """Noise-free indenter displacements for the chosen generating model.

    ``"exact"`` solves the implicit relation with the Yoffe-deepened indenter
    coefficient; ``"fit_form"`` evaluates ``H1 g + H2 g**1.5`` with
    ``H1 = H1_theory`` and ``H2`` the exact curvature coefficient of the same
    Yoffe-deepened pair.
    """
    g1 = np.asarray(gamma1_grid, dtype=float)
    if normal_model == "exact":
        return solve_gamma2_exact(g1, coeffs.yoffe_corrected(), branch)
    if normal_model == "fit_form":
        return yoffe_model_gamma2(g1, coeffs.H1_theory, coeffs.yoffe_corrected().H2_exact)
    raise DomainError(f"unknown normal model {normal_model!r}")


def generate_normal_series(coeffs, gamma1_grid, sigma_disp=0.0, seed=0, repeats=1,
                           normal_model="exact", branch=UPPER):
    """Synthetic micrometer/sensor pairs ``(g1 + g2 + eps, g1)``.

    ``eps`` is zero-mean Gaussian with standard deviation ``sigma_disp``,
    averaged over ``repeats`` independent runs on the same grid.
    """
    g1 = np.asarray(gamma1_grid, dtype=float)
    if np.any(g1 < 0):
        raise DomainError("gamma1 grid must be non-negative")
    g2 = true_gamma2(coeffs, g1, normal_model, branch)
    eps = _noise(_rng(seed), sigma_disp, len(g1), repeats)
    total = g1 + g2 + eps
    return [DisplacementSample(float(t), float(g)) for t, g in zip(total, g1)]


def generate_torsion_series(coeffs, beta, theta1_grid, sigma_angle=0.0, seed=0, repeats=1):
    """Synthetic rotation-mount/sensor pairs ``(theta1 + H3 theta1 + eps, theta1)``."""
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    t1 = np.asarray(theta1_grid, dtype=float)
    H3 = torsion_ratio(coeffs, beta)
    eps = _noise(_rng(seed), sigma_angle, len(t1), repeats)
    total = t1 + H3 * t1 + eps
    return [TorsionSample(float(t), float(th)) for t, th in zip(total, t1)]


def synth_dataset(coeffs, config, seed):
    """One noisy normal + torsion dataset; the two streams are independent children of ``seed``."""
    s_norm, s_tors = _children(seed, 2)
    normal = generate_normal_series(
        coeffs, config.gamma1_grid, config.sigma_disp, np.random.default_rng(s_norm),
        config.repeats, config.normal_model, config.branch,
    )
    torsion = generate_torsion_series(
        coeffs, config.beta, config.theta1_grid, config.sigma_angle,
        np.random.default_rng(s_tors), config.repeats,
    )
    return CalibrationDataset(tuple(normal), tuple(torsion))


def _rel(x, ref):
    return abs(x - ref) / abs(ref)


def _rel0(x, ref):
    return abs(x - ref) / abs(ref) if ref else 0.0


def run_row(config, indenter, seed, n_bootstrap=0):
    coeffs = derive_coefficients(config.soft, indenter, config.geometry, config.beta)
    row = dict(indenter=indenter, H1_true=coeffs.H1_theory, H3_true=coeffs.H3_theory)
    try:
        ds = synth_dataset(coeffs, config, seed)
        cal = calibrate(
            ds, indenter,
            CalibrationConfig(config.gamma1_range, config.beta, n_bootstrap, 0),
        )
    except TactcalError as exc:
        step = f"[{exc.step}] " if exc.step else ""
        return SweepRow(**row, error=f"{step}{type(exc).__name__}: {exc}")
    soft = config.soft
    return SweepRow(
        **row,
        H1=cal.H1,
        H3=cal.H3,
        E1=cal.E1,
        nu1=cal.nu1,
        err_H1=_rel(cal.H1, coeffs.H1_theory),
        err_H3=_rel(cal.H3, coeffs.H3_theory),
        err_E1=_rel(cal.E1, soft.young_modulus),
        err_nu1=_rel(cal.nu1, soft.poisson_ratio),
    )


def run_sweep(config):
    """Calibrate against each indenter of the grid and tabulate relative errors.

    Each row draws from its own child of ``config.seed`` so rows are
    independent of evaluation order. A failing row records its error and the
    sweep continues.
    """
    seeds = _children(config.seed, len(config.indenter_grid))
    rows = tuple(run_row(config, ind, s) for ind, s in zip(config.indenter_grid, seeds))
    return SweepReport(rows=rows, soft=config.soft)


def noise_study(config, indenter, n_seeds=100, percentile=95.0):
    """Monte-Carlo spread of calibration errors over ``n_seeds`` noise draws.

    Returns a dict with arrays of absolute ``nu1`` errors, relative ``E1`` and
    ``H1`` errors, their ``percentile`` values, and the number of seeds whose
    calibration raised (recorded as infinite error).
    """
    coeffs = derive_coefficients(config.soft, indenter, config.geometry, config.beta)
    noiseless = _noiseless_h1(coeffs, config)
    seeds = _children(config.seed, n_seeds)
    nu_err, E_err, H1_err = [], [], []
    cal_cfg = CalibrationConfig(config.gamma1_range, config.beta, 0, 0)
    for s in seeds:
        ds = synth_dataset(coeffs, config, s)
        try:
            cal = calibrate(ds, indenter, cal_cfg)
        except TactcalError:
            nu_err.append(math.inf)
            E_err.append(math.inf)
            H1_err.append(math.inf)
            continue
        nu_err.append(abs(cal.nu1 - config.soft.poisson_ratio))
        E_err.append(_rel(cal.E1, config.soft.young_modulus))
        H1_err.append(_rel(cal.H1, noiseless))
    out = dict(nu1_abs=np.array(nu_err), E1_rel=np.array(E_err), H1_rel=np.array(H1_err))
    for k in list(out):
        # An order statistic, so failed seeds count as infinite error instead of poisoning
        # the interpolation with nan.
        out[f"{k}_p{percentile:g}"] = float(
            np.percentile(out[k], percentile, method="inverted_cdf")
        )
    out["failures"] = int(np.isinf(out["nu1_abs"]).sum())
    return out


def _noiseless_h1(coeffs, config):
    normal = generate_normal_series(
        coeffs, config.gamma1_grid, 0.0, 0, 1, config.normal_model, config.branch
    )
    return fit_normal(filter_range(normal, *config.gamma1_range)).H1


@dataclass(frozen=True)
class SeriesRow:
    gamma1: float
    exact: float
    series2: float
    series4: float
    exact_yoffe: float
    fit_form: float
    err_series2: float
    err_series4: float
    err_fit_form: float


def series_vs_exact_report(coeffs, gamma1_grid=None, branch=UPPER):
    """Relative deviation of the truncated expansions from the exact root.

    ``err_series*`` compare against the exact root of ``coeffs`` (nan when
    the series is undefined);
    ``err_fit_form`` compares the ``"fit_form"`` generator against the exact
    root with the Yoffe-deepened indenter coefficient.
    """
    if gamma1_grid is None:
        gamma1_grid = np.linspace(0.05e-3, 1.0e-3, 20)
    rows = []
    H1 = coeffs.H1_theory if math.isfinite(coeffs.H1_theory) else None
    # The K-series needs K1 K2 > 0; outside that its columns are nan.
    series_defined = math.isfinite(coeffs.H2_theory)
    for g in np.atleast_1d(np.asarray(gamma1_grid, dtype=float)):
        ex = solve_gamma2_exact(g, coeffs, branch)
        if series_defined:
            s2 = series_gamma2(g, coeffs, order=2)
            s4 = series_gamma2(g, coeffs, order=4)
        else:
            s2 = s4 = math.nan
        if H1 is not None:
            ey = solve_gamma2_exact(g, coeffs.yoffe_corrected(), branch)
            ff = float(true_gamma2(coeffs, [g], "fit_form")[0])
        else:
            ey = ff = math.nan
        rows.append(SeriesRow(
            float(g), ex, s2, s4, ey, ff,
            _rel0(s2, ex), _rel0(s4, ex), _rel0(ff, ey) if H1 is not None else math.nan,
        ))
    return rows
