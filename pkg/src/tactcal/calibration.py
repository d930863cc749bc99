"""Fit the two deformation ratios and invert them to the elastomer's (E1, nu1).

Procedure:

1. normal series: fit ``g2 = H1 g1 + H2 g1**1.5`` to (total - g1, g1) pairs
   inside the recommended mid range of ``g1``;
2. torsion series: fit ``theta2 = H3 theta1`` through the origin;
3. closed-form inversion of (H1, H3) with the indenter's known (E2, nu2).
"""

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .contact.coefficients import YOFFE_FACTOR
from .contact.torsion import DEFAULT_BETA, torsion_factor
from .errors import (
    AlignmentError,
    CalibrationWarning,
    DegenerateDesignError,
    InconsistentSampleError,
    InsufficientDataError,
    InversionError,
    TactcalError,
)

DEFAULT_RANGE = (0.2e-3, 0.8e-3)
NU_CLAMP = (0.001, 0.499)
# Rounded inversion constants for the default beta = 0.2 setup.
INVERSION_CONSTANTS_DEFAULT = (0.993, 0.279, 0.562)


@dataclass(frozen=True)
class DisplacementSample:
    """Micrometer total ``g1 + g2`` and sensor-measured ``g1`` (m)."""

    total_displacement: float
    gamma1: float


@dataclass(frozen=True)
class TorsionSample:
    """Rotation-mount total ``theta1 + theta2`` and sensor-measured ``theta1`` (rad)."""

    total_angle: float
    theta1: float


@dataclass(frozen=True)
class CalibrationDataset:
    normal_samples: tuple = ()
    torsion_samples: tuple = ()
    repeat_index: int = 0


@dataclass(frozen=True)
class CalibrationConfig:
    gamma1_range: tuple = DEFAULT_RANGE
    beta: float = DEFAULT_BETA
    n_bootstrap: int = 200
    seed: int = 0


@dataclass(frozen=True)
class NormalFit:
    H1: float
    H2: float
    rms_residual: float
    n: int


@dataclass(frozen=True)
class TorsionFit:
    H3: float
    rms_residual: float
    n: int


@dataclass(frozen=True)
class Inversion:
    E1: float
    nu1: float
    nu1_unclamped: float
    clamped: bool


@dataclass(frozen=True)
class CalibrationResult:
    H1: float
    H2: float
    H3: float
    E1: float
    nu1: float
    rms_residual_normal: float
    rms_residual_torsion: float
    n_normal: int
    n_torsion: int
    E1_std: float
    nu1_std: float
    beta: float = DEFAULT_BETA
    warnings: tuple = field(default=())

    def to_dict(self):
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d


def gamma2_from_total(sample, index=None):
    """Indenter displacement recovered as ``total - gamma1``."""
    g2 = sample.total_displacement - sample.gamma1
    if sample.gamma1 < 0 or g2 < 0:
        where = f"sample {index}" if index is not None else "sample"
        raise InconsistentSampleError(
            f"{where}: need total ({float(sample.total_displacement)!r}) >= gamma1 "
            f"({float(sample.gamma1)!r}) >= 0",
            index=index,
        )
    return g2


def theta2_from_total(sample, index=None):
    t2 = sample.total_angle - sample.theta1
    if sample.theta1 != 0 and (
        np.sign(sample.total_angle) != np.sign(sample.theta1)
        or abs(sample.total_angle) < abs(sample.theta1)
    ):
        where = f"sample {index}" if index is not None else "sample"
        raise InconsistentSampleError(
            f"{where}: total angle {float(sample.total_angle)!r} and theta1 "
            f"{float(sample.theta1)!r} must share sign with |total| >= |theta1|",
            index=index,
        )
    return t2


def filter_range(samples, min_gamma1=DEFAULT_RANGE[0], max_gamma1=DEFAULT_RANGE[1], min_count=3):
    """Keep samples with ``min_gamma1 <= gamma1 <= max_gamma1``."""
    if not min_gamma1 < max_gamma1:
        raise ValueError(f"empty range [{min_gamma1!r}, {max_gamma1!r}]")
    kept = [s for s in samples if min_gamma1 <= s.gamma1 <= max_gamma1]
    if len(kept) < min_count:
        raise InsufficientDataError(
            f"{len(kept)} of {len(samples)} normal samples in "
            f"[{min_gamma1:.4g}, {max_gamma1:.4g}] m; need at least {min_count}"
        )
    return kept


def _normal_design(g1):
    X = np.column_stack([g1, g1**1.5])
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    return X, scale


def fit_normal(samples):
    """Ordinary least squares of ``g2`` on ``{g1, g1**1.5}``.

    Returns
    -------
    NormalFit
        ``H1`` (dimensionless), ``H2`` (length**-0.5) and the RMS residual
        in length units.
    """
    if len(samples) < 3:
        raise InsufficientDataError(f"need at least 3 normal samples, got {len(samples)}")
    g1 = np.array([s.gamma1 for s in samples], dtype=float)
    g2 = np.array([gamma2_from_total(s, i) for i, s in enumerate(samples)])
    X, scale = _normal_design(g1)
    Xs = X / scale
    if np.linalg.matrix_rank(Xs) < 2:
        raise DegenerateDesignError("normal design is rank deficient (need distinct gamma1 > 0)")
    coef, *_ = np.linalg.lstsq(Xs, g2, rcond=None)
    H1, H2 = coef / scale
    resid = g2 - X @ np.array([H1, H2])
    return NormalFit(float(H1), float(H2), float(np.sqrt(np.mean(resid**2))), len(samples))


def fit_torsion(samples):
    """Slope through the origin, ``H3 = sum(theta1 theta2) / sum(theta1**2)``."""
    if len(samples) < 2:
        raise InsufficientDataError(f"need at least 2 torsion samples, got {len(samples)}")
    t1 = np.array([s.theta1 for s in samples], dtype=float)
    t2 = np.array([theta2_from_total(s, i) for i, s in enumerate(samples)])
    denom = np.dot(t1, t1)
    if denom == 0:
        raise DegenerateDesignError("all theta1 are zero; torsion slope undefined")
    H3 = np.dot(t1, t2) / denom
    resid = t2 - H3 * t1
    return TorsionFit(float(H3), float(np.sqrt(np.mean(resid**2))), len(samples))


def inversion_constants(beta=DEFAULT_BETA):
    """``(a, b, k)`` with ``nu1 = 1 - k X`` and ``E1 = (a - b X) H3 E2 / (1 + nu2)``.

    ``X = (H3/H1)(1 - nu2)``. At the default depth the customary rounded
    values are returned; other depths derive them from the rod correction.
    """
    if math.isclose(beta, DEFAULT_BETA, rel_tol=0, abs_tol=1e-12):
        return INVERSION_CONSTANTS_DEFAULT
    c = torsion_factor(beta)
    k = YOFFE_FACTOR / c
    return 2.0 / c, k / c, k


def invert_parameters(H1, H3, indenter, beta=DEFAULT_BETA, warn=True):
    """Elastomer (E1, nu1) from the two fitted slopes and the indenter's constants.

    ``nu1`` is clamped into ``(0.001, 0.499)``; a clamp emits
    :class:`CalibrationWarning`. A non-positive E1 raises
    :class:`InversionError`.
    """
    if not (H1 > 0 and H3 > 0):
        raise InversionError(f"need H1 > 0 and H3 > 0, got H1={H1!r}, H3={H3!r}", H1=H1, H3=H3)
    a, b, k = inversion_constants(beta)
    E2, nu2 = indenter.young_modulus, indenter.poisson_ratio
    X = H3 / H1 * (1.0 - nu2)
    E1 = (a - b * X) * H3 * E2 / (1.0 + nu2)
    nu1 = 1.0 - k * X
    if not E1 > 0:
        raise InversionError(
            f"inversion gave E1 = {E1:.4g} Pa <= 0 for H1={H1:.4g}, H3={H3:.4g}", H1=H1, H3=H3
        )
    lo, hi = NU_CLAMP
    clamped = not (lo <= nu1 <= hi)
    nu1_c = min(max(nu1, lo), hi)
    if clamped and warn:
        warnings.warn(
            f"nu1 = {nu1:.4f} outside the physical range; clamped to {nu1_c}",
            CalibrationWarning,
            stacklevel=2,
        )
    return Inversion(E1=float(E1), nu1=float(nu1_c), nu1_unclamped=float(nu1), clamped=clamped)


def _total(sample):
    if isinstance(sample, DisplacementSample):
        return sample.total_displacement
    return sample.total_angle


def _measured(sample):
    if isinstance(sample, DisplacementSample):
        return sample.gamma1
    return sample.theta1


def _average_series(series_list, tol, cls, label):
    base = series_list[0]
    ref = np.array([_total(s) for s in base])
    totals = [[_total(s)] for s in base]
    measured = [[_measured(s)] for s in base]
    unmatched = []
    for k, series in enumerate(series_list[1:], start=1):
        used = set()
        for s in series:
            t = _total(s)
            j = int(np.argmin(np.abs(ref - t))) if len(ref) else -1
            if j < 0 or abs(ref[j] - t) > tol or j in used:
                unmatched.append(f"{label} repeat {k}: total {t:.6g}")
                continue
            used.add(j)
            totals[j].append(t)
            measured[j].append(_measured(s))
        for j in set(range(len(base))) - used:
            unmatched.append(f"{label} repeat {k}: grid point {ref[j]:.6g} missing")
    if unmatched:
        raise AlignmentError("repeated runs do not share a commanded grid", unmatched)
    return tuple(cls(float(np.mean(t)), float(np.mean(m))) for t, m in zip(totals, measured))


def aggregate_repeats(datasets, disp_tol=1e-6, angle_tol=0.01):
    """Average repeated runs on a shared commanded grid.

    Samples are matched to the first dataset by total displacement (within
    ``disp_tol``) and total angle (within ``angle_tol``). Measured ``gamma1``
    and ``theta1``, and the totals themselves, are averaged per grid point.
    """
    datasets = list(datasets)
    if not datasets:
        raise InsufficientDataError("no datasets to aggregate")
    if len(datasets) == 1:
        return datasets[0]
    normal = _average_series(
        [d.normal_samples for d in datasets], disp_tol, DisplacementSample, "normal"
    )
    torsion = _average_series(
        [d.torsion_samples for d in datasets], angle_tol, TorsionSample, "torsion"
    )
    return CalibrationDataset(normal, torsion, datasets[0].repeat_index)


def _bootstrap(g1, g2, fit_n, t1, t2, fit_t, indenter, config):
    """Residual bootstrap of (E1, nu1); returns their standard deviations."""
    rng = np.random.default_rng(config.seed)
    B = config.n_bootstrap
    X, scale = _normal_design(g1)
    pinv = np.linalg.pinv(X / scale)
    fitted_n = X @ np.array([fit_n.H1, fit_n.H2])
    res_n = g2 - fitted_n
    fitted_t = fit_t.H3 * t1
    res_t = t2 - fitted_t
    Yn = fitted_n[:, None] + rng.choice(res_n, size=(len(g1), B), replace=True)
    Yt = fitted_t[:, None] + rng.choice(res_t, size=(len(t1), B), replace=True)
    H1s = (pinv @ Yn)[0] / scale[0]
    H3s = (t1 @ Yt) / np.dot(t1, t1)
    E, nu = [], []
    for H1, H3 in zip(H1s, H3s):
        try:
            inv = invert_parameters(H1, H3, indenter, config.beta, warn=False)
        except InversionError:
            continue
        E.append(inv.E1)
        nu.append(inv.nu1)
    if len(E) < 2:
        return math.nan, math.nan
    return float(np.std(E, ddof=1)), float(np.std(nu, ddof=1))


def calibrate(dataset, indenter, config=None):
    """Run the full three-step calibration on one (possibly averaged) dataset.

    Raised errors carry ``.step`` naming the failing stage: ``"filter"``,
    ``"fit_normal"``, ``"fit_torsion"``, ``"invert"``.
    """
    config = config or CalibrationConfig()
    notes = []
    step = "filter"
    try:
        lo, hi = config.gamma1_range
        normal = filter_range(dataset.normal_samples, lo, hi)
        step = "fit_normal"
        fit_n = fit_normal(normal)
        step = "fit_torsion"
        fit_t = fit_torsion(list(dataset.torsion_samples))
        step = "invert"
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", CalibrationWarning)
            inv = invert_parameters(fit_n.H1, fit_t.H3, indenter, config.beta)
        for w in caught:
            notes.append(str(w.message))
            warnings.warn(w.message, w.category, stacklevel=2)
    except TactcalError as exc:
        raise exc.with_step(step)

    g1 = np.array([s.gamma1 for s in normal])
    g2 = np.array([gamma2_from_total(s) for s in normal])
    t1 = np.array([s.theta1 for s in dataset.torsion_samples])
    t2 = np.array([s.total_angle - s.theta1 for s in dataset.torsion_samples])
    if config.n_bootstrap > 1:
        E_std, nu_std = _bootstrap(g1, g2, fit_n, t1, t2, fit_t, indenter, config)
    else:
        E_std = nu_std = math.nan

    return CalibrationResult(
        H1=fit_n.H1,
        H2=fit_n.H2,
        H3=fit_t.H3,
        E1=inv.E1,
        nu1=inv.nu1,
        rms_residual_normal=fit_n.rms_residual,
        rms_residual_torsion=fit_t.rms_residual,
        n_normal=fit_n.n,
        n_torsion=fit_t.n,
        E1_std=E_std,
        nu1_std=nu_std,
        beta=config.beta,
        warnings=tuple(notes),
    )
