"""Exit-criteria gate. Each test carries ``acceptance(n)``; the terminal summary
prints one PASS/FAIL line per criterion with the measured value."""

import json
import warnings

import numpy as np
import pytest

from tactcal.calibration import (
    DisplacementSample,
    TorsionSample,
    fit_normal,
    fit_torsion,
    invert_parameters,
)
from tactcal.cli import main
from tactcal.contact import (
    EXAMPLE_COEFFS,
    ContactGeometry,
    Material,
    derive_coefficients,
    origin_slope,
    rod_correction,
)
from tactcal.errors import ModelPremiseWarning
from tactcal.fileio import write_table
from tactcal.halfspace import (
    SurfaceGrid,
    TractionField,
    assemble_compliance,
    forward_displacements,
    integrate_force,
    reconstruct_traction,
)
from tactcal.synthlab import (
    SIGMA_ANGLE_DEFAULT,
    SIGMA_DISP_DEFAULT,
    SweepConfig,
    noise_study,
    series_vs_exact_report,
)

MM = 1e-3
PROBE = Material.from_mpa(1.1035, 0.3883)
SENSOR_TRUTH = Material.from_mpa(0.33, 0.39)

# Reported slopes and the elastomer constants they invert to.
REPORTED_H1, REPORTED_H3 = 0.3397, 0.6023
REPORTED_E1_MPA, REPORTED_NU1 = 0.3305, 0.3905
TORSION_CONSTANT = 2.014
EXAMPLE_K1 = 0.5
# Mid-range gamma1 window for the example coefficient set (its lengths are in cm).
EXAMPLE_RANGE = (0.2, 0.8)

N_CLOSURE_PAIRS = 50
N_FIT_CONFIGS = 20
N_NOISE_SEEDS = 100
NOISE_REPEATS = 10
NOISE_P95_LIMIT = 0.03

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    SENSOR_GEOMETRY = ContactGeometry.from_mm(15.0, 5.0)
WIDE_GEOMETRY = ContactGeometry.from_mm(50.0, 5.0)


def _measured(record_property, text):
    record_property("measured", text)
    print(text)


@pytest.mark.acceptance(1)
def test_reported_slopes_invert_to_reported_constants(record_property):
    inv = invert_parameters(REPORTED_H1, REPORTED_H3, PROBE)
    E1 = inv.E1 / 1e6
    _measured(record_property, f"E1 = {E1:.5f} MPa, nu1 = {inv.nu1:.5f}")
    assert E1 == pytest.approx(REPORTED_E1_MPA, abs=5e-4)
    assert inv.nu1 == pytest.approx(REPORTED_NU1, abs=5e-4)


@pytest.mark.acceptance(2)
def test_torsion_correction_constant(record_property):
    value = 1 + rod_correction(0.2)
    _measured(record_property, f"1 + rod_correction(0.2) = {value:.6f}")
    assert value == pytest.approx(TORSION_CONSTANT, abs=1e-3)


@pytest.mark.acceptance(3)
def test_series_leading_coefficient_and_origin_slope(record_property):
    k1 = EXAMPLE_COEFFS.series.k1
    slope = origin_slope(EXAMPLE_COEFFS)
    _measured(record_property, f"K1 = {k1:.9f}, numeric origin slope = {slope:.9f}")
    assert k1 == pytest.approx(EXAMPLE_K1, abs=1e-6)
    assert slope == pytest.approx(k1, abs=1e-4)


@pytest.mark.acceptance(4)
def test_equal_material_closure(record_property):
    rng = np.random.default_rng(20241015)
    worst_nu, worst_E = 0.0, 0.0
    for E_mpa, nu in zip(rng.uniform(0.1, 2.0, N_CLOSURE_PAIRS),
                         rng.uniform(0.3, 0.49, N_CLOSURE_PAIRS)):
        m = Material.from_mpa(E_mpa, nu)
        # Identical bodies sit on the stiffer-indenter premise boundary; the warning is expected.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ModelPremiseWarning)
            c = derive_coefficients(m, m, WIDE_GEOMETRY, 0.2)
        inv = invert_parameters(c.H1_theory, c.H3_theory, m)
        worst_nu = max(worst_nu, abs(inv.nu1 - nu))
        worst_E = max(worst_E, abs(inv.E1 - m.young_modulus) / m.young_modulus)
    _measured(record_property, f"max |d nu| = {worst_nu:.5f}, max dE/E = {worst_E:.4%}")
    assert worst_nu < 0.002
    assert worst_E < 0.005


@pytest.mark.acceptance(5)
def test_fit_exactness(record_property):
    rng = np.random.default_rng(7)
    worst_h1 = worst_h2 = worst_h3 = 0.0
    for _ in range(N_FIT_CONFIGS):
        H1, H2, H3 = rng.uniform(0.1, 2.0), rng.uniform(0.5, 20.0), rng.uniform(0.1, 3.0)
        n = int(rng.integers(3, 15))
        g1 = np.sort(rng.uniform(0.2, 0.8, n)) * MM
        t1 = rng.uniform(0.05, 0.7, n)
        normal = [DisplacementSample(g + H1 * g + H2 * g**1.5, g) for g in g1]
        torsion = [TorsionSample(t + H3 * t, t) for t in t1]
        fn, ft = fit_normal(normal), fit_torsion(torsion)
        worst_h1 = max(worst_h1, abs(fn.H1 / H1 - 1))
        worst_h2 = max(worst_h2, abs(fn.H2 / H2 - 1))
        worst_h3 = max(worst_h3, abs(ft.H3 / H3 - 1))
    _measured(
        record_property,
        f"max rel err H1 {worst_h1:.2e}, H2 {worst_h2:.2e}, H3 {worst_h3:.2e}",
    )
    assert worst_h1 < 1e-10 and worst_h2 < 1e-10
    assert worst_h3 < 1e-12


@pytest.mark.acceptance(6)
def test_series_against_exact_root(record_property, tmp_path):
    grid = np.linspace(*EXAMPLE_RANGE, 25)
    rows = series_vs_exact_report(EXAMPLE_COEFFS, grid)
    out = tmp_path / "series_vs_exact.csv"
    write_table(
        out, ("gamma1_cm", "exact_cm", "series4_cm", "err_series4"),
        [(r.gamma1, r.exact, r.series4, r.err_series4) for r in rows],
        "order-4 series vs exact implicit root, example coefficient set",
    )
    assert len(out.read_text().splitlines()) == len(rows) + 2
    worst = max(r.err_series4 for r in rows)
    _measured(record_property, f"max order-4 error {worst:.4%} over {EXAMPLE_RANGE} cm")
    assert worst < 0.01


@pytest.mark.acceptance(7)
def test_halfspace_operator_properties(record_property):
    grid = SurfaceGrid(8, 8, 0.5 * MM)
    op = assemble_compliance(grid, SENSOR_TRUTH)
    C = op.matrix
    asym = np.max(np.abs(C - C.T)) / np.max(np.abs(C))
    eig = np.linalg.eigvalsh(C)
    xy = grid.coordinates() - np.asarray(grid.center())
    w = np.exp(-(xy[..., 0] ** 2 + xy[..., 1] ** 2) / (2 * (1.0 * MM) ** 2))
    f = TractionField(grid, np.stack([400 * w, -250 * w, 2000 * w], axis=-1))
    back = reconstruct_traction(op, forward_displacements(op, f))
    F0, F = integrate_force(f), integrate_force(back)
    drift = np.linalg.norm(F - F0) / np.linalg.norm(F0)
    _measured(
        record_property,
        f"asymmetry {asym:.1e}, min eig / max eig {eig.min() / eig.max():.2e}, "
        f"force drift {drift:.3%}",
    )
    assert asym <= 1e-10
    assert eig.min() >= -1e-10 * eig.max()
    assert drift <= 0.02


def _calibrate_synthetic(tmp_path, tag):
    d = tmp_path / f"syn{tag}"
    assert main(["synth", "--soft-e1-mpa", "0.33", "--soft-nu1", "0.39", "--seed", "11",
                 "--out", str(d)]) == 0
    rec = tmp_path / f"rec{tag}.json"
    assert main(["calibrate", str(d / "normal.csv"), str(d / "torsion.csv"),
                 "--seed", "11", "--out", str(rec)]) == 0
    return json.loads(rec.read_text())


@pytest.mark.acceptance(8)
def test_end_to_end_synthetic_calibration(record_property, tmp_path, capsys):
    a = _calibrate_synthetic(tmp_path, "a")
    b = _calibrate_synthetic(tmp_path, "b")
    capsys.readouterr()
    res = a["results"]
    err_nu = abs(res["nu1"] - 0.39)
    err_E = abs(res["E1_mpa"] - 0.33) / 0.33
    _measured(
        record_property,
        f"E1 = {res['E1_mpa']:.4f} MPa ({err_E:.2%}), nu1 = {res['nu1']:.4f} (|d| {err_nu:.4f})",
    )
    assert err_nu < 0.01
    assert err_E < 0.05
    assert a["results"] == b["results"]
    assert [p["sha256"] for p in a["provenance"]] == [p["sha256"] for p in b["provenance"]]


@pytest.mark.acceptance(9)
def test_noise_robustness(record_property):
    """Device-resolution noise, each grid point averaged over ten runs as in the
    sensor procedure. Single-pass figures are reported alongside for context."""
    cfg = SweepConfig(
        soft=SENSOR_TRUTH, indenter_grid=(PROBE,), geometry=SENSOR_GEOMETRY,
        sigma_disp=SIGMA_DISP_DEFAULT, sigma_angle=SIGMA_ANGLE_DEFAULT,
        repeats=NOISE_REPEATS,
    )
    out = noise_study(cfg, PROBE, n_seeds=N_NOISE_SEEDS)
    single = noise_study(
        SweepConfig(**{**cfg.__dict__, "repeats": 1}), PROBE, n_seeds=N_NOISE_SEEDS
    )
    p95 = out["nu1_abs_p95"]
    _measured(
        record_property,
        f"p95 |d nu1| = {p95:.4f} with {NOISE_REPEATS} repeats, {out['failures']} failures; "
        f"single pass: {single['failures']} of {N_NOISE_SEEDS} seeds fail",
    )
    assert out["failures"] == 0
    assert p95 < NOISE_P95_LIMIT
