import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tactcal.calibration import (
    INVERSION_CONSTANTS_DEFAULT,
    NU_CLAMP,
    CalibrationConfig,
    CalibrationDataset,
    DisplacementSample,
    TorsionSample,
    aggregate_repeats,
    calibrate,
    filter_range,
    fit_normal,
    fit_torsion,
    gamma2_from_total,
    inversion_constants,
    invert_parameters,
    theta2_from_total,
)
from tactcal.contact import (
    YOFFE_FACTOR,
    ContactGeometry,
    Material,
    derive_coefficients,
    torsion_factor,
)
from tactcal.errors import (
    AlignmentError,
    CalibrationWarning,
    DegenerateDesignError,
    DomainError,
    InconsistentSampleError,
    InsufficientDataError,
    InversionError,
    ModelPremiseWarning,
)

MM = 1e-3
DEG = math.pi / 180

# Reported experiment: fitted slopes and the indenter they were measured with.
REPORTED_H1 = 0.3397
REPORTED_H3 = 0.6023
REPORTED_INDENTER = Material.from_mpa(1.1035, 0.3883)
REPORTED_E1_MPA = 0.3305
REPORTED_NU1 = 0.3905

# Unrounded values of the closed-form inversion at the reported slopes.
REPORTED_E1_UNROUNDED = 0.33053e6
REPORTED_NU1_UNROUNDED = 0.39047

GAMMA1 = np.linspace(0.2, 0.8, 12) * MM
THETA1 = np.radians(np.linspace(5.0, 40.0, 12))

moduli = st.floats(0.1, 2.0)
ratios = st.floats(0.3, 0.49)


def _geometry():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelPremiseWarning)
        return ContactGeometry.from_mm(15.0, 5.0)


def _coeffs(soft, indenter, beta=0.2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelPremiseWarning)
        return derive_coefficients(soft, indenter, _geometry(), beta)


def _normal(H1, H2, g1=GAMMA1):
    return [DisplacementSample(g + H1 * g + H2 * g**1.5, g) for g in g1]


def _torsion(H3, t1=THETA1):
    return [TorsionSample(t + H3 * t, t) for t in t1]


# ----------------------------------------------------------------- inversion


def test_reported_inversion():
    inv = invert_parameters(REPORTED_H1, REPORTED_H3, REPORTED_INDENTER)
    assert inv.E1 / 1e6 == pytest.approx(REPORTED_E1_MPA, abs=5e-4)
    assert inv.nu1 == pytest.approx(REPORTED_NU1, abs=5e-4)
    assert inv.E1 == pytest.approx(REPORTED_E1_UNROUNDED, rel=1e-4)
    assert inv.nu1 == pytest.approx(REPORTED_NU1_UNROUNDED, abs=1e-5)
    assert not inv.clamped


def test_inversion_constants_default_and_derived():
    assert inversion_constants(0.2) == INVERSION_CONSTANTS_DEFAULT
    a, b, k = inversion_constants(0.2 + 1e-9)
    # The rounded constants are the derived ones to three decimals.
    assert (round(a, 3), round(b, 3), round(k, 3)) == INVERSION_CONSTANTS_DEFAULT
    c = torsion_factor(0.3)
    assert inversion_constants(0.3) == pytest.approx(
        (2 / c, YOFFE_FACTOR / c**2, YOFFE_FACTOR / c), rel=1e-15
    )


@settings(max_examples=60, deadline=None)
@given(E1=moduli, nu1=ratios, E2=st.floats(1.0, 4.0), nu2=ratios,
       beta=st.floats(0.05, 0.6).filter(lambda b: abs(b - 0.2) > 1e-6))
def test_theory_inversion_closure_derived_constants(E1, nu1, E2, nu2, beta):
    """Away from the default depth the constants are exact, so theory -> invert is identity."""
    soft, ind = Material.from_mpa(E1, nu1), Material.from_mpa(E2, nu2)
    c = _coeffs(soft, ind, beta)
    inv = invert_parameters(c.H1_theory, c.H3_theory, ind, beta, warn=False)
    assert inv.E1 == pytest.approx(soft.young_modulus, rel=1e-10)
    assert inv.nu1_unclamped == pytest.approx(nu1, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(E=moduli, nu=ratios)
def test_equal_material_closure_rounded_constants(E, nu):
    m = Material.from_mpa(E, nu)
    c = _coeffs(m, m)
    inv = invert_parameters(c.H1_theory, c.H3_theory, m)
    assert abs(inv.nu1 - nu) < 0.002
    assert abs(inv.E1 - m.young_modulus) / m.young_modulus < 0.005


def test_inversion_clamps_with_warning():
    # Large H3/H1 drives nu1 below zero while E1 stays positive.
    with pytest.warns(CalibrationWarning, match="clamped"):
        inv = invert_parameters(0.25, 1.02, REPORTED_INDENTER)
    assert inv.clamped
    assert inv.nu1 == NU_CLAMP[0]
    assert inv.nu1_unclamped < 0
    with pytest.warns(CalibrationWarning, match="clamped"):
        inv = invert_parameters(0.5, 0.3, REPORTED_INDENTER)
    assert inv.nu1 == NU_CLAMP[1]


@pytest.mark.parametrize("H1, H3", [(0.0, 0.5), (0.3, -0.1), (0.1, 1.0)])
def test_inversion_errors(H1, H3):
    with pytest.raises(InversionError) as info:
        invert_parameters(H1, H3, REPORTED_INDENTER, warn=False)
    assert info.value.H1 == H1 and info.value.H3 == H3


# ------------------------------------------------------------------- samples


def test_gamma2_from_total():
    assert gamma2_from_total(DisplacementSample(1.5 * MM, 1.0 * MM)) == pytest.approx(0.5 * MM)
    with pytest.raises(InconsistentSampleError) as info:
        gamma2_from_total(DisplacementSample(0.5 * MM, 1.0 * MM), index=4)
    assert info.value.index == 4


def test_theta2_from_total():
    assert theta2_from_total(TorsionSample(-0.3, -0.2)) == pytest.approx(-0.1)
    assert theta2_from_total(TorsionSample(0.0, 0.0)) == 0.0
    with pytest.raises(InconsistentSampleError):
        theta2_from_total(TorsionSample(-0.3, 0.2))
    with pytest.raises(InconsistentSampleError):
        theta2_from_total(TorsionSample(0.1, 0.2))


def test_filter_range():
    samples = _normal(0.34, 0.0, np.linspace(0.0, 1.0, 11) * MM)
    kept = filter_range(samples, 0.2 * MM, 0.8 * MM)
    assert [round(s.gamma1 / MM, 6) for s in kept] == [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
    with pytest.raises(InsufficientDataError):
        filter_range(samples[:3], 0.2 * MM, 0.8 * MM)
    with pytest.raises(ValueError):
        filter_range(samples, 0.8 * MM, 0.2 * MM)


# ---------------------------------------------------------------------- fits


@settings(max_examples=20, deadline=None)
@given(H1=st.floats(0.1, 1.5), H2=st.floats(-3.0, 20.0), H3=st.floats(0.2, 3.0))
def test_fit_exact_on_noiseless_data(H1, H2, H3):
    fn = fit_normal(_normal(H1, H2))
    assert fn.H1 == pytest.approx(H1, rel=1e-10)
    assert fn.H2 == pytest.approx(H2, rel=1e-10, abs=1e-10 * abs(H1) / math.sqrt(MM))
    ft = fit_torsion(_torsion(H3))
    assert ft.H3 == pytest.approx(H3, rel=1e-12)
    assert ft.rms_residual < 1e-14


def test_fit_normal_degenerate_and_short():
    with pytest.raises(DegenerateDesignError):
        fit_normal(_normal(0.3, 1.0, np.full(5, 0.5 * MM)))
    with pytest.raises(InsufficientDataError):
        fit_normal(_normal(0.3, 1.0, GAMMA1[:2]))


def test_fit_torsion_degenerate_and_short():
    with pytest.raises(DegenerateDesignError):
        fit_torsion([TorsionSample(0.0, 0.0)] * 3)
    with pytest.raises(InsufficientDataError):
        fit_torsion(_torsion(0.6, THETA1[:1]))


# ----------------------------------------------------------------- repeats


def test_aggregate_repeats_averages_measurements():
    a = CalibrationDataset(tuple(_normal(0.3, 0.0)), tuple(_torsion(0.6)))
    shifted = [DisplacementSample(s.total_displacement, s.gamma1 + 2e-6) for s in a.normal_samples]
    b = CalibrationDataset(tuple(shifted), a.torsion_samples, 1)
    out = aggregate_repeats([a, b])
    assert len(out.normal_samples) == len(GAMMA1)
    for s, ref in zip(out.normal_samples, a.normal_samples):
        assert s.gamma1 == pytest.approx(ref.gamma1 + 1e-6, rel=1e-12)
    assert aggregate_repeats([a]) is a


def test_aggregate_repeats_reports_misalignment():
    a = CalibrationDataset(tuple(_normal(0.3, 0.0)), tuple(_torsion(0.6)))
    b = CalibrationDataset(tuple(_normal(0.3, 0.0)[:-1]), tuple(_torsion(0.6)))
    with pytest.raises(AlignmentError) as info:
        aggregate_repeats([a, b])
    assert any("missing" in u for u in info.value.unmatched)
    with pytest.raises(InsufficientDataError):
        aggregate_repeats([])


# ----------------------------------------------------------------- pipeline


def test_calibrate_recovers_reported_slopes():
    ds = CalibrationDataset(tuple(_normal(REPORTED_H1, 0.5)), tuple(_torsion(REPORTED_H3)))
    res = calibrate(ds, REPORTED_INDENTER, CalibrationConfig(n_bootstrap=50))
    assert res.H1 == pytest.approx(REPORTED_H1, rel=1e-10)
    assert res.H3 == pytest.approx(REPORTED_H3, rel=1e-12)
    assert res.E1 / 1e6 == pytest.approx(REPORTED_E1_MPA, abs=5e-4)
    assert res.nu1 == pytest.approx(REPORTED_NU1, abs=5e-4)
    assert res.E1_std < 1e-6 * res.E1
    d = res.to_dict()
    assert d["n_normal"] == 12 and isinstance(d["warnings"], list)


def test_calibrate_bootstrap_is_seeded():
    rng = np.random.default_rng(3)
    normal = [DisplacementSample(s.total_displacement + rng.normal(0, 2e-6), s.gamma1)
              for s in _normal(0.34, 0.5)]
    ds = CalibrationDataset(tuple(normal), tuple(_torsion(0.6)))
    cfg = CalibrationConfig(n_bootstrap=100, seed=7)
    a, b = calibrate(ds, REPORTED_INDENTER, cfg), calibrate(ds, REPORTED_INDENTER, cfg)
    assert a == b
    assert 0 < a.E1_std < 0.1 * a.E1


def test_calibrate_attributes_failing_step():
    ds = CalibrationDataset(tuple(_normal(0.3, 0.0, GAMMA1[:2])), tuple(_torsion(0.6)))
    with pytest.raises(InsufficientDataError) as info:
        calibrate(ds, REPORTED_INDENTER)
    assert info.value.step == "filter"
    ds = CalibrationDataset(tuple(_normal(0.1, 0.0)), tuple(_torsion(1.0)))
    with pytest.raises(InversionError) as info:
        calibrate(ds, REPORTED_INDENTER)
    assert info.value.step == "invert"
    bad = [TorsionSample(-0.1, 0.2)] + _torsion(0.6)
    ds = CalibrationDataset(tuple(_normal(0.3, 0.0)), tuple(bad))
    with pytest.raises(DomainError) as info:
        calibrate(ds, REPORTED_INDENTER)
    assert info.value.step == "fit_torsion"


def test_calibrate_records_clamp_warning():
    ds = CalibrationDataset(tuple(_normal(0.25, 0.0)), tuple(_torsion(1.02)))
    with pytest.warns(CalibrationWarning):
        res = calibrate(ds, REPORTED_INDENTER, CalibrationConfig(n_bootstrap=0))
    assert res.warnings and "clamped" in res.warnings[0]
    assert math.isnan(res.E1_std)
