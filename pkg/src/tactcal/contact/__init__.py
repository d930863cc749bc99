"""Forward contact models for an elastomer pressed and twisted by an elastic indenter."""

from .coefficients import (
    EXAMPLE_COEFFS,
    EXAMPLE_SERIES,
    YOFFE_FACTOR,
    DerivedCoefficients,
    SeriesCoefficients,
    derive_coefficients,
)
from .materials import ContactGeometry, Material, effective_modulus
from .normal import (
    LOWER,
    UPPER,
    NormalContactState,
    hertz_gamma,
    implicit_residual,
    normal_contact_state,
    origin_slope,
    parametric_pair,
    series_gamma2,
    solve_gamma2_exact,
    tatara_gamma,
    yoffe_model_gamma2,
)
from .torsion import (
    DEFAULT_BETA,
    TorsionState,
    equivalent_contact_radius,
    jaeger_angle,
    jaeger_torque,
    rod_correction,
    rod_twist,
    torsion_factor,
    torsion_ratio,
    torsion_state,
)
