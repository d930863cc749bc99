"""Torsional contact: twist-torque law, rod-model correction, rotation ratio."""

import math
from dataclasses import dataclass

from ..errors import DomainError

DEFAULT_BETA = 0.2


def _check_beta(beta):
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"beta (indentation depth / R2) must lie in [0, 1), got {beta!r}")


def rod_correction(beta):
    """Extra indenter twist from its bulk, relative to the half-space twist.

    The indented sphere is replaced by a cylinder of height ``R2 - dh``;
    the returned value is ``dtheta2 / theta2`` for ``beta = dh / R2``.
    """
    _check_beta(beta)
    return (
        32.0 / (3.0 * math.pi)
        * (1.0 - beta)
        * (2.0 * beta - beta**2) ** 1.5
        * (1.0 + beta) ** 3
    )


def equivalent_contact_radius(delta_h, R2):
    """Contact radius of a sphere of radius ``R2`` indented by ``delta_h``.

    Includes the ``(1 + dh/R2)`` widening from transverse surface displacement.
    """
    if not (0.0 <= delta_h < R2):
        raise DomainError(f"need 0 <= delta_h < R2, got delta_h={delta_h!r}, R2={R2!r}")
    return (1.0 + delta_h / R2) * math.sqrt(R2**2 - (R2 - delta_h) ** 2)


def jaeger_torque(a, G, theta):
    """Torque needed to twist a circular stick contact of radius ``a`` by ``theta``."""
    if not a > 0:
        raise DomainError(f"contact radius must be positive, got {a!r}")
    return 16.0 * G * a**3 / 3.0 * theta


def jaeger_angle(a, G, torque):
    """Inverse of :func:`jaeger_torque`."""
    if not a > 0:
        raise DomainError(f"contact radius must be positive, got {a!r}")
    return 3.0 * torque / (16.0 * G * a**3)


def rod_twist(torque, G, R2, delta_h):
    """Twist of the equivalent cylinder of height ``R2 - delta_h``."""
    return 2.0 * torque * (R2 - delta_h) / (math.pi * G * R2**4)


def torsion_factor(beta=DEFAULT_BETA):
    """``1 + rod_correction(beta)``; about 2.014 at the default depth."""
    return 1.0 + rod_correction(beta)


def torsion_ratio(coeffs, beta=None):
    """Predicted slope H3 of indenter twist against elastomer twist.

    ``coeffs`` is anything with a ``G_ratio`` attribute (G1/G2), typically
    :class:`~tactcal.contact.DerivedCoefficients`. ``beta`` defaults to the
    depth the coefficients were derived at.
    """
    if beta is None:
        beta = coeffs.beta
    return torsion_factor(beta) * coeffs.G_ratio


@dataclass(frozen=True)
class TorsionState:
    torque: float
    theta1: float
    theta2: float
    theta_total: float
    theta_stick: float
    correction_factor: float


def torsion_state(torque, soft, indenter, R2, beta=DEFAULT_BETA):
    """Twist angles of both bodies under ``torque`` at indentation depth ``beta * R2``.

    The elastomer follows the half-space law; the indenter adds the rod twist.
    """
    _check_beta(beta)
    if beta == 0.0:
        raise DomainError("beta = 0 means no contact; torsion is undefined")
    dh = beta * R2
    a = equivalent_contact_radius(dh, R2)
    theta1 = jaeger_angle(a, soft.shear_modulus, torque)
    theta2_halfspace = jaeger_angle(a, indenter.shear_modulus, torque)
    factor = 1.0 + rod_correction(beta)
    theta2 = theta2_halfspace * factor
    return TorsionState(
        torque=torque,
        theta1=theta1,
        theta2=theta2,
        theta_total=theta1 + theta2,
        theta_stick=theta1,
        correction_factor=factor,
    )

