"""Normal contact: Hertz and Tatara displacements, the implicit gamma1-gamma2
relation, its series expansion and the fit-form model used for calibration."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError, ModelPremiseWarning, RootFindingError, SingularInputError

UPPER = "upper"
LOWER = "lower"


def hertz_gamma(a, coeffs, body):
    """Peak Hertz displacement ``A_i a**2`` of ``body`` ("elastomer" or "indenter")."""
    if a < 0:
        raise DomainError(f"contact radius must be non-negative, got {a!r}")
    if body in ("elastomer", "soft", 1):
        return coeffs.A1 * a**2
    if body in ("indenter", 2):
        return coeffs.A2 * a**2
    raise DomainError(f"unknown body {body!r}; use 'elastomer' or 'indenter'")


def tatara_gamma(F, a, material, R):
    """Peak displacement of one body under load ``F`` with the Tatara correction.

    The second term removes the displacement contributed by material further
    than ``2R`` from the contact.
    """
    if F < 0:
        raise DomainError(f"load must be non-negative, got {F!r}")
    if F == 0:
        return 0.0
    if not a > 0:
        raise SingularInputError("contact radius must be positive when F > 0")
    nu, E = material.poisson_ratio, material.young_modulus
    hertz = 3.0 * F / (4.0 * material.plane_strain_modulus * a)
    correction = (1.0 + nu) * (3.0 - 2.0 * nu) * F / (4.0 * math.pi * E * R)
    if correction >= hertz:
        warnings.warn(
            f"far-field correction {correction:.3g} exceeds the Hertz term {hertz:.3g}; "
            "contact is too large for the corrected model",
            ModelPremiseWarning,
            stacklevel=2,
        )
    return hertz - correction


def implicit_residual(gamma2, gamma1, coeffs):
    """``C (B2 g1 - B1 g2)**3 - (A2 g1 - A1 g2)**2``; zero on both physical branches."""
    c = coeffs
    return c.C * (c.B2 * gamma1 - c.B1 * gamma2) ** 3 - (c.A2 * gamma1 - c.A1 * gamma2) ** 2


def solve_gamma2_exact(gamma1, coeffs, branch=UPPER):
    """Indenter displacement ``gamma2`` paired with elastomer displacement ``gamma1``.

    Both roots of the implicit relation that leave the origin with slope
    ``K1`` are available. ``branch="upper"`` (``gamma2 >= K1 gamma1``) is the
    root the series expansion tracks and the default. ``branch="lower"`` is
    the one traced by :func:`normal_contact_state` with a real contact radius.

    Parameters
    ----------
    gamma1 : float or array_like
        Elastomer peak displacement(s), non-negative.
    coeffs : DerivedCoefficients
    branch : {"upper", "lower"}

    Raises
    ------
    RootFindingError
        If the bracket shows no sign change.
    """
    if np.ndim(gamma1):
        return np.array([solve_gamma2_exact(g, coeffs, branch) for g in np.ravel(gamma1)]).reshape(
            np.shape(gamma1)
        )
    g1 = float(gamma1)
    if g1 < 0:
        raise DomainError(f"gamma1 must be non-negative, got {g1!r}")
    if g1 == 0:
        return 0.0
    if branch not in (UPPER, LOWER):
        raise DomainError(f"branch must be 'upper' or 'lower', got {branch!r}")

    f = lambda g2: implicit_residual(g2, g1, coeffs)  # noqa: E731
    mid = coeffs.K1 * g1
    if branch == LOWER:
        lo, hi = 0.0, mid
    else:
        lo, hi = mid, (g1 if g1 > mid else 2.0 * mid)
        # The cubic term turns negative beyond B2 g1 / B1, so the bracket closes there.
        if f(hi) > 0:
            hi = g1 * coeffs.B2 / coeffs.B1 if coeffs.B1 > 0 else 2.0 * max(hi, mid)
        for _ in range(200):
            if f(hi) <= 0:
                break
            hi *= 2.0
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RootFindingError(
            f"no sign change for the {branch} branch on [{lo:.6g}, {hi:.6g}] at gamma1={g1:.6g}",
            residuals=(flo, fhi),
        )
    xtol = 1e-12 * min(coeffs.length_scale, g1)
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def parametric_pair(s, coeffs, branch=UPPER):
    """``(gamma1, gamma2)`` at contact parameter ``s >= 0`` on the chosen branch.

    On the lower branch ``s`` is the contact radius and the displacements are
    the Hertz-minus-Tatara values; the upper branch flips the cubic term.
    """
    sign = 1.0 if branch == UPPER else -1.0
    g1 = coeffs.A1 * s**2 + sign * coeffs.B1 * s**3
    g2 = coeffs.A2 * s**2 + sign * coeffs.B2 * s**3
    return g1, g2


def series_gamma2(gamma1, coeffs, order=4):
    """Small-displacement expansion of the upper branch.

    ``coeffs`` is a :class:`SeriesCoefficients` or anything exposing one as
    ``.series``. Order 2 keeps ``k1 g + k15 g**1.5``; order 4 adds
    ``- k4 g**2 + k25 g**2.5``.
    """
    s = getattr(coeffs, "series", coeffs)
    g = np.asarray(gamma1, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma1 must be non-negative")
    if order not in (2, 4):
        raise DomainError(f"order must be 2 or 4, got {order!r}")
    out = s.k1 * g + s.k15 * g**1.5
    if order == 4:
        out = out - s.k4 * g**2 + s.k25 * g**2.5
    return out if out.ndim else float(out)


def yoffe_model_gamma2(gamma1, H1, H2):
    """Fit-form model ``H1 g + H2 g**1.5``."""
    g = np.asarray(gamma1, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma1 must be non-negative")
    out = H1 * g + H2 * g**1.5
    return out if out.ndim else float(out)


def origin_slope(coeffs, h=None, branch=UPPER):
    """Numerical ``d gamma2 / d gamma1`` at the origin.

    The exact root behaves like ``K1 g + c g**1.5``, so the plain quotient
    ``gamma2(h)/h`` carries an ``O(sqrt(h))`` bias. Two quotients at ``h``
    and ``4h`` cancel it: ``2 q(h) - q(4h) = K1 + O(h)``.
    """
    if h is None:
        h = 1e-6 * coeffs.length_scale
    q1 = solve_gamma2_exact(h, coeffs, branch) / h
    q4 = solve_gamma2_exact(4 * h, coeffs, branch) / (4 * h)
    return 2.0 * q1 - q4


@dataclass(frozen=True)
class NormalContactState:
    contact_radius: float
    gamma1: float
    gamma2: float
    force: float
    indentation_depth: float
    beta: float


def normal_contact_state(a, coeffs):
    """Forward state at contact radius ``a`` from Hertz load plus Tatara displacements.

    ``indentation_depth`` is the indenter's own displacement ``gamma2``.
    """
    if coeffs.soft is None or coeffs.geometry is None:
        raise DomainError("coefficients carry no materials; use derive_coefficients")
    if a < 0:
        raise DomainError(f"contact radius must be non-negative, got {a!r}")
    if a == 0:
        return NormalContactState(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    F = 4.0 * coeffs.E_star * a**3 / (3.0 * coeffs.R_star)
    g1 = tatara_gamma(F, a, coeffs.soft, coeffs.geometry.R1)
    g2 = tatara_gamma(F, a, coeffs.indenter, coeffs.geometry.R2)
    beta = g2 / coeffs.geometry.R2
    if not (g1 >= 0 and g2 >= 0 and beta < 1):
        raise DomainError(f"contact radius {a!r} is beyond the range where the correction holds")
    return NormalContactState(a, g1, g2, F, g2, beta)
