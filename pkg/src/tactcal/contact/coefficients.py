"""Composite coefficients of the normal-contact model.

With Hertz plus the Tatara far-field correction, each body's peak normal
displacement is ``gamma_i = A_i a**2 - B_i a**3``. Eliminating the contact
radius ``a`` gives the implicit relation

    C (B2 g1 - B1 g2)**3 = (A2 g1 - A1 g2)**2,   C = 1 / (A1 B2 - A2 B1)

which :mod:`tactcal.contact.normal` solves. The K coefficients are those of
its small-displacement expansion.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

from ..errors import DomainError, ModelPremiseWarning
from .materials import ContactGeometry, Material, effective_modulus
from .torsion import DEFAULT_BETA, rod_correction

YOFFE_FACTOR = 32.0 / (9.0 * math.pi)

# Flags recorded on DerivedCoefficients when an ordering premise fails.
FLAG_SOFT_INDENTER = "indenter softer than elastomer, model premise violated"
FLAG_A_ORDER = "A1 > A2 violated"
FLAG_B_ORDER = "B1 < B2 violated"
FLAG_C_SIGN = "C > 0 violated"


@dataclass(frozen=True)
class SeriesCoefficients:
    """``g2 ~ k1 g1 + k15 g1**1.5 - k4 g1**2 + k25 g1**2.5``."""

    k1: float
    k15: float
    k4: float
    k25: float


@dataclass(frozen=True)
class DerivedCoefficients:
    """All composite coefficients of one elastomer/indenter pair.

    ``A*`` have units 1/length, ``B*`` 1/length**2 and ``C`` length**3 when
    built by :func:`derive_coefficients`; :meth:`from_values` accepts any
    consistent length unit. ``G_ratio`` is G1/G2 (NaN when the materials
    are unknown).
    """

    A1: float
    A2: float
    B1: float
    B2: float
    C: float
    K1: float
    K2: float
    K3: float
    K4: float
    E_star: float = math.nan
    R_star: float = math.nan
    R2: float = math.nan
    G_ratio: float = math.nan
    beta: float = DEFAULT_BETA
    H1_theory: float = math.nan
    H3_theory: float = math.nan
    soft: Material | None = None
    indenter: Material | None = None
    geometry: ContactGeometry | None = None
    yoffe: bool = False
    flags: tuple = field(default=())

    @classmethod
    def from_values(cls, A1, A2, B1, B2, **extra):
        """Build from explicit A/B values, computing C and the K series."""
        return cls(**_composites(A1, A2, B1, B2), **extra)

    @property
    def H2_theory(self):
        """sqrt(K1 K2): the curvature coefficient of the two-term expansion."""
        return math.sqrt(self.K1 * self.K2) if self.K1 * self.K2 > 0 else math.nan

    @property
    def H2_exact(self):
        """(A1 B2 - A2 B1) / A1**2.5: the gamma1**1.5 coefficient of the exact upper root.

        Agrees with ``H2_theory`` to first order in B1 and stays defined when
        K1 K2 <= 0.
        """
        return (self.A1 * self.B2 - self.A2 * self.B1) / self.A1**2.5

    @property
    def length_scale(self):
        """Reference length used for root-finding tolerances."""
        if math.isfinite(self.R2):
            return self.R2
        return 1.0 / self.A1

    @property
    def series(self):
        k15 = self.H2_theory
        if not math.isfinite(k15):
            raise DomainError(f"K1*K2 = {self.K1 * self.K2:.3g} <= 0; expansion undefined")
        return SeriesCoefficients(
            k1=self.K1, k15=k15, k4=self.K4, k25=self.K4**2 / (2.0 * k15)
        )

    def yoffe_corrected(self):
        """Same pair with the indenter's Hertz coefficient deepened by 32/(9 pi)."""
        if self.yoffe:
            return self
        upd = _composites(self.A1, YOFFE_FACTOR * self.A2, self.B1, self.B2)
        return replace(self, yoffe=True, **upd)

    def ordering_ratios(self, length):
        """Dimensionless ordering ratios at contact length scale ``length``.

        Returns ``A1/A2``, ``A2/(B2 length)`` (Hertz over Tatara term of the
        indenter) and ``B2/B1``.
        """
        return {
            "A1/A2": self.A1 / self.A2,
            "A2/(B2*L)": self.A2 / (self.B2 * length),
            "B2/B1": self.B2 / self.B1 if self.B1 > 0 else math.inf,
        }


def _composites(A1, A2, B1, B2):
    det = A1 * B2 - A2 * B1
    if det == 0:
        raise DomainError("A1*B2 == A2*B1; the implicit relation is degenerate")
    K2 = B2**2 * (A1 * B2 - 3.0 * A2 * B1) / (A1**2 * A2 * det)
    K3 = B2**3 / (A1 * A2 * det)
    return dict(
        A1=A1,
        A2=A2,
        B1=B1,
        B2=B2,
        C=1.0 / det,
        K1=A2 / A1,
        K2=K2,
        K3=K3,
        K4=0.5 * (K3 - K2),
    )


def tatara_b(material, R, E_star, R_star):
    return (
        (1.0 + material.poisson_ratio)
        * (3.0 - 2.0 * material.poisson_ratio)
        * E_star
        / (3.0 * math.pi * material.young_modulus * R * R_star)
    )


def derive_coefficients(soft, indenter, geometry, beta=DEFAULT_BETA):
    """Composite coefficients for an elastomer/indenter pair.

    Parameters
    ----------
    soft, indenter : Material
        Elastomer (body 1) and calibration indenter (body 2).
    geometry : ContactGeometry
    beta : float
        Indentation depth over indenter radius used for the torsion step.

    Returns
    -------
    DerivedCoefficients
        Premise violations are listed in ``flags``; a softer-than-elastomer
        indenter also raises :class:`ModelPremiseWarning`.
    """
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    E_star = effective_modulus(soft, indenter)
    R_star = geometry.R_star
    A1 = E_star / (soft.plane_strain_modulus * R_star)
    A2 = E_star / (indenter.plane_strain_modulus * R_star)
    B1 = tatara_b(soft, geometry.R1, E_star, R_star)
    B2 = tatara_b(indenter, geometry.R2, E_star, R_star)
    comp = _composites(A1, A2, B1, B2)

    flags = []
    if indenter.plane_strain_modulus <= soft.plane_strain_modulus:
        flags.append(FLAG_SOFT_INDENTER)
        warnings.warn(FLAG_SOFT_INDENTER, ModelPremiseWarning, stacklevel=2)
    if not A1 > A2:
        flags.append(FLAG_A_ORDER)
    if not B1 < B2:
        flags.append(FLAG_B_ORDER)
    if not comp["C"] > 0:
        flags.append(FLAG_C_SIGN)

    G_ratio = soft.shear_modulus / indenter.shear_modulus
    return DerivedCoefficients(
        **comp,
        E_star=E_star,
        R_star=R_star,
        R2=geometry.R2,
        G_ratio=G_ratio,
        beta=beta,
        H1_theory=YOFFE_FACTOR * comp["K1"],
        H3_theory=(1.0 + rod_correction(beta)) * G_ratio,
        soft=soft,
        indenter=indenter,
        geometry=geometry,
        flags=tuple(flags),
    )


# Worked example: E1 = 0.1 MPa, E2 = 0.2 MPa, nu1 = nu2 = 0.4, R1 = 50 cm,
# R2 = 5 cm, with the coefficient magnitudes as tabulated in that normalisation
# (lengths in cm). Only the ratios match a direct SI evaluation.
EXAMPLE_COEFFS = DerivedCoefficients.from_values(
    0.1232, 0.0616, 7.5319e-4, 3.7760e-3, R2=5.0
)
EXAMPLE_SERIES = SeriesCoefficients(k1=0.5, k15=0.0847, k4=0.0025, k25=3.776e-5)
