"""Elastic constants and contact geometry (SI units throughout)."""

import math
import warnings
from dataclasses import dataclass

from ..errors import DomainError, ModelPremiseWarning

# Below this ratio the "elastomer radius much larger than indenter" premise is shaky.
RADIUS_RATIO_WARN = 5.0


@dataclass(frozen=True)
class Material:
    """Linear isotropic elastic solid.

    Parameters
    ----------
    young_modulus : float
        Young's modulus in Pa.
    poisson_ratio : float
        Poisson's ratio, strictly between 0 and 0.5.
    """

    young_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        E, nu = self.young_modulus, self.poisson_ratio
        if not (math.isfinite(E) and E > 0):
            raise DomainError(f"young_modulus must be positive and finite, got {E!r}")
        if not (math.isfinite(nu) and 0.0 < nu < 0.5):
            raise DomainError(f"poisson_ratio must lie in (0, 0.5), got {nu!r}")

    @classmethod
    def from_mpa(cls, young_modulus_mpa, poisson_ratio):
        return cls(young_modulus_mpa * 1e6, poisson_ratio)

    @property
    def shear_modulus(self):
        return self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))

    @property
    def plane_strain_modulus(self):
        """E / (1 - nu^2)."""
        return self.young_modulus / (1.0 - self.poisson_ratio**2)

    def scaled(self, factor):
        """Same Poisson's ratio, Young's modulus multiplied by ``factor``."""
        return Material(self.young_modulus * factor, self.poisson_ratio)


@dataclass(frozen=True)
class ContactGeometry:
    """Radii of the elastomer (``R1``, effective) and the hemispherical indenter (``R2``), in m."""

    R1: float
    R2: float

    def __post_init__(self):
        if not (math.isfinite(self.R2) and self.R2 > 0):
            raise DomainError(f"indenter radius R2 must be positive, got {self.R2!r}")
        if not (self.R1 > self.R2):
            raise DomainError(
                f"elastomer radius R1={self.R1!r} must exceed indenter radius R2={self.R2!r}"
            )
        if self.R1 < RADIUS_RATIO_WARN * self.R2:
            warnings.warn(
                f"R1/R2 = {self.R1 / self.R2:.3g} < {RADIUS_RATIO_WARN:g}; "
                "the R1 >> R2 assumption of the normal contact model is weak",
                ModelPremiseWarning,
                stacklevel=3,
            )

    @classmethod
    def from_mm(cls, R1_mm, R2_mm):
        return cls(R1_mm * 1e-3, R2_mm * 1e-3)

    @property
    def R_star(self):
        """Effective radius, 1/R* = 1/R1 + 1/R2."""
        return 1.0 / (1.0 / self.R1 + 1.0 / self.R2)


def effective_modulus(soft, indenter):
    """Contact modulus E*, 1/E* = 1/E1* + 1/E2*."""
    return 1.0 / (1.0 / soft.plane_strain_modulus + 1.0 / indenter.plane_strain_modulus)
