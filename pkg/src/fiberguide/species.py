"""Physical constants, atomic species data, and energy/velocity conversions.

All quantities are SI.  Temperatures are kelvin, energies joule, speeds m/s.
Trap depths are expressed as energies throughout the package; use
:func:`energy_from_temperature` to convert a depth quoted in kelvin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BOLTZMANN_CONSTANT",
    "PLANCK_CONSTANT",
    "STANDARD_GRAVITY",
    "ATOMIC_MASS_UNIT",
    "PhysicalConstants",
    "AtomSpecies",
    "RUBIDIUM_85",
    "energy_from_temperature",
    "capture_speed",
    "recoil_speed",
    "thermal_sigma_v",
]

# CODATA 2018 exact values (SI redefinition).
BOLTZMANN_CONSTANT = 1.380649e-23  # J/K
PLANCK_CONSTANT = 6.62607015e-34  # J s
STANDARD_GRAVITY = 9.80665  # m/s^2
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of the universal constants used by the simulation."""

    k_boltzmann: float = BOLTZMANN_CONSTANT
    h_planck: float = PLANCK_CONSTANT
    gravity: float = STANDARD_GRAVITY


@dataclass(frozen=True)
class AtomSpecies:
    """Properties of one atomic species.

    Parameters
    ----------
    name : str
        Human-readable label, e.g. ``"Rb-85"``.
    mass : float
        Atomic mass in kg.
    probe_wavelength : float
        Wavelength in m of the transition used for absorption imaging and
        optical-depth estimates.
    natural_linewidth : float
        Natural linewidth of that transition in Hz.
    """

    name: str
    mass: float
    probe_wavelength: float
    natural_linewidth: float

    def __post_init__(self) -> None:
        if not self.mass > 0.0:
            raise ValueError(f"AtomSpecies.mass must be positive, got {self.mass}")
        if not self.probe_wavelength > 0.0:
            raise ValueError(
                f"AtomSpecies.probe_wavelength must be positive, got {self.probe_wavelength}"
            )


RUBIDIUM_85 = AtomSpecies(
    name="Rb-85",
    mass=84.9118 * ATOMIC_MASS_UNIT,
    probe_wavelength=780.241e-9,
    natural_linewidth=6.0666e6,
)


def energy_from_temperature(temperature: float) -> float:
    """Convert a temperature-equivalent trap depth to an energy.

    Returns ``k_B * temperature`` in joule.  Negative temperatures are
    rejected; a zero depth is legal and describes a switched-off beam.
    """
    if temperature < 0.0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    return BOLTZMANN_CONSTANT * temperature


def capture_speed(depth: float, species: AtomSpecies) -> float:
    """Speed gained by an atom falling from rest through a potential drop.

    For a well of depth ``U`` (in joule) the exit speed follows from energy
    conservation, ``v = sqrt(2 U / m)``.  This also bounds the transverse
    speed an atom may have while remaining bound to the guide.
    """
    if depth < 0.0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    return float(np.sqrt(2.0 * depth / species.mass))


def recoil_speed(species: AtomSpecies, wavelength: float) -> float:
    """Single-photon recoil speed ``h / (m lambda)`` for the given wavelength."""
    if wavelength <= 0.0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return PLANCK_CONSTANT / (species.mass * wavelength)


def thermal_sigma_v(species: AtomSpecies, temperature: float) -> float:
    """One-dimensional rms velocity ``sqrt(k_B T / m)`` of a thermal cloud."""
    if temperature < 0.0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    return float(np.sqrt(BOLTZMANN_CONSTANT * temperature / species.mass))
