"""Optical potential of the fiber guide and auxiliary beams.

The composite potential has up to four terms:

* the guide beam, a red-detuned Gaussian mode that is radially confining
  and axially flat inside the fiber and opens into a diverging cone beyond
  either facet,
* an optional repulsive bump pinned to a facet, modelling stray light
  reflected there,
* an optional second red-detuned beam focused near the fiber entrance that
  holds a reservoir of atoms,
* optionally gravity.

Positions are lab-frame Cartesian (x, y, z) in meters with the fiber core
on the z axis, the input facet at z = 0 and the output facet at
z = fiber_length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .species import AtomSpecies, STANDARD_GRAVITY

__all__ = [
    "GuideBeamConfig",
    "FacetBarrierConfig",
    "ReservoirBeamConfig",
    "FieldConfig",
    "mode_radius_at",
    "depth_from_power",
    "potential",
    "force",
    "scattering_rate",
    "flatten_field",
]


@dataclass(frozen=True)
class GuideBeamConfig:
    """Geometry and strength of the guided mode.

    The trap depth is ``power * depth_per_power``; the calibration constant
    absorbs mode overlap and polarizability.  ``scatter_rate_max`` is the
    photon scattering rate on axis inside the fiber when the depth equals
    ``scatter_reference_depth``; the rate elsewhere scales linearly with
    the local guide intensity.
    """

    wavelength: float
    waist: float
    power: float
    depth_per_power: float  # J per W of guide power
    fiber_length: float
    core_radius: float
    propagation_sign: float = 1.0
    scatter_rate_max: float = 120.0  # Hz
    scatter_reference_depth: float = 1.380649e-23 * 8.2e-3  # J

    def __post_init__(self) -> None:
        for name in ("wavelength", "waist", "fiber_length", "core_radius"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"guide.{name} must be positive, got {getattr(self, name)}")
        if self.power < 0.0:
            raise ValueError(f"guide.power must be >= 0, got {self.power}")
        if self.depth_per_power < 0.0:
            raise ValueError(
                f"guide.depth_per_power must be >= 0, got {self.depth_per_power}"
            )
        if self.propagation_sign not in (-1.0, 1.0):
            raise ValueError(
                f"guide.propagation_sign must be +1 or -1, got {self.propagation_sign}"
            )

    @property
    def depth(self) -> float:
        """Trap depth U0 in joule at the current beam power."""
        return self.power * self.depth_per_power

    @property
    def rayleigh_range(self) -> float:
        """Axial scale of the cone emerging from a facet, pi w0^2 / lambda."""
        return math.pi * self.waist ** 2 / self.wavelength

    def with_depth(self, depth: float) -> "GuideBeamConfig":
        """Copy of this beam with the power chosen to give ``depth`` joule."""
        if depth < 0.0:
            raise ValueError(f"depth must be >= 0, got {depth}")
        if self.depth_per_power == 0.0:
            raise ValueError("cannot set a depth on a beam with depth_per_power = 0")
        return replace(self, power=depth / self.depth_per_power)


@dataclass(frozen=True)
class FacetBarrierConfig:
    """Repulsive Gaussian bump at a facet, exp(-(z-position)^2/axial_sigma^2)
    axially and following the guide mode profile radially.  The height is an
    absolute energy, independent of guide power."""

    height: float
    axial_sigma: float
    position: float = 0.0

    def __post_init__(self) -> None:
        if self.height < 0.0:
            raise ValueError(f"barrier.height must be >= 0, got {self.height}")
        if not self.axial_sigma > 0.0:
            raise ValueError(f"barrier.axial_sigma must be positive, got {self.axial_sigma}")


@dataclass(frozen=True)
class ReservoirBeamConfig:
    """Free-space Gaussian beam holding a cloud near the fiber entrance."""

    depth: float
    waist: float
    wavelength: float
    focus: tuple[float, float, float]
    axis: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.depth < 0.0:
            raise ValueError(f"reservoir.depth must be >= 0, got {self.depth}")
        if not self.waist > 0.0:
            raise ValueError(f"reservoir.waist must be positive, got {self.waist}")
        if not self.wavelength > 0.0:
            raise ValueError(f"reservoir.wavelength must be positive, got {self.wavelength}")
        norm = math.sqrt(sum(a * a for a in self.axis))
        if norm == 0.0:
            raise ValueError("reservoir.axis must be a nonzero vector")
        object.__setattr__(self, "axis", tuple(a / norm for a in self.axis))
        object.__setattr__(self, "focus", tuple(float(f) for f in self.focus))

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.waist ** 2 / self.wavelength


@dataclass(frozen=True)
class FieldConfig:
    """Composite potential acting on the atoms."""

    guide: GuideBeamConfig
    barrier: FacetBarrierConfig | None = None
    reservoir: ReservoirBeamConfig | None = None
    gravity_axis: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.gravity_axis is not None:
            norm = math.sqrt(sum(a * a for a in self.gravity_axis))
            if norm == 0.0:
                raise ValueError("gravity_axis must be a nonzero vector")
            object.__setattr__(
                self, "gravity_axis", tuple(a / norm for a in self.gravity_axis)
            )


def flatten_field(field: FieldConfig, species: AtomSpecies | None = None) -> np.ndarray:
    """Pack a FieldConfig into the flat parameter vector the kernels use.

    Gravity needs the atomic mass, so ``species`` is required whenever
    ``field.gravity_axis`` is set.
    """
    p = np.zeros(_kernels.N_PARAMS)
    g = field.guide
    p[_kernels.P_DEPTH] = g.depth
    p[_kernels.P_WAIST] = g.waist
    p[_kernels.P_ZR] = g.rayleigh_range
    p[_kernels.P_LENGTH] = g.fiber_length
    p[_kernels.P_CORE] = g.core_radius
    if field.barrier is not None:
        b = field.barrier
        p[_kernels.P_BAR_ON] = 1.0
        p[_kernels.P_BAR_H] = b.height
        p[_kernels.P_BAR_SIG] = b.axial_sigma
        p[_kernels.P_BAR_POS] = b.position
    if field.reservoir is not None:
        r = field.reservoir
        p[_kernels.P_RES_ON] = 1.0
        p[_kernels.P_RES_D] = r.depth
        p[_kernels.P_RES_W] = r.waist
        p[_kernels.P_RES_ZR] = r.rayleigh_range
        p[_kernels.P_RES_FX : _kernels.P_RES_FZ + 1] = r.focus
        p[_kernels.P_RES_AX : _kernels.P_RES_AZ + 1] = r.axis
    if field.gravity_axis is not None:
        if species is None:
            raise ValueError("species is required when gravity is enabled")
        p[_kernels.P_GRAV_ON] = 1.0
        mg = species.mass * STANDARD_GRAVITY
        p[_kernels.P_GX] = mg * field.gravity_axis[0]
        p[_kernels.P_GY] = mg * field.gravity_axis[1]
        p[_kernels.P_GZ] = mg * field.gravity_axis[2]
    return p


def mode_radius_at(z: float, field: FieldConfig) -> float:
    """1/e^2 radius of the guide mode at axial position z.

    Constant inside the fiber; beyond either facet it grows like a free
    Gaussian beam of the same waist, with the distance measured from the
    nearer facet.
    """
    g = field.guide
    if z < 0.0:
        d = -z
    elif z > g.fiber_length:
        d = z - g.fiber_length
    else:
        return g.waist
    return g.waist * math.sqrt(1.0 + (d / g.rayleigh_range) ** 2)


def depth_from_power(power: float, guide: GuideBeamConfig) -> float:
    """Trap depth in joule produced by the given guide power in watt."""
    if power < 0.0:
        raise ValueError(f"power must be >= 0, got {power}")
    return power * guide.depth_per_power


def potential(pos, field: FieldConfig, species: AtomSpecies | None = None) -> float:
    """Total potential energy in joule at a lab-frame position."""
    p = flatten_field(field, species)
    x, y, z = float(pos[0]), float(pos[1]), float(pos[2])
    return float(_kernels.potential_at(x, y, z, p))


def force(pos, field: FieldConfig, species: AtomSpecies | None = None) -> np.ndarray:
    """Analytic force -grad U in newton at a lab-frame position."""
    p = flatten_field(field, species)
    x, y, z = float(pos[0]), float(pos[1]), float(pos[2])
    return np.array(_kernels.force_at(x, y, z, p))


def scattering_rate(pos, field: FieldConfig) -> float:
    """Photon scattering rate in Hz from the guide beam at a position.

    Proportional to the magnitude of the guide-beam potential term, i.e. to
    the local guide intensity; the barrier and reservoir terms do not
    scatter.  On axis inside the fiber at the reference depth this equals
    ``scatter_rate_max``.
    """
    # Gravity plays no role in the guide term, so evaluate with it masked out
    # rather than demanding a species here.
    if field.gravity_axis is not None:
        field = replace(field, gravity_axis=None)
    p = flatten_field(field, None)
    x, y, z = float(pos[0]), float(pos[1]), float(pos[2])
    ua = _kernels.guide_term_abs(x, y, z, p)
    g = field.guide
    if g.scatter_reference_depth <= 0.0:
        raise ValueError("guide.scatter_reference_depth must be positive")
    # Ratio first: at the reference depth this is exactly 1.0, so the
    # calibration identity holds bit-for-bit.
    return g.scatter_rate_max * (ua / g.scatter_reference_depth)
