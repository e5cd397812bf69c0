"""Initial-condition sampling for trajectory ensembles.

A cloud is an isotropic-in-shape (but per-axis configurable) Gaussian in
position and a Maxwell-Boltzmann (Gaussian per component) distribution in
velocity.  Simulated ensembles stand in for much larger physical clouds;
:func:`density_weight` gives the peak density the simulated ensemble
represents so counts can be rescaled to physical atom numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .species import AtomSpecies, thermal_sigma_v

__all__ = ["CloudConfig", "AtomState", "sample_cloud", "density_weight"]

_TWO_PI_CUBED_SQRT = (2.0 * np.pi) ** 1.5


@dataclass(frozen=True)
class CloudConfig:
    """Gaussian cloud of atoms released at t = 0.

    ``sigma_pos`` is the per-axis standard deviation of the position
    distribution and ``temperature`` sets the per-axis velocity spread
    ``sqrt(k_B T / m)``.  ``mean_velocity`` adds a common drift.
    """

    n_atoms: int
    temperature: float
    center: tuple[float, float, float]
    sigma_pos: tuple[float, float, float]
    mean_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.n_atoms < 0:
            raise ValueError(f"cloud.n_atoms must be >= 0, got {self.n_atoms}")
        if self.temperature < 0.0:
            raise ValueError(f"cloud.temperature must be >= 0, got {self.temperature}")
        for s in self.sigma_pos:
            if s < 0.0:
                raise ValueError(f"cloud.sigma_pos entries must be >= 0, got {s}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "sigma_pos", tuple(float(s) for s in self.sigma_pos))
        object.__setattr__(
            self, "mean_velocity", tuple(float(v) for v in self.mean_velocity)
        )


@dataclass(frozen=True, eq=False)
class AtomState:
    """Phase-space state of one atom plus its running scatter tally."""

    position: np.ndarray
    velocity: np.ndarray
    time: float = 0.0
    scatter_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if self.position.shape != (3,) or self.velocity.shape != (3,):
            raise ValueError("position and velocity must be 3-vectors")


def sample_cloud(cfg: CloudConfig, species: AtomSpecies, seed: int) -> list[AtomState]:
    """Draw an ensemble of initial states.

    Deterministic in (cfg, species, seed).  Positions are drawn first, then
    velocities, each as an (n, 3) block, so a given atom index always maps
    to the same state for a given seed.
    """
    rng = np.random.default_rng(seed)
    n = cfg.n_atoms
    pos = np.array(cfg.center) + np.array(cfg.sigma_pos) * rng.standard_normal((n, 3))
    sv = thermal_sigma_v(species, cfg.temperature)
    vel = np.array(cfg.mean_velocity) + sv * rng.standard_normal((n, 3))
    return [AtomState(position=pos[i], velocity=vel[i]) for i in range(n)]


def density_weight(cfg: CloudConfig) -> float:
    """Peak (center) density in atoms/m^3 of the Gaussian cloud.

    For a Gaussian cloud the peak density is
    ``n / ((2 pi)^(3/2) sx sy sz)``.  The ratio of a physical cloud's peak
    density to the simulated ensemble's is the scale factor that converts
    simulated counts into physical atom numbers.
    """
    sx, sy, sz = cfg.sigma_pos
    if cfg.n_atoms <= 0 or sx <= 0.0 or sy <= 0.0 or sz <= 0.0:
        raise ValueError("peak density weight needs n_atoms > 0 and nonzero widths")
    return cfg.n_atoms / (_TWO_PI_CUBED_SQRT * sx * sy * sz)
