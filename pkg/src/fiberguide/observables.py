"""Detector-side reductions of trajectory ensembles.

All observables accept a ``scale`` factor that converts simulated counts
into physical atom numbers (the ratio of physical to simulated cloud peak
density, see :func:`fiberguide.ensemble.density_weight`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    IntegratorParams,
    OutcomeKind,
    TrajectoryOutcome,
    _run_batch,
    trajectory_seeds,
)
from .ensemble import AtomState
from .potential import FieldConfig
from .species import AtomSpecies

__all__ = [
    "FluxHistogram",
    "TransitStats",
    "DensityProfile",
    "arrival_times",
    "flux_histogram",
    "transit_stats",
    "density_profile",
    "profile_from_positions",
    "optical_depth",
    "photon_signal",
    "DEFAULT_BIN_WIDTH",
]

DEFAULT_BIN_WIDTH = 0.011  # s, matches the camera integration window
DEFAULT_RADIAL_BIN = 0.25e-6  # m
DEFAULT_AXIAL_BIN = 1e-3  # m
PHOTONS_PER_ATOM = 41.0


@dataclass(frozen=True, eq=False)
class FluxHistogram:
    """Histogram of arrival times expressed as an atom flux.

    ``flux[k] = scale * counts[k] / bin_width`` over the half-open bin
    ``[edges[k], edges[k+1])``.
    """

    edges: np.ndarray
    counts: np.ndarray
    flux: np.ndarray
    scale: float

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def total_atoms(self) -> float:
        """Time integral of the flux; equals scale times transmitted count."""
        return float(np.sum(self.flux) * self.bin_width)


@dataclass(frozen=True)
class TransitStats:
    """Summary of transit times.  All times in seconds.

    For an ensemble with no transmitted atom the times are nan and the
    fraction is zero; that empty marker is a legal value, not an error.
    """

    mean_transit: float
    median_transit: float
    peak_time: float
    transmitted_fraction: float
    n_transmitted: int
    n_total: int


@dataclass(frozen=True, eq=False)
class DensityProfile:
    """Cylindrically binned density n(r, z) inside the fiber.

    ``density[ir, iz] = scale * counts[ir, iz] / volume[ir, iz]`` with
    annular bin volumes ``pi (r_out^2 - r_in^2) dz``.
    """

    r_edges: np.ndarray
    z_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    scale: float
    snapshot_time: float

    @property
    def peak_density(self) -> float:
        return float(self.density.max()) if self.density.size else 0.0


def arrival_times(outcomes: list[TrajectoryOutcome]) -> np.ndarray:
    """Arrival times of the transmitted subset, in trajectory order."""
    return np.array(
        [o.arrival_time for o in outcomes if o.kind is OutcomeKind.TRANSMITTED],
        dtype=float,
    )


def flux_histogram(
    outcomes: list[TrajectoryOutcome],
    bin_width: float = DEFAULT_BIN_WIDTH,
    scale: float = 1.0,
) -> FluxHistogram:
    """Bin transmitted arrivals from t = 0 in fixed windows.

    The bin count covers every arrival; an ensemble with none yields a
    single all-zero bin.
    """
    if not bin_width > 0.0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    times = arrival_times(outcomes)
    n_bins = max(1, int(np.max(times) // bin_width) + 1) if times.size else 1
    counts = np.zeros(n_bins, dtype=np.int64)
    if times.size:
        idx = (times // bin_width).astype(np.int64)
        np.add.at(counts, idx, 1)
    edges = bin_width * np.arange(n_bins + 1, dtype=float)
    flux = scale * counts / bin_width
    return FluxHistogram(edges=edges, counts=counts, flux=flux, scale=scale)


def transit_stats(
    outcomes: list[TrajectoryOutcome],
    bin_width: float = DEFAULT_BIN_WIDTH,
) -> TransitStats:
    """Mean, median, and histogram-mode arrival time of the transmitted set."""
    times = arrival_times(outcomes)
    n_total = len(outcomes)
    if times.size == 0:
        return TransitStats(
            mean_transit=math.nan,
            median_transit=math.nan,
            peak_time=math.nan,
            transmitted_fraction=0.0,
            n_transmitted=0,
            n_total=n_total,
        )
    hist = flux_histogram(outcomes, bin_width=bin_width)
    peak_bin = int(np.argmax(hist.counts))
    return TransitStats(
        mean_transit=float(np.mean(times)),
        median_transit=float(np.median(times)),
        peak_time=float(hist.centers[peak_bin]),
        transmitted_fraction=times.size / n_total,
        n_transmitted=int(times.size),
        n_total=n_total,
    )


def profile_from_positions(
    positions: np.ndarray,
    field: FieldConfig,
    snapshot_time: float,
    r_bin: float = DEFAULT_RADIAL_BIN,
    z_bin: float = DEFAULT_AXIAL_BIN,
    scale: float = 1.0,
) -> DensityProfile:
    """Bin (n, 3) positions into the in-fiber cylindrical grid.

    Only points with 0 <= z <= fiber_length enter the histogram; the radial
    grid spans the core.
    """
    if not r_bin > 0.0 or not z_bin > 0.0:
        raise ValueError("r_bin and z_bin must be positive")
    g = field.guide
    nr = max(1, int(math.ceil(g.core_radius / r_bin - 1e-9)))
    nz = max(1, int(math.ceil(g.fiber_length / z_bin - 1e-9)))
    r_edges = r_bin * np.arange(nr + 1, dtype=float)
    z_edges = z_bin * np.arange(nz + 1, dtype=float)
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    z = positions[:, 2]
    inside = (z >= 0.0) & (z <= g.fiber_length)
    pos = positions[inside]
    r = np.hypot(pos[:, 0], pos[:, 1])
    counts, _, _ = np.histogram2d(r, pos[:, 2], bins=(r_edges, z_edges))
    volumes = (
        np.pi
        * (r_edges[1:] ** 2 - r_edges[:-1] ** 2)[:, None]
        * np.diff(z_edges)[None, :]
    )
    density = scale * counts / volumes
    return DensityProfile(
        r_edges=r_edges,
        z_edges=z_edges,
        counts=counts.astype(np.int64),
        density=density,
        scale=scale,
        snapshot_time=snapshot_time,
    )


def density_profile(
    field: FieldConfig,
    species: AtomSpecies,
    params: IntegratorParams,
    snapshot_time: float,
    atoms: list[AtomState],
    seed: int,
    r_bin: float = DEFAULT_RADIAL_BIN,
    z_bin: float = DEFAULT_AXIAL_BIN,
    scale: float = 1.0,
) -> DensityProfile:
    """Propagate the ensemble to ``snapshot_time`` and bin in-fiber positions.

    Uses the same per-atom seeds as :func:`fiberguide.dynamics.propagate_ensemble`
    with the same master seed, so the snapshot is a slice through exactly the
    trajectories that produce the flux observables.  Atoms whose trajectory
    already terminated are no longer in the fiber and do not contribute.
    """
    if snapshot_time < 0.0:
        raise ValueError(f"snapshot_time must be >= 0, got {snapshot_time}")
    n = len(atoms)
    if n == 0:
        return profile_from_positions(
            np.empty((0, 3)), field, snapshot_time, r_bin, z_bin, scale
        )
    init = np.empty((n, 6))
    for i, a in enumerate(atoms):
        init[i, 0:3] = a.position
        init[i, 3:6] = a.velocity
    seeds = trajectory_seeds(seed, n)
    run_params = IntegratorParams(
        dt=params.dt,
        t_max=max(snapshot_time, params.dt),
        enable_scattering=params.enable_scattering,
        z_escape=params.z_escape,
    )
    _, _, _, _, _, snap_pos, snap_alive = _run_batch(
        init,
        seeds,
        field,
        species,
        run_params,
        snapshot_times=np.array([snapshot_time]),
    )
    alive = snap_alive[:, 0].astype(bool)
    return profile_from_positions(
        snap_pos[alive, 0, :], field, snapshot_time, r_bin, z_bin, scale
    )


def optical_depth(profile: DensityProfile, species: AtomSpecies) -> float:
    """Resonant on-axis optical depth through the fiber.

    Integrates the innermost radial column of the density profile along z
    and multiplies by the resonant cross section ``3 lambda^2 / (2 pi)`` of
    the species' probe transition.
    """
    sigma0 = 3.0 * species.probe_wavelength ** 2 / (2.0 * np.pi)
    column = float(np.sum(profile.density[0, :] * np.diff(profile.z_edges)))
    return sigma0 * column


def photon_signal(
    n_atoms: float,
    rng: np.random.Generator | None = None,
    noisy: bool = False,
    photons_per_atom: float = PHOTONS_PER_ATOM,
) -> float:
    """Fluorescence photon count for a detected atom number.

    Deterministically ``photons_per_atom * n_atoms``; with ``noisy`` a
    Poisson draw with that expectation.
    """
    if n_atoms < 0.0:
        raise ValueError(f"n_atoms must be >= 0, got {n_atoms}")
    expected = photons_per_atom * n_atoms
    if not noisy:
        return expected
    if rng is None:
        raise ValueError("noisy photon signal requires an rng")
    return float(rng.poisson(expected))
