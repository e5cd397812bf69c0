"""Trajectory integration, stochastic photon scattering, and outcomes.

The equation of motion is integrated with velocity Verlet at a fixed time
step.  Scattering is a per-step Bernoulli event with probability
``rate * dt``; each event applies one absorption recoil along the guide
axis and one isotropic emission recoil, both at the guide wavelength.

A trajectory ends in one of four ways:

* ``TRANSMITTED``: z crossed the output facet inside the core.  Arrival
  time and exit velocity are linearly interpolated within the final step.
* ``LOST_WALL``: the radius reached the core radius anywhere along the
  fiber bore (the facet plane outside the core counts as wall).
* ``LOST_BACK``: the atom receded past ``z_escape`` moving backward.
* ``TIMED_OUT``: still in flight at ``t_max``.

Determinism contract: ``propagate_ensemble`` gives, for every atom i, the
bit-exact result of ``propagate(atoms[i], ..., seed_i)`` where ``seed_i``
is a pure function of (master_seed, i).  Worker count has no effect on the
numbers, only on wall time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import numba

from . import _kernels
from .ensemble import AtomState
from .potential import FieldConfig, flatten_field, scattering_rate
from .species import AtomSpecies, recoil_speed

__all__ = [
    "IntegratorParams",
    "OutcomeKind",
    "TrajectoryOutcome",
    "radial_trap_frequency",
    "step",
    "maybe_scatter",
    "propagate",
    "propagate_ensemble",
    "trajectory_seeds",
]

MAX_SCATTER_PROB = 0.1
MAX_OMEGA_DT = 0.3


@dataclass(frozen=True)
class IntegratorParams:
    """Run control for the fixed-step integrator."""

    dt: float = 2e-7
    t_max: float = 0.5
    enable_scattering: bool = True
    z_escape: float = -5e-3

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ValueError(f"integrator.dt must be positive, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(
                f"integrator.t_max must be at least one step, got {self.t_max}"
            )

    @property
    def n_steps(self) -> int:
        """Number of whole steps needed to reach t_max."""
        return int(np.ceil(self.t_max / self.dt - 1e-9))


class OutcomeKind(enum.Enum):
    TRANSMITTED = "Transmitted"
    LOST_WALL = "LostWall"
    LOST_BACK = "LostBack"
    TIMED_OUT = "TimedOut"


_KIND_BY_CODE = {
    _kernels.KIND_TRANSMITTED: OutcomeKind.TRANSMITTED,
    _kernels.KIND_LOST_WALL: OutcomeKind.LOST_WALL,
    _kernels.KIND_LOST_BACK: OutcomeKind.LOST_BACK,
    _kernels.KIND_TIMED_OUT: OutcomeKind.TIMED_OUT,
}


@dataclass(frozen=True, eq=False)
class TrajectoryOutcome:
    """Terminal record of one trajectory."""

    kind: OutcomeKind
    final_state: AtomState
    scatter_count: int
    arrival_time: float | None = None
    exit_velocity: np.ndarray | None = None


def radial_trap_frequency(field: FieldConfig, species: AtomSpecies) -> float:
    """Small-oscillation angular frequency sqrt(4 U0 / (m w0^2)) in the core."""
    g = field.guide
    return float(np.sqrt(4.0 * g.depth / (species.mass * g.waist ** 2)))


def _check_step_limits(field: FieldConfig, species: AtomSpecies, params: IntegratorParams) -> None:
    omega_dt = radial_trap_frequency(field, species) * params.dt
    if omega_dt >= MAX_OMEGA_DT:
        raise ValueError(
            "integrator.dt too coarse for the radial oscillation: "
            f"omega_r * dt = {omega_dt:.3f} >= {MAX_OMEGA_DT}"
        )
    if params.enable_scattering:
        g = field.guide
        max_prob = g.scatter_rate_max * (g.depth / g.scatter_reference_depth) * params.dt
        if max_prob >= MAX_SCATTER_PROB:
            raise ValueError(
                "integrator.dt too coarse for scattering: peak rate * dt = "
                f"{max_prob:.3f} >= {MAX_SCATTER_PROB}"
            )


def step(
    state: AtomState,
    dt: float,
    field: FieldConfig,
    species: AtomSpecies,
) -> AtomState:
    """One velocity-Verlet step.  Mirrors the compiled propagation loop."""
    p = flatten_field(field, species)
    hdm = (0.5 * dt) / species.mass
    x, y, z = state.position
    vx, vy, vz = state.velocity
    _, fx, fy, fz, _ = _kernels.field_terms(x, y, z, p)
    vhx = vx + fx * hdm
    vhy = vy + fy * hdm
    vhz = vz + fz * hdm
    x2 = x + vhx * dt
    y2 = y + vhy * dt
    z2 = z + vhz * dt
    _, fx2, fy2, fz2, _ = _kernels.field_terms(x2, y2, z2, p)
    return AtomState(
        position=np.array((x2, y2, z2)),
        velocity=np.array((vhx + fx2 * hdm, vhy + fy2 * hdm, vhz + fz2 * hdm)),
        time=state.time + dt,
        scatter_count=state.scatter_count,
    )


def maybe_scatter(
    state: AtomState,
    dt: float,
    field: FieldConfig,
    species: AtomSpecies,
    rng: np.random.Generator,
) -> AtomState:
    """Apply at most one photon-scattering event for this step.

    With probability ``scattering_rate(pos) * dt`` the velocity receives an
    absorption kick of one recoil speed along the guide propagation axis
    plus an isotropic emission kick of the same magnitude, and the scatter
    tally increments.  Otherwise the state is returned unchanged.  In zero
    intensity regions no randomness is consumed.
    """
    rate = scattering_rate(state.position, field)
    prob = rate * dt
    if prob >= MAX_SCATTER_PROB:
        raise ValueError(
            f"scattering probability per step {prob:.3f} exceeds {MAX_SCATTER_PROB}; "
            "reduce integrator.dt"
        )
    if prob == 0.0:
        return state
    if rng.random() >= prob:
        return state
    vrec = recoil_speed(species, field.guide.wavelength)
    ct = 2.0 * rng.random() - 1.0
    st = np.sqrt(1.0 - ct * ct)
    ph = 2.0 * np.pi * rng.random()
    kick = vrec * np.array(
        (st * np.cos(ph), st * np.sin(ph), ct)
    )
    kick[2] += field.guide.propagation_sign * vrec
    return AtomState(
        position=state.position,
        velocity=state.velocity + kick,
        time=state.time,
        scatter_count=state.scatter_count + 1,
    )


def _run_batch(
    init: np.ndarray,
    seeds: np.ndarray,
    field: FieldConfig,
    species: AtomSpecies,
    params: IntegratorParams,
    snapshot_times: np.ndarray | None = None,
    n_workers: int | None = None,
):
    """Drive the compiled propagation kernel.  Returns raw output arrays."""
    _check_step_limits(field, species, params)
    p = flatten_field(field, species)
    n = init.shape[0]
    snaps = (
        np.empty(0) if snapshot_times is None else np.asarray(snapshot_times, dtype=float)
    )
    if snaps.size and np.any(np.diff(snaps) < 0.0):
        raise ValueError("snapshot_times must be sorted ascending")
    m = snaps.size
    kinds = np.empty(n, dtype=np.int64)
    arrival = np.empty(n)
    exit_v = np.empty((n, 3))
    nscat = np.zeros(n, dtype=np.int64)
    finals = np.empty((n, 7))
    snap_pos = np.zeros((n, m, 3))
    snap_alive = np.zeros((n, m), dtype=np.uint8)
    if n_workers is not None:
        if n_workers < 1:
            raise ValueError(f"n_workers must be >= 1, got {n_workers}")
        numba.set_num_threads(min(n_workers, numba.config.NUMBA_NUM_THREADS))
    if n:
        _kernels.propagate_batch(
            init,
            seeds,
            p,
            species.mass,
            params.dt,
            params.n_steps,
            params.z_escape,
            params.enable_scattering,
            field.guide.scatter_rate_max / field.guide.scatter_reference_depth,
            recoil_speed(species, field.guide.wavelength),
            field.guide.propagation_sign,
            snaps,
            kinds,
            arrival,
            exit_v,
            nscat,
            finals,
            snap_pos,
            snap_alive,
        )
    return kinds, arrival, exit_v, nscat, finals, snap_pos, snap_alive


def _outcome_from_row(kind_code, arrival, exit_v, nscat, final) -> TrajectoryOutcome:
    kind = _KIND_BY_CODE[int(kind_code)]
    final_state = AtomState(
        position=final[0:3].copy(),
        velocity=final[3:6].copy(),
        time=float(final[6]),
        scatter_count=int(nscat),
    )
    if kind is OutcomeKind.TRANSMITTED:
        return TrajectoryOutcome(
            kind=kind,
            final_state=final_state,
            scatter_count=int(nscat),
            arrival_time=float(arrival),
            exit_velocity=exit_v.copy(),
        )
    return TrajectoryOutcome(kind=kind, final_state=final_state, scatter_count=int(nscat))


def propagate(
    initial: AtomState,
    field: FieldConfig,
    species: AtomSpecies,
    params: IntegratorParams,
    seed: int,
) -> TrajectoryOutcome:
    """Integrate a single atom to its terminal event."""
    init = np.empty((1, 6))
    init[0, 0:3] = initial.position
    init[0, 3:6] = initial.velocity
    seeds = np.array([seed], dtype=np.uint64)
    kinds, arrival, exit_v, nscat, finals, _, _ = _run_batch(
        init, seeds, field, species, params
    )
    return _outcome_from_row(kinds[0], arrival[0], exit_v[0], nscat[0], finals[0])


def trajectory_seeds(master_seed: int, n: int) -> np.ndarray:
    """Per-trajectory uint64 stream seeds, a pure function of (master_seed, i)."""
    return np.random.SeedSequence(master_seed).generate_state(max(n, 1), np.uint64)[:n]


def propagate_ensemble(
    atoms: list[AtomState],
    field: FieldConfig,
    species: AtomSpecies,
    params: IntegratorParams,
    master_seed: int,
    n_workers: int | None = None,
) -> list[TrajectoryOutcome]:
    """Propagate every atom independently.  Empty ensembles are legal."""
    n = len(atoms)
    if n == 0:
        return []
    init = np.empty((n, 6))
    for i, a in enumerate(atoms):
        init[i, 0:3] = a.position
        init[i, 3:6] = a.velocity
    seeds = trajectory_seeds(master_seed, n)
    kinds, arrival, exit_v, nscat, finals, _, _ = _run_batch(
        init, seeds, field, species, params, n_workers=n_workers
    )
    return [
        _outcome_from_row(kinds[i], arrival[i], exit_v[i], nscat[i], finals[i])
        for i in range(n)
    ]
