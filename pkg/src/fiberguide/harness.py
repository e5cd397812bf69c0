"""Scenario runner, depth sweeps, and delimited/plain-text reporting.

Output files use a fixed CSV dialect: comma separator, header row, ``.``
decimal point, floats rendered by shortest round-trip ``repr``.  Rewriting
a parsed CSV therefore reproduces it byte for byte, and outputs are
byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .dynamics import (
    OutcomeKind,
    TrajectoryOutcome,
    _outcome_from_row,
    _run_batch,
    trajectory_seeds,
)
from .ensemble import CloudConfig, density_weight, sample_cloud
from .fitting import FitResult, fit_linear, fit_power_law, fit_sqrt_threshold
from .observables import (
    DEFAULT_BIN_WIDTH,
    DensityProfile,
    FluxHistogram,
    TransitStats,
    flux_histogram,
    optical_depth,
    profile_from_positions,
    transit_stats,
)
from .species import BOLTZMANN_CONSTANT

__all__ = [
    "ScenarioResult",
    "SweepTable",
    "run_scenario",
    "sweep_depth",
    "sweep_fits",
    "write_report",
    "report_from_directory",
    "read_sweep_csv",
    "read_flux_csv",
    "read_outcomes_csv",
    "read_density_csv",
]

SNAPSHOT_INTERVAL = 0.01  # s, grid on which in-fiber density is sampled

# Sweep rows report the density at one fixed observation time on a coarse
# grid, like a camera snapshot at a set delay after loading.  Comparing
# depths at a fixed time is what exposes the occupancy trade-off (deeper
# guides capture more atoms but empty sooner); the coarse bins keep the
# peak estimate out of the single-atom shot-noise regime.
REFERENCE_SNAPSHOT_TIME = 0.1  # s
SWEEP_RADIAL_BIN = 1.5e-6  # m
SWEEP_AXIAL_BIN = 4e-3  # m

# Seed-derivation tags: source cloud, reservoir cloud, trajectories, sweep rows.
_TAG_CLOUD = 1
_TAG_RESERVOIR = 2
_TAG_TRAJ = 3
_TAG_ROW = 10


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Everything measured in one scenario run."""

    cfg: ScenarioConfig
    outcomes: list[TrajectoryOutcome]
    scale: float
    flux: FluxHistogram
    stats: TransitStats
    density: DensityProfile
    snapshot_times: np.ndarray
    in_fiber_counts: np.ndarray
    peak_densities: np.ndarray
    fixed_time_peak_density: float
    optical_depth: float
    wall_time: float

    @property
    def guided_count(self) -> float:
        """Physical number of guided atoms, scale times transmitted count."""
        return self.scale * self.stats.n_transmitted

    @property
    def peak_flux(self) -> float:
        return float(self.flux.flux.max()) if self.flux.flux.size else 0.0


@dataclass(frozen=True, eq=False)
class SweepTable:
    """Aggregate observables versus guide depth."""

    depths: np.ndarray  # J, strictly increasing; zero rows is legal
    guided_count: np.ndarray
    peak_flux: np.ndarray
    mean_transit: np.ndarray
    peak_density: np.ndarray
    # None: no barrier in the scenario. nan: unknown (table loaded from CSV,
    # which does not record the scenario). Finite: barrier height in J.
    barrier_height: float | None = None
    # One entry per row: None for clean rows, the error message otherwise.
    # Failed rows hold nan observables.  Not serialized to CSV.
    row_errors: tuple = ()

    def __post_init__(self) -> None:
        d = np.asarray(self.depths, dtype=float)
        if np.any(d < 0.0):
            raise ValueError("sweep depths must be >= 0")
        if np.any(np.diff(d) <= 0.0):
            raise ValueError("sweep depths must be strictly increasing")
        if not self.row_errors:
            object.__setattr__(self, "row_errors", (None,) * d.size)
        elif len(self.row_errors) != d.size:
            raise ValueError("row_errors length must match depths")


def _cloud_seed(master_seed: int, tag: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(tag,))


def _derived_int(master_seed: int, *tags: int) -> int:
    return int(
        np.random.SeedSequence(master_seed, spawn_key=tuple(tags)).generate_state(1)[0]
    )


def _scenario_atoms(cfg: ScenarioConfig):
    atoms = sample_cloud(cfg.cloud, cfg.species, _cloud_seed(cfg.master_seed, _TAG_CLOUD))
    if cfg.reservoir_cloud is not None:
        atoms = atoms + sample_cloud(
            cfg.reservoir_cloud, cfg.species, _cloud_seed(cfg.master_seed, _TAG_RESERVOIR)
        )
    return atoms


def _batch_arrays(atoms):
    init = np.empty((len(atoms), 6))
    for i, a in enumerate(atoms):
        init[i, 0:3] = a.position
        init[i, 3:6] = a.velocity
    return init


def _snapshot_grid(t_max: float) -> np.ndarray:
    n = int(math.floor(t_max / SNAPSHOT_INTERVAL + 1e-9))
    return SNAPSHOT_INTERVAL * np.arange(1, n + 1, dtype=float)


def _run_full(cfg: ScenarioConfig, atoms, traj_master: int, n_workers):
    """Propagate a prepared ensemble and reduce it to observables."""
    t0 = time.perf_counter()
    init = _batch_arrays(atoms)
    seeds = trajectory_seeds(traj_master, len(atoms))
    snaps = _snapshot_grid(cfg.integrator.t_max)
    kinds, arrival, exit_v, nscat, finals, snap_pos, snap_alive = _run_batch(
        init, seeds, cfg.field, cfg.species, cfg.integrator,
        snapshot_times=snaps, n_workers=n_workers,
    )
    outcomes = [
        _outcome_from_row(kinds[i], arrival[i], exit_v[i], nscat[i], finals[i])
        for i in range(len(atoms))
    ]
    scale = cfg.physical_peak_density / density_weight(cfg.cloud)
    flux = flux_histogram(outcomes, bin_width=DEFAULT_BIN_WIDTH, scale=scale)
    stats = transit_stats(outcomes, bin_width=DEFAULT_BIN_WIDTH)

    length = cfg.field.guide.fiber_length
    in_fiber = np.zeros(snaps.size, dtype=np.int64)
    peak_densities = np.zeros(snaps.size)
    profiles: list[DensityProfile | None] = [None] * snaps.size
    for j in range(snaps.size):
        alive = snap_alive[:, j].astype(bool)
        pos = snap_pos[alive, j, :]
        inside = pos[(pos[:, 2] >= 0.0) & (pos[:, 2] <= length)]
        in_fiber[j] = inside.shape[0]
        prof = profile_from_positions(inside, cfg.field, float(snaps[j]), scale=scale)
        profiles[j] = prof
        peak_densities[j] = prof.peak_density
    best = int(np.argmax(in_fiber)) if snaps.size else 0
    density = (
        profiles[best]
        if snaps.size
        else profile_from_positions(np.empty((0, 3)), cfg.field, 0.0, scale=scale)
    )
    od = optical_depth(density, cfg.species)

    # Snapshot closest to the fixed reference time, re-binned coarsely.
    fixed_peak = math.nan
    if snaps.size:
        j_ref = int(np.argmin(np.abs(snaps - REFERENCE_SNAPSHOT_TIME)))
        alive = snap_alive[:, j_ref].astype(bool)
        fixed_peak = profile_from_positions(
            snap_pos[alive, j_ref, :],
            cfg.field,
            float(snaps[j_ref]),
            r_bin=SWEEP_RADIAL_BIN,
            z_bin=SWEEP_AXIAL_BIN,
            scale=scale,
        ).peak_density
    return ScenarioResult(
        cfg=cfg,
        outcomes=outcomes,
        scale=scale,
        flux=flux,
        stats=stats,
        density=density,
        snapshot_times=snaps,
        in_fiber_counts=in_fiber,
        peak_densities=peak_densities,
        fixed_time_peak_density=fixed_peak,
        optical_depth=od,
        wall_time=time.perf_counter() - t0,
    )


def run_scenario(cfg: ScenarioConfig, n_workers: int | None = None) -> ScenarioResult:
    """Sample the configured cloud(s), propagate, and reduce to observables.

    Deterministic in (cfg, cfg.master_seed); the worker count changes only
    wall time.
    """
    atoms = _scenario_atoms(cfg)
    traj_master = _derived_int(cfg.master_seed, _TAG_TRAJ)
    return _run_full(cfg, atoms, traj_master, n_workers)


def sweep_depth(
    cfg: ScenarioConfig, depths, n_workers: int | None = None
) -> SweepTable:
    """Run one scenario per guide depth and tabulate the aggregates.

    The initial ensemble is sampled once and every row reuses both it and
    the per-atom random streams, so rows differ only through the potential:
    trends across depth are far less noisy than independent draws would be,
    and a single-depth sweep reproduces ``run_scenario`` exactly.  A row
    whose propagation fails gets nan observables and its error message in
    ``row_errors``; other rows are unaffected.
    """
    d = np.asarray(list(depths), dtype=float)
    if d.size == 0:
        raise ValueError("sweep needs at least one depth")
    if np.any(np.diff(d) <= 0.0):
        raise ValueError("sweep depths must be strictly increasing")
    atoms = _scenario_atoms(cfg)
    guided = np.full(d.size, math.nan)
    peak_flux = np.full(d.size, math.nan)
    mean_transit = np.full(d.size, math.nan)
    peak_density = np.full(d.size, math.nan)
    errors: list[str | None] = [None] * d.size
    for idx in range(d.size):
        row_cfg = cfg.with_depth(float(d[idx]))
        traj_master = _derived_int(cfg.master_seed, _TAG_ROW, idx)
        try:
            res = _run_full(row_cfg, atoms, traj_master, n_workers)
        except (ValueError, FloatingPointError) as exc:
            errors[idx] = str(exc)
            continue
        guided[idx] = res.guided_count
        peak_flux[idx] = res.peak_flux
        mean_transit[idx] = res.stats.mean_transit
        peak_density[idx] = res.fixed_time_peak_density
    barrier = cfg.field.barrier
    return SweepTable(
        depths=d,
        guided_count=guided,
        peak_flux=peak_flux,
        mean_transit=mean_transit,
        peak_density=peak_density,
        barrier_height=None if barrier is None else barrier.height,
        row_errors=tuple(errors),
    )


# ---------------------------------------------------------------------------
# Delimited output

def _fmt(x) -> str:
    """Canonical float rendering: shortest string that round-trips."""
    return repr(float(x))


def write_flux_csv(hist: FluxHistogram, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_start_s", "flux_atoms_per_s"])
        for k in range(hist.flux.size):
            w.writerow([_fmt(hist.edges[k]), _fmt(hist.flux[k])])
    return path


def read_flux_csv(path: Path) -> FluxHistogram:
    """Rebuild a flux histogram from a flux table.

    The CSV stores bin starts and fluxes only, so the underlying raw counts
    and scale factor are not recoverable; the returned histogram carries
    zero counts and unit scale and is meant for re-plotting.
    """
    t, f = [], []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["t_start_s", "flux_atoms_per_s"]:
            raise ValueError(f"{path}: not a flux table, header {header}")
        for row in r:
            t.append(float(row[0]))
            f.append(float(row[1]))
    starts = np.array(t)
    width = float(starts[1] - starts[0]) if starts.size > 1 else DEFAULT_BIN_WIDTH
    edges = np.append(starts, starts[-1] + width) if starts.size else np.array([0.0])
    flux = np.array(f)
    return FluxHistogram(
        edges=edges, counts=np.zeros(flux.size, dtype=np.int64), flux=flux, scale=1.0
    )


def read_outcomes_csv(path: Path) -> list[dict]:
    """Parse an outcomes table into row dicts with typed values.

    ``arrival_time_s`` and ``exit_vz_m_per_s`` are None for rows whose kind
    did not reach the far facet.
    """
    rows = []
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        expected = ["index", "kind", "arrival_time_s", "exit_vz_m_per_s", "scatter_count"]
        if r.fieldnames != expected:
            raise ValueError(f"{path}: not an outcomes table, header {r.fieldnames}")
        for row in r:
            rows.append(
                {
                    "index": int(row["index"]),
                    "kind": row["kind"],
                    "arrival_time_s": float(row["arrival_time_s"]) if row["arrival_time_s"] else None,
                    "exit_vz_m_per_s": float(row["exit_vz_m_per_s"]) if row["exit_vz_m_per_s"] else None,
                    "scatter_count": int(row["scatter_count"]),
                }
            )
    return rows


def write_outcomes_csv(outcomes: list[TrajectoryOutcome], path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "kind", "arrival_time_s", "exit_vz_m_per_s", "scatter_count"])
        for i, o in enumerate(outcomes):
            if o.kind is OutcomeKind.TRANSMITTED:
                w.writerow(
                    [i, o.kind.value, _fmt(o.arrival_time), _fmt(o.exit_velocity[2]), o.scatter_count]
                )
            else:
                w.writerow([i, o.kind.value, "", "", o.scatter_count])
    return path


def write_density_csv(profile: DensityProfile, path: Path) -> Path:
    rc = 0.5 * (profile.r_edges[:-1] + profile.r_edges[1:])
    zc = 0.5 * (profile.z_edges[:-1] + profile.z_edges[1:])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r_m", "z_m", "density_per_m3"])
        for ir in range(rc.size):
            for iz in range(zc.size):
                w.writerow([_fmt(rc[ir]), _fmt(zc[iz]), _fmt(profile.density[ir, iz])])
    return path


def read_density_csv(path: Path) -> DensityProfile:
    """Rebuild a density profile from its table of bin centers.

    Counts, scale, and snapshot time are not stored in the CSV; the
    reconstruction carries zero counts, unit scale, and a nan time and is
    meant for re-plotting.
    """
    r_vals, z_vals, dens = [], [], []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["r_m", "z_m", "density_per_m3"]:
            raise ValueError(f"{path}: not a density table, header {header}")
        for row in r:
            r_vals.append(float(row[0]))
            z_vals.append(float(row[1]))
            dens.append(float(row[2]))
    rc = np.unique(np.array(r_vals))
    zc = np.unique(np.array(z_vals))
    if rc.size * zc.size != len(dens):
        raise ValueError(f"{path}: rows do not form a full (r, z) grid")

    def edges_from_centers(c: np.ndarray) -> np.ndarray:
        if c.size == 1:
            return np.array([0.0, 2.0 * c[0]])
        step = c[1] - c[0]
        return np.append(c - 0.5 * step, c[-1] + 0.5 * step)

    grid = np.full((rc.size, zc.size), np.nan)
    ri = {v: i for i, v in enumerate(rc)}
    zi = {v: i for i, v in enumerate(zc)}
    for rv, zv, dv in zip(r_vals, z_vals, dens):
        grid[ri[rv], zi[zv]] = dv
    return DensityProfile(
        r_edges=edges_from_centers(rc),
        z_edges=edges_from_centers(zc),
        counts=np.zeros_like(grid, dtype=np.int64),
        density=grid,
        scale=1.0,
        snapshot_time=math.nan,
    )


_SWEEP_HEADER = [
    "depth_J",
    "guided_count",
    "peak_flux_atoms_per_s",
    "mean_transit_s",
    "peak_density_per_m3",
]


def write_sweep_csv(table: SweepTable, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_SWEEP_HEADER)
        for i in range(table.depths.size):
            w.writerow(
                [
                    _fmt(table.depths[i]),
                    _fmt(table.guided_count[i]),
                    _fmt(table.peak_flux[i]),
                    _fmt(table.mean_transit[i]),
                    _fmt(table.peak_density[i]),
                ]
            )
    return path


def read_sweep_csv(path: Path) -> SweepTable:
    cols = {name: [] for name in _SWEEP_HEADER}
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != _SWEEP_HEADER:
            raise ValueError(f"{path}: not a sweep table, header {header}")
        for row in r:
            for name, val in zip(_SWEEP_HEADER, row):
                cols[name].append(float(val))
    return SweepTable(
        depths=np.array(cols["depth_J"]),
        guided_count=np.array(cols["guided_count"]),
        peak_flux=np.array(cols["peak_flux_atoms_per_s"]),
        mean_transit=np.array(cols["mean_transit_s"]),
        peak_density=np.array(cols["peak_density_per_m3"]),
        barrier_height=math.nan,
    )


# ---------------------------------------------------------------------------
# Reports

def _mk(depth_j: float) -> float:
    return depth_j / BOLTZMANN_CONSTANT * 1e3


def sweep_fits(table: SweepTable) -> dict[str, FitResult]:
    """Standard fits on a sweep: transit and flux power laws, and a flux
    onset threshold when a barrier was present."""
    fits: dict[str, FitResult] = {}
    ok = (
        np.isfinite(table.mean_transit)
        & (table.mean_transit > 0.0)
        & (table.peak_flux > 0.0)
        & (table.depths > 0.0)
    )
    if ok.sum() >= 3:
        fits["transit_vs_depth"] = fit_power_law(table.depths[ok], table.mean_transit[ok])
        fits["flux_vs_depth"] = fit_power_law(table.depths[ok], table.peak_flux[ok])
        fits["guided_vs_depth"] = fit_linear(table.depths[ok], table.guided_count[ok])
    bh = table.barrier_height
    flux_ok = np.isfinite(table.peak_flux)
    if bh is not None and math.isfinite(bh) and flux_ok.sum() >= 4:
        fits["flux_threshold"] = fit_sqrt_threshold(
            table.depths[flux_ok], table.peak_flux[flux_ok]
        )
    return fits


def _sweep_summary(table: SweepTable, fits: dict[str, FitResult]) -> str:
    lines = ["depth sweep summary", "==================", ""]
    lines.append(
        f"{'depth_mK':>10} {'guided':>12} {'peak_flux_1/s':>14} {'mean_transit_ms':>16} {'peak_density_m3':>16}"
    )
    for i in range(table.depths.size):
        lines.append(
            f"{_mk(table.depths[i]):>10.3f} {table.guided_count[i]:>12.1f} "
            f"{table.peak_flux[i]:>14.4g} {1e3 * table.mean_transit[i]:>16.3f} "
            f"{table.peak_density[i]:>16.4g}"
        )
    for i, err in enumerate(table.row_errors):
        if err is not None:
            lines.append(f"row {i} ({_mk(table.depths[i]):.3f} mK) failed: {err}")
    lines.append("")
    if "transit_vs_depth" in fits:
        f = fits["transit_vs_depth"]
        p = f.params["exponent"]
        if table.barrier_height is None:
            verdict = "ok" if abs(p + 0.5) <= 0.05 else "OUT OF BAND"
            lines.append(
                f"transit time ~ depth^p: p = {p:+.3f} (expected -0.5 +/- 0.05) ... {verdict}"
            )
        else:
            lines.append(f"transit time ~ depth^p: p = {p:+.3f}")
    if "flux_vs_depth" in fits:
        f = fits["flux_vs_depth"]
        p = f.params["exponent"]
        bh = table.barrier_height
        if bh is None:
            verdict = "ok" if abs(p - 0.5) <= 0.1 else "OUT OF BAND"
            lines.append(
                f"peak flux ~ depth^p: p = {p:+.3f} (expected +0.5 +/- 0.1, no barrier) ... {verdict}"
            )
        elif math.isnan(bh):
            lines.append(f"peak flux ~ depth^p: p = {p:+.3f}")
        else:
            lines.append(f"peak flux ~ depth^p: p = {p:+.3f} (barrier present)")
    if "flux_threshold" in fits:
        f = fits["flux_threshold"]
        x0 = f.params["threshold"]
        expect = table.barrier_height
        verdict = "ok" if abs(x0 - expect) <= 0.2 * expect else "OUT OF BAND"
        lines.append(
            f"flux onset threshold: {_mk(x0):.3f} mK "
            f"(barrier height {_mk(expect):.3f} mK, tolerance 20%) ... {verdict}"
        )
    if "guided_vs_depth" in fits:
        f = fits["guided_vs_depth"]
        lines.append(
            f"guided count slope: {f.params['slope']:.4g} atoms/J "
            f"(residual norm {f.residual_norm:.4g})"
        )
    lines.append("")
    return "\n".join(lines)


def _scenario_summary(res: ScenarioResult) -> str:
    by_kind = {k.value: 0 for k in OutcomeKind}
    for o in res.outcomes:
        by_kind[o.kind.value] += 1
    s = res.stats
    lines = [
        "scenario summary",
        "================",
        "",
        f"trajectories: {len(res.outcomes)}",
    ]
    for kind, count in by_kind.items():
        lines.append(f"  {kind}: {count}")
    lines += [
        "",
        f"transmitted fraction: {s.transmitted_fraction:.4f}",
        f"physical scale factor: {res.scale:.6g} atoms per trajectory",
        f"guided atoms (physical): {res.guided_count:.4g}",
        f"peak flux: {res.peak_flux:.6g} atoms/s",
        f"mean transit: {1e3 * s.mean_transit:.3f} ms",
        f"median transit: {1e3 * s.median_transit:.3f} ms",
        f"flux peak time: {1e3 * s.peak_time:.3f} ms",
        f"density snapshot at {1e3 * res.density.snapshot_time:.1f} ms: "
        f"peak {res.density.peak_density:.6g} atoms/m^3",
        f"on-axis optical depth at probe wavelength: {res.optical_depth:.6g}",
        f"wall time: {res.wall_time:.2f} s",
        "",
    ]
    return "\n".join(lines)


def write_report(result, out_dir: str | Path, make_figures: bool = True) -> list[Path]:
    """Write CSV tables, a plain-text summary, and rendered figures.

    Accepts a :class:`ScenarioResult` or a :class:`SweepTable`.  Returns
    the list of files written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if isinstance(result, SweepTable):
        written.append(write_sweep_csv(result, out / "sweep.csv"))
        fits = sweep_fits(result)
        (out / "summary.txt").write_text(_sweep_summary(result, fits))
        written.append(out / "summary.txt")
        if make_figures and result.depths.size:
            from .plots import sweep_figure

            written.append(sweep_figure(result, fits, out / "sweep.png"))
        return written
    if not isinstance(result, ScenarioResult):
        raise TypeError(f"cannot report on {type(result).__name__}")
    written.append(write_flux_csv(result.flux, out / "flux.csv"))
    written.append(write_outcomes_csv(result.outcomes, out / "outcomes.csv"))
    written.append(write_density_csv(result.density, out / "density.csv"))
    (out / "summary.txt").write_text(_scenario_summary(result))
    written.append(out / "summary.txt")
    if make_figures:
        from .plots import density_figure, flux_figure

        written.append(flux_figure(result.flux, out / "flux.png"))
        written.append(density_figure(result.density, out / "density.png"))
    return written


def _summary_from_outcome_rows(rows: list[dict], flux: FluxHistogram | None) -> str:
    by_kind: dict[str, int] = {k.value: 0 for k in OutcomeKind}
    for row in rows:
        by_kind[row["kind"]] = by_kind.get(row["kind"], 0) + 1
    times = np.array(
        [row["arrival_time_s"] for row in rows if row["arrival_time_s"] is not None]
    )
    lines = ["scenario summary (regenerated from tables)", "=" * 43, ""]
    lines.append(f"trajectories: {len(rows)}")
    for kind, count in by_kind.items():
        lines.append(f"  {kind}: {count}")
    lines.append("")
    if rows:
        lines.append(f"transmitted fraction: {times.size / len(rows):.4f}")
    if times.size:
        lines.append(f"mean transit: {1e3 * times.mean():.3f} ms")
        lines.append(f"median transit: {1e3 * np.median(times):.3f} ms")
    if flux is not None and flux.flux.size:
        lines.append(f"peak flux: {flux.flux.max():.6g} atoms/s")
        lines.append(f"flux peak time: {1e3 * flux.centers[int(np.argmax(flux.flux))]:.3f} ms")
    lines.append("")
    return "\n".join(lines)


def report_from_directory(
    in_dir: str | Path, out_dir: str | Path | None = None
) -> list[Path]:
    """Re-render summary and figures from the CSV tables in a directory.

    Recognizes ``sweep.csv``, ``flux.csv``, ``outcomes.csv``, and
    ``density.csv``; whichever are present drive the output.  Raises
    FileNotFoundError when none are found.
    """
    src = Path(in_dir)
    out = src if out_dir is None else Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    from .plots import density_figure, flux_figure, sweep_figure

    if (src / "sweep.csv").exists():
        table = read_sweep_csv(src / "sweep.csv")
        fits = sweep_fits(table)
        (out / "summary.txt").write_text(_sweep_summary(table, fits))
        written.append(out / "summary.txt")
        if table.depths.size:
            written.append(sweep_figure(table, fits, out / "sweep.png"))
        return written

    flux = read_flux_csv(src / "flux.csv") if (src / "flux.csv").exists() else None
    rows = (
        read_outcomes_csv(src / "outcomes.csv")
        if (src / "outcomes.csv").exists()
        else None
    )
    profile = (
        read_density_csv(src / "density.csv") if (src / "density.csv").exists() else None
    )
    if flux is None and rows is None and profile is None:
        raise FileNotFoundError(f"{src}: no sweep.csv, flux.csv, outcomes.csv, or density.csv")
    if rows is not None or flux is not None:
        (out / "summary.txt").write_text(_summary_from_outcome_rows(rows or [], flux))
        written.append(out / "summary.txt")
    if flux is not None and flux.flux.size:
        written.append(flux_figure(flux, out / "flux.png"))
    if profile is not None:
        written.append(density_figure(profile, out / "density.png"))
    return written
