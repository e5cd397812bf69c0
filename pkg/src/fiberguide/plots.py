"""Figure rendering for scenario and sweep reports.

Everything here draws to files through the Agg backend; no display is
needed or used.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fitting import FitResult
from .observables import DensityProfile, FluxHistogram
from .species import BOLTZMANN_CONSTANT

__all__ = ["flux_figure", "density_figure", "sweep_figure"]


def flux_figure(hist: FluxHistogram, path: str | Path) -> Path:
    """Arrival-rate histogram versus time."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.stairs(hist.flux, 1e3 * hist.edges, fill=True, alpha=0.4, color="C0")
    ax.stairs(hist.flux, 1e3 * hist.edges, color="C0")
    ax.set_xlabel("arrival time (ms)")
    ax.set_ylabel("flux (atoms/s)")
    ax.set_title("guided-atom flux at the far facet")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def density_figure(profile: DensityProfile, path: str | Path) -> Path:
    """Density map over (z, r) plus the on-axis column profile."""
    path = Path(path)
    fig, (ax0, ax1) = plt.subplots(
        2, 1, figsize=(7.0, 5.5), sharex=True, height_ratios=[2, 1]
    )
    z_mm = 1e3 * profile.z_edges
    r_um = 1e6 * profile.r_edges
    mesh = ax0.pcolormesh(z_mm, r_um, profile.density, cmap="magma", shading="flat")
    ax0.set_ylabel("radius (um)")
    if np.isfinite(profile.snapshot_time):
        ax0.set_title(f"atom density at t = {1e3 * profile.snapshot_time:.0f} ms")
    else:
        ax0.set_title("atom density")
    fig.colorbar(mesh, ax=ax0, label="density (atoms/m^3)")
    zc = 0.5 * (profile.z_edges[:-1] + profile.z_edges[1:])
    ax1.plot(1e3 * zc, profile.density[0, :], color="C1")
    ax1.set_xlabel("axial position (mm)")
    ax1.set_ylabel("on-axis density")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _depth_mk(depths_j: np.ndarray) -> np.ndarray:
    return depths_j / BOLTZMANN_CONSTANT * 1e3


def sweep_figure(table, fits: dict[str, FitResult], path: str | Path) -> Path:
    """Four-panel overview of a depth sweep, with fit curves overlaid.

    ``table`` is a :class:`fiberguide.harness.SweepTable`; taken untyped
    here to keep the import graph acyclic.
    """
    path = Path(path)
    d_mk = _depth_mk(table.depths)
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.0))
    (ax_n, ax_f), (ax_t, ax_rho) = axes

    ax_n.plot(d_mk, table.guided_count, "o-", color="C0")
    ax_n.set_ylabel("guided atoms")

    ax_f.plot(d_mk, table.peak_flux, "o", color="C1")
    ax_f.set_ylabel("peak flux (atoms/s)")
    grid = np.linspace(table.depths.min(), table.depths.max(), 200)
    if "flux_threshold" in fits:
        p = fits["flux_threshold"].params
        curve = p["amplitude"] * np.sqrt(np.clip(grid - p["threshold"], 0.0, None))
        ax_f.plot(_depth_mk(grid), curve, "--", color="C1",
                  label=f"sqrt onset at {_depth_mk(np.array([p['threshold']]))[0]:.2f} mK")
        ax_f.legend(fontsize=8)
    elif "flux_vs_depth" in fits:
        p = fits["flux_vs_depth"].params
        curve = p["amplitude"] * grid ** p["exponent"]
        ax_f.plot(_depth_mk(grid), curve, "--", color="C1",
                  label=f"depth^{p['exponent']:+.2f}")
        ax_f.legend(fontsize=8)

    ax_t.plot(d_mk, 1e3 * table.mean_transit, "o", color="C2")
    ax_t.set_xlabel("guide depth (mK)")
    ax_t.set_ylabel("mean transit (ms)")
    if "transit_vs_depth" in fits:
        p = fits["transit_vs_depth"].params
        ok = grid > 0
        curve = p["amplitude"] * grid[ok] ** p["exponent"]
        ax_t.plot(_depth_mk(grid[ok]), 1e3 * curve, "--", color="C2",
                  label=f"depth^{p['exponent']:+.2f}")
        ax_t.legend(fontsize=8)

    ax_rho.plot(d_mk, table.peak_density, "o-", color="C3")
    ax_rho.set_xlabel("guide depth (mK)")
    ax_rho.set_ylabel("peak density (atoms/m^3)")

    fig.suptitle("observables versus guide depth")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
