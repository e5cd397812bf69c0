"""Monte Carlo transport of cold atoms through a hollow-core fiber guide.

A red-detuned beam coupled into the fundamental mode of a hollow-core
photonic band gap fiber forms a radially Gaussian dipole trap that is flat
along the bore and opens into a diverging funnel outside the facets.  This
package samples thermal atom clouds near the entrance, integrates their
motion through that potential (with photon-scattering recoil noise and
optional facet barriers, a second reservoir beam, and gravity), and
reduces the trajectory ensembles to the detector-side observables: guided
flux versus time, transit-time statistics, in-fiber density maps, and
resonant optical depth, plus their scaling with trap depth.
"""

from .config import (
    ConfigError,
    ScenarioConfig,
    default_scenario,
    load_config,
    parse_depth_list,
)
from .dynamics import (
    IntegratorParams,
    OutcomeKind,
    TrajectoryOutcome,
    propagate,
    propagate_ensemble,
    trajectory_seeds,
)
from .ensemble import AtomState, CloudConfig, density_weight, sample_cloud
from .fitting import FitResult, fit_linear, fit_power_law, fit_sqrt_threshold
from .harness import (
    ScenarioResult,
    SweepTable,
    report_from_directory,
    run_scenario,
    sweep_depth,
    sweep_fits,
    write_report,
)
from .observables import (
    DensityProfile,
    FluxHistogram,
    TransitStats,
    density_profile,
    flux_histogram,
    optical_depth,
    photon_signal,
    transit_stats,
)
from .potential import (
    FacetBarrierConfig,
    FieldConfig,
    GuideBeamConfig,
    ReservoirBeamConfig,
    force,
    mode_radius_at,
    potential,
    scattering_rate,
)
from .species import (
    RUBIDIUM_85,
    AtomSpecies,
    capture_speed,
    energy_from_temperature,
    recoil_speed,
    thermal_sigma_v,
)

__version__ = "0.1.0"

__all__ = [
    "AtomSpecies",
    "AtomState",
    "CloudConfig",
    "ConfigError",
    "DensityProfile",
    "FacetBarrierConfig",
    "FieldConfig",
    "FitResult",
    "FluxHistogram",
    "GuideBeamConfig",
    "IntegratorParams",
    "OutcomeKind",
    "RUBIDIUM_85",
    "ReservoirBeamConfig",
    "ScenarioConfig",
    "ScenarioResult",
    "SweepTable",
    "TrajectoryOutcome",
    "TransitStats",
    "capture_speed",
    "default_scenario",
    "density_profile",
    "density_weight",
    "energy_from_temperature",
    "fit_linear",
    "fit_power_law",
    "fit_sqrt_threshold",
    "flux_histogram",
    "force",
    "load_config",
    "mode_radius_at",
    "optical_depth",
    "parse_depth_list",
    "photon_signal",
    "potential",
    "propagate",
    "propagate_ensemble",
    "recoil_speed",
    "report_from_directory",
    "run_scenario",
    "sample_cloud",
    "scattering_rate",
    "sweep_depth",
    "sweep_fits",
    "thermal_sigma_v",
    "trajectory_seeds",
    "transit_stats",
    "write_report",
    "__version__",
]
