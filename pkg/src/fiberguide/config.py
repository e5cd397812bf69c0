"""Scenario configuration: defaults, file parsing, unit handling.

Configuration files are INI-style (configparser) with explicit unit
suffixes on dimensional values, e.g.::

    [guide]
    power = 2.3 W
    waist = 4.5 um

Every key is validated against the schema below; an unknown section or key
is an error, not a warning, so typos cannot silently fall back to defaults.
Values omitted from the file keep the package defaults, which describe the
reference apparatus: an 88 mm fiber with a 6 um core radius, a 4.5 um mode
waist at 1067 nm reaching 8.2 mK depth at 2.3 W, a compact 10 uK source
cloud 300 um before the entrance, and a 2.1 mK facet barrier.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, replace
from pathlib import Path

from .ensemble import CloudConfig
from .dynamics import IntegratorParams
from .potential import (
    FacetBarrierConfig,
    FieldConfig,
    GuideBeamConfig,
    ReservoirBeamConfig,
)
from .species import (
    AtomSpecies,
    BOLTZMANN_CONSTANT,
    RUBIDIUM_85,
    energy_from_temperature,
)

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "default_scenario",
    "load_config",
    "parse_quantity",
    "parse_depth_list",
]


class ConfigError(ValueError):
    """Raised for malformed or unrecognized configuration input."""


_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "μm": 1e-6, "nm": 1e-9}
_TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "μs": 1e-6}
_TEMPERATURE = {"K": 1.0, "mK": 1e-3, "uK": 1e-6, "μK": 1e-6}
_POWER = {"W": 1.0, "mW": 1e-3}
_FREQUENCY = {"Hz": 1.0, "kHz": 1e3}
_VELOCITY = {"m/s": 1.0, "mm/s": 1e-3}
_DENSITY = {"/m3": 1.0, "/cm3": 1e6}
_DEPTH_PER_POWER = {
    "K/W": BOLTZMANN_CONSTANT,
    "mK/W": BOLTZMANN_CONSTANT * 1e-3,
    "uK/W": BOLTZMANN_CONSTANT * 1e-6,
}
_BARE = {"": 1.0}


def _parse_numbers(text: str, units: dict[str, float], key: str, count: int) -> list[float]:
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ConfigError(f"{key}: empty value")
    factor = None
    if units is not _BARE:
        unit = tokens[-1]
        if unit not in units:
            known = ", ".join(sorted(u for u in units if u))
            raise ConfigError(f"{key}: expected a unit from [{known}], got {text!r}")
        factor = units[unit]
        tokens = tokens[:-1]
    else:
        factor = 1.0
    if len(tokens) != count:
        raise ConfigError(f"{key}: expected {count} number(s), got {text!r}")
    try:
        return [float(t) * factor for t in tokens]
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number in {text!r}") from exc


def parse_quantity(text: str, units: dict[str, float], key: str = "value") -> float:
    """Parse one number with a mandatory unit suffix from ``units``."""
    return _parse_numbers(text, units, key, 1)[0]


def _scalar(units):
    return lambda text, key: _parse_numbers(text, units, key, 1)[0]


def _vector(units):
    return lambda text, key: tuple(_parse_numbers(text, units, key, 3))


def _depth(text, key):
    # Trap depths are quoted as temperatures and stored as energies.
    return energy_from_temperature(_parse_numbers(text, _TEMPERATURE, key, 1)[0])


def parse_depth_list(text: str) -> list[float]:
    """Parse comma-separated trap depths quoted as temperatures, into J.

    Bare numbers mean mK, so ``"3, 4, 8.2"`` and ``"3 mK, 4 mK, 8.2 mK"``
    are equivalent.
    """
    depths = []
    for tok in text.split(","):
        tok = tok.strip()
        m = re.fullmatch(r"([-+0-9.eE]+)\s*(\S*)", tok)
        if m is None:
            raise ConfigError(f"depths: cannot parse entry {tok!r}")
        unit = m.group(2) or "mK"
        if unit not in _TEMPERATURE:
            known = ", ".join(sorted(_TEMPERATURE))
            raise ConfigError(f"depths: expected a unit from [{known}], got {tok!r}")
        try:
            value = float(m.group(1))
        except ValueError as exc:
            raise ConfigError(f"depths: not a number in {tok!r}") from exc
        depths.append(energy_from_temperature(value * _TEMPERATURE[unit]))
    return depths


def _boolean(text, key):
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _integer(text, key):
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc


def _string(text, key):
    return text.strip()


_SCHEMA: dict[str, dict[str, object]] = {
    "run": {
        "n_trajectories": _integer,
        "master_seed": _integer,
        "output_dir": _string,
        "physical_peak_density": _scalar(_DENSITY),
    },
    "species": {
        "name": _string,
    },
    "guide": {
        "wavelength": _scalar(_LENGTH),
        "waist": _scalar(_LENGTH),
        "power": _scalar(_POWER),
        "depth": _depth,
        "depth_per_power": _scalar(_DEPTH_PER_POWER),
        "fiber_length": _scalar(_LENGTH),
        "core_radius": _scalar(_LENGTH),
        "propagation_sign": _scalar(_BARE),
        "scatter_rate_max": _scalar(_FREQUENCY),
        "scatter_reference_depth": _depth,
    },
    "barrier": {
        "enabled": _boolean,
        "height": _depth,
        "axial_sigma": _scalar(_LENGTH),
        "position": _scalar(_LENGTH),
    },
    "reservoir": {
        "enabled": _boolean,
        "depth": _depth,
        "waist": _scalar(_LENGTH),
        "wavelength": _scalar(_LENGTH),
        "focus": _vector(_LENGTH),
        "axis": _vector(_BARE),
    },
    "cloud": {
        "temperature": _scalar(_TEMPERATURE),
        "center": _vector(_LENGTH),
        "sigma": _vector(_LENGTH),
        "mean_velocity": _vector(_VELOCITY),
    },
    "reservoir_cloud": {
        "enabled": _boolean,
        "n_atoms": _integer,
        "temperature": _scalar(_TEMPERATURE),
        "center": _vector(_LENGTH),
        "sigma": _vector(_LENGTH),
        "mean_velocity": _vector(_VELOCITY),
    },
    "gravity": {
        "enabled": _boolean,
        "axis": _vector(_BARE),
    },
    "integrator": {
        "dt": _scalar(_TIME),
        "t_max": _scalar(_TIME),
        "enable_scattering": _boolean,
        "z_escape": _scalar(_LENGTH),
    },
}

_SPECIES_BY_NAME = {RUBIDIUM_85.name: RUBIDIUM_85}

DEFAULT_GUIDE = GuideBeamConfig(
    wavelength=1067e-9,
    waist=4.5e-6,
    power=2.3,
    depth_per_power=energy_from_temperature(8.2e-3) / 2.3,
    fiber_length=0.088,
    core_radius=6.0e-6,
    propagation_sign=1.0,
    scatter_rate_max=120.0,
    scatter_reference_depth=energy_from_temperature(8.2e-3),
)

DEFAULT_BARRIER = FacetBarrierConfig(
    height=energy_from_temperature(2.1e-3),
    axial_sigma=10e-6,
    position=0.0,
)

DEFAULT_RESERVOIR = ReservoirBeamConfig(
    depth=energy_from_temperature(2.2e-3),
    waist=27e-6,
    wavelength=782e-9,
    focus=(0.0, 0.0, -60e-6),
    axis=(1.0, 0.0, 0.0),
)

# The default cloud sits 300 um before the facet with a 3 um isotropic
# sigma.  The funnel compresses transverse offsets adiabatically (radial
# energy inside the bore grows as 2*U0*(r0/w(z0))^2), so a source much
# wider than a few um converts its offset into radial oscillation and
# arrives late; this geometry keeps the arrival peak near 70 ms.
DEFAULT_CLOUD = CloudConfig(
    n_atoms=1000,
    temperature=10e-6,
    center=(0.0, 0.0, -300e-6),
    sigma_pos=(3e-6, 3e-6, 3e-6),
    mean_velocity=(0.0, 0.0, 0.0),
)

DEFAULT_RESERVOIR_TEMPERATURE = 38e-6
DEFAULT_PHYSICAL_PEAK_DENSITY = 1.5e17  # atoms/m^3
DEFAULT_GRAVITY_AXIS = (0.0, 0.0, -1.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one scenario end to end."""

    species: AtomSpecies
    field: FieldConfig
    cloud: CloudConfig
    integrator: IntegratorParams
    reservoir_cloud: CloudConfig | None = None
    n_trajectories: int = 1000
    master_seed: int = 20260817
    output_dir: str | None = None
    physical_peak_density: float = DEFAULT_PHYSICAL_PEAK_DENSITY

    def __post_init__(self) -> None:
        if self.n_trajectories < 1:
            raise ConfigError(
                f"run.n_trajectories must be >= 1, got {self.n_trajectories}"
            )
        if self.cloud.n_atoms != self.n_trajectories:
            object.__setattr__(
                self, "cloud", replace(self.cloud, n_atoms=self.n_trajectories)
            )

    def with_depth(self, depth: float) -> "ScenarioConfig":
        """Copy of this scenario with the guide set to the given depth in J."""
        field = replace(self.field, guide=self.field.guide.with_depth(depth))
        return replace(self, field=field)


def reservoir_equilibrium_sigma(
    reservoir: ReservoirBeamConfig, temperature: float
) -> tuple[float, float]:
    """(radial, axial) rms size of a thermal cloud held by the reservoir beam.

    Harmonic approximation around the focus: radially ``(w/2) sqrt(kT/U)``,
    axially ``zR sqrt(kT/(2U))``.  The atomic mass cancels.
    """
    kt_over_u = energy_from_temperature(temperature) / reservoir.depth
    radial = 0.5 * reservoir.waist * kt_over_u ** 0.5
    axial = reservoir.rayleigh_range * (0.5 * kt_over_u) ** 0.5
    return radial, axial


def _default_reservoir_cloud(
    reservoir: ReservoirBeamConfig,
    n_atoms: int,
    temperature: float,
) -> CloudConfig:
    radial, axial = reservoir_equilibrium_sigma(reservoir, temperature)
    ax = reservoir.axis
    sigma = tuple(
        (axial ** 2 * a * a + radial ** 2 * (1.0 - a * a)) ** 0.5 for a in ax
    )
    return CloudConfig(
        n_atoms=n_atoms,
        temperature=temperature,
        center=reservoir.focus,
        sigma_pos=sigma,
        mean_velocity=(0.0, 0.0, 0.0),
    )


def default_scenario() -> ScenarioConfig:
    """Reference scenario: source cloud feeding the fiber, barrier on,
    reservoir off, scattering on."""
    return ScenarioConfig(
        species=RUBIDIUM_85,
        field=FieldConfig(guide=DEFAULT_GUIDE, barrier=DEFAULT_BARRIER),
        cloud=DEFAULT_CLOUD,
        integrator=IntegratorParams(),
        n_trajectories=DEFAULT_CLOUD.n_atoms,
    )


def _get(parsed: dict, section: str, key: str, default):
    return parsed.get(section, {}).get(key, default)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a scenario file on top of the defaults.  Fail-closed: any
    unknown section or key raises :class:`ConfigError` naming it."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    parsed: dict[str, dict[str, object]] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            known = ", ".join(sorted(_SCHEMA))
            raise ConfigError(
                f"{path}: unknown section [{section}]; known sections: {known}"
            )
        parsed[section] = {}
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                known = ", ".join(sorted(_SCHEMA[section]))
                raise ConfigError(
                    f"{path}: unknown key {section}.{key}; known keys: {known}"
                )
            parser = _SCHEMA[section][key]
            parsed[section][key] = parser(raw, f"{section}.{key}")

    species_name = _get(parsed, "species", "name", RUBIDIUM_85.name)
    if species_name not in _SPECIES_BY_NAME:
        known = ", ".join(sorted(_SPECIES_BY_NAME))
        raise ConfigError(f"species.name: unknown species {species_name!r}; known: {known}")
    species = _SPECIES_BY_NAME[species_name]

    g = parsed.get("guide", {})
    if "depth" in g and "power" in g:
        raise ConfigError("guide.depth and guide.power are mutually exclusive")
    guide = replace(
        DEFAULT_GUIDE,
        **{
            k: g[k]
            for k in (
                "wavelength",
                "waist",
                "power",
                "depth_per_power",
                "fiber_length",
                "core_radius",
                "propagation_sign",
                "scatter_rate_max",
                "scatter_reference_depth",
            )
            if k in g
        },
    )
    if "depth" in g:
        guide = guide.with_depth(g["depth"])

    b = parsed.get("barrier", {})
    barrier_enabled = b.get("enabled", True)
    barrier = None
    if barrier_enabled:
        barrier = replace(
            DEFAULT_BARRIER,
            **{k: b[k] for k in ("height", "axial_sigma", "position") if k in b},
        )

    r = parsed.get("reservoir", {})
    reservoir_enabled = r.get("enabled", False)
    reservoir = None
    if reservoir_enabled:
        reservoir = replace(
            DEFAULT_RESERVOIR,
            **{k: r[k] for k in ("depth", "waist", "wavelength", "focus", "axis") if k in r},
        )

    gv = parsed.get("gravity", {})
    gravity_axis = None
    if gv.get("enabled", False):
        gravity_axis = gv.get("axis", DEFAULT_GRAVITY_AXIS)

    try:
        field = FieldConfig(
            guide=guide, barrier=barrier, reservoir=reservoir, gravity_axis=gravity_axis
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    n_traj = _get(parsed, "run", "n_trajectories", DEFAULT_CLOUD.n_atoms)
    c = parsed.get("cloud", {})
    try:
        cloud = replace(
            DEFAULT_CLOUD,
            n_atoms=n_traj,
            **{
                {"sigma": "sigma_pos"}.get(k, k): c[k]
                for k in ("temperature", "center", "sigma", "mean_velocity")
                if k in c
            },
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    rc = parsed.get("reservoir_cloud", {})
    rc_enabled = rc.get("enabled", reservoir is not None)
    reservoir_cloud = None
    if rc_enabled:
        if reservoir is None:
            raise ConfigError(
                "reservoir_cloud.enabled requires reservoir.enabled = true"
            )
        base = _default_reservoir_cloud(
            reservoir,
            rc.get("n_atoms", n_traj),
            rc.get("temperature", DEFAULT_RESERVOIR_TEMPERATURE),
        )
        try:
            reservoir_cloud = replace(
                base,
                **{
                    {"sigma": "sigma_pos"}.get(k, k): rc[k]
                    for k in ("n_atoms", "temperature", "center", "sigma", "mean_velocity")
                    if k in rc
                },
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    it = parsed.get("integrator", {})
    try:
        integrator = replace(
            IntegratorParams(),
            **{
                k: it[k]
                for k in ("dt", "t_max", "enable_scattering", "z_escape")
                if k in it
            },
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return ScenarioConfig(
        species=species,
        field=field,
        cloud=cloud,
        integrator=integrator,
        reservoir_cloud=reservoir_cloud,
        n_trajectories=n_traj,
        master_seed=_get(parsed, "run", "master_seed", 20260817),
        output_dir=_get(parsed, "run", "output_dir", None),
        physical_peak_density=_get(
            parsed, "run", "physical_peak_density", DEFAULT_PHYSICAL_PEAK_DENSITY
        ),
    )
