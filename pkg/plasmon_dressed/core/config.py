"""Run configuration: TOML document -> validated, frozen RunConfig.

Precedence, lowest first: compiled-in defaults, config file (``--config`` or the
``PLASMON_CONFIG`` environment variable), ``--set key=value`` overrides.
"""

import math
import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .coupling import EmitterParams
from .errors import ConfigError, DomainError
from .greens import Backend, EmitterGeometry, SphereSystem
from .spectra import Projection
from .units import PRESETS, DrudeMaterial, material_preset

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

CONFIG_ENV = "PLASMON_CONFIG"
CUSTOM_MATERIAL = "custom"


def _positive(label: str):
    def check(cls, value):
        if value is not None and not value > 0:
            raise ValueError(f"{label} must be > 0")
        return value

    return check


class RunConfig(BaseModel):
    """
    Every tunable of a run. Defaults reproduce the silver sphere reference setup:
    R = 8 nm, 2 nm gap, 24 D radial emitter at 2.94 eV, 25 modes, detector at (1 µm, π/2).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    material: str = "silver-drude"
    eps_inf: Optional[float] = None
    plasma_ev: Optional[float] = None
    damping_ev: Optional[float] = None
    background_eps: float = 1.0

    radius_nm: float = 8.0
    gap_nm: float = 2.0

    transition_ev: float = 2.94
    dipole_debye: float = 24.0
    linewidth_ev: float = 0.015

    modes: int = 25
    backend: Backend = Backend.MIE

    energy_min_ev: float = 2.0
    energy_max_ev: float = 3.4
    energy_points: int = 14001
    time_max_fs: float = 200.0
    time_points: int = 2000
    angle_points: int = 181

    detector_r_nm: float = 1000.0
    detector_theta_rad: float = math.pi / 2
    pattern_energy_ev: float = 2.79
    mode_subset: Optional[List[int]] = None
    projection: Projection = Projection.VECTOR

    output_dir: str = "plasmon-output"

    check_radius = field_validator("radius_nm")(_positive("radius"))
    check_gap = field_validator("gap_nm")(_positive("gap"))
    check_transition = field_validator("transition_ev")(_positive("transition energy"))
    check_background = field_validator("background_eps")(_positive("background permittivity"))
    check_energy_min = field_validator("energy_min_ev")(_positive("energy_min_ev"))
    check_time_max = field_validator("time_max_fs")(_positive("time_max_fs"))
    check_detector = field_validator("detector_r_nm")(_positive("detector radius"))
    check_pattern = field_validator("pattern_energy_ev")(_positive("pattern energy"))

    @field_validator("dipole_debye")
    @classmethod
    def check_dipole(cls, value):
        if not value >= 0:
            raise ValueError("dipole moment must be >= 0")
        return value

    @field_validator("linewidth_ev")
    @classmethod
    def check_linewidth(cls, value):
        if not value >= 0:
            raise ValueError("emitter linewidth must be >= 0")
        return value

    @field_validator("modes")
    @classmethod
    def check_modes(cls, value):
        if value < 1:
            raise ValueError("modes must be >= 1")
        return value

    @field_validator("mode_subset")
    @classmethod
    def check_subset_orders(cls, value):
        if value is not None and any(n < 1 for n in value):
            raise ValueError("mode_subset orders must be >= 1")
        return value

    @field_validator("energy_points", "time_points", "angle_points")
    @classmethod
    def check_points(cls, value):
        if value < 3:
            raise ValueError("grids need at least 3 points")
        return value

    @field_validator("material")
    @classmethod
    def check_material(cls, value):
        if value != CUSTOM_MATERIAL and value not in PRESETS:
            known = ", ".join(sorted(PRESETS) + [CUSTOM_MATERIAL])
            raise ValueError(f"unknown material (known: {known})")
        return value

    @model_validator(mode="after")
    def check_consistency(self):
        if self.energy_max_ev <= self.energy_min_ev:
            raise ValueError("energy_max_ev must be > energy_min_ev")
        drude_keys = (self.eps_inf, self.plasma_ev, self.damping_ev)
        if self.material == CUSTOM_MATERIAL and None in drude_keys:
            raise ValueError("a custom material needs eps_inf, plasma_ev and damping_ev")
        if self.detector_r_nm <= self.radius_nm + self.gap_nm:
            raise ValueError("detector must lie beyond the emitter (detector_r_nm > radius + gap)")
        if self.mode_subset is not None:
            if not self.mode_subset:
                raise ValueError("mode_subset must name at least one order")
            outside = [n for n in self.mode_subset if not 1 <= n <= self.modes]
            if outside:
                raise ValueError(f"mode_subset orders {outside} outside 1..{self.modes}")
        try:
            self.drude()
        except DomainError as e:
            raise ValueError(str(e)) from None
        return self

    # Domain objects

    def drude(self) -> DrudeMaterial:
        """Preset, with any explicit Drude parameter taking precedence."""
        explicit = {
            key: value
            for key, value in (
                ("eps_inf", self.eps_inf),
                ("plasma_ev", self.plasma_ev),
                ("damping_ev", self.damping_ev),
            )
            if value is not None
        }
        if self.material == CUSTOM_MATERIAL:
            return DrudeMaterial(**explicit, name=CUSTOM_MATERIAL)
        base = material_preset(self.material)
        if not explicit:
            return base
        return replace(base, name=CUSTOM_MATERIAL, **explicit)

    def system(self) -> SphereSystem:
        return SphereSystem(self.radius_nm, self.drude(), self.background_eps)

    def geometry(self) -> EmitterGeometry:
        return EmitterGeometry.from_gap(self.system(), self.gap_nm)

    def emitter(self) -> EmitterParams:
        return EmitterParams(
            transition_ev=self.transition_ev,
            dipole_debye=self.dipole_debye,
            linewidth_ev=self.linewidth_ev,
            geometry=self.geometry(),
        )

    def energy_grid(self) -> np.ndarray:
        return np.linspace(self.energy_min_ev, self.energy_max_ev, self.energy_points)

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.time_max_fs, self.time_points)

    def angle_grid(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.angle_points)

    def detector(self) -> Tuple[float, float]:
        return self.detector_r_nm, self.detector_theta_rad

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready dump of every key, echoed into output sidecars."""
        return self.model_dump(mode="json")


def _problems(error: ValidationError) -> List[str]:
    problems = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        if item["type"] == "extra_forbidden":
            problems.append(f"{where}: unknown key")
            continue
        message = item["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, ") :]
        problems.append(f"{where}: {message}")
    return problems


def build_config(data: Dict[str, Any]) -> RunConfig:
    """
    Validate a flat mapping of keys.

    Raises:
        ConfigError: Unknown key or invalid value; ``problems`` lists each one.
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        problems = _problems(e)
        raise ConfigError("invalid configuration: " + "; ".join(problems), problems) from None


def parse_config(text: str) -> RunConfig:
    """Parse a TOML document. An empty document yields the defaults."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"configuration is not valid TOML: {e}") from None
    nested = [key for key, value in data.items() if isinstance(value, dict)]
    if nested:
        raise ConfigError(
            f"configuration keys must be flat, found tables: {', '.join(nested)}",
            [f"{key}: tables are not allowed" for key in nested],
        )
    return build_config(data)


def parse_override(assignment: str) -> Tuple[str, Any]:
    """Split ``key=value``; the value is read as a TOML scalar or array, else a bare string."""
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override '{assignment}' is not of the form key=value")
    raw = raw.strip()
    try:
        value = tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def load_config(
    path: Optional[Path] = None,
    overrides: Iterable[str] = (),
    extra: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Resolve a configuration from file, environment and overrides.

    Args:
        path: Config file; falls back to ``$PLASMON_CONFIG``, then to the defaults.
        overrides: ``key=value`` strings applied after the file.
        extra: Values from dedicated command flags, applied last.

    Raises:
        ConfigError: Unreadable file, bad TOML, unknown key or invalid value.
    """
    if path is None and os.environ.get(CONFIG_ENV):
        path = Path(os.environ[CONFIG_ENV])
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from None
        data = parse_config(text).model_dump(exclude_unset=True)
    for assignment in overrides:
        key, value = parse_override(assignment)
        data[key] = value
    for key, value in (extra or {}).items():
        if value is not None:
            data[key] = value
    return build_config(data)
