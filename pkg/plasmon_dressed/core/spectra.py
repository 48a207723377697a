"""Near-field polarization spectrum, far-field detector spectrum and radiation patterns."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from .coupling import EmitterParams, default_grid, refine_peak
from .errors import DomainError, NumericalError
from .greens import (
    Backend,
    SphereSystem,
    far_field_green_column,
    scattered_Guu,
    scattered_Guu_orders,
)
from .units import increasing_grid

logger = logging.getLogger(__name__)

FAR_ZONE_KR = 10.0


class SpectrumKind(str, Enum):
    NEAR = "near"
    FAR = "far"
    PATTERN = "pattern"


class Projection(str, Enum):
    """Detector weight: full column norm |G·û|² or the scalar |û·G·û|²."""

    VECTOR = "vector"
    SCALAR = "scalar"


@dataclass
class Spectrum:
    """
    Sampled spectrum.

    Attributes:
        kind: near, far or pattern.
        abscissa: Photon energies (eV) or polar angles (rad), strictly increasing.
        values: Nonnegative samples. near: 1/eV²; far: k₀⁴d⁴/ε₀² units; pattern: max = 1.
        metadata: Geometry, detector, mode subset and backend used.
    """

    kind: SpectrumKind
    abscissa: np.ndarray
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def unit(self) -> str:
        return {
            SpectrumKind.NEAR: "1/eV^2",
            SpectrumKind.FAR: "arb",
            SpectrumKind.PATTERN: "normalized",
        }[self.kind]


@dataclass(frozen=True)
class Peak:
    position: float
    height: float


def _self_energy(
    emitter: EmitterParams,
    system: SphereSystem,
    grid: np.ndarray,
    mode_subset: Optional[Iterable[int]],
    orders: int,
    backend: Backend,
) -> np.ndarray:
    if mode_subset is not None:
        subset = sorted(set(mode_subset))
        if not subset:
            raise DomainError("mode subset must name at least one order")
        if subset[0] < 1:
            raise DomainError(f"mode orders must be >= 1 (got {subset[0]})")
        terms = scattered_Guu_orders(system, emitter.geometry, grid, subset[-1], backend)
        greens = terms[[n - 1 for n in subset]].sum(axis=0)
    else:
        greens = scattered_Guu(system, emitter.geometry, grid, orders, backend).value
    return emitter.prefactor(grid) * greens


def _polarization(emitter, system, grid, mode_subset, orders, backend) -> np.ndarray:
    sigma = _self_energy(emitter, system, grid, mode_subset, orders, backend)
    denominator = emitter.transition_ev - grid - 0.5j * emitter.linewidth_ev - sigma
    return 1.0 / np.abs(denominator) ** 2


def polarization_spectrum(
    emitter: EmitterParams,
    system: SphereSystem,
    grid: Optional[np.ndarray] = None,
    mode_subset: Optional[Iterable[int]] = None,
    orders: int = 25,
    backend: Union[Backend, str] = Backend.MIE,
) -> Spectrum:
    """
    Near-field polarization spectrum P(ω) = |ω_eg − ω − iγ_d/2 − (k₀²d²/ε₀) G_uu^scatt(ω)|⁻².

    Only the scattered Green's function enters; its free part is already in ħω_eg.

    Args:
        emitter: Emitter parameters.
        system: Sphere and material.
        grid: Photon energies (eV); defaults to the 2.0-3.4 eV grid.
        mode_subset: Keep only these orders in G_uu^scatt.
        orders: Truncation order when no subset is given.
        backend: Green's function backend.

    Raises:
        DomainError: Empty mode subset.
    """
    grid = increasing_grid(default_grid() if grid is None else grid)
    backend = Backend(backend)
    values = _polarization(emitter, system, grid, mode_subset, orders, backend)
    return Spectrum(
        kind=SpectrumKind.NEAR,
        abscissa=grid,
        values=values,
        metadata={
            "distance_nm": emitter.geometry.distance_nm,
            "mode_subset": sorted(mode_subset) if mode_subset is not None else None,
            "orders": orders,
            "backend": backend.value,
        },
    )


def column_weight(column: np.ndarray, theta, projection: Union[Projection, str]) -> np.ndarray:
    """|G_r|² + |G_θ|² (vector) or |G_r cos θ − G_θ sin θ|² (scalar, the ẑ component)."""
    if Projection(projection) is Projection.VECTOR:
        return np.abs(column[0]) ** 2 + np.abs(column[1]) ** 2
    return np.abs(column[0] * np.cos(theta) - column[1] * np.sin(theta)) ** 2


def far_spectrum(
    emitter: EmitterParams,
    system: SphereSystem,
    detector: Tuple[float, float] = (1000.0, np.pi / 2),
    grid: Optional[np.ndarray] = None,
    orders: int = 25,
    projection: Union[Projection, str] = Projection.VECTOR,
    backend: Union[Backend, str] = Backend.MIE,
) -> Spectrum:
    """
    Detector spectrum S(ω) = (1/2π) (k₀²d²/ε₀)² W(ω) P(ω).

    W is the weight of the total (free + scattered) Green's column at the detector. The column
    always uses retarded Mie coefficients; ``backend`` only affects P(ω).

    Raises:
        GeometryError: Detector not beyond the emitter.
    """
    grid = increasing_grid(default_grid() if grid is None else grid)
    r_nm, theta = detector
    column = far_field_green_column(system, emitter.geometry, (r_nm, theta), grid, orders)
    weight = column_weight(column, theta, projection)
    polarization = _polarization(emitter, system, grid, None, orders, Backend(backend))
    values = emitter.prefactor(grid) ** 2 * weight * polarization / (2 * np.pi)
    return Spectrum(
        kind=SpectrumKind.FAR,
        abscissa=grid,
        values=values,
        metadata={
            "distance_nm": emitter.geometry.distance_nm,
            "detector_r_nm": r_nm,
            "detector_theta_rad": theta,
            "orders": orders,
            "projection": Projection(projection).value,
            "backend": Backend(backend).value,
        },
    )


def radiation_pattern(
    emitter: EmitterParams,
    system: SphereSystem,
    energy_ev: float,
    thetas: Optional[np.ndarray] = None,
    r_nm: float = 1000.0,
    orders: int = 25,
    projection: Union[Projection, str] = Projection.VECTOR,
) -> Spectrum:
    """
    Angular detector signal S(θ) at fixed energy, normalized to a maximum of 1.

    Raises:
        DomainError: Detector radius not in the far zone (kr ≤ 10).
    """
    thetas = np.linspace(0.0, np.pi, 181) if thetas is None else np.asarray(thetas, dtype=float)
    if thetas.size > 1 and np.any(np.diff(thetas) <= 0):
        raise DomainError("pattern angles must be strictly increasing")
    kr = system.wavenumber(energy_ev) * r_nm
    if kr <= FAR_ZONE_KR:
        raise DomainError(f"detector radius {r_nm} nm is not in the far zone (kr = {kr:.2f} <= 10)")
    column = far_field_green_column(system, emitter.geometry, (r_nm, thetas), energy_ev, orders)
    weight = column_weight(column, thetas, projection)
    values = weight / np.max(weight)
    return Spectrum(
        kind=SpectrumKind.PATTERN,
        abscissa=thetas,
        values=values,
        metadata={
            "energy_ev": energy_ev,
            "detector_r_nm": r_nm,
            "orders": orders,
            "projection": Projection(projection).value,
        },
    )


def find_spectrum_peaks(spectrum: Spectrum) -> List[Peak]:
    """Interior local maxima, parabola-refined, highest first (ties: lower abscissa first)."""
    x, y = spectrum.abscissa, spectrum.values
    indices, _ = find_peaks(y)
    peaks = [Peak(*refine_peak(x, y, i)) for i in indices]
    return sorted(peaks, key=lambda p: (-p.height, p.position))


def splitting(spectrum: Spectrum) -> float:
    """Distance between the two highest maxima."""
    peaks = find_spectrum_peaks(spectrum)
    if len(peaks) < 2:
        raise NumericalError(f"need two peaks to measure a splitting, found {len(peaks)}")
    return abs(peaks[0].position - peaks[1].position)


def forward_asymmetry(pattern: Spectrum) -> float:
    """
    A = (∫₀^{π/2} − ∫_{π/2}^{π}) S sin θ dθ / ∫₀^{π} S sin θ dθ.

    Positive values mean more signal on the emitter side of the sphere (θ < π/2).
    """
    theta, values = pattern.abscissa, pattern.values
    inside = (theta >= 0.0) & (theta <= np.pi)
    theta, values = theta[inside], values[inside]
    if not np.any(np.isclose(theta, np.pi / 2)):
        split = np.searchsorted(theta, np.pi / 2)
        theta = np.insert(theta, split, np.pi / 2)
        values = np.insert(values, split, np.interp(np.pi / 2, pattern.abscissa, pattern.values))
    weighted = values * np.sin(theta)
    front = theta <= np.pi / 2 + 1e-12
    back = theta >= np.pi / 2 - 1e-12
    forward = trapezoid(weighted[front], theta[front])
    backward = trapezoid(weighted[back], theta[back])
    return float((forward - backward) / (forward + backward))
