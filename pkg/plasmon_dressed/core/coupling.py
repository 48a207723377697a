"""Per-mode coupling densities and their Lorentzian pseudomode parameters."""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import curve_fit

from .errors import DomainError, FitError, NumericalError
from .greens import Backend, EmitterGeometry, SphereSystem, scattered_Guu_orders
from .units import field_coupling_prefactor, increasing_grid

logger = logging.getLogger(__name__)

DEFAULT_GRID = (2.0, 3.4, 14001)
FIT_WINDOW_FWHM = 5.0
RESIDUAL_WARNING = 0.2


def default_grid() -> np.ndarray:
    """2.0-3.4 eV at 0.1 meV spacing."""
    return np.linspace(*DEFAULT_GRID)


@dataclass(frozen=True)
class EmitterParams:
    """
    Two-level emitter.

    Attributes:
        transition_ev: ħω_eg, Lamb shift from the free Green's function already included.
        dipole_debye: Transition dipole |d_eg| (radial).
        linewidth_ev: Intrinsic linewidth ħγ_d.
        geometry: Position on the sphere axis.
    """

    transition_ev: float
    dipole_debye: float
    linewidth_ev: float
    geometry: EmitterGeometry

    def __post_init__(self):
        if not self.transition_ev > 0:
            raise DomainError(f"transition energy must be > 0 eV (got {self.transition_ev})")
        if not self.dipole_debye >= 0:
            raise DomainError(f"dipole moment must be >= 0 D (got {self.dipole_debye})")
        if not self.linewidth_ev >= 0:
            raise DomainError(f"emitter linewidth must be >= 0 eV (got {self.linewidth_ev})")

    def prefactor(self, energy_ev):
        """k₀²d²/ε₀ in eV·nm at the given energies."""
        return field_coupling_prefactor(energy_ev, self.dipole_debye)


@dataclass
class CouplingDensity:
    """
    Spectral coupling density of one mode, K(ω) = ħ|κₙ(ω)|² in eV.

    Normalized so that ∫K dħω = (ħgₙ)² for a Lorentzian mode; with ħ folded in, K(E) dE has
    units of eV² and no ħ appears anywhere else in the package.
    """

    order: int
    energy_ev: np.ndarray
    values: np.ndarray

    @property
    def peak_index(self) -> int:
        return int(np.argmax(self.values))

    def integral(self) -> float:
        return float(trapezoid(self.values, self.energy_ev))


@dataclass
class ModeParams:
    """
    Lorentzian pseudomode of order n.

    Attributes:
        order: Multipole order n.
        energy_ev: ħωₙ.
        linewidth_ev: ħγₙ.
        coupling_ev: ħgₙ.
        raw: (ħωₙ, ħγₙ, ħgₙ) from the closed-form peak/FWHM estimate, before refinement.
        residual: Relative rms misfit of the refined Lorentzian over the fit window.
        lorentzian_warning: True when the residual exceeds 20%.
    """

    order: int
    energy_ev: float
    linewidth_ev: float
    coupling_ev: float
    raw: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    residual: float = 0.0
    lorentzian_warning: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def figure_of_merit(self) -> float:
        """gₙ/γₙ; above roughly 1/4 the mode alone can split the emitter line."""
        return self.coupling_ev / self.linewidth_ev

    def detuning(self, transition_ev: float) -> float:
        return self.energy_ev - transition_ev


def lorentzian_density(energy, center, width, coupling):
    """(γ/2π) g² / ((E − ω)² + γ²/4), the modulus squared of the pseudomode amplitude."""
    return width / (2 * np.pi) * coupling**2 / ((energy - center) ** 2 + width**2 / 4)


def refine_peak(x: np.ndarray, y: np.ndarray, index: int) -> Tuple[float, float]:
    """Vertex of the parabola through the three samples around ``index``."""
    x0, x1, x2 = x[index - 1 : index + 2]
    y0, y1, y2 = y[index - 1 : index + 2]
    denominator = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denominator
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denominator
    if a >= 0:
        return float(x1), float(y1)
    c = y1 - a * x1**2 - b * x1
    vertex = -b / (2 * a)
    return float(vertex), float(c - b**2 / (4 * a))


def coupling_density(
    emitter: EmitterParams,
    system: SphereSystem,
    order: int,
    grid: Optional[np.ndarray] = None,
    backend: Union[Backend, str] = Backend.MIE,
    greens: Optional[np.ndarray] = None,
) -> CouplingDensity:
    """
    Coupling density of mode n, K(E) = (k₀²d²/ε₀) Im Gₙ(z, z, E) / π.

    Args:
        emitter: Emitter parameters (dipole, position).
        system: Sphere and material.
        order: Multipole order n.
        grid: Strictly increasing photon energies; defaults to 2.0-3.4 eV, 14001 points.
        backend: Green's function backend.
        greens: Precomputed order-n Green's function on ``grid``.

    Raises:
        NumericalError: Im Gₙ negative at some energy.
    """
    grid = increasing_grid(default_grid() if grid is None else grid)
    if greens is None:
        greens = scattered_Guu_orders(system, emitter.geometry, grid, order, backend)[order - 1]
    imag = np.asarray(greens).imag
    floor = -1e-9 * float(np.max(np.abs(imag)))
    negative = np.nonzero(imag < floor)[0]
    if negative.size:
        raise NumericalError(
            f"order {order}: Im G negative ({imag[negative[0]]:.3e} 1/nm) "
            f"at {grid[negative[0]]:.4f} eV"
        )
    values = emitter.prefactor(grid) * np.clip(imag, 0.0, None) / np.pi
    return CouplingDensity(order=order, energy_ev=grid, values=values)


def _half_maximum_crossings(x: np.ndarray, y: np.ndarray, index: int, half: float, order: int):
    below_left = np.nonzero(y[:index] < half)[0]
    below_right = np.nonzero(y[index:] < half)[0]
    if not below_left.size or not below_right.size:
        raise FitError("half maximum not resolved inside the grid", order)
    j = below_left[-1]
    left = x[j] + (half - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j])
    k = index + below_right[0]
    right = x[k - 1] + (half - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1])
    return left, right


def extract_mode_params(density: CouplingDensity) -> ModeParams:
    """
    Extract (ħωₙ, ħγₙ, ħgₙ) from a coupling density.

    The peak is refined with a three-point parabola, γₙ is the FWHM and gₙ follows from the
    peak identity K(ωₙ) = 2gₙ²/(πγₙ). The three values then seed a least-squares fit of the
    Lorentzian over ±5 FWHM. Both estimates are kept.

    Raises:
        FitError: Peak on the grid boundary, or half maximum not resolved.
    """
    x, y, order = density.energy_ev, density.values, density.order
    index = density.peak_index
    if index == 0 or index == x.size - 1:
        raise FitError(f"peak at {x[index]:.4f} eV lies on the grid boundary", order)
    if not y[index] > 0:
        raise FitError("coupling density is identically zero", order)

    center, height = refine_peak(x, y, index)
    left, right = _half_maximum_crossings(x, y, index, 0.5 * height, order)
    width = right - left
    coupling = np.sqrt(np.pi * width * height / 2)
    raw = (center, width, float(coupling))

    window = np.abs(x - center) <= FIT_WINDOW_FWHM * width
    notes = []
    try:
        popt, _ = curve_fit(lorentzian_density, x[window], y[window], p0=raw, maxfev=10000)
        fitted = (float(popt[0]), abs(float(popt[1])), abs(float(popt[2])))
    except (RuntimeError, ValueError) as e:
        logger.warning("order %d: refinement failed (%s), keeping raw estimate", order, e)
        notes.append(f"refinement failed: {e}")
        fitted = raw

    model = lorentzian_density(x[window], *fitted)
    residual = float(np.sqrt(np.sum((model - y[window]) ** 2) / np.sum(y[window] ** 2)))
    warning = residual > RESIDUAL_WARNING
    if warning:
        logger.warning("order %d: non-Lorentzian density, residual %.1f%%", order, 100 * residual)

    return ModeParams(
        order=order,
        energy_ev=fitted[0],
        linewidth_ev=fitted[1],
        coupling_ev=fitted[2],
        raw=raw,
        residual=residual,
        lorentzian_warning=warning,
        notes=notes,
    )


def _mode_params(
    emitter: EmitterParams,
    system: SphereSystem,
    order: int,
    grid: Optional[np.ndarray],
    backend: Union[Backend, str],
    greens: Optional[np.ndarray] = None,
) -> ModeParams:
    """Fit one order; a dark emitter keeps ωₙ and γₙ of Im Gₙ and gets gₙ = 0."""
    if emitter.dipole_debye > 0:
        return extract_mode_params(
            coupling_density(emitter, system, order, grid, backend, greens=greens)
        )
    unit = replace(emitter, dipole_debye=1.0)
    params = extract_mode_params(coupling_density(unit, system, order, grid, backend, greens))
    return replace(params, coupling_ev=0.0, raw=(params.raw[0], params.raw[1], 0.0))


def mode_table(
    emitter: EmitterParams,
    system: SphereSystem,
    orders: int = 25,
    grid: Optional[np.ndarray] = None,
    backend: Union[Backend, str] = Backend.MIE,
) -> List[ModeParams]:
    """
    Pseudomode parameters for orders 1..N, ordered by n.

    ωₙ and γₙ depend only on Im Gₙ; with a zero dipole every gₙ is 0.

    Raises:
        FitError: With the failing order attached.
    """
    grid = increasing_grid(default_grid() if grid is None else grid)
    greens = scattered_Guu_orders(system, emitter.geometry, grid, orders, backend)
    modes = [
        _mode_params(emitter, system, n, grid, backend, greens[n - 1])
        for n in range(1, orders + 1)
    ]
    logger.info("extracted %d modes (%s backend)", len(modes), Backend(backend).value)
    return modes


def coupling_gap_sweep(
    emitter: EmitterParams,
    system: SphereSystem,
    order: int,
    gaps_nm: Sequence[float],
    grid: Optional[np.ndarray] = None,
    backend: Union[Backend, str] = Backend.MIE,
) -> np.ndarray:
    """ħgₙ (eV) for each emitter-surface gap."""
    couplings = []
    for gap in gaps_nm:
        moved = replace(emitter, geometry=EmitterGeometry.from_gap(system, gap))
        couplings.append(_mode_params(moved, system, order, grid, backend).coupling_ev)
    return np.asarray(couplings)
