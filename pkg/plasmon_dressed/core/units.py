"""Physical constants, unit conversions and the Drude metal permittivity.

Internal unit system: energies (ħω) in eV, lengths in nm, times in fs. SI values only
appear inside :func:`field_coupling_prefactor`, which is the one place where a dipole
moment in C·m meets ε₀.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy import constants as sc
from scipy.integrate import trapezoid

from .errors import DomainError, GridError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable table of the constants used across the package."""

    hbar_ev_fs: float = sc.physical_constants["reduced Planck constant in eV s"][0] * 1e15
    c_nm_fs: float = sc.c * 1e9 / 1e15
    epsilon_0: float = sc.epsilon_0  # F/m
    elementary_charge: float = sc.e  # C, J per eV
    debye_si: float = 1e-21 / sc.c  # C·m per Debye

    @property
    def hbar_c_ev_nm(self) -> float:
        """ħc in eV·nm (≈ 197.327)."""
        return self.hbar_ev_fs * self.c_nm_fs


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DrudeMaterial:
    """Drude metal, ε(ω) = ε∞ − ωp² / (ω² + iγp ω).

    Attributes:
        eps_inf: High-frequency permittivity ε∞ (dimensionless, ≥ 1).
        plasma_ev: Plasma energy ħωp in eV. Zero gives a non-dispersive ε = ε∞.
        damping_ev: Damping ħγp in eV. Zero is the lossless limit.
        name: Optional preset label.
    """

    eps_inf: float
    plasma_ev: float
    damping_ev: float
    name: Optional[str] = None

    def __post_init__(self):
        if not self.eps_inf >= 1.0:
            raise DomainError(f"eps_inf must be >= 1 (got {self.eps_inf})")
        if not self.plasma_ev >= 0.0:
            raise DomainError(f"plasma energy must be >= 0 eV (got {self.plasma_ev})")
        if not self.damping_ev >= 0.0:
            raise DomainError(f"damping must be >= 0 eV (got {self.damping_ev})")

    @classmethod
    def silver(cls) -> "DrudeMaterial":
        """Silver: ε∞ = 6, ħωp = 7.90 eV, ħγp = 51 meV."""
        return cls(eps_inf=6.0, plasma_ev=7.90, damping_ev=0.051, name="silver-drude")

    def permittivity(self, energy_ev: ArrayLike) -> ArrayLike:
        return drude_permittivity(self, energy_ev)


PRESETS: Dict[str, DrudeMaterial] = {"silver-drude": DrudeMaterial.silver()}


def material_preset(name: str) -> DrudeMaterial:
    """Look up a compiled-in material preset by name."""
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise DomainError(f"unknown material preset '{name}' (known: {known})") from None


def drude_permittivity(material: DrudeMaterial, energy_ev: ArrayLike) -> ArrayLike:
    """
    Complex Drude permittivity.

    Args:
        material: Drude parameters.
        energy_ev: Photon energy ħω in eV, scalar or array, strictly positive.

    Returns:
        ε(ω) with the same shape as ``energy_ev``; Im ε > 0 whenever ωp, γp > 0.

    Raises:
        DomainError: If any energy is not strictly positive.
    """
    energy = np.asarray(energy_ev, dtype=float)
    if np.any(~(energy > 0.0)):
        raise DomainError("photon energy must be > 0 eV")
    eps = material.eps_inf - material.plasma_ev**2 / (
        energy**2 + 1j * material.damping_ev * energy
    )
    return eps if eps.ndim else complex(eps)


def resonance_energy(material: DrudeMaterial, order: int, background_eps: float = 1.0) -> float:
    """
    Quasi-static LSP pole of order n: Re[n ε + (n + 1) ε_b] = 0 in the lossless limit.

    Returns:
        ħωₙ = ħωp / sqrt(ε∞ + (n + 1) ε_b / n) in eV.
    """
    if order < 1:
        raise DomainError(f"multipole order must be >= 1 (got {order})")
    return material.plasma_ev / np.sqrt(material.eps_inf + (order + 1) * background_eps / order)


def wavenumber(energy_ev: ArrayLike, background_eps: float = 1.0) -> ArrayLike:
    """Wavenumber k = sqrt(ε_b) ħω / ħc in 1/nm."""
    return np.sqrt(background_eps) * np.asarray(energy_ev, dtype=float) / CONSTANTS.hbar_c_ev_nm


def debye_to_si(dipole_debye: float) -> float:
    """Convert a dipole moment from Debye to C·m."""
    if dipole_debye < 0:
        raise DomainError(f"dipole moment must be >= 0 D (got {dipole_debye})")
    return dipole_debye * CONSTANTS.debye_si


def field_coupling_prefactor(energy_ev: ArrayLike, dipole_debye: float) -> ArrayLike:
    """
    k₀² d² / ε₀ expressed in eV·nm.

    Multiplying by a Green's function component in 1/nm gives an energy in eV. This is ħ times
    the (k₀² d² / ħ ε₀) G term that enters the polarization spectrum, the far-field spectrum
    and the coupling density; every dimensionful prefactor in the package goes through here.

    Args:
        energy_ev: Photon energy ħω in eV (scalar or array).
        dipole_debye: Transition dipole |d_eg| in Debye.
    """
    k_si = wavenumber(energy_ev) * 1e9
    d_si = debye_to_si(dipole_debye)
    joule_metre = k_si**2 * d_si**2 / CONSTANTS.epsilon_0
    return joule_metre / CONSTANTS.elementary_charge * 1e9


def kramers_kronig_residual(
    material: DrudeMaterial,
    grid: np.ndarray,
    band: Optional[Tuple[float, float]] = None,
) -> float:
    """
    Check Re ε against the Kramers-Kronig transform of Im ε.

    Re ε(ω) − ε∞ = (2/π) P∫₀^∞ ω' Im ε(ω') / (ω'² − ω²) dω'. The principal value over the grid
    uses singularity subtraction and the trapezoid rule; the segment [0, grid[0]] is integrated
    with Gauss-Legendre quadrature of the analytic Im ε, so the grid only has to be wide
    (≥ 50 ħωp) and fine (spacing ≤ ħγp / 2).

    Args:
        material: Drude parameters.
        grid: Strictly increasing photon energies in eV.
        band: (low, high) energies where the residual is evaluated.
            Defaults to [2 grid[0], grid[-1] / 50].

    Returns:
        max |Re ε − ε∞ − KK[Im ε]| / |Re ε − ε∞| over the evaluation band.

    Raises:
        DomainError: Lossless metal (pole on the real axis).
        GridError: Grid too narrow, too coarse, or band empty.
    """
    grid = increasing_grid(grid)
    if material.plasma_ev == 0.0:
        return 0.0
    if material.damping_ev == 0.0:
        raise DomainError(
            "Kramers-Kronig check needs damping > 0: lossless Drude pole lies on the axis"
        )

    required_span = 50.0 * material.plasma_ev
    if grid[-1] < required_span:
        raise GridError(
            f"grid must extend to at least {required_span:.1f} eV (50 x plasma energy), "
            f"got {grid[-1]:.1f} eV"
        )
    max_spacing = 0.5 * material.damping_ev
    spacing = float(np.max(np.diff(grid)))
    if spacing > max_spacing:
        raise GridError(f"grid spacing {spacing:.4g} eV too coarse, need <= {max_spacing:.4g} eV")

    low, high = band if band is not None else (2.0 * grid[0], grid[-1] / 50.0)
    indices = np.nonzero((grid >= low) & (grid <= high))[0]
    indices = indices[(indices > 0) & (indices < grid.size - 1)]
    if indices.size == 0:
        raise GridError(f"no grid points inside the evaluation band [{low}, {high}] eV")

    eps = drude_permittivity(material, grid)
    weighted = grid * eps.imag

    nodes, weights = np.polynomial.legendre.leggauss(64)
    low_nodes = 0.5 * grid[0] * (nodes + 1.0)
    low_weights = 0.5 * grid[0] * weights
    low_weighted = low_nodes * drude_permittivity(material, low_nodes).imag

    worst = 0.0
    for i in indices:
        omega = grid[i]
        h = weighted / (grid + omega)
        distance = grid - omega
        integrand = np.empty_like(h)
        off = distance != 0.0
        integrand[off] = (h[off] - h[i]) / distance[off]
        integrand[i] = (h[i + 1] - h[i - 1]) / (grid[i + 1] - grid[i - 1])
        principal = trapezoid(integrand, grid) + h[i] * np.log(
            (grid[-1] - omega) / (omega - grid[0])
        )
        head = np.sum(low_weights * low_weighted / (low_nodes**2 - omega**2))
        transform = 2.0 / np.pi * (principal + head)
        target = eps.real[i] - material.eps_inf
        worst = max(worst, abs(target - transform) / abs(target))

    logger.debug("KK residual %.3e over %d band points", worst, indices.size)
    return worst


def increasing_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise GridError("grid must be a 1-D array with at least 3 points")
    if np.any(np.diff(grid) <= 0.0):
        raise GridError("grid must be strictly increasing")
    if grid[0] <= 0.0:
        raise DomainError("photon energy must be > 0 eV")
    return grid
