"""Scattered Green's function of a metal sphere for a radially oriented, on-axis dipole.

Geometry: sphere of radius R centred at the origin, emitter on the z axis at distance z > R,
dipole along ẑ. Only m = 0 TM multipoles couple, so every quantity is a sum over the order n.

Two backends are provided:

- quasi-static: multipole polarizabilities αₙ, exact in the limit kR → 0;
- Mie: the full retarded series built from the electric Mie coefficients.

Green's functions are in 1/nm, energies in eV, lengths in nm. The time convention is e^{−iωt},
so that Im G > 0 means absorption.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, GeometryError
from .special import legendre_pi, log_derivative, log_psi, log_xi
from .units import ArrayLike, DrudeMaterial, wavenumber

logger = logging.getLogger(__name__)

CONVERGENCE_TOLERANCE = 1e-3


class Backend(str, Enum):
    """Which Green's function enters the near field and the coupling densities."""

    MIE = "mie"
    QUASISTATIC = "quasistatic"


@dataclass(frozen=True)
class SphereSystem:
    """
    Metal sphere in a homogeneous background.

    Attributes:
        radius_nm: Sphere radius R.
        material: Drude parameters of the metal.
        background_eps: Real permittivity ε_b of the surrounding medium.
    """

    radius_nm: float
    material: DrudeMaterial
    background_eps: float = 1.0

    def __post_init__(self):
        if not self.radius_nm > 0:
            raise DomainError(f"radius must be > 0 (got {self.radius_nm})")
        if not self.background_eps > 0:
            raise DomainError(f"background permittivity must be > 0 (got {self.background_eps})")

    def permittivity(self, energy_ev: ArrayLike) -> ArrayLike:
        return self.material.permittivity(energy_ev)

    def wavenumber(self, energy_ev: ArrayLike) -> ArrayLike:
        """Wavenumber in the background medium (1/nm)."""
        return wavenumber(energy_ev, self.background_eps)


@dataclass(frozen=True)
class EmitterGeometry:
    """Radial emitter on the sphere axis at centre distance ``distance_nm``."""

    distance_nm: float

    def __post_init__(self):
        if not self.distance_nm > 0:
            raise DomainError(f"emitter distance must be > 0 (got {self.distance_nm})")

    @classmethod
    def from_gap(cls, system: SphereSystem, gap_nm: float) -> "EmitterGeometry":
        """Place the emitter ``gap_nm`` away from the sphere surface."""
        if not gap_nm > 0:
            raise GeometryError(f"gap must be > 0 nm (got {gap_nm})")
        return cls(distance_nm=system.radius_nm + gap_nm)

    def gap_nm(self, system: SphereSystem) -> float:
        return self.distance_nm - system.radius_nm


@dataclass
class GreensValue:
    """
    Truncated scattered Green's function at the emitter, G_uu^scatt(ω).

    Attributes:
        energy_ev: Photon energies.
        value: Complex G_uu (1/nm), same shape as ``energy_ev``.
        orders: Truncation order N.
        last_term_ratio: |order-N term| / |sum| per energy.
        backend: Backend that produced the value.
    """

    energy_ev: np.ndarray
    value: np.ndarray
    orders: int
    last_term_ratio: np.ndarray
    backend: Backend

    @property
    def converged(self) -> bool:
        return bool(np.all(self.last_term_ratio < CONVERGENCE_TOLERANCE))

    @property
    def worst_ratio(self) -> float:
        return float(np.max(self.last_term_ratio))


def _check_outside(system: SphereSystem, geometry: EmitterGeometry) -> None:
    if geometry.distance_nm <= system.radius_nm:
        raise GeometryError(
            f"emitter at z = {geometry.distance_nm} nm is not outside the sphere "
            f"(R = {system.radius_nm} nm)"
        )


def _check_order(order: int) -> None:
    if order < 1:
        raise DomainError(f"multipole order must be >= 1 (got {order})")


def _energies(energy_ev: ArrayLike) -> np.ndarray:
    energy = np.asarray(energy_ev, dtype=float)
    if np.any(~(energy > 0.0)):
        raise DomainError("photon energy must be > 0 eV")
    return energy


# Quasi-static backend


def quasistatic_polarizability(system: SphereSystem, order: int, energy_ev: ArrayLike) -> ArrayLike:
    """
    Multipole polarizability αₙ = R^(2n+1) n(ε − ε_b) / (n ε + (n + 1) ε_b), in nm^(2n+1).
    """
    _check_order(order)
    eps = system.permittivity(_energies(energy_ev))
    eb = system.background_eps
    strength = order * (eps - eb) / (order * eps + (order + 1) * eb)
    return system.radius_nm ** (2 * order + 1) * strength


def quasistatic_scattered_Guu_order(
    system: SphereSystem, geometry: EmitterGeometry, order: int, energy_ev: ArrayLike
) -> ArrayLike:
    """
    Order-n scattered G_uu in the nonretarded limit, (n + 1)² αₙ / (4π k² z^(2n+4)).

    Raises:
        GeometryError: If the emitter is not outside the sphere.
    """
    _check_outside(system, geometry)
    _check_order(order)
    return _quasistatic_orders(system, geometry, order, _energies(energy_ev))[order - 1]


def _quasistatic_orders(
    system: SphereSystem, geometry: EmitterGeometry, nmax: int, energy: np.ndarray
) -> np.ndarray:
    eps = system.permittivity(energy)
    eb = system.background_eps
    k = system.wavenumber(energy)
    z = geometry.distance_nm
    ratio = system.radius_nm / z
    out = np.empty((nmax,) + energy.shape, dtype=complex)
    for n in range(1, nmax + 1):
        strength = n * (eps - eb) / (n * eps + (n + 1) * eb)
        out[n - 1] = (n + 1) ** 2 * strength * ratio ** (2 * n + 1) / (4 * np.pi * k**2 * z**3)
    return out


# Mie backend


def _mie_quotients(system: SphereSystem, nmax: int, energy: np.ndarray):
    """
    Split the electric Mie coefficient as aₙ = Qₙ · ψₙ(x)/ξₙ(x), x = kR.

    Returns Q (orders 1..nmax) and log ψₙ(x) − log ξₙ(x) for the same orders.
    """
    k = system.wavenumber(energy)
    x = k * system.radius_nm
    m = np.sqrt(system.permittivity(energy) + 0j) / np.sqrt(system.background_eps)
    m = np.where(m.imag < 0, -m, m)
    d_metal = log_derivative(nmax, m * x)[1:] / m
    log_psi_x, d_x = log_psi(nmax, x)
    log_xi_x, d3_x = log_xi(nmax, x)
    quotient = (d_metal - d_x[1:]) / (d_metal - d3_x[1:])
    return quotient, log_psi_x[1:] - log_xi_x[1:]


def mie_coefficients(system: SphereSystem, nmax: int, energy_ev: ArrayLike) -> np.ndarray:
    """Electric Mie coefficients a₁..a_nmax, shape (nmax, *energy.shape)."""
    energy = _energies(energy_ev)
    quotient, log_ratio = _mie_quotients(system, nmax, energy)
    return quotient * np.exp(log_ratio)


def mie_coefficient_b(system: SphereSystem, order: int, energy_ev: ArrayLike) -> ArrayLike:
    """
    TM (electric) Mie coefficient of order n, Bohren-Huffman form.

    Computed from logarithmic derivatives, aₙ = Qₙ ψₙ(x)/ξₙ(x) with
    Qₙ = (Dₙ(mx)/m − Dₙ(x)) / (Dₙ(mx)/m − D3ₙ(x)), so large orders never form raw
    Bessel ratios. The metal index m = √ε/√ε_b is taken with Im m ≥ 0. In the lossless case
    |aₙ − ½| ≤ ½.
    """
    _check_order(order)
    return mie_coefficients(system, order, energy_ev)[order - 1]


def _mie_orders(
    system: SphereSystem, geometry: EmitterGeometry, nmax: int, energy: np.ndarray
) -> np.ndarray:
    k = system.wavenumber(energy)
    y = k * geometry.distance_nm
    quotient, log_ratio = _mie_quotients(system, nmax, energy)
    log_xi_y, _ = log_xi(nmax, y)
    orders = np.arange(1, nmax + 1).reshape((nmax,) + (1,) * energy.ndim)
    weight = orders * (orders + 1) * (2 * orders + 1)
    series = quotient * np.exp(log_ratio + 2.0 * log_xi_y[1:])
    return -1j * k / (4 * np.pi) * weight * series / y**4


def mie_scattered_Guu_order(
    system: SphereSystem, geometry: EmitterGeometry, order: int, energy_ev: ArrayLike
) -> ArrayLike:
    """
    Order-n scattered G_uu with full retardation,
    −(ik/4π) n(n+1)(2n+1) aₙ [h¹ₙ(kz)/(kz)]².

    Raises:
        GeometryError: If the emitter is not outside the sphere.
    """
    _check_outside(system, geometry)
    _check_order(order)
    return _mie_orders(system, geometry, order, _energies(energy_ev))[order - 1]


def scattered_Guu_orders(
    system: SphereSystem,
    geometry: EmitterGeometry,
    energy_ev: ArrayLike,
    orders: int,
    backend: Union[Backend, str] = Backend.MIE,
) -> np.ndarray:
    """Per-order scattered G_uu for n = 1..orders, shape (orders, *energy.shape)."""
    _check_outside(system, geometry)
    _check_order(orders)
    energy = _energies(energy_ev)
    if Backend(backend) is Backend.MIE:
        return _mie_orders(system, geometry, orders, energy)
    return _quasistatic_orders(system, geometry, orders, energy)


def scattered_Guu(
    system: SphereSystem,
    geometry: EmitterGeometry,
    energy_ev: ArrayLike,
    orders: int = 25,
    backend: Union[Backend, str] = Backend.MIE,
) -> GreensValue:
    """
    Scattered G_uu at the emitter, summed over orders 1..N.

    The series converges geometrically once n exceeds roughly e·kz; the last-term ratio is
    reported and a warning is logged when it exceeds 10⁻³, but nothing is raised.

    Args:
        system: Sphere and material.
        geometry: Emitter position.
        energy_ev: Photon energy or grid (eV).
        orders: Truncation order N ≥ 1.
        backend: "mie" (default) or "quasistatic".

    Returns:
        GreensValue with the summed value and the convergence report.
    """
    energy = _energies(energy_ev)
    backend = Backend(backend)
    terms = scattered_Guu_orders(system, geometry, energy, orders, backend)
    total = terms.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(total != 0, np.abs(terms[-1]) / np.abs(total), 0.0)
    result = GreensValue(
        energy_ev=energy,
        value=total,
        orders=orders,
        last_term_ratio=np.asarray(ratio, dtype=float),
        backend=backend,
    )
    if not result.converged:
        logger.warning(
            "multipole sum not converged at N=%d: last-term ratio %.2e", orders, result.worst_ratio
        )
    return result


def free_green_uu(energy_ev: ArrayLike, background_eps: float = 1.0) -> ArrayLike:
    """Imaginary part of the free-space G_uu at the source, k/(6π) in 1/nm."""
    return wavenumber(_energies(energy_ev), background_eps) / (6 * np.pi)


def purcell_factor(
    system: SphereSystem,
    geometry: EmitterGeometry,
    energy_ev: ArrayLike,
    orders: int = 25,
    backend: Union[Backend, str] = Backend.MIE,
) -> ArrayLike:
    """Total decay-rate enhancement 1 + (6π/k) Im G_uu^scatt."""
    greens = scattered_Guu(system, geometry, energy_ev, orders, backend)
    k = system.wavenumber(greens.energy_ev)
    return 1.0 + 6 * np.pi / k * greens.value.imag


# Field at a detector


def scattering_source_terms(
    system: SphereSystem, geometry: EmitterGeometry, energy_ev: ArrayLike, orders: int
) -> np.ndarray:
    """
    Outgoing multipole amplitudes sₙ h¹ₙ(kz)/(kz) of the scattered field, sₙ = −aₙ.

    Shape (orders, *energy.shape).
    """
    _check_outside(system, geometry)
    energy = _energies(energy_ev)
    y = system.wavenumber(energy) * geometry.distance_nm
    quotient, log_ratio = _mie_quotients(system, orders, energy)
    log_xi_y, _ = log_xi(orders, y)
    return -quotient * np.exp(log_ratio + log_xi_y[1:]) / y**2


def regular_source_terms(
    system: SphereSystem, geometry: EmitterGeometry, energy_ev: ArrayLike, orders: int
) -> np.ndarray:
    """Multipole amplitudes jₙ(kz)/(kz) of the free dipole field, shape (orders, *energy.shape)."""
    energy = _energies(energy_ev)
    y = system.wavenumber(energy) * geometry.distance_nm
    logs, _ = log_psi(orders, y)
    return np.exp(logs[1:]) / y**2


def multipole_column(
    coefficients: np.ndarray, k: ArrayLike, r_nm: float, theta: ArrayLike
) -> np.ndarray:
    """
    Field series (ik/4π) Σ (2n + 1) cₙ N_e0n at the point (r, θ), valid for r beyond the source.

    Args:
        coefficients: cₙ for n = 1..N, shape (N, *shape).
        k: Wavenumber (1/nm), broadcastable to ``shape``.
        r_nm: Radial distance of the field point.
        theta: Polar angle (rad), broadcastable to ``shape``.

    Returns:
        Complex array (3, *shape): r, θ and φ components (1/nm); φ is identically 0.
    """
    coefficients = np.asarray(coefficients)
    nmax = coefficients.shape[0]
    shape = coefficients.shape[1:]
    k = np.broadcast_to(np.asarray(k, dtype=float), shape)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), shape)
    kr = k * r_nm
    logs, d3 = log_xi(nmax, kr)
    xi = np.exp(logs[1:])
    legendre, pi = legendre_pi(nmax, np.cos(theta))
    orders = np.arange(1, nmax + 1).reshape((nmax,) + (1,) * len(shape))
    amplitude = (2 * orders + 1) * coefficients
    radial = (amplitude * orders * (orders + 1) * xi / kr**2 * legendre[1:]).sum(axis=0)
    polar = (amplitude * d3[1:] * xi / kr * (-np.sin(theta)) * pi[1:]).sum(axis=0)
    prefactor = 1j * k / (4 * np.pi)
    return np.stack([prefactor * radial, prefactor * polar, np.zeros(shape, dtype=complex)])


def free_green_column(
    energy_ev: ArrayLike,
    source_nm: float,
    r_nm: float,
    theta: ArrayLike,
    background_eps: float = 1.0,
) -> np.ndarray:
    """
    Analytic free dyad column G₀·ẑ for a source at (0, 0, z), in spherical components.

    G₀ = e^{ikR}/(4πR) [(1 + i/kR − 1/(kR)²) I + (−1 − 3i/kR + 3/(kR)²) R̂R̂].
    """
    energy, theta = np.broadcast_arrays(_energies(energy_ev), np.asarray(theta, dtype=float))
    k = wavenumber(energy, background_eps)
    dx = r_nm * np.sin(theta)
    dz = r_nm * np.cos(theta) - source_nm
    distance = np.hypot(dx, dz)
    ux, uz = dx / distance, dz / distance
    kd = k * distance
    propagator = np.exp(1j * kd) / (4 * np.pi * distance)
    transverse = 1 + 1j / kd - 1 / kd**2
    longitudinal = -1 - 3j / kd + 3 / kd**2
    gx = propagator * longitudinal * ux * uz
    gz = propagator * (transverse + longitudinal * uz**2)
    radial = gx * np.sin(theta) + gz * np.cos(theta)
    polar = gx * np.cos(theta) - gz * np.sin(theta)
    return np.stack([radial, polar, np.zeros_like(radial)])


def far_field_green_column(
    system: SphereSystem,
    geometry: EmitterGeometry,
    detector: Tuple[float, ArrayLike],
    energy_ev: ArrayLike,
    orders: int = 25,
) -> np.ndarray:
    """
    Total Green's column G·ẑ at a detector: analytic free dyad plus the scattered TM series.

    The scattered part always uses the retarded Mie coefficients.

    Args:
        system: Sphere and material.
        geometry: Emitter position.
        detector: (r in nm, θ in rad); θ may be an array.
        energy_ev: Photon energy or grid; broadcast against θ.
        orders: Truncation order N.

    Returns:
        Complex array (3, *shape) with r, θ, φ components (1/nm).

    Raises:
        GeometryError: Emitter inside the sphere, or detector not beyond sphere and emitter.
    """
    _check_outside(system, geometry)
    r_nm, theta = detector
    if r_nm <= max(system.radius_nm, geometry.distance_nm):
        raise GeometryError(
            f"detector at r = {r_nm} nm must lie beyond the sphere and the emitter "
            f"(z = {geometry.distance_nm} nm)"
        )
    energy, theta = np.broadcast_arrays(_energies(energy_ev), np.asarray(theta, dtype=float))
    free = free_green_column(energy, geometry.distance_nm, r_nm, theta, system.background_eps)
    sources = scattering_source_terms(system, geometry, energy, orders)
    scattered = multipole_column(sources, system.wavenumber(energy), r_nm, theta)
    return free + scattered


def radiative_enhancement(
    system: SphereSystem, geometry: EmitterGeometry, energy_ev: ArrayLike, orders: int = 25
) -> ArrayLike:
    """
    Radiative decay enhancement (3/2) Σ n(n+1)(2n+1) |jₙ(kz) + sₙh¹ₙ(kz)|² / (kz)².

    Equals 6π ∮ |G·ẑ|² r² dΩ over a far-zone sphere; 1 without the particle.
    """
    _check_outside(system, geometry)
    energy = _energies(energy_ev)
    total = regular_source_terms(system, geometry, energy, orders) + scattering_source_terms(
        system, geometry, energy, orders
    )
    n = np.arange(1, orders + 1).reshape((orders,) + (1,) * energy.ndim)
    return 1.5 * (n * (n + 1) * (2 * n + 1) * np.abs(total) ** 2).sum(axis=0)
