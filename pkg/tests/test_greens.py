"""Tests for the scattered Green's function backends and the detector column."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid

from plasmon_dressed.core.errors import DomainError, GeometryError
from plasmon_dressed.core.greens import (
    Backend,
    EmitterGeometry,
    SphereSystem,
    far_field_green_column,
    free_green_column,
    free_green_uu,
    mie_coefficient_b,
    mie_coefficients,
    mie_scattered_Guu_order,
    multipole_column,
    purcell_factor,
    quasistatic_polarizability,
    quasistatic_scattered_Guu_order,
    radiative_enhancement,
    regular_source_terms,
    scattered_Guu,
)
from plasmon_dressed.core.units import DrudeMaterial

BAND = np.linspace(2.5, 3.1, 61)


def test_geometry_from_gap(system):
    geometry = EmitterGeometry.from_gap(system, 2.0)
    assert geometry.distance_nm == 10.0
    assert geometry.gap_nm(system) == pytest.approx(2.0)
    with pytest.raises(GeometryError):
        EmitterGeometry.from_gap(system, 0.0)


def test_invalid_sphere(silver):
    with pytest.raises(DomainError, match="radius"):
        SphereSystem(radius_nm=-1.0, material=silver)


def test_emitter_inside_sphere_rejected(system):
    inside = EmitterGeometry(distance_nm=6.0)
    with pytest.raises(GeometryError, match="not outside"):
        quasistatic_scattered_Guu_order(system, inside, 1, 2.8)
    with pytest.raises(GeometryError):
        scattered_Guu(system, inside, BAND)


def test_order_must_be_positive(system, geometry):
    with pytest.raises(DomainError, match="order"):
        mie_scattered_Guu_order(system, geometry, 0, 2.8)


def test_index_matched_sphere_is_invisible(vacuum_material, geometry):
    matched = SphereSystem(radius_nm=8.0, material=vacuum_material)
    assert_allclose(quasistatic_polarizability(matched, 2, BAND), 0.0, atol=0)
    assert_allclose(quasistatic_scattered_Guu_order(matched, geometry, 3, BAND), 0.0, atol=0)
    assert_allclose(mie_coefficients(matched, 10, BAND), 0.0, atol=1e-30)
    assert_allclose(mie_scattered_Guu_order(matched, geometry, 3, BAND), 0.0, atol=1e-30)


def test_dipole_pole_in_quasistatic_greens(system, geometry):
    """Im G₁ is larger at 2.793 eV than 13 meV to either side."""
    values = quasistatic_scattered_Guu_order(system, geometry, 1, np.array([2.78, 2.793, 2.806]))
    assert values.imag[1] > values.imag[0]
    assert values.imag[1] > values.imag[2]


def test_quasistatic_purcell_identity(system, geometry):
    """1 + (6π/k) Im ΣGₙ equals 1 + (3/2) k⁻³ Σ (n+1)² Im αₙ / z^(2n+4)."""
    rng = np.random.default_rng(7)
    energies = np.sort(rng.uniform(2.0, 3.4, 5))
    ours = purcell_factor(system, geometry, energies, orders=10, backend=Backend.QUASISTATIC)
    k = system.wavenumber(energies)
    z = geometry.distance_nm
    expected = 1.0 + 1.5 / k**3 * sum(
        (n + 1) ** 2 * quasistatic_polarizability(system, n, energies).imag / z ** (2 * n + 4)
        for n in range(1, 11)
    )
    assert_allclose(ours, expected, rtol=1e-10)


def test_lossless_mie_coefficients_are_bounded():
    """|aₙ − ½| ≤ ½ without absorption."""
    lossless = SphereSystem(radius_nm=8.0, material=DrudeMaterial(6.0, 7.9, 0.0))
    coefficients = mie_coefficients(lossless, 12, np.linspace(2.0, 3.4, 141))
    assert np.all(np.abs(coefficients - 0.5) <= 0.5 + 1e-12)


def test_quadrupole_coefficient_of_large_sphere(silver):
    large = SphereSystem(radius_nm=20.0, material=silver)
    assert abs(mie_coefficient_b(large, 2, 2.89)) > 1e-3


def test_small_sphere_backends_agree(silver):
    """Per-order Mie and quasi-static values within 2% for kR < 0.05."""
    small = SphereSystem(radius_nm=1.0, material=silver)
    close = EmitterGeometry(distance_nm=1.5)
    for n in (1, 2, 3):
        qs = quasistatic_scattered_Guu_order(small, close, n, BAND)
        mie = mie_scattered_Guu_order(small, close, n, BAND)
        assert np.max(np.abs(mie - qs) / np.abs(qs)) < 0.02


def test_single_order_sum(system, geometry):
    total = scattered_Guu(system, geometry, BAND, orders=1)
    assert_allclose(total.value, mie_scattered_Guu_order(system, geometry, 1, BAND), rtol=1e-14)
    qs = scattered_Guu(system, geometry, BAND, orders=1, backend="quasistatic")
    assert_allclose(qs.value, quasistatic_scattered_Guu_order(system, geometry, 1, BAND))


def test_self_convergence(system, geometry):
    """Doubling an already converged truncation changes nothing."""
    grid = np.linspace(2.5, 3.1, 31)
    converged = scattered_Guu(system, geometry, grid, orders=60)
    doubled = scattered_Guu(system, geometry, grid, orders=120)
    assert converged.converged
    assert_allclose(doubled.value, converged.value, rtol=1e-6)


def test_convergence_report_for_short_series(system, geometry):
    short = scattered_Guu(system, geometry, BAND, orders=2)
    assert not short.converged
    assert short.worst_ratio > 1e-3
    assert short.last_term_ratio.shape == BAND.shape


def test_total_ldos_positive(system, geometry):
    grid = np.linspace(2.0, 3.4, 701)
    total = free_green_uu(grid) + scattered_Guu(system, geometry, grid).value.imag
    assert np.all(total > 0)


def test_strong_purcell_enhancement(system, geometry):
    assert purcell_factor(system, geometry, 2.92) > 100


def test_free_column_far_zone_is_sin_squared(vacuum_material, geometry):
    """Without the sphere the column is the bare dipole field."""
    bare = SphereSystem(radius_nm=8.0, material=vacuum_material)
    thetas = np.linspace(0.1, np.pi - 0.1, 37)
    column = far_field_green_column(bare, geometry, (1e5, thetas), 2.8)
    weight = np.abs(column[0]) ** 2 + np.abs(column[1]) ** 2
    equator = far_field_green_column(bare, geometry, (1e5, np.pi / 2), 2.8)
    reference = np.abs(equator[0]) ** 2 + np.abs(equator[1]) ** 2
    assert_allclose(weight / reference, np.sin(thetas) ** 2, atol=1e-3)
    assert_allclose(column[2], 0.0, atol=0)


def test_regular_series_reproduces_free_dyad(vacuum_material, geometry):
    """Σ (2n+1) jₙ(kz)/(kz) N_e0n matches the closed-form dyad outside the source radius."""
    bare = SphereSystem(radius_nm=8.0, material=vacuum_material)
    thetas = np.linspace(0.0, np.pi, 37)
    energy = np.full(thetas.shape, 2.8)
    terms = regular_source_terms(bare, geometry, energy, 40)
    series = multipole_column(terms, bare.wavenumber(energy), 50.0, thetas)
    closed = free_green_column(energy, geometry.distance_nm, 50.0, thetas)
    scale = np.abs(closed).max()
    assert_allclose(series / scale, closed / scale, atol=1e-10)


def test_no_transverse_field_on_axis(vacuum_material, geometry):
    bare = SphereSystem(radius_nm=8.0, material=vacuum_material)
    column = far_field_green_column(bare, geometry, (1e5, 0.0), 2.8)
    assert abs(column[1]) < 1e-12 * abs(column[0]) + 1e-30


def test_outgoing_decay(system, geometry):
    near = far_field_green_column(system, geometry, (1e4, np.pi / 3), 2.8)
    far = far_field_green_column(system, geometry, (2e4, np.pi / 3), 2.8)
    ratio = np.linalg.norm(far) * 2e4 / (np.linalg.norm(near) * 1e4)
    assert abs(ratio - 1.0) < 1e-3


@pytest.mark.parametrize("energy", [2.79, 2.92])
def test_power_balance(system, geometry, energy):
    """6π ∮ |G·ẑ|² r² dΩ reproduces the radiative enhancement from the source amplitudes."""
    r = 1e4
    thetas = np.linspace(0.0, np.pi, 2001)
    column = far_field_green_column(system, geometry, (r, thetas), energy)
    weight = np.abs(column[0]) ** 2 + np.abs(column[1]) ** 2
    flux = 6 * np.pi * 2 * np.pi * trapezoid(weight * r**2 * np.sin(thetas), thetas)
    assert flux == pytest.approx(radiative_enhancement(system, geometry, energy), rel=0.01)


def test_radiative_enhancement_without_sphere(vacuum_material, geometry):
    bare = SphereSystem(radius_nm=8.0, material=vacuum_material)
    assert radiative_enhancement(bare, geometry, 2.8) == pytest.approx(1.0, rel=1e-9)


def test_detector_must_be_outside(system, geometry):
    with pytest.raises(GeometryError, match="beyond"):
        far_field_green_column(system, geometry, (9.0, 0.5), 2.8)
