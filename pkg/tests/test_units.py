"""Tests for constants, Drude permittivity and the Kramers-Kronig check."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from plasmon_dressed.core.errors import DomainError, GridError
from plasmon_dressed.core.units import (
    CONSTANTS,
    DrudeMaterial,
    debye_to_si,
    drude_permittivity,
    field_coupling_prefactor,
    kramers_kronig_residual,
    material_preset,
    resonance_energy,
    wavenumber,
)


def test_constants():
    """ħc and ħ in the internal unit system."""
    assert CONSTANTS.hbar_c_ev_nm == pytest.approx(197.327, rel=1e-5)
    assert CONSTANTS.hbar_ev_fs == pytest.approx(0.6582119, rel=1e-6)
    assert CONSTANTS.c_nm_fs == pytest.approx(299.792458)


def test_high_frequency_limit(silver):
    assert drude_permittivity(silver, 100.0).real == pytest.approx(6.0, abs=0.01)


def test_quasistatic_resonance_conditions(silver):
    """Re ε = -2 at the dipole pole and about -4/3 at the octupole pole."""
    assert drude_permittivity(silver, 2.793).real == pytest.approx(-2.0, abs=0.01)
    assert drude_permittivity(silver, 2.92).real == pytest.approx(-1.32, abs=0.01)


def test_passivity_and_monotone_real_part(silver):
    grid = np.linspace(1.0, 10.0, 901)
    eps = silver.permittivity(grid)
    assert np.all(eps.imag > 0)
    assert np.all(np.diff(eps.real) > 0)


def test_scalar_in_scalar_out(silver):
    assert isinstance(drude_permittivity(silver, 2.5), complex)
    assert drude_permittivity(silver, np.array([2.5, 3.0])).shape == (2,)


@pytest.mark.parametrize("energy", [0.0, -1.0])
def test_non_positive_energy_rejected(silver, energy):
    with pytest.raises(DomainError):
        drude_permittivity(silver, energy)


def test_invalid_material():
    with pytest.raises(DomainError, match="eps_inf"):
        DrudeMaterial(eps_inf=0.5, plasma_ev=7.9, damping_ev=0.05)
    with pytest.raises(DomainError, match="damping"):
        DrudeMaterial(eps_inf=6.0, plasma_ev=7.9, damping_ev=-0.01)


def test_material_preset(silver):
    assert material_preset("silver-drude") == silver
    with pytest.raises(DomainError, match="unknown material preset"):
        material_preset("gold")


def test_resonance_energy(silver):
    assert resonance_energy(silver, 1) == pytest.approx(2.793, abs=1e-3)
    assert resonance_energy(silver, 3) == pytest.approx(2.917, abs=1e-3)
    assert resonance_energy(silver, 1000) == pytest.approx(2.986, abs=1e-3)


def test_debye_conversion():
    assert debye_to_si(24.0) == pytest.approx(8.0055e-29, rel=1e-4)
    assert debye_to_si(1.0) == pytest.approx(3.33564e-30, rel=1e-5)
    assert debye_to_si(0.0) == 0.0
    with pytest.raises(DomainError):
        debye_to_si(-1.0)


def test_wavenumber_background_scaling():
    assert wavenumber(2.0, 2.25) == pytest.approx(1.5 * wavenumber(2.0))


def test_field_coupling_prefactor_scaling():
    """Quadratic in the dipole and in the photon energy."""
    grid = np.array([2.0, 2.9])
    base = field_coupling_prefactor(grid, 12.0)
    assert_allclose(field_coupling_prefactor(grid, 24.0), 4.0 * base, rtol=1e-12)
    assert base[1] / base[0] == pytest.approx((2.9 / 2.0) ** 2, rel=1e-12)


def test_field_coupling_prefactor_value():
    """k² d² / ε₀ at 2.9 eV for 24 D, converted from J·m by hand."""
    k_si = 2.9 / CONSTANTS.hbar_c_ev_nm * 1e9
    expected = k_si**2 * (24 * CONSTANTS.debye_si) ** 2 / CONSTANTS.epsilon_0
    expected = expected / CONSTANTS.elementary_charge * 1e9
    assert field_coupling_prefactor(2.9, 24.0) == pytest.approx(expected, rel=1e-12)


def test_kramers_kronig_silver(silver):
    grid = np.linspace(0.1, 400.0, 20000)
    assert kramers_kronig_residual(silver, grid) < 0.02


def test_kramers_kronig_converges(silver):
    """Wider and denser grids shrink the residual on a fixed band."""
    band = (1.0, 8.0)
    residuals = [
        kramers_kronig_residual(silver, np.linspace(0.1, span, points), band)
        for span, points in [(400.0, 16000), (600.0, 30000), (800.0, 50000)]
    ]
    assert residuals[0] > residuals[1] > residuals[2]


def test_kramers_kronig_constant_permittivity():
    material = DrudeMaterial(eps_inf=2.0, plasma_ev=0.0, damping_ev=0.0)
    assert kramers_kronig_residual(material, np.linspace(0.1, 10.0, 100)) == 0.0


def test_kramers_kronig_lossless_rejected():
    lossless = DrudeMaterial(eps_inf=6.0, plasma_ev=7.9, damping_ev=0.0)
    with pytest.raises(DomainError, match="damping > 0"):
        kramers_kronig_residual(lossless, np.linspace(0.1, 400.0, 20000))


def test_kramers_kronig_grid_checks(silver):
    with pytest.raises(GridError, match="at least 395.0 eV"):
        kramers_kronig_residual(silver, np.linspace(0.1, 100.0, 20000))
    with pytest.raises(GridError, match="too coarse"):
        kramers_kronig_residual(silver, np.linspace(0.1, 400.0, 1000))
    with pytest.raises(GridError, match="strictly increasing"):
        kramers_kronig_residual(silver, np.linspace(400.0, 0.1, 20000))
