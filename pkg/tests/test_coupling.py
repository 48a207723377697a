"""Tests for coupling densities and Lorentzian pseudomode extraction."""

from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from plasmon_dressed.core.coupling import (
    CouplingDensity,
    coupling_density,
    coupling_gap_sweep,
    extract_mode_params,
    lorentzian_density,
    mode_table,
    refine_peak,
)
from plasmon_dressed.core.errors import DomainError, FitError, GridError
from plasmon_dressed.core.greens import Backend

OCTUPOLE_GRID = np.linspace(2.7, 3.15, 4501)


def test_refine_peak_recovers_parabola_vertex():
    x = np.array([1.0, 1.1, 1.2])
    y = -((x - 1.13) ** 2) + 4.0
    position, height = refine_peak(x, y, 1)
    assert position == pytest.approx(1.13)
    assert height == pytest.approx(4.0)


def test_density_vanishes_without_dipole(emitter, system):
    dark = replace(emitter, dipole_debye=0.0)
    density = coupling_density(dark, system, 3, OCTUPOLE_GRID)
    assert_allclose(density.values, 0.0, atol=0)


def test_density_scales_with_dipole_squared(emitter, system):
    half = replace(emitter, dipole_debye=12.0)
    full = coupling_density(emitter, system, 3, OCTUPOLE_GRID)
    quarter = coupling_density(half, system, 3, OCTUPOLE_GRID)
    assert_allclose(full.values, 4.0 * quarter.values, rtol=1e-12)
    assert np.all(full.values >= 0)


def test_octupole_density_peak(emitter, system):
    density = coupling_density(emitter, system, 3, OCTUPOLE_GRID)
    assert density.energy_ev[density.peak_index] == pytest.approx(2.917, abs=0.010)


def test_density_rejects_bad_grid(emitter, system):
    with pytest.raises(GridError):
        coupling_density(emitter, system, 3, OCTUPOLE_GRID[::-1])


def test_synthetic_lorentzian_recovered():
    grid = np.linspace(2.5, 3.3, 8001)
    values = lorentzian_density(grid, 2.9, 0.051, 0.020)
    mode = extract_mode_params(CouplingDensity(order=4, energy_ev=grid, values=values))
    assert mode.order == 4
    assert mode.energy_ev == pytest.approx(2.9, rel=1e-3)
    assert mode.linewidth_ev == pytest.approx(0.051, rel=1e-3)
    assert mode.coupling_ev == pytest.approx(0.020, rel=1e-3)
    assert mode.residual < 1e-3
    assert not mode.lorentzian_warning
    assert mode.raw[1] == pytest.approx(0.051, rel=1e-2)


def test_extraction_is_idempotent(emitter, system):
    first = extract_mode_params(coupling_density(emitter, system, 3, OCTUPOLE_GRID))
    rebuilt = lorentzian_density(
        OCTUPOLE_GRID, first.energy_ev, first.linewidth_ev, first.coupling_ev
    )
    second = extract_mode_params(CouplingDensity(3, OCTUPOLE_GRID, rebuilt))
    assert second.energy_ev == pytest.approx(first.energy_ev, rel=1e-3)
    assert second.linewidth_ev == pytest.approx(first.linewidth_ev, rel=1e-3)
    assert second.coupling_ev == pytest.approx(first.coupling_ev, rel=1e-3)


def test_peak_on_boundary_raises(emitter, system):
    grid = np.linspace(2.0, 2.5, 501)
    density = coupling_density(emitter, system, 1, grid)
    with pytest.raises(FitError, match="order 1: .*boundary") as info:
        extract_mode_params(density)
    assert info.value.order == 1


def test_zero_density_raises():
    grid = np.linspace(2.0, 3.0, 101)
    values = np.zeros_like(grid)
    with pytest.raises(FitError):
        extract_mode_params(CouplingDensity(2, grid, values))


def test_octupole_coupling_strength(emitter, system):
    """ħg₃ ≈ 23.5 meV for 24 D at a 2 nm gap."""
    mode = extract_mode_params(coupling_density(emitter, system, 3, OCTUPOLE_GRID))
    assert mode.coupling_ev == pytest.approx(0.0235, rel=0.3)
    assert mode.figure_of_merit == pytest.approx(mode.coupling_ev / mode.linewidth_ev)


def test_coupling_linear_in_dipole(emitter, system):
    full = extract_mode_params(coupling_density(emitter, system, 3, OCTUPOLE_GRID))
    half = extract_mode_params(
        coupling_density(replace(emitter, dipole_debye=12.0), system, 3, OCTUPOLE_GRID)
    )
    assert half.coupling_ev == pytest.approx(0.5 * full.coupling_ev, rel=1e-4)


def test_coupling_decays_with_gap(emitter, system):
    couplings = coupling_gap_sweep(emitter, system, 3, [1.0, 2.0, 4.0], OCTUPOLE_GRID)
    assert couplings.shape == (3,)
    assert np.all(np.diff(couplings) < 0)


def test_sum_rule(emitter, system):
    """∫K dE = g² when the grid spans ±20 linewidths."""
    mode = extract_mode_params(coupling_density(emitter, system, 3, OCTUPOLE_GRID))
    half_span = 20 * mode.linewidth_ev
    grid = np.linspace(mode.energy_ev - half_span, mode.energy_ev + half_span, 8001)
    density = coupling_density(emitter, system, 3, grid)
    assert density.integral() == pytest.approx(mode.coupling_ev**2, rel=0.05)


def test_quasistatic_widths_follow_drude_damping(emitter, system):
    modes = mode_table(emitter, system, 4, backend=Backend.QUASISTATIC)
    for mode in modes[1:]:
        assert mode.linewidth_ev == pytest.approx(0.051, rel=0.1)


def test_quasistatic_resonances(emitter, system):
    """Extracted energies sit on the Drude poles and climb toward 2.986 eV."""
    modes = mode_table(emitter, system, 10, backend=Backend.QUASISTATIC)
    energies = np.array([m.energy_ev for m in modes])
    assert energies[0] == pytest.approx(2.793, rel=0.01)
    assert energies[2] == pytest.approx(2.917, rel=0.01)
    assert np.all(np.diff(energies) > 0)
    assert energies[-1] < 2.986


def test_single_mode_table(emitter, system):
    modes = mode_table(emitter, system, 1)
    assert len(modes) == 1
    assert modes[0].order == 1
    assert modes[0].energy_ev == pytest.approx(2.79, abs=0.02)


def test_reference_mode_table(reference_modes):
    assert [m.order for m in reference_modes] == list(range(1, 26))
    assert reference_modes[2].energy_ev == pytest.approx(2.917, rel=0.01)
    assert all(m.linewidth_ev > 0 and m.coupling_ev >= 0 for m in reference_modes)


def test_gap_sweep_rejects_contact(emitter, system):
    with pytest.raises(DomainError):
        coupling_gap_sweep(emitter, system, 3, [0.0], OCTUPOLE_GRID)


def test_dark_emitter_keeps_mode_shapes(emitter, system):
    bright = mode_table(emitter, system, 3)
    dark = mode_table(replace(emitter, dipole_debye=0.0), system, 3)
    assert [m.coupling_ev for m in dark] == [0.0, 0.0, 0.0]
    assert_allclose([m.energy_ev for m in dark], [m.energy_ev for m in bright], rtol=1e-6)
    assert_allclose([m.linewidth_ev for m in dark], [m.linewidth_ev for m in bright], rtol=1e-3)


def test_gap_sweep_of_dark_emitter(emitter, system):
    dark = replace(emitter, dipole_debye=0.0)
    assert_allclose(coupling_gap_sweep(dark, system, 3, [1.0, 2.0], OCTUPOLE_GRID), 0.0, atol=0)
