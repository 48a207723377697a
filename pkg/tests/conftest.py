"""Shared fixtures: the silver reference setup and a few cheap variants."""

import numpy as np
import pytest

from plasmon_dressed.core.config import RunConfig
from plasmon_dressed.core.coupling import EmitterParams, mode_table
from plasmon_dressed.core.effective import build_h_eff, diagonalize
from plasmon_dressed.core.greens import EmitterGeometry, SphereSystem
from plasmon_dressed.core.units import DrudeMaterial


@pytest.fixture
def silver():
    return DrudeMaterial.silver()


@pytest.fixture
def vacuum_material():
    """ε = 1 everywhere: the sphere is indistinguishable from the background."""
    return DrudeMaterial(eps_inf=1.0, plasma_ev=0.0, damping_ev=0.0)


@pytest.fixture
def system(silver):
    return SphereSystem(radius_nm=8.0, material=silver)


@pytest.fixture
def geometry():
    return EmitterGeometry(distance_nm=10.0)


@pytest.fixture
def emitter(geometry):
    return EmitterParams(
        transition_ev=2.94, dipole_debye=24.0, linewidth_ev=0.015, geometry=geometry
    )


@pytest.fixture
def fast_settings(tmp_path):
    """Overrides for a run that finishes in about a second."""
    return [
        "modes=3",
        "energy_points=2001",
        "time_points=400",
        "angle_points=61",
        f'output_dir="{tmp_path.as_posix()}"',
    ]


@pytest.fixture(scope="session")
def reference_modes():
    """Mode table of the reference configuration (R = 8 nm, 2 nm gap, 24 D, N = 25)."""
    config = RunConfig()
    return mode_table(config.emitter(), config.system(), config.modes, config.energy_grid())


@pytest.fixture(scope="session")
def reference_hamiltonian(reference_modes):
    return build_h_eff(RunConfig().emitter(), reference_modes)


@pytest.fixture(scope="session")
def reference_states(reference_hamiltonian):
    return diagonalize(reference_hamiltonian)


@pytest.fixture(scope="session")
def reference_times():
    return np.linspace(0.0, 200.0, 2000)
