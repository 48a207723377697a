"""Physics modules: materials, Green's functions, pseudomodes, dressed states, spectra."""

from .coupling import CouplingDensity, EmitterParams, ModeParams, extract_mode_params, mode_table
from .dynamics import PopulationTrace, populations_eigen, populations_propagate
from .effective import DressedStates, EffectiveHamiltonian, build_h_eff, diagonalize
from .errors import (
    ConfigError,
    DefectiveMatrixError,
    DomainError,
    FitError,
    GeometryError,
    GridError,
    NumericalError,
    PlasmonError,
)
from .greens import Backend, EmitterGeometry, SphereSystem, scattered_Guu
from .spectra import Projection, Spectrum, far_spectrum, polarization_spectrum
from .units import CONSTANTS, DrudeMaterial

__all__ = [
    "Backend",
    "CONSTANTS",
    "ConfigError",
    "CouplingDensity",
    "DefectiveMatrixError",
    "DomainError",
    "DressedStates",
    "DrudeMaterial",
    "EffectiveHamiltonian",
    "EmitterGeometry",
    "EmitterParams",
    "FitError",
    "GeometryError",
    "GridError",
    "ModeParams",
    "NumericalError",
    "PlasmonError",
    "PopulationTrace",
    "Projection",
    "SphereSystem",
    "Spectrum",
    "build_h_eff",
    "diagonalize",
    "extract_mode_params",
    "far_spectrum",
    "mode_table",
    "polarization_spectrum",
    "populations_eigen",
    "populations_propagate",
    "scattered_Guu",
]
