"""Property suite run by ``plasmon validate``."""

import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .config import RunConfig
from .coupling import coupling_density, mode_table
from .dynamics import populations_eigen, populations_propagate
from .effective import build_h_eff, diagonalize
from .errors import PlasmonError
from .greens import (
    EmitterGeometry,
    SphereSystem,
    free_green_uu,
    mie_scattered_Guu_order,
    quasistatic_scattered_Guu_order,
    scattered_Guu,
)
from .units import kramers_kronig_residual

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""


def _kramers_kronig(config: RunConfig) -> Tuple[float, float, str]:
    material = config.drude()
    grid = np.linspace(0.1, max(400.0, 50.0 * material.plasma_ev), 20000)
    return kramers_kronig_residual(material, grid), 0.02, "max relative residual"


def _small_sphere(config: RunConfig) -> Tuple[float, float, str]:
    system = SphereSystem(1.0, config.drude(), config.background_eps)
    geometry = EmitterGeometry(1.5)
    grid = np.linspace(2.5, 3.1, 601)
    worst = 0.0
    for n in (1, 2, 3):
        qs = quasistatic_scattered_Guu_order(system, geometry, n, grid)
        mie = mie_scattered_Guu_order(system, geometry, n, grid)
        worst = max(worst, float(np.max(np.abs(mie - qs) / np.abs(qs))))
    return worst, 0.02, "per-order |G_mie - G_qs| / |G_qs| at R = 1 nm, z = 1.5 nm"


def _ldos(config: RunConfig) -> Tuple[float, float, str]:
    grid = config.energy_grid()
    greens = scattered_Guu(config.system(), config.geometry(), grid, config.modes, config.backend)
    total = free_green_uu(grid, config.background_eps) + greens.value.imag
    return float(np.min(total)), 0.0, "min Im[G_free + G_scatt] (must be > 0)"


def _convergence(config: RunConfig) -> Tuple[float, float, str]:
    grid = np.linspace(2.5, 3.1, 601)
    greens = scattered_Guu(config.system(), config.geometry(), grid, config.modes, config.backend)
    return greens.worst_ratio, 1e-3, f"last-term ratio at N = {config.modes}"


class _Pipeline:
    """Modes, Hamiltonian and dressed states computed once for the checks that share them."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.emitter = config.emitter()
        self.modes = mode_table(
            self.emitter, config.system(), config.modes, config.energy_grid(), config.backend
        )
        self.hamiltonian = build_h_eff(self.emitter, self.modes)
        self.states = diagonalize(self.hamiltonian)

    def biorthonormality(self):
        return self.states.biorthonormality_error(), 1e-10, "max |L^H R - I|"

    def reconstruction(self):
        matrix = self.hamiltonian.matrix
        error = np.linalg.norm(self.states.reconstruct() - matrix) / np.linalg.norm(matrix)
        return float(error), 1e-10, "relative Frobenius error of R diag(lambda) L^H"

    def sum_rule(self):
        mode = self.modes[min(2, len(self.modes) - 1)]
        half_span = 20.0 * mode.linewidth_ev
        low = max(mode.energy_ev - half_span, 0.05)
        grid = np.linspace(low, mode.energy_ev + half_span, 8001)
        density = coupling_density(
            self.emitter, self.config.system(), mode.order, grid, self.config.backend
        )
        if mode.coupling_ev == 0:
            return abs(density.integral()), 1e-12, f"integral of K for order {mode.order}, d = 0"
        ratio = density.integral() / mode.coupling_ev**2
        return abs(ratio - 1.0), 0.05, f"|integral / g^2 - 1| for order {mode.order}"

    def oracle(self):
        times = self.config.time_grid()
        eigen = populations_eigen(self.states, times)
        propagated = populations_propagate(self.hamiltonian, times)
        difference = max(
            float(np.max(np.abs(eigen.emitter - propagated.emitter))),
            float(np.max(np.abs(eigen.modes - propagated.modes))),
        )
        return difference, 1e-8, "max population difference, eigen vs propagate"

    def norm(self):
        trace = populations_propagate(self.hamiltonian, self.config.time_grid())
        growth = float(np.max(np.diff(trace.norm), initial=0.0))
        return growth, 1e-12, "largest norm increase between samples"


def run_validation(config: RunConfig) -> List[CheckResult]:
    """
    Evaluate every property check; failures are collected, never raised.

    A check passes when its value is within the limit (the LDOS check needs a positive value).
    """
    checks: List[Tuple[str, Callable[[], Tuple[float, float, str]]]] = [
        ("kramers_kronig", lambda: _kramers_kronig(config)),
        ("quasistatic_mie_agreement", lambda: _small_sphere(config)),
        ("ldos_positivity", lambda: _ldos(config)),
        ("multipole_convergence", lambda: _convergence(config)),
    ]
    try:
        pipeline = _Pipeline(config)
    except PlasmonError as e:
        results = [_run(name, check) for name, check in checks]
        results.append(CheckResult("mode_extraction", False, float("nan"), 0.0, str(e)))
        return results

    checks += [
        ("biorthonormality", pipeline.biorthonormality),
        ("eigen_reconstruction", pipeline.reconstruction),
        ("lorentzian_sum_rule", pipeline.sum_rule),
        ("dynamics_oracle", pipeline.oracle),
        ("norm_monotone", pipeline.norm),
    ]
    return [_run(name, check) for name, check in checks]


def _run(name: str, check: Callable[[], Tuple[float, float, str]]) -> CheckResult:
    try:
        value, limit, detail = check()
    except PlasmonError as e:
        logger.warning("check %s raised: %s", name, e)
        return CheckResult(name, False, float("nan"), 0.0, str(e))
    passed = value > limit if name == "ldos_positivity" else value <= limit
    return CheckResult(name, bool(passed), float(value), float(limit), detail)
