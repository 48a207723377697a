"""Public API: one object per resolved configuration, plus command dispatch with file output."""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .core.config import RunConfig
from .core.coupling import ModeParams, coupling_gap_sweep, mode_table
from .core.dynamics import PopulationTrace, dominant_mode_report, populations_eigen, rabi_period
from .core.effective import DressedStates, EffectiveHamiltonian, build_h_eff, diagonalize, weights
from .core.errors import NumericalError
from .core.output import write_csv, write_sidecar
from .core.spectra import (
    Spectrum,
    far_spectrum,
    find_spectrum_peaks,
    forward_asymmetry,
    polarization_spectrum,
    radiation_pattern,
)
from .core.validation import CheckResult, run_validation

logger = logging.getLogger(__name__)


def to_dict(obj: Any) -> Dict:
    """
    Convert a dataclass to a dict, including its properties.

    Args:
        obj: Dataclass instance

    Returns:
        Dictionary with all fields and properties
    """
    result = asdict(obj)
    for attr_name in dir(obj):
        if attr_name.startswith("_"):
            continue
        if isinstance(getattr(type(obj), attr_name, None), property):
            try:
                result[attr_name] = getattr(obj, attr_name)
            except (TypeError, ValueError, ZeroDivisionError) as e:
                logger.debug("skipping property %s: %s", attr_name, e)
    return result


class Command(str, Enum):
    MODES = "modes"
    DRESSED = "dressed"
    SPECTRUM_NEAR = "spectrum-near"
    SPECTRUM_FAR = "spectrum-far"
    PATTERN = "pattern"
    DYNAMICS = "dynamics"
    GAP_SWEEP = "gap-sweep"
    VALIDATE = "validate"


class PlasmonStudy:
    """
    Emitter + metal sphere study for one resolved configuration.

    Modes, the effective Hamiltonian and the dressed states are computed on first use and
    cached; every other method is a thin call into ``core``.

    Example:
        >>> study = PlasmonStudy()
        >>> [round(m.energy_ev, 3) for m in study.modes[:3]]
        >>> study.states.frequencies_ev
        >>> study.spectrum_near(mode_subset=[3])
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Args:
            config: Resolved configuration. Defaults to the reference silver setup.
        """
        self.config = config or RunConfig()
        self.system = self.config.system()
        self.emitter = self.config.emitter()
        self._modes: Optional[List[ModeParams]] = None
        self._hamiltonian: Optional[EffectiveHamiltonian] = None
        self._states: Optional[DressedStates] = None

    # === Modes and dressed states ===

    @property
    def modes(self) -> List[ModeParams]:
        if self._modes is None:
            self._modes = mode_table(
                self.emitter,
                self.system,
                self.config.modes,
                self.config.energy_grid(),
                self.config.backend,
            )
        return self._modes

    @property
    def hamiltonian(self) -> EffectiveHamiltonian:
        if self._hamiltonian is None:
            self._hamiltonian = build_h_eff(self.emitter, self.modes)
        return self._hamiltonian

    @property
    def states(self) -> DressedStates:
        if self._states is None:
            self._states = diagonalize(self.hamiltonian)
        return self._states

    def mode_rows(self) -> List[Dict]:
        """Mode table as dicts (order, energy, linewidth, coupling, diagnostics)."""
        return [to_dict(mode) for mode in self.modes]

    # === Spectra ===

    def spectrum_near(self, mode_subset: Optional[Iterable[int]] = None) -> Spectrum:
        """
        Near-field polarization spectrum.

        Args:
            mode_subset: Orders to keep; defaults to the configured subset, else all modes.
        """
        subset = mode_subset if mode_subset is not None else self.config.mode_subset
        return polarization_spectrum(
            self.emitter,
            self.system,
            self.config.energy_grid(),
            subset,
            self.config.modes,
            self.config.backend,
        )

    def spectrum_far(self) -> Spectrum:
        return far_spectrum(
            self.emitter,
            self.system,
            self.config.detector(),
            self.config.energy_grid(),
            self.config.modes,
            self.config.projection,
            self.config.backend,
        )

    def pattern(self, energy_ev: Optional[float] = None) -> Spectrum:
        return radiation_pattern(
            self.emitter,
            self.system,
            energy_ev if energy_ev is not None else self.config.pattern_energy_ev,
            self.config.angle_grid(),
            self.config.detector_r_nm,
            self.config.modes,
            self.config.projection,
        )

    # === Dynamics ===

    def dynamics(self) -> PopulationTrace:
        return populations_eigen(self.states, self.config.time_grid())

    def gap_sweep(self, order: int, gaps_nm: Sequence[float]) -> np.ndarray:
        grid = self.config.energy_grid()
        return coupling_gap_sweep(
            self.emitter, self.system, order, gaps_nm, grid, self.config.backend
        )

    def validate(self) -> List[CheckResult]:
        return run_validation(self.config)


@dataclass
class CommandResult:
    """Files written by a command and a summary for display."""

    command: Command
    files: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    ok: bool = True


def _peak_summary(spectrum: Spectrum, count: int = 4) -> List[Dict[str, float]]:
    return [
        {"position": p.position, "height": p.height}
        for p in find_spectrum_peaks(spectrum)[:count]
    ]


def run_command(config: RunConfig, command: Command, **options) -> CommandResult:
    """
    Run one command and write ``<command>.csv`` plus a ``<command>.json`` sidecar.

    Args:
        config: Resolved configuration; files go to ``config.output_dir``.
        command: Which computation to run.
        **options: ``mode_subset`` (spectrum-near), ``energy_ev`` (pattern),
            ``order`` and ``gaps`` (gap-sweep), ``vectors`` (dressed: full complex vectors
            in the sidecar).

    Returns:
        CommandResult; ``ok`` is False only when ``validate`` finds a failing check.
    """
    command = Command(command)
    study = PlasmonStudy(config)
    out = Path(config.output_dir)
    csv_path = out / f"{command.value}.csv"
    json_path = out / f"{command.value}.json"
    resolved = config.resolved()
    result = CommandResult(command=command)

    if command is Command.MODES:
        modes = study.modes
        result.files.append(
            write_csv(
                csv_path,
                ["n", "omega_n_eV", "gamma_n_eV", "g_n_eV", "fit_residual"],
                [
                    [m.order for m in modes],
                    [m.energy_ev for m in modes],
                    [m.linewidth_ev for m in modes],
                    [m.coupling_ev for m in modes],
                    [m.residual for m in modes],
                ],
            )
        )
        units = {"omega_n_eV": "eV", "gamma_n_eV": "eV", "g_n_eV": "eV", "fit_residual": "1"}
        extra = {"warnings": [m.order for m in modes if m.lorentzian_warning]}
        result.summary = {"modes": study.mode_rows()}

    elif command is Command.DRESSED:
        states = study.states
        index = np.arange(1, states.size + 1)
        result.files.append(
            write_csv(
                csv_path,
                ["m", "Omega_eV", "width_eV"],
                [index, states.frequencies_ev, states.widths_ev],
            )
        )
        weight_table = weights(states)
        header = ["m", "w_e"] + [f"w_{n}" for n in states.orders]
        result.files.append(
            write_csv(out / "dressed-weights.csv", header, [index, *weight_table.T])
        )
        units = {"Omega_eV": "eV", "width_eV": "eV", "w_*": "1"}
        extra = {"condition": states.condition}
        if options.get("vectors"):
            extra["vectors"] = {
                "eigenvalues": states.eigenvalues,
                "right": states.right.T,
                "left": states.left.T,
            }
        result.summary = {
            "frequencies_ev": states.frequencies_ev,
            "widths_ev": states.widths_ev,
            "emitter_weights": weight_table[:, 0],
        }

    elif command in (Command.SPECTRUM_NEAR, Command.SPECTRUM_FAR):
        if command is Command.SPECTRUM_NEAR:
            spectrum = study.spectrum_near(options.get("mode_subset"))
            header = ["energy_eV", "P_per_eV2"]
        else:
            spectrum = study.spectrum_far()
            header = ["energy_eV", "S_arb"]
        result.files.append(write_csv(csv_path, header, [spectrum.abscissa, spectrum.values]))
        units = {header[0]: "eV", header[1]: spectrum.unit}
        extra = {"metadata": spectrum.metadata}
        result.summary = {"peaks": _peak_summary(spectrum)}

    elif command is Command.PATTERN:
        pattern = study.pattern(options.get("energy_ev"))
        result.files.append(
            write_csv(csv_path, ["theta_rad", "S_normalized"], [pattern.abscissa, pattern.values])
        )
        units = {"theta_rad": "rad", "S_normalized": "1"}
        extra = {"metadata": pattern.metadata}
        result.summary = {
            "energy_ev": pattern.metadata["energy_ev"],
            "asymmetry": forward_asymmetry(pattern),
        }

    elif command is Command.DYNAMICS:
        trace = study.dynamics()
        header = ["t_fs", "Pe"] + [f"P{n}" for n in trace.orders] + ["norm"]
        result.files.append(
            write_csv(csv_path, header, [trace.times_fs, trace.emitter, *trace.modes, trace.norm])
        )
        units = {"t_fs": "fs", "Pe": "1", "P*": "1", "norm": "1"}
        extra = {}
        try:
            period = rabi_period(trace)
        except NumericalError:
            period = None
        result.summary = {"rabi_period_fs": period, "dominant": dominant_mode_report(trace)[:5]}

    elif command is Command.GAP_SWEEP:
        order = int(options.get("order", 3))
        gaps = np.asarray(options.get("gaps", (1.0, 2.0, 3.0, 4.0, 6.0, 8.0)), dtype=float)
        couplings = study.gap_sweep(order, gaps)
        result.files.append(write_csv(csv_path, ["gap_nm", f"g_{order}_eV"], [gaps, couplings]))
        units = {"gap_nm": "nm", f"g_{order}_eV": "eV"}
        extra = {"order": order}
        result.summary = {"order": order, "gaps_nm": gaps, "couplings_ev": couplings}

    else:
        checks = study.validate()
        result.ok = all(c.passed for c in checks)
        units = {}
        extra = {"checks": [asdict(c) for c in checks], "passed": result.ok}
        result.summary = {"checks": checks}

    result.files.append(write_sidecar(json_path, command.value, resolved, units, extra))
    return result
