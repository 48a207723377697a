"""Population dynamics after exciting the emitter with no plasmon present.

Times are in fs and energies in eV; phases are λt/ħ with ħ from :data:`units.CONSTANTS`.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg, stats
from scipy.signal import find_peaks

from .coupling import EmitterParams
from .effective import DressedStates, EffectiveHamiltonian
from .errors import DomainError, NumericalError
from .greens import Backend, SphereSystem, scattered_Guu
from .units import CONSTANTS

logger = logging.getLogger(__name__)

INITIAL_TOLERANCE = 1e-8
REVIVAL_PROMINENCE = 1e-3
DECAY_FIT_START = 0.8


def default_times() -> np.ndarray:
    """0-200 fs, 2000 samples."""
    return np.linspace(0.0, 200.0, 2000)


@dataclass
class PopulationTrace:
    """
    Populations on a time grid.

    Attributes:
        times_fs: Sample times.
        emitter: |C_e(t)|².
        modes: |Cₙ(t)|², shape (modes, times).
        norm: ⟨ψ(t)|ψ(t)⟩.
        orders: Mode order of each row of ``modes``.
    """

    times_fs: np.ndarray
    emitter: np.ndarray
    modes: np.ndarray
    norm: np.ndarray
    orders: List[int] = field(default_factory=list)

    @classmethod
    def from_amplitudes(cls, times: np.ndarray, amplitudes: np.ndarray, orders: List[int]):
        populations = np.abs(amplitudes) ** 2
        return cls(
            times_fs=times,
            emitter=populations[0],
            modes=populations[1:],
            norm=populations.sum(axis=0),
            orders=list(orders),
        )

    def mode(self, order: int) -> np.ndarray:
        return self.modes[self.orders.index(order)]


def _check_times(times: np.ndarray, strict: bool = False) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("time grid must be a non-empty 1-D array")
    if np.any(times < 0):
        raise DomainError("times must be >= 0 fs")
    steps = np.diff(times)
    if np.any(steps < 0) or (strict and np.any(steps == 0)):
        raise DomainError("time grid must be increasing")
    return times


def populations_eigen(states: DressedStates, times: Optional[np.ndarray] = None) -> PopulationTrace:
    """
    Expand |ψ(t)⟩ = Σ_m η_m |Π_m^R⟩ e^{−iλ_m t/ħ} with η_m = ⟨Π_m^L | e, ∅⟩.

    Raises:
        NumericalError: The expansion does not reproduce C_e(0) = 1.
    """
    times = _check_times(default_times() if times is None else times)
    eta = states.initial_amplitudes
    start = states.right @ eta
    leak = np.max(np.abs(start[1:]), initial=0.0)
    if abs(start[0] - 1.0) > INITIAL_TOLERANCE or leak > INITIAL_TOLERANCE:
        raise NumericalError(f"dressed-state expansion gives C_e(0) = {start[0]:.6g}, expected 1")
    phases = np.exp(-1j * np.outer(states.eigenvalues, times) / CONSTANTS.hbar_ev_fs)
    amplitudes = states.right @ (eta[:, None] * phases)
    return PopulationTrace.from_amplitudes(times, amplitudes, states.orders)


def populations_propagate(
    hamiltonian: EffectiveHamiltonian, times: Optional[np.ndarray] = None
) -> PopulationTrace:
    """
    Step the amplitude vector with exp(−iH Δt/ħ) from t = 0 through every sample time.

    Propagators are cached per step length, so uniform grids cost a single matrix exponential.

    Raises:
        NumericalError: A step produced non-finite amplitudes.
    """
    times = _check_times(default_times() if times is None else times, strict=True)
    state = np.zeros(hamiltonian.dimension, dtype=complex)
    state[0] = 1.0
    cache: Dict[float, np.ndarray] = {}
    amplitudes = np.empty((hamiltonian.dimension, times.size), dtype=complex)
    previous = 0.0
    for i, t in enumerate(times):
        step = t - previous
        if step > 0:
            key = round(step, 12)
            if key not in cache:
                cache[key] = linalg.expm(-1j * hamiltonian.matrix * step / CONSTANTS.hbar_ev_fs)
            state = cache[key] @ state
            if not np.all(np.isfinite(state)):
                raise NumericalError(f"propagation failed at t = {t:.4g} fs (step {step:.3g} fs)")
        amplitudes[:, i] = state
        previous = t
    logger.debug("propagated %d samples with %d distinct steps", times.size, len(cache))
    return PopulationTrace.from_amplitudes(times, amplitudes, hamiltonian.orders)


def dominant_mode_report(trace: PopulationTrace) -> List[Tuple[int, float]]:
    """(order, peak population) pairs ranked by peak population; ties keep order."""
    peaks = trace.modes.max(axis=1) if trace.modes.size else np.zeros(0)
    ranked = np.argsort(-peaks, kind="stable")
    return [(trace.orders[i], float(peaks[i])) for i in ranked]


def vacuum_trace(emitter: EmitterParams, times: Optional[np.ndarray] = None) -> PopulationTrace:
    """Emitter without the sphere: |C_e|² = exp(−γ_d t/ħ)."""
    times = _check_times(default_times() if times is None else times)
    population = np.exp(-emitter.linewidth_ev * times / CONSTANTS.hbar_ev_fs)
    return PopulationTrace(
        times_fs=times,
        emitter=population,
        modes=np.zeros((0, times.size)),
        norm=population.copy(),
    )


def golden_rule_rate(
    emitter: EmitterParams,
    system: SphereSystem,
    orders: int = 25,
    backend: Union[Backend, str] = Backend.MIE,
) -> float:
    """Weak-coupling decay rate γ_d + 2 (k₀²d²/ε₀) Im G_uu^scatt(ω_eg), in eV."""
    energy = emitter.transition_ev
    greens = scattered_Guu(system, emitter.geometry, energy, orders, backend).value
    return float(emitter.linewidth_ev + 2.0 * emitter.prefactor(energy) * np.imag(greens))


@dataclass
class DecayFit:
    rate_ev: float
    r_squared: float
    samples: int

    @property
    def lifetime_fs(self) -> float:
        return CONSTANTS.hbar_ev_fs / self.rate_ev


def fit_decay(trace: PopulationTrace) -> DecayFit:
    """
    Exponential fit of |C_e|² between 0.8 and 1/e.

    The window opens at the first sample with |C_e|² ≤ 0.8, after the short-time transient,
    and closes at the first sample below 1/e (or at the end of the trace).

    Raises:
        NumericalError: Population never falls to 0.8, or fewer than three samples in the
            window.
    """
    started = np.nonzero(trace.emitter <= DECAY_FIT_START)[0]
    if not started.size:
        raise NumericalError(f"emitter population never falls to {DECAY_FIT_START}")
    start = started[0]
    below = np.nonzero(trace.emitter < np.exp(-1.0))[0]
    stop = below[0] + 1 if below.size else trace.emitter.size
    times, population = trace.times_fs[start:stop], trace.emitter[start:stop]
    if times.size < 3:
        raise NumericalError("not enough samples in the decay window to fit a decay")
    fit = stats.linregress(times, np.log(population))
    return DecayFit(
        rate_ev=float(-fit.slope * CONSTANTS.hbar_ev_fs),
        r_squared=float(fit.rvalue**2),
        samples=int(times.size),
    )


def rabi_period(trace: PopulationTrace) -> float:
    """
    Time of the first revival of |C_e|² (first interior maximum with prominence ≥ 10⁻³), in fs.

    Raises:
        NumericalError: No revival inside the trace.
    """
    indices, _ = find_peaks(trace.emitter, prominence=REVIVAL_PROMINENCE)
    if not indices.size:
        raise NumericalError("no revival of the emitter population inside the time window")
    return float(trace.times_fs[indices[0]])
