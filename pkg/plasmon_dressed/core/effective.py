"""Non-Hermitian effective Hamiltonian of the emitter coupled to N pseudomodes.

Basis: index 0 is |e, ∅⟩ (emitter excited, no plasmon), index n is |g, 1ₙ⟩ (one quantum in
mode n). Energies are measured from ħω_eg, in eV.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg

from .coupling import EmitterParams, ModeParams
from .errors import DefectiveMatrixError, DomainError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8
PHASE_TOLERANCE = 1e-12


@dataclass
class EffectiveHamiltonian:
    """
    Star-shaped effective Hamiltonian.

    H[0][0] = −iγ_d/2, H[n][n] = Δₙ − iγₙ/2, H[0][n] = igₙ, H[n][0] = −igₙ, zero elsewhere.
    """

    matrix: np.ndarray
    transition_ev: float
    orders: List[int]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def parity(self) -> np.ndarray:
        """D = diag(−1, 1, …, 1); the star structure gives Hᵀ = D H D."""
        d = np.ones(self.dimension)
        d[0] = -1.0
        return np.diag(d)


@dataclass
class DressedStates:
    """
    Biorthogonal eigensystem of the effective Hamiltonian.

    Columns of ``right`` and ``left`` are the dressed states Π_m^R and Π_m^L, normalized so that
    left[:, m]ᴴ right[:, m] = 1. Each right vector has unit norm and a real, nonnegative
    emitter component.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    transition_ev: float
    orders: List[int]
    condition: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def frequencies_ev(self) -> np.ndarray:
        """Dressed energies ħΩ_m = ħω_eg + Re λ_m."""
        return self.transition_ev + self.eigenvalues.real

    @property
    def widths_ev(self) -> np.ndarray:
        """−2 Im λ_m."""
        return -2.0 * self.eigenvalues.imag

    @property
    def emitter_components(self) -> np.ndarray:
        """m₀ of every state."""
        return self.right[0]

    @property
    def initial_amplitudes(self) -> np.ndarray:
        """η_m = ⟨Π_m^L | e, ∅⟩."""
        return np.conj(self.left[0])

    def biorthonormality_error(self) -> float:
        overlap = self.left.conj().T @ self.right
        return float(np.max(np.abs(overlap - np.eye(self.size))))

    def reconstruct(self) -> np.ndarray:
        """R · diag(λ) · Lᴴ."""
        return self.right @ np.diag(self.eigenvalues) @ self.left.conj().T


def build_h_eff(emitter: EmitterParams, modes: Sequence[ModeParams]) -> EffectiveHamiltonian:
    """
    Assemble the (N + 1)×(N + 1) effective Hamiltonian.

    Args:
        emitter: Supplies ħω_eg and ħγ_d.
        modes: Pseudomodes, one per order.

    Raises:
        DomainError: No modes, or a negative coupling.
    """
    if not modes:
        raise DomainError("effective Hamiltonian needs at least one mode")
    size = len(modes) + 1
    matrix = np.zeros((size, size), dtype=complex)
    matrix[0, 0] = -0.5j * emitter.linewidth_ev
    for n, mode in enumerate(modes, start=1):
        if mode.coupling_ev < 0:
            raise DomainError(f"order {mode.order}: coupling must be >= 0 (got {mode.coupling_ev})")
        matrix[n, n] = mode.detuning(emitter.transition_ev) - 0.5j * mode.linewidth_ev
        matrix[0, n] = 1j * mode.coupling_ev
        matrix[n, 0] = -1j * mode.coupling_ev
    return EffectiveHamiltonian(
        matrix=matrix,
        transition_ev=emitter.transition_ev,
        orders=[mode.order for mode in modes],
    )


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    significant = np.nonzero(np.abs(vector) > PHASE_TOLERANCE)[0]
    anchor = vector[significant[0]]
    return vector * (abs(anchor) / anchor)


def diagonalize(hamiltonian: EffectiveHamiltonian) -> DressedStates:
    """
    Diagonalize H and build the paired left states.

    For a right state (m₀, m₁, …, m_N) the left state is (−m₀*, m₁*, …, m_N*) up to scale,
    a consequence of Hᵀ = D H D. The scale is fixed by the bilinear normalization
    ⟨Π^L|Π^R⟩ = 1, whose inverse magnitude is reported as the condition number.

    Raises:
        DomainError: Non-finite matrix.
        DefectiveMatrixError: Condition number above 10⁸ (coalescing eigenvectors).
    """
    matrix = hamiltonian.matrix
    if not np.all(np.isfinite(matrix)):
        raise DomainError("effective Hamiltonian has non-finite entries")

    eigenvalues, vectors = linalg.eig(matrix)
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    right = np.column_stack([_fix_phase(vectors[:, m]) for m in order])

    parity = np.ones(hamiltonian.dimension)
    parity[0] = -1.0
    bilinear = np.einsum("i,im,im->m", parity, right, right)
    condition = 1.0 / np.abs(bilinear)
    worst = float(np.max(condition))
    if worst > CONDITION_LIMIT:
        raise DefectiveMatrixError(
            f"effective Hamiltonian is numerically defective (eigenvector condition {worst:.2e}); "
            "perturb the detuning or couplings slightly"
        )
    left = np.conj(parity[:, None] * right / bilinear[None, :])
    logger.debug("diagonalized %dx%d, worst condition %.2e", *matrix.shape, worst)

    return DressedStates(
        eigenvalues=eigenvalues,
        right=right,
        left=left,
        transition_ev=hamiltonian.transition_ev,
        orders=list(hamiltonian.orders),
        condition=condition,
    )


@dataclass
class TwoModeResult:
    """Dressed pair of the emitter and a single mode."""

    upper_ev: float
    lower_ev: float
    upper_width_ev: float
    lower_width_ev: float

    @property
    def splitting_ev(self) -> float:
        return self.upper_ev - self.lower_ev


def two_mode_analytic(
    coupling_ev: float,
    detuning_ev: float,
    linewidth_d_ev: float,
    linewidth_n_ev: float,
    transition_ev: float = 0.0,
) -> TwoModeResult:
    """
    Closed-form eigenvalues of the 2×2 problem.

    λ± = T/2 ± √(((−Δ + i(γₙ − γ_d)/2)/2)² + g²) with T = Δ − i(γ_d + γₙ)/2. With no losses
    this is Ω± = (ω_eg + ωₙ)/2 ± √(g² + Δ²/4).
    """
    trace = detuning_ev - 0.5j * (linewidth_d_ev + linewidth_n_ev)
    half_gap = (-detuning_ev + 0.5j * (linewidth_n_ev - linewidth_d_ev)) / 2
    root = np.sqrt(half_gap**2 + coupling_ev**2 + 0j)
    pair = sorted([trace / 2 + root, trace / 2 - root], key=lambda v: (v.real, v.imag))
    lower, upper = pair
    return TwoModeResult(
        upper_ev=transition_ev + upper.real,
        lower_ev=transition_ev + lower.real,
        upper_width_ev=-2.0 * upper.imag,
        lower_width_ev=-2.0 * lower.imag,
    )


def anticrossing_sweep(
    coupling_ev: float,
    mode_energy_ev: float,
    linewidth_d_ev: float,
    linewidth_n_ev: float,
    transitions_ev: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """Upper and lower dressed energies while ħω_eg is tuned across one mode."""
    results = [
        two_mode_analytic(
            coupling_ev, mode_energy_ev - e, linewidth_d_ev, linewidth_n_ev, transition_ev=e
        )
        for e in transitions_ev
    ]
    upper = np.array([r.upper_ev for r in results])
    lower = np.array([r.lower_ev for r in results])
    return upper, lower


def weights(states: DressedStates) -> np.ndarray:
    """
    Per-state weights |m_i|² / Σ_j |m_j|², shape (states, components).

    Column 0 is the emitter, column n the mode of order ``states.orders[n - 1]``.
    """
    magnitudes = np.abs(states.right.T) ** 2
    return magnitudes / magnitudes.sum(axis=1, keepdims=True)


def dominant_orders(states: DressedStates, index: int, count: int = 3) -> List[int]:
    """Mode orders with the largest weights in dressed state ``index``."""
    mode_weights = weights(states)[index, 1:]
    ranked = np.argsort(-mode_weights, kind="stable")[:count]
    return [states.orders[i] for i in ranked]
