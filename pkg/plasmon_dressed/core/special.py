"""Riccati-Bessel recurrences and angular functions for the on-axis multipole series.

All routines are vectorized over the argument array and loop over the multipole order only.
Results are indexed by order first: ``out[n]`` holds order n for n = 0..nmax.

ψₙ(x) = x jₙ(x) and ξₙ(x) = x h¹ₙ(x) are returned as complex logarithms so that products such as
ψₙ(kR) ξₙ(kz)² can be formed for orders far beyond the argument without overflow.
"""

from typing import Tuple

import numpy as np


def start_order(nmax: int, z: np.ndarray) -> int:
    """Order at which the downward log-derivative recurrence starts."""
    largest = float(np.max(np.abs(z))) if np.size(z) else 0.0
    return int(max(nmax, largest)) + 15


def log_derivative(nmax: int, z: np.ndarray) -> np.ndarray:
    """
    Logarithmic derivative Dₙ(z) = ψₙ'(z)/ψₙ(z) by downward recurrence.

    Stable for complex arguments (the metal side m·kR) as well as real ones.

    Args:
        nmax: Highest order returned.
        z: Argument array (real or complex, nonzero).

    Returns:
        Complex array of shape (nmax + 1, *z.shape).
    """
    z = np.asarray(z, dtype=complex)
    top = start_order(nmax, z)
    out = np.zeros((nmax + 1,) + z.shape, dtype=complex)
    current = np.zeros(z.shape, dtype=complex)
    for n in range(top, 0, -1):
        current = n / z - 1.0 / (current + n / z)
        if n - 1 <= nmax:
            out[n - 1] = current
    return out


def log_psi(nmax: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    log ψₙ(x) and Dₙ(x) for n = 0..nmax.

    Uses ψₙ₋₁ / ψₙ = Dₙ + n/x, starting from log ψ₀ = log sin x.
    """
    x = np.asarray(x, dtype=complex)
    d = log_derivative(nmax, x)
    logs = np.empty_like(d)
    logs[0] = np.log(np.sin(x))
    for n in range(1, nmax + 1):
        logs[n] = logs[n - 1] - np.log(d[n] + n / x)
    return logs, d


def log_xi(nmax: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    log ξₙ(x) and D3ₙ(x) = ξₙ'(x)/ξₙ(x) for n = 0..nmax.

    The ratio ρₙ = ξₙ / ξₙ₋₁ obeys ρ₁ = 1/x − i, ρₙ₊₁ = (2n + 1)/x − 1/ρₙ (upward, stable
    for the outgoing Hankel function).
    """
    x = np.asarray(x, dtype=complex)
    logs = np.empty((nmax + 1,) + x.shape, dtype=complex)
    d3 = np.empty_like(logs)
    logs[0] = 1j * x - 0.5j * np.pi
    d3[0] = 1j
    ratio = np.zeros(x.shape, dtype=complex)
    for n in range(1, nmax + 1):
        ratio = 1.0 / x - 1j if n == 1 else (2 * n - 1) / x - 1.0 / ratio
        logs[n] = logs[n - 1] + np.log(ratio)
        d3[n] = 1.0 / ratio - n / x
    return logs, d3


def legendre_pi(nmax: int, mu: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Legendre polynomials Pₙ(μ) and their derivatives πₙ(μ) = Pₙ'(μ).

    dPₙ(cos θ)/dθ is then −sin θ · πₙ.
    """
    mu = np.asarray(mu, dtype=float)
    p = np.zeros((nmax + 1,) + mu.shape)
    pi = np.zeros_like(p)
    p[0] = 1.0
    if nmax >= 1:
        p[1] = mu
        pi[1] = 1.0
    for n in range(2, nmax + 1):
        p[n] = ((2 * n - 1) * mu * p[n - 1] - (n - 1) * p[n - 2]) / n
        pi[n] = ((2 * n - 1) * mu * pi[n - 1] - n * pi[n - 2]) / (n - 1)
    return p, pi
