"""Harmonic-oscillator eigenfunctions and ladder-operator matrix elements."""
from __future__ import annotations

import math

import numpy as np


def oscillator_length(M: float, omega: float, hbar: float) -> float:
    return math.sqrt(hbar / (M * omega))


def annihilation(size: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, size, dtype=float)), 1)


def position_powers(kmax: int, nmax: int) -> list[np.ndarray]:
    """<j| x^k |n> for k = 0..kmax and j, n <= nmax, x in oscillator lengths.

    The basis is padded by kmax levels so the truncation never reaches the
    returned block.
    """
    size = nmax + kmax + 1
    a = annihilation(size)
    x = (a + a.T) / math.sqrt(2)
    out, acc = [], np.eye(size)
    for _ in range(kmax + 1):
        out.append(acc[: nmax + 1, : nmax + 1].copy())
        acc = acc @ x
    return out


def hermite_functions(nmax: int, xi) -> np.ndarray:
    """Normalised psi_n(xi), n = 0..nmax, of the dimensionless oscillator.

    Uses the three-term recurrence, which stays stable for large n.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def eigenfunction(n: int, x, M: float, omega: float, hbar: float) -> np.ndarray:
    """Phi_n(x) in SI units (normalised on the real line)."""
    a = oscillator_length(M, omega, hbar)
    return hermite_functions(n, np.asarray(x) / a)[n] / math.sqrt(a)
