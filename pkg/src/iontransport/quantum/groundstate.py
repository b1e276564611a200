"""Imaginary-time split-operator ground states."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import Grid
from .wavefunction import WaveFunction


class GroundStateError(RuntimeError):
    pass


@dataclass
class GroundState:
    state: WaveFunction
    energy: float
    variance: float
    iterations: int
    energies: list = field(default_factory=list, repr=False)


def _kinetic(grid: Grid, mass: float, hbar: float) -> np.ndarray:
    k2 = sum(k**2 for k in grid.wavenumbers())
    return hbar**2 * k2 / (2 * mass)


def energy_and_variance(phi: np.ndarray, V: np.ndarray, K: np.ndarray, dV: float):
    """<H> and <(H - <H>)^2> for a normalised grid state."""
    Hphi = sfft.ifftn(K * sfft.fftn(phi)) + V * phi
    E = float(np.real(np.vdot(phi, Hphi)) * dV)
    res = Hphi - E * phi
    return E, float(np.real(np.vdot(res, res)) * dV)


def ground_state_imaginary_time(grid: Grid, potential: np.ndarray, mass: float, hbar: float,
                                omega: float, *, origin=None, dtau: float | None = None,
                                tol: float = 1e-12, variance_tol: float = 1e-6,
                                check_every: int = 10, max_iter: int = 200_000,
                                max_refinements: int = 10,
                                initial: np.ndarray | None = None) -> GroundState:
    """Lowest eigenstate of p^2/2M + potential on ``grid``.

    ``omega`` sets the natural scale: dtau defaults to 0.02/omega and the
    target is a standard deviation of the energy below variance_tol*hbar*omega.
    When the energy has settled but the variance target is missed, dtau is
    halved (the split-step fixed point carries an O(dtau^2) bias).
    """
    V = np.broadcast_to(np.asarray(potential, dtype=float), grid.shape)
    if not np.all(np.isfinite(V)):
        raise GroundStateError("potential must be finite on the grid")
    # work relative to the minimum so exp(-V dtau/hbar) cannot underflow
    V0 = float(V.min())
    V = V - V0
    K = _kinetic(grid, mass, hbar)
    scale = hbar * omega
    dV = grid.dV
    if initial is None:
        phi = np.exp(-V / scale).astype(complex)
    else:
        phi = np.array(initial, dtype=complex)
    phi /= np.sqrt(np.sum(np.abs(phi) ** 2) * dV)
    dtau = 0.02 / omega if dtau is None else dtau
    energies = []
    E_prev, _ = energy_and_variance(phi, V, K, dV)
    energies.append(E_prev)
    it = 0
    var_prev = np.inf
    target = (variance_tol * scale) ** 2
    for _ in range(max_refinements + 1):
        half_v = np.exp(-0.5 * V * dtau / hbar)
        full_k = np.exp(-K * dtau / hbar)
        while it < max_iter:
            for _ in range(check_every):
                phi = half_v * sfft.ifftn(full_k * sfft.fftn(half_v * phi))
                phi /= np.sqrt(np.sum(np.abs(phi) ** 2) * dV)
            it += check_every
            E, var = energy_and_variance(phi, V, K, dV)
            energies.append(E)
            settled = abs(E - E_prev) <= tol * max(abs(E), scale)
            E_prev = E
            if settled and var < target:
                origin = (0.0,) * grid.ndim if origin is None else origin
                state = WaveFunction(phi, grid, origin, hbar=hbar, label="ground")
                return GroundState(state, E + V0, var, it, [e + V0 for e in energies])
            stalled = var > 0.99 * var_prev
            var_prev = var
            if settled and stalled:
                break
        else:
            raise GroundStateError(f"not converged after {it} iterations")
        # remaining variance is the O(dtau^2) bias of the split step
        dtau *= 0.5
        var_prev = np.inf
    raise GroundStateError(
        f"energy variance {np.sqrt(var) / scale:.2e} hbar*omega above target after "
        f"{max_refinements} refinements"
    )
