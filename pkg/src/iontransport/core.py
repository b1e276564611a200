"""Trap and ion parameters, equilibrium geometry and the model potentials.

All quantities are SI.  The potentials are written in centre-of-mass (Q) and
half-separation (r) coordinates of two equal ions, both with effective mass
M = 2m.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import e, epsilon_0
from scipy.optimize import bisect

HBAR = 1.054571817e-34
COULOMB = e**2 / (4 * math.pi * epsilon_0)  # 2.30708e-28 N m^2
BE9_PAIR_MASS = 29.93e-27


class EquilibriumError(RuntimeError):
    """Raised when the relative-coordinate minimum cannot be bracketed."""


@dataclass(frozen=True)
class TrapParams:
    """Physical parameters of the trap and the transported ions.

    ``M`` is the total (CM) mass; for two ions the single-ion mass is M/2.
    ``omega`` is angular (rad/s), ``beta`` the quartic coefficient (m^-2),
    ``d`` the transport distance (m).
    """

    M: float
    omega: float
    beta: float = 0.0
    d: float = 0.0
    Cc: float = COULOMB
    hbar: float = HBAR
    n_ions: int = 2

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("mass must be positive")
        if not self.omega > 0:
            raise ValueError("trap frequency must be positive")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.d < 0:
            raise ValueError("transport distance must be non-negative")
        if not self.Cc > 0:
            raise ValueError("Coulomb constant must be positive")
        if self.n_ions < 2:
            raise ValueError("need at least two ions")

    @property
    def m(self) -> float:
        return self.M / self.n_ions

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def replace(self, **changes) -> "TrapParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class EquilibriumInfo:
    r_e: float
    omega_tilde: float


def fig1_params(**overrides) -> TrapParams:
    """Two 9Be+ ions, 20 kHz trap, 370 um transport, beta = 1e6 m^-2."""
    kw = dict(M=BE9_PAIR_MASS, omega=2 * math.pi * 20e3, beta=1e6, d=370e-6)
    kw.update(overrides)
    return TrapParams(**kw)


def fig5_params(beta: float, **overrides) -> TrapParams:
    """Same ions and distance as :func:`fig1_params` in a 2 MHz trap."""
    kw = dict(M=BE9_PAIR_MASS, omega=2 * math.pi * 2e6, beta=beta, d=370e-6)
    kw.update(overrides)
    return TrapParams(**kw)


def harmonic_equilibrium_distance(params: TrapParams) -> float:
    """Closed-form half-separation for beta = 0: M w^2 r = Cc / (2 r^2)."""
    return (params.Cc / (2 * params.M * params.omega**2)) ** (1 / 3)


def relative_potential(params: TrapParams, r):
    """V_r(r) = 1/2 M w^2 (r^2 + beta r^4) + Cc / (2 r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("relative coordinate must be positive (ion ordering q1 > q2)")
    M, w2, b = params.M, params.omega**2, params.beta
    return 0.5 * M * w2 * (r**2 + b * r**4) + params.Cc / (2 * r)


def relative_force_gradient(params: TrapParams, r):
    """dV_r/dr."""
    r = np.asarray(r, dtype=float)
    M, w2, b = params.M, params.omega**2, params.beta
    return M * w2 * (r + 2 * b * r**3) - params.Cc / (2 * r**2)


def relative_curvature(params: TrapParams, r):
    """d^2 V_r / dr^2."""
    M, w2, b = params.M, params.omega**2, params.beta
    return M * w2 * (1 + 6 * b * r**2) + params.Cc / r**3


def equilibrium_distance(params: TrapParams, rtol: float = 1e-14) -> float:
    """Half-separation r_e minimising V_r on r > 0.

    Bisection on dV_r/dr over [0.1, 10] times the harmonic value; the
    derivative is monotone there.
    """
    r_h = harmonic_equilibrium_distance(params)
    lo, hi = 0.1 * r_h, 10 * r_h
    glo = relative_force_gradient(params, lo)
    ghi = relative_force_gradient(params, hi)
    if not (np.isfinite(glo) and np.isfinite(ghi)) or glo * ghi > 0:
        raise EquilibriumError(
            f"cannot bracket the equilibrium on [{lo:.3e}, {hi:.3e}] m"
        )
    try:
        r_e = bisect(
            lambda r: float(relative_force_gradient(params, r)),
            lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps),
            maxiter=500,
        )
    except RuntimeError as exc:
        raise EquilibriumError(str(exc)) from exc
    return r_e


def effective_frequency(params: TrapParams, r_e: float) -> float:
    """CM frequency shifted by the CM-relative coupling at frozen r = r_e."""
    if not r_e > 0:
        raise ValueError("r_e must be positive")
    return params.omega * math.sqrt(1 + 6 * params.beta * r_e**2)


def equilibrium(params: TrapParams) -> EquilibriumInfo:
    r_e = equilibrium_distance(params)
    return EquilibriumInfo(r_e=r_e, omega_tilde=effective_frequency(params, r_e))


def cm_potential(params: TrapParams, q_rel):
    """1/2 M w^2 [(Q-Q0)^2 + beta (Q-Q0)^4] (CM part of the 2D potential)."""
    q_rel = np.asarray(q_rel, dtype=float)
    return 0.5 * params.M * params.omega**2 * (q_rel**2 + params.beta * q_rel**4)


def coupling_potential(params: TrapParams, q_rel, r):
    """3 M w^2 beta (Q-Q0)^2 r^2."""
    q_rel = np.asarray(q_rel, dtype=float)
    r = np.asarray(r, dtype=float)
    return 3 * params.M * params.omega**2 * params.beta * q_rel**2 * r**2


def potential_2d(params: TrapParams, q_rel, r):
    """Full anharmonic two-ion potential; q_rel = Q - Q0."""
    return (
        cm_potential(params, q_rel)
        + relative_potential(params, r)
        + coupling_potential(params, q_rel, r)
    )


def potential_2d_gradient(params: TrapParams, q_rel, r):
    """(dV/dQ, dV/dr) of :func:`potential_2d`."""
    M, w2, b = params.M, params.omega**2, params.beta
    dq = M * w2 * (q_rel + 2 * b * q_rel**3) + 6 * M * w2 * b * q_rel * r**2
    dr = relative_force_gradient(params, r) + 6 * M * w2 * b * q_rel**2 * r
    return dq, dr


def potential_1d_effective(params: TrapParams, r_e: float, q_rel):
    """Frozen-relative-coordinate CM potential (constant dropped).

    1/2 M w^2 [(1 + 6 beta r_e^2) x^2 + beta x^4], x = Q - Q0.
    """
    q_rel = np.asarray(q_rel, dtype=float)
    M, w2, b = params.M, params.omega**2, params.beta
    return 0.5 * M * w2 * ((1 + 6 * b * r_e**2) * q_rel**2 + b * q_rel**4)
