"""Chains of N equal ions: CM/relative coordinates, separability, transport.

Relative coordinates are r_i = (q_i - q_{i+1})/N with momenta p_i - p_{i+1};
the CM pair is Q = mean(q), P = sum(p).  Every configuration must keep the
ordering q_1 > q_2 > ... > q_N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import (
    ClassicalState,
    IonCrossingError,
    chain_energy,
    chain_forces,
    chain_hessian,
    integrate_chain,
)
from .core import COULOMB, HBAR, TrapParams
from .io import write_csv
from .trajectory import TransportPlan, Variant


class RelaxationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    N: int
    params: TrapParams

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("a chain needs N >= 2 ions")
        if self.params.n_ions != self.N:
            raise ValueError(f"params describe {self.params.n_ions} ions, not {self.N}")

    @classmethod
    def from_ion_mass(cls, N: int, m: float, omega: float, beta: float = 0.0, d: float = 0.0,
                      Cc: float = COULOMB, hbar: float = HBAR) -> "ChainConfig":
        return cls(N, TrapParams(M=N * m, omega=omega, beta=beta, d=d, Cc=Cc, hbar=hbar,
                                 n_ions=N))

    @property
    def m(self) -> float:
        return self.params.m

    @property
    def length_scale(self) -> float:
        """(Cc / (m w^2))^(1/3), the natural inter-ion distance."""
        return (self.params.Cc / (self.m * self.params.omega**2)) ** (1 / 3)


def _check_order(q):
    if np.any(np.diff(q) >= 0):
        raise IonCrossingError("ions must be ordered q1 > q2 > ... > qN")


def to_cm_relative(config: ChainConfig, positions, momenta):
    """(Q, P, r, p_rel) with r and p_rel of length N - 1."""
    q = np.asarray(positions, dtype=float)
    p = np.asarray(momenta, dtype=float)
    if q.shape != (config.N,) or p.shape != (config.N,):
        raise ValueError(f"expected {config.N} positions and momenta")
    _check_order(q)
    N = config.N
    return float(q.mean()), float(p.sum()), (q[:-1] - q[1:]) / N, p[:-1] - p[1:]


def _weights(N: int) -> np.ndarray:
    """A[i, k] with s_i = sum_k A[i, k] x_k for x_k, k = 1..N-1.

    s_i = sum_{j=1}^{N-i} j x_{N-j} - sum_{k=1}^{i-1} k x_k.
    """
    A = np.zeros((N, N - 1))
    for i in range(1, N + 1):
        for j in range(1, N - i + 1):
            A[i - 1, N - j - 1] += j
        for k in range(1, i):
            A[i - 1, k - 1] -= k
    return A


def from_cm_relative(config: ChainConfig, Q: float, P: float, r, p_rel):
    """Inverse of :func:`to_cm_relative`."""
    N = config.N
    r = np.asarray(r, dtype=float)
    p_rel = np.asarray(p_rel, dtype=float)
    if r.shape != (N - 1,) or p_rel.shape != (N - 1,):
        raise ValueError(f"expected {N - 1} relative coordinates and momenta")
    if np.any(r <= 0):
        raise IonCrossingError("relative coordinates must be positive")
    A = _weights(N)
    q = Q + A @ r
    p = P / N + (A @ p_rel) / N
    return q, p


# --- Hamiltonian in both coordinate sets -----------------------------------------

def _anharmonic_guard():
    raise ValueError("the CM/relative separation holds for a harmonic trap (beta = 0)")


def hamiltonian_original(config: ChainConfig, q, p, Q0: float) -> float:
    """Harmonic-trap Hamiltonian in ion coordinates."""
    if config.params.beta != 0:
        _anharmonic_guard()
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return float(np.sum(p**2) / (2 * config.m)) + chain_energy(config.params, q,
                                                                np.zeros_like(q), Q0)


def hamiltonian_cm(config: ChainConfig, Q: float, P: float, Q0: float) -> float:
    p = config.params
    return P**2 / (2 * p.M) + 0.5 * p.M * p.omega**2 * (Q - Q0) ** 2


def hamiltonian_relative(config: ChainConfig, r, p_rel) -> float:
    """Relative part written with explicit sums over the relative coordinates."""
    p = config.params
    N, M = config.N, p.M
    S = np.empty(N)
    T = np.empty(N)
    for i in range(1, N + 1):
        up_p = sum(j * p_rel[N - j - 1] for j in range(1, N - i + 1))
        lo_p = sum(k * p_rel[k - 1] for k in range(1, i))
        up_r = sum(j * r[N - j - 1] for j in range(1, N - i + 1))
        lo_r = sum(k * r[k - 1] for k in range(1, i))
        S[i - 1] = up_p - lo_p
        T[i - 1] = up_r - lo_r
    kinetic = float(np.sum(S**2)) / (2 * N * M)
    trap = M * p.omega**2 * float(np.sum(T**2)) / (2 * N)
    coulomb = sum(1.0 / r[i] for i in range(N - 1))
    for i in range(N - 1):
        for j in range(i + 1, N - 1):
            coulomb += 1.0 / sum(r[i:j + 1])
    return kinetic + trap + p.Cc * coulomb / N


@dataclass(frozen=True)
class SeparabilityResult:
    max_residual: float
    typical_energy: float
    H_cm: np.ndarray
    H_r: np.ndarray

    @property
    def relative_residual(self) -> float:
        return self.max_residual / self.typical_energy


def random_chain_samples(config: ChainConfig, n: int, rng: np.random.Generator,
                         center: float = 0.0):
    """Ordered phase-space points scattered around the equilibrium chain."""
    eq = equilibrium_chain(config)
    gap = float(np.min(-np.diff(eq)))
    m, w = config.m, config.params.omega
    qs = eq + center + rng.uniform(-0.3 * gap, 0.3 * gap, size=(n, config.N))
    ps = rng.normal(scale=m * w * gap, size=(n, config.N))
    return qs, ps


def hamiltonian_separability_check(config: ChainConfig, Q0: float = 0.0, samples: int = 1000,
                                   seed: int = 0) -> SeparabilityResult:
    """max |H(q, p) - H_cm(Q, P) - H_r(r, p)| over random phase-space samples."""
    if config.params.beta != 0:
        _anharmonic_guard()
    rng = np.random.default_rng(seed)
    qs, ps = random_chain_samples(config, samples, rng, center=Q0)
    resid = np.empty(samples)
    scale = np.empty(samples)
    hcm = np.empty(samples)
    hr = np.empty(samples)
    for k, (q, p) in enumerate(zip(qs, ps)):
        H = hamiltonian_original(config, q, p, Q0)
        Q, P, r, pr = to_cm_relative(config, q, p)
        hcm[k] = hamiltonian_cm(config, Q, P, Q0)
        hr[k] = hamiltonian_relative(config, r, pr)
        resid[k] = abs(H - hcm[k] - hr[k])
        scale[k] = abs(H)
    return SeparabilityResult(float(resid.max()), float(scale.mean()), hcm, hr)


# --- equilibrium chain ----------------------------------------------------------

def equilibrium_chain(config: ChainConfig, center: float = 0.0, tol: float = 1e-12,
                      max_iter: int = 200_000) -> np.ndarray:
    """Static ordered chain from heavy-ball relaxation of a uniform guess.

    Stops when max |grad V| < tol * m w^2 l with l the natural length.
    """
    p = config.params
    N, m, w2 = config.N, config.m, p.omega**2
    ell = config.length_scale
    f_scale = m * w2 * ell
    x = (np.arange(N)[::-1] - (N - 1) / 2) * 1.5 * ell
    mu = 0.8
    v = np.zeros(N)
    for _ in range(max_iter):
        # Gershgorin bound on the stiffness, which grows as the chain contracts
        eta = 0.5 / np.abs(chain_hessian(p, x, 0.0)).sum(axis=1).max()
        f = chain_forces(p, x, 0.0)
        if np.max(np.abs(f)) < tol * f_scale:
            break
        # restart the momentum when it opposes the force, and never move an
        # ion by more than a tenth of the smallest gap in one step
        v = (mu * v if np.dot(v, f) > 0 else 0.0) + eta * f
        gap = float(np.min(-np.diff(x)))
        step = np.max(np.abs(v))
        if step > 0.1 * gap:
            v *= 0.1 * gap / step
        x = x + v
        if np.any(np.diff(x) >= 0):
            raise RelaxationError("relaxation reordered the ions")
    else:
        raise RelaxationError("chain relaxation did not converge")
    return x + center


# --- transport -----------------------------------------------------------------

@dataclass(frozen=True)
class ChainTransportResult:
    N: int
    t_f: float
    variant: str
    compensated: bool
    cm_excitation: float
    relative_excitation: float

    @property
    def total_excitation(self) -> float:
        return self.cm_excitation + self.relative_excitation


def chain_excitations(config: ChainConfig, q, v, trap_position: float):
    """(CM, relative) energy above the static chain at ``trap_position``."""
    p = config.params
    m = config.m
    eq = equilibrium_chain(config, center=trap_position)
    total = chain_energy(p, q, v, trap_position) - chain_energy(p, eq, np.zeros_like(eq),
                                                                trap_position)
    Q = float(np.mean(q))
    P = m * float(np.sum(v))
    e_cm = P**2 / (2 * p.M) + 0.5 * p.M * p.omega**2 * (Q - trap_position) ** 2
    return e_cm, total - e_cm


def transport_chain_classical(config: ChainConfig, plan: TransportPlan, compensate: bool = False,
                              steps_per_period: int = 2000) -> ChainTransportResult:
    """Lab-frame Newton dynamics from the equilibrium chain at rest around 0."""
    q = equilibrium_chain(config)
    run = integrate_chain(config.params, plan, ClassicalState(q, np.zeros_like(q)),
                          compensate=compensate, steps_per_period=steps_per_period)
    fin = run.final
    e_cm, e_rel = chain_excitations(config, fin.positions, fin.velocities, plan.d)
    return ChainTransportResult(config.N, plan.t_f, plan.variant.value, compensate, e_cm, e_rel)


CSV_HEADER = ("N (1)", "t_f (s)", "variant", "compensated", "cm_excitation (J)",
              "relative_excitation (J)")


def write_chain_csv(path, results) -> None:
    rows = [(r.N, r.t_f, r.variant, int(r.compensated), r.cm_excitation, r.relative_excitation)
            for r in results]
    write_csv(path, CSV_HEADER, rows)
