"""Classical dynamics: effective CM oscillator and Coulomb chains.

Integration is fixed-step fourth-order Runge-Kutta.  Time-dependent forcing
(the trap position) is tabulated once on the half-step grid so the stepping
loop only does arithmetic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import TrapParams, equilibrium, equilibrium_distance, relative_curvature
from .core import cm_potential, coupling_potential, relative_potential
from .trajectory import TransportPlan

CRITICAL_TIME_ALPHA = 16.5


class IonCrossingError(RuntimeError):
    """Ion ordering q1 > q2 > ... was violated during integration."""


class Method(str, enum.Enum):
    ANALYTIC = "analytic"
    ODE = "ode"


@dataclass(frozen=True)
class ClassicalState:
    positions: np.ndarray
    velocities: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.positions, dtype=float))
        v = np.atleast_1d(np.asarray(self.velocities, dtype=float))
        if q.shape != v.shape:
            raise ValueError("positions and velocities must have the same shape")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
            raise ValueError("non-finite phase-space point")
        if q.size > 1 and np.any(np.diff(q) >= 0):
            raise IonCrossingError("ions must be ordered q1 > q2 > ...")
        object.__setattr__(self, "positions", q)
        object.__setattr__(self, "velocities", v)


@dataclass(frozen=True)
class ExcitationResult:
    E_ex: float
    quanta: float
    method: Method
    error_estimate: float = 0.0


def rk4(rhs, y0, t0: float, h: float, n_steps: int, record: bool = False):
    """Classic RK4.  ``rhs(t, y, j)`` receives the half-step index j = 2i, 2i+1, 2i+2.

    Returns the final state, or (t, Y) with every step when ``record``.
    """
    y = np.array(y0, dtype=float)
    hist = [y.copy()] if record else None
    for i in range(n_steps):
        t = t0 + i * h
        j = 2 * i
        k1 = rhs(t, y, j)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1, j + 1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2, j + 1)
        k4 = rhs(t + h, y + h * k3, j + 2)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if record:
            hist.append(y)
    if record:
        return t0 + h * np.arange(n_steps + 1), np.array(hist)
    return y


def _steps(t_f: float, period: float, steps_per_period: int) -> tuple[int, float]:
    n = max(1, math.ceil(t_f / period * steps_per_period))
    return n, t_f / n


# --- effective CM model ----------------------------------------------------

@dataclass(frozen=True)
class CMTrajectory:
    t: np.ndarray
    Q: np.ndarray
    V: np.ndarray
    excitation: ExcitationResult


def _effective_cm_run(params, plan, omega_tilde, n, h):
    w2 = omega_tilde**2
    q0 = plan.Q0(0.5 * h * np.arange(2 * n + 1))

    def rhs(t, y, j):
        return np.array([y[1], -w2 * (y[0] - q0[j])])

    t, Y = rk4(rhs, [0.0, 0.0], 0.0, h, n, record=True)
    Q, V = Y[:, 0], Y[:, 1]
    E = 0.5 * params.M * V[-1] ** 2 + 0.5 * params.M * w2 * (Q[-1] - q0[-1]) ** 2
    return t, Q, V, E


def integrate_effective_cm(params: TrapParams, plan: TransportPlan, omega_tilde: float,
                           steps_per_period: int = 1000,
                           quanta_omega: float | None = None) -> CMTrajectory:
    """Q'' / w~^2 + Q - Q0(t) = 0 from rest at the origin; energy at t_f.

    A second run at half the step gives a Richardson error estimate for the
    reported energy.
    """
    period = 2 * math.pi / omega_tilde
    n, h = _steps(plan.t_f, period, steps_per_period)
    t, Q, V, E = _effective_cm_run(params, plan, omega_tilde, n, h)
    *_, E_half = _effective_cm_run(params, plan, omega_tilde, 2 * n, h / 2)
    qw = omega_tilde if quanta_omega is None else quanta_omega
    exc = ExcitationResult(
        E_ex=float(E), quanta=float(E / (params.hbar * qw)), method=Method.ODE,
        error_estimate=abs(E - E_half) * 16 / 15,
    )
    return CMTrajectory(t=t, Q=Q, V=V, excitation=exc)


def excitation_bracket(x):
    """6x cos(x/2) + (x^2 - 12) sin(x/2); zeros give excitation-free t_f."""
    x = np.asarray(x, dtype=float)
    return 6 * x * np.cos(x / 2) + (x**2 - 12) * np.sin(x / 2)


def excitation_energy_analytic(params: TrapParams, t_f: float, omega: float,
                               omega_tilde: float,
                               quanta_omega: float | None = None) -> ExcitationResult:
    """Final energy of the effective CM oscillator (frequency omega_tilde)
    driven by the polynomial trap trajectory designed for ``omega``."""
    if not t_f > 0:
        raise ValueError("t_f must be positive")
    M, d = params.M, params.d
    x = t_f * omega_tilde
    E = (
        7200 * d**2 * M * (omega**2 - omega_tilde**2) ** 2
        / (t_f**10 * omega**4 * omega_tilde**8)
        * float(excitation_bracket(x)) ** 2
    )
    qw = omega_tilde if quanta_omega is None else quanta_omega
    return ExcitationResult(E_ex=E, quanta=E / (params.hbar * qw), method=Method.ANALYTIC)


def excitation_zeros(omega_eff: float, window: tuple[float, float],
                     scan_step: float = 0.05, rtol: float = 1e-12) -> list[float]:
    """All t_f in ``window`` where the bracket vanishes, with x = t_f * omega_eff."""
    t_lo, t_hi = map(float, window)
    if not (0 <= t_lo < t_hi):
        raise ValueError(f"empty or invalid window {window!r}")
    x_lo, x_hi = t_lo * omega_eff, t_hi * omega_eff
    n = max(2, math.ceil((x_hi - x_lo) / scan_step) + 1)
    xs = np.linspace(x_lo, x_hi, n)
    g = excitation_bracket(xs)
    roots = []
    for a, b, ga, gb in zip(xs[:-1], xs[1:], g[:-1], g[1:]):
        if a <= 0:
            # x = 0 is the trivial (fifth-order) root
            continue
        if ga == 0:
            roots.append(a)
        elif ga * gb < 0:
            roots.append(bisect(lambda x: float(excitation_bracket(x)), a, b,
                                xtol=1e-300, rtol=rtol, maxiter=200))
    if g[-1] == 0 and xs[-1] > 0:
        roots.append(xs[-1])
    return [x / omega_eff for x in roots]


def critical_time(params: TrapParams, alpha: float = CRITICAL_TIME_ALPHA) -> float:
    """Transport time below which the quartic perturbation alone spoils the
    fidelity; ``inf`` when beta = 0 (no quartic scale)."""
    if params.beta == 0:
        return math.inf
    return alpha * params.beta**0.25 * math.sqrt(params.d) / params.omega


# --- ion chains ------------------------------------------------------------

def chain_forces(params: TrapParams, q, q0: float, extra: float = 0.0):
    """Force on each ion of an ordered chain in the quartic trap centred at q0.

    ``extra`` is an additional acceleration applied to every ion.
    """
    m, w2, b = params.m, params.omega**2, params.beta
    u = q - q0
    f = -m * w2 * (u + 2 * b * u**3)
    diff = q[:, None] - q[None, :]
    np.fill_diagonal(diff, np.inf)
    f = f + params.Cc * np.sum(np.sign(diff) / diff**2, axis=1)
    return f + m * extra


def chain_energy(params: TrapParams, q, v, q0: float) -> float:
    m = params.m
    kin = 0.5 * m * np.sum(v**2)
    u = q - q0
    trap = 0.5 * m * params.omega**2 * np.sum(u**2 + params.beta * u**4)
    i, j = np.triu_indices(len(q), 1)
    coul = params.Cc * np.sum(1.0 / (q[i] - q[j]))
    return float(kin + trap + coul)


def chain_hessian(params: TrapParams, q, q0: float = 0.0):
    """Second derivatives of the chain potential energy."""
    m, w2, b = params.m, params.omega**2, params.beta
    u = q - q0
    diff = q[:, None] - q[None, :]
    np.fill_diagonal(diff, np.inf)
    off = -2 * params.Cc / np.abs(diff) ** 3
    H = off.copy()
    np.fill_diagonal(H, m * w2 * (1 + 6 * b * u**2) - off.sum(axis=1))
    return H


def chain_max_frequency(params: TrapParams, q, q0: float = 0.0) -> float:
    eig = np.linalg.eigvalsh(chain_hessian(params, q, q0) / params.m)
    return float(math.sqrt(max(eig.max(), params.omega**2)))


@dataclass(frozen=True)
class ChainRun:
    t: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    @property
    def final(self) -> ClassicalState:
        return ClassicalState(self.positions[-1], self.velocities[-1], float(self.t[-1]))


def integrate_chain(params: TrapParams, plan: TransportPlan | None, initial: ClassicalState,
                    t_end: float | None = None, compensate: bool = False,
                    steps_per_period: int = 1000, record: bool = False) -> ChainRun:
    """Newton's equations for an ordered ion chain in the moving quartic trap.

    With ``compensate`` every ion also feels m Q0''(t), plus the impulses that
    cancel trap-velocity jumps at t = 0 and t = t_f.  Without a plan the trap
    is static at the origin.
    """
    q = initial.positions.copy()
    v = initial.velocities.copy()
    N = q.size
    if t_end is None:
        if plan is None:
            raise ValueError("t_end is required without a plan")
        t_end = plan.t_f
    w_max = chain_max_frequency(params, q, 0.0 if plan is None else float(plan.Q0(initial.t)))
    n, h = _steps(t_end - initial.t, 2 * math.pi / w_max, steps_per_period)
    nodes = initial.t + 0.5 * h * np.arange(2 * n + 1)
    if plan is None:
        q0 = np.zeros_like(nodes)
        acc = np.zeros_like(nodes)
    else:
        q0 = plan.Q0(nodes)
        acc = plan.Q0(nodes, 2) if compensate else np.zeros_like(nodes)
        if compensate and initial.t <= 0.0:
            v = v + float(plan.Q0(0.0, 1))

    m = params.m

    def rhs(t, y, j):
        return np.concatenate([y[N:], chain_forces(params, y[:N], q0[j], acc[j]) / m])

    out = rk4(rhs, np.concatenate([q, v]), initial.t, h, n, record=record)
    if record:
        t, Y = out
    else:
        t, Y = np.array([initial.t, t_end]), np.vstack([np.concatenate([q, v]), out])
    pos, vel = Y[:, :N], Y[:, N:].copy()
    if np.any(np.diff(pos, axis=1) >= 0):
        raise IonCrossingError("ion ordering violated during integration")
    if plan is not None and compensate and t_end >= plan.t_f:
        vel[-1] = vel[-1] - float(plan.Q0(plan.t_f, 1))
    return ChainRun(t=t, positions=pos, velocities=vel)


# --- two ions -----------------------------------------------------------------

@dataclass(frozen=True)
class TwoIonResult:
    run: ChainRun
    cm_energy: float
    relative_energy: float
    coupling_energy: float


def two_ion_energies(params: TrapParams, q, v, q0: float, r_e: float | None = None):
    """CM, relative (above its minimum) and coupling energies of two ions."""
    if r_e is None:
        r_e = equilibrium_distance(params)
    m, M = params.m, params.M
    Q, r = 0.5 * (q[0] + q[1]), 0.5 * (q[0] - q[1])
    P, p = m * (v[0] + v[1]), m * (v[0] - v[1])
    e_cm = P**2 / (2 * M) + float(cm_potential(params, Q - q0))
    e_r = p**2 / (2 * M) + float(relative_potential(params, r) - relative_potential(params, r_e))
    e_c = float(coupling_potential(params, Q - q0, r))
    return e_cm, e_r, e_c


def two_ion_rest_state(params: TrapParams, center: float = 0.0) -> ClassicalState:
    r_e = equilibrium_distance(params)
    return ClassicalState([center + r_e, center - r_e], [0.0, 0.0])


def integrate_two_ion_classical(params: TrapParams, plan: TransportPlan | None,
                                initial: ClassicalState | None = None,
                                compensate: bool = False, t_end: float | None = None,
                                steps_per_period: int = 1000) -> TwoIonResult:
    if params.n_ions != 2:
        raise ValueError("two-ion dynamics needs n_ions = 2")
    if initial is None:
        initial = two_ion_rest_state(params)
    if initial.positions.size != 2:
        raise ValueError("expected two ions")
    run = integrate_chain(params, plan, initial, t_end=t_end, compensate=compensate,
                          steps_per_period=steps_per_period, record=True)
    q0 = 0.0 if plan is None else float(plan.Q0(run.t[-1]))
    e_cm, e_r, e_c = two_ion_energies(params, run.positions[-1], run.velocities[-1], q0)
    return TwoIonResult(run=run, cm_energy=e_cm, relative_energy=e_r, coupling_energy=e_c)


def effective_omegas(params: TrapParams) -> tuple[float, float]:
    """(omega_tilde, local relative-mode frequency) at the equilibrium."""
    eq = equilibrium(params)
    w_r = math.sqrt(relative_curvature(params, eq.r_e) / params.M)
    return eq.omega_tilde, w_r


CLASSICAL_CSV_HEADER = ("t_f (s)", "E_ex (J)", "quanta (1)", "method", "variant")


def write_excitation_csv(path, rows) -> None:
    """rows: (t_f, ExcitationResult, variant)."""
    from .io import write_csv

    write_csv(path, CLASSICAL_CSV_HEADER,
              [(t, r.E_ex, r.quanta, r.method.value, str(v)) for t, r, v in rows])
