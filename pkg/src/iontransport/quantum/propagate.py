"""Strang split-operator propagation of transported wave packets.

The lab Hamiltonian is p^2/2M + V(x - Q0(t) e_Q) - c M Q0''(t) x_Q, with
c = 1 when the compensating force is on.  The grid state phi lives in a
frame (X, P): psi(x) = exp(iP.x/hbar) phi(x - X).  A moving frame changes
the generator of phi to p^2/2M + V_lab(X + y) + dP/dt . y (up to a global
phase).

frame="comoving": (X, P) follows the classical orbit of the lab potential,
    so phi only feels V_s(U + y) - V_s(U) - grad V_s(U).y with U = X - Q0 e_Q.
    This keeps the packet centred for arbitrarily large excursions.
frame="trap": X = Q0 e_Q + rest, P = M Q0' e_Q; phi feels the static potential
    plus (1 - c) M Q0'' y_Q, the usual inertial term.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import scipy.fft as sfft

from ..classical import rk4
from ..io import write_csv
from ..trajectory import TransportPlan, Variant
from .wavefunction import WaveFunction, fidelity, rebase

FRAMES = ("comoving", "trap")


class LeakageError(RuntimeError):
    pass


class NormDriftError(RuntimeError):
    pass


def _unit(dim):
    e = np.zeros(dim)
    e[0] = 1.0
    return e


def time_step(model, span: float, steps_per_period: int = 500, dt: float | None = None):
    """(n_steps, dt) with dt <= T_cm/steps_per_period and <= T_min/200."""
    if dt is None:
        dt = min(2 * math.pi / model.omega_cm / steps_per_period,
                 2 * math.pi / model.omega_max / 200)
    n = max(1, math.ceil(span / dt - 1e-9))
    return n, span / n


def _reference_orbit(model, plan, X0, P0, t0, h, n, substeps, c):
    """Classical (X, P) of the lab potential on every quantum half step."""
    dim = model.dim
    e = _unit(dim)
    hs = h / substeps
    nodes = t0 + 0.5 * hs * np.arange(2 * n * substeps + 1)
    q0 = plan.Q0(nodes)
    a0 = plan.Q0(nodes, 2)
    M = model.mass

    def rhs(t, y, j):
        X, P = y[:dim], y[dim:]
        U = X - q0[j] * e
        g = np.array(model.gradient(tuple(U)), dtype=float)
        return np.concatenate([P / M, -g + c * M * a0[j] * e])

    _, Y = rk4(rhs, np.concatenate([X0, P0]), t0, hs, n * substeps, record=True)
    return Y, nodes[::2], q0[::2]


def propagate_split_operator(state: WaveFunction, plan: TransportPlan, model,
                             t_span: tuple[float, float] | None = None, *,
                             frame: str = "comoving", compensate: bool | None = None,
                             steps_per_period: int = 500, dt: float | None = None,
                             substeps: int = 4, check_every: int = 50,
                             leak_tol: float = 1e-8, norm_tol: float = 1e-6,
                             trace: list | None = None, trace_every: int | None = None,
                             reference: WaveFunction | None = None) -> WaveFunction:
    """Evolve ``state`` under the transport ``plan`` over ``t_span``.

    ``compensate`` defaults to True for the compensated variant.  Endpoint
    impulses of the compensating force are applied when t_span touches 0 or
    t_f.  Rows (t, norm, <Q>, <H>, overlap with ``reference``) are appended
    to ``trace`` every ``trace_every`` steps.
    """
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}")
    if compensate is None:
        compensate = plan.variant == Variant.COMPENSATED
    c = 1.0 if compensate else 0.0
    t0, t1 = (state.t, plan.t_f) if t_span is None else map(float, t_span)
    if t1 < t0:
        raise ValueError("t_span must be increasing")
    grid = state.grid
    dim = model.dim
    if grid.ndim != dim:
        raise ValueError("state and model dimensions differ")
    M, hbar = model.mass, model.hbar
    e = _unit(dim)
    rest = np.array(model.rest, dtype=float)
    n, h = time_step(model, t1 - t0, steps_per_period, dt)
    if substeps % 2:
        raise ValueError("substeps must be even")

    # impulse from the velocity jump of Q0 at t = 0 under compensation
    kick0 = M * plan.Q0(t0, 1) if compensate and t0 <= 0.0 < plan.t_f else 0.0
    P_start = np.array(state.momentum) + kick0 * e
    phi = state.data.copy()
    K = sum(k**2 for k in grid.wavenumbers()) * hbar / (2 * M)
    kin = np.exp(-1j * K * h)

    if frame == "comoving":
        Y, t_nodes, _ = _reference_orbit(model, plan, np.array(state.origin), P_start,
                                         t0, h, n, substeps, c)
        mids = Y[substeps // 2::substeps]
        q_mid = plan.Q0(t0 + h * (np.arange(n) + 0.5))
        X_end, P_end = Y[-1, :dim], Y[-1, dim:]
    else:
        X_in = rest + plan.Q0(t0) * e
        P_in = M * plan.Q0(t0, 1) * e
        cur = rebase(replace(state, momentum=tuple(P_start)), X_in, P_in)
        phi = cur.data.copy()
        W_static = model.local_potential(tuple(rest), (0.0,) * dim, grid)
        half_static = np.exp(-0.5j * W_static * h / hbar)
        a_mid = plan.Q0(t0 + h * (np.arange(n) + 0.5), 2)
        y_q = grid.axes()[0]
        X_end = rest + plan.Q0(t1) * e
        P_end = M * plan.Q0(t1, 1) * e

    def frame_at(i):
        t = t0 + i * h
        if frame == "comoving":
            row = Y[i * substeps]
            return t, tuple(row[:dim]), tuple(row[dim:])
        return t, tuple(rest + plan.Q0(t) * e), tuple(M * plan.Q0(t, 1) * e)

    norm0 = float(np.sum(np.abs(phi) ** 2) * grid.dV)
    if reference is None:
        reference = state

    def record(i):
        t, X, P = frame_at(i)
        wf = WaveFunction(phi, grid, X, P, t, hbar)
        trace.append(_trace_row(wf, model, plan, c, reference))

    want_trace = trace is not None
    every = trace_every or max(1, n // 200)
    if want_trace:
        record(0)
    for i in range(n):
        if frame == "comoving":
            U = mids[i, :dim] - q_mid[i] * e
            G = model.gradient(tuple(U))
            half = np.exp(-0.5j * model.local_potential(tuple(U), G, grid) * h / hbar)
        else:
            half = half_static * np.exp(-0.5j * (1 - c) * M * a_mid[i] * y_q * h / hbar)
        phi = half * sfft.ifftn(kin * sfft.fftn(half * phi))
        if (i + 1) % check_every == 0 or i + 1 == n:
            _guards(phi, grid, norm0, leak_tol, norm_tol, t0 + (i + 1) * h)
        if want_trace and ((i + 1) % every == 0 or i + 1 == n):
            record(i + 1)

    P_end = np.array(P_end, dtype=float)
    if compensate and t1 >= plan.t_f > t0:
        P_end = P_end - M * plan.Q0(plan.t_f, 1) * e
    return WaveFunction(phi, grid, tuple(X_end), tuple(P_end), t1, hbar, state.label)


def _guards(phi, grid, norm0, leak_tol, norm_tol, t):
    wf = WaveFunction(phi, grid, (0.0,) * grid.ndim)
    ratio = wf.edge_ratio()
    if ratio > leak_tol:
        raise LeakageError(f"wave packet reached the box edge at t = {t:.6e} s "
                           f"(edge/max = {ratio:.2e})")
    drift = abs(wf.norm() - norm0)
    if drift > norm_tol:
        raise NormDriftError(f"norm drifted by {drift:.2e} at t = {t:.6e} s")


def lab_energy(state: WaveFunction, model, trap_position: float,
               inertial: float = 0.0) -> float:
    """<H_lab> for the trap at ``trap_position`` plus a linear term -inertial*x_Q."""
    grid = state.grid
    M, hbar = model.mass, state.hbar
    spec = sfft.fftn(state.data)
    w = np.abs(spec) ** 2
    wsum = w.sum()
    kinetic = 0.0
    for k, P in zip(grid.wavenumbers(), state.momentum):
        p = hbar * k + P
        kinetic += float(np.sum(w * p**2) / wsum) / (2 * M)
    rho = np.abs(state.data) ** 2
    rho_sum = rho.sum()
    axes = grid.axes()
    u = [X + y for X, y in zip(state.origin, axes)]
    u[0] = u[0] - trap_position
    V = model.potential(tuple(u))
    potential = float(np.sum(rho * V) / rho_sum)
    if inertial:
        potential -= inertial * float(np.sum(rho * (state.origin[0] + axes[0])) / rho_sum)
    return kinetic + potential


def _trace_row(wf, model, plan, c, reference):
    t = wf.t
    q0 = float(plan.Q0(t))
    inertial = c * model.mass * float(plan.Q0(t, 2)) if 0 < t < plan.t_f else 0.0
    return (t, wf.norm(), wf.mean_position()[0], lab_energy(wf, model, q0, inertial),
            fidelity(wf, reference))


TRACE_HEADER = ("t (s)", "norm (1)", "<Q> (m)", "<H> (J)", "overlap_initial (1)")


def write_trace_csv(path, rows) -> None:
    write_csv(path, TRACE_HEADER, rows)
