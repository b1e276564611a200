"""Acceptance criteria 1-10 at their stated tolerances.

Each test records one ``criterion N: PASS|FAIL`` line (echoed in the pytest
terminal summary) and then asserts, so unattained criteria stay red.
"""
import functools
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.signal import argrelmin

from conftest import ACCEPTANCE
from iontransport.classical import (
    ClassicalState,
    critical_time,
    excitation_energy_analytic,
    excitation_zeros,
    integrate_effective_cm,
    integrate_two_ion_classical,
    two_ion_energies,
)
from iontransport.core import equilibrium, fig1_params, fig5_params
from iontransport.figures import FIG5_BETAS, fig5
from iontransport.nion import ChainConfig, hamiltonian_separability_check, transport_chain_classical
from iontransport.perturbation import (
    PerturbativeBreakdown,
    Selector,
    amplitude_one_quantum_closed_form,
    first_order_amplitudes,
    fidelity_second_order,
)
from iontransport.quantum import (
    Model1D,
    WaveFunction,
    fidelity,
    ground_state,
    propagate_split_operator,
    simulate_transport,
)
from iontransport.trajectory import compensating_force, design, design_polynomial

pytestmark = pytest.mark.slow

P = fig1_params()
EQ = equilibrium(P)
T = P.period
US = 1e-6
T_CR = critical_time(P)
SWEEP = np.linspace(20 * US, 200 * US, 50)
SAMPLES_2D = np.linspace(20 * US, 200 * US, 10)


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[str(n)] = line
    print(line)
    assert ok, line


@functools.lru_cache(maxsize=None)
def quantum(t_f, variant="unshifted", model="1D", beta=None, compensate=None):
    p = P if beta is None else P.replace(beta=beta)
    return simulate_transport(p, float(t_f), variant, model, compensate=compensate).report


def perturbative(t_f, selector=Selector.FULL, design_omega=None):
    plan = design_polynomial(P, float(t_f), design_omega)
    try:
        return fidelity_second_order(0, float(t_f), plan, P, selector)
    except PerturbativeBreakdown:
        return math.nan


def test_criterion_1_harmonic_exactness():
    worst, slow = {}, {}
    for model in ("1D", "2D"):
        errs, times = [], []
        for periods in (0.5, 1, 2, 5, 10):
            t0 = time.perf_counter()
            r = quantum(periods * T, "unshifted", model, beta=0.0)
            times.append(time.perf_counter() - t0)
            errs.append(1 - r.fidelity)
        worst[model], slow[model] = max(errs), max(times)
    ok = all(w <= 1e-6 for w in worst.values())
    report(1, ok, f"max 1-F: 1D {worst['1D']:.1e}, 2D {worst['2D']:.1e} (tol 1e-6); "
                  f"slowest point 1D {slow['1D']:.1f} s, 2D {slow['2D']:.1f} s")


def test_criterion_2_fig1():
    exact = np.array([quantum(t).fidelity for t in SWEEP])
    pert = np.array([perturbative(t) for t in SWEEP])
    diff = np.where(np.isnan(pert), np.inf, np.abs(pert - exact))
    ok_a = bool(np.all(diff < 0.01))
    n_bad = int(np.sum(~(diff < 0.01)))
    n_break = int(np.sum(np.isnan(pert)))
    finite = diff[np.isfinite(diff)]

    zeros = excitation_zeros(EQ.omega_tilde, (20 * US, 200 * US))
    zp = [perturbative(t) for t in zeros]
    zq = [quantum(t).fidelity for t in zeros]
    dev_p = max(abs(f - 1) if not math.isnan(f) else math.inf for f in zp)
    dev_q = max(abs(f - 1) for f in zq)
    ok_b = dev_p <= 0.005 and dev_q <= 0.005

    d2 = [abs(quantum(t, model="2D").fidelity - quantum(t).fidelity) for t in SAMPLES_2D]
    ok_c = max(d2) < 0.02
    worst_c = SAMPLES_2D[int(np.argmax(d2))] / US
    report(2, ok_a and ok_b and ok_c,
           f"(a) {'PASS' if ok_a else 'FAIL'} {n_bad}/50 points off by >= 0.01 "
           f"({n_break} perturbative breakdowns, max finite |dF| {finite.max():.3f}); "
           f"(b) {'PASS' if ok_b else 'FAIL'} at {len(zeros)} zeros max |F-1| pert {dev_p:.4f}, "
           f"1D {dev_q:.4f}; (c) {'PASS' if ok_c else 'FAIL'} max |F_2D-F_1D| {max(d2):.4f} "
           f"at {worst_c:.0f} us over {len(d2)} points")


def test_criterion_3_classical_quantum():
    E0c = 0.5 * P.hbar * EQ.omega_tilde
    diffs, ode_err = [], []
    for t in SWEEP:
        E_ex = excitation_energy_analytic(P, t, P.omega, EQ.omega_tilde).E_ex
        r = quantum(t)
        diffs.append(abs(E0c / (E0c + E_ex) - r.ratio))
        ode = integrate_effective_cm(P, design(P, t, "unshifted"), EQ.omega_tilde).excitation.E_ex
        ode_err.append(abs(ode - E_ex) / max(E_ex, 1e-6 * P.hbar * EQ.omega_tilde))
    ok = max(diffs) < 0.01 and max(ode_err) < 1e-6
    report(3, ok, f"max |ratio_cl - ratio_q| {max(diffs):.4f} (tol 0.01); "
                  f"max analytic-vs-RK4 rel err {max(ode_err):.1e} (tol 1e-6)")


def test_criterion_4_quartic_transition():
    ts = np.linspace(20 * US, 300 * US, 561)
    F = np.array([perturbative(t, Selector.QUARTIC) for t in ts])
    above = np.nan_to_num(F, nan=0.0) >= 0.5
    # last upward crossing of 0.5, refined by root finding
    idx = np.nonzero(~above[:-1] & above[1:])[0]
    g = lambda t: (perturbative(t, Selector.QUARTIC) or 0.0) - 0.5
    t_half = brentq(g, ts[idx[-1]], ts[idx[-1] + 1], xtol=1e-12) if len(idx) else math.nan
    rel = abs(t_half - T_CR) / T_CR
    late = F[ts > 1.5 * T_CR]
    ok = rel <= 0.15 and bool(np.all(late > 0.99))
    report(4, ok, f"F_quartic = 0.5 at {t_half / US:.2f} us vs t_cr {T_CR / US:.2f} us "
                  f"({100 * rel:.1f}% off, tol 15%); min F beyond 1.5 t_cr {late.min():.5f}")


def test_criterion_5_shifted():
    ts = np.linspace(1 * US, 300 * US, 300)
    classical = max(excitation_energy_analytic(P, t, EQ.omega_tilde, EQ.omega_tilde).E_ex
                    for t in ts)
    beyond = SWEEP[SWEEP > T_CR]
    f1 = [quantum(t, "shifted").fidelity for t in beyond]
    s2 = np.linspace(T_CR * 1.001, 200 * US, 5)
    f2 = [quantum(t, "shifted", "2D").fidelity for t in s2]
    ok = classical == 0.0 and min(f1) >= 0.999 and min(f2) >= 0.999
    w1 = beyond[int(np.argmin(f1))] / US
    report(5, ok, f"max classical E_ex {classical:.1e} J; min F 1D {min(f1):.5f} at {w1:.1f} us "
                  f"({len(f1)} points), 2D {min(f2):.5f} ({len(f2)} points); tol 0.999")


def test_criterion_6_compensation():
    errs = {}
    for periods in (0.25, 0.5, 1.0):
        errs[periods] = 1 - quantum(periods * T, "compensated", "2D").fidelity
    force = compensating_force(design(P, 0.25 * T, "compensated"), P.M)
    ok = max(errs.values()) <= 1e-6 and force.max_acceleration >= force.acceleration_bound
    report(6, ok, f"2D 1-F at 0.25/0.5/1 periods {errs[0.25]:.1e}/{errs[0.5]:.1e}/{errs[1.0]:.1e}"
                  f" (tol 1e-6); max accel {force.max_acceleration / force.acceleration_bound:.2f}"
                  f" x 2d/t_f^2")


def test_criterion_7_closed_form():
    rel = []
    for t in np.linspace(0.5 * T, 10 * T, 40):
        quad = first_order_amplitudes(0, t, design_polynomial(P, t), P, Selector.QUADRATIC)[1]
        closed = amplitude_one_quantum_closed_form(0, t, P, EQ.r_e)
        rel.append(abs(quad - closed) / abs(closed))

    def real_part(t):
        # strip the e^{i theta/2} phase; what is left is real
        return float(np.real(amplitude_one_quantum_closed_form(0, t, P, EQ.r_e)
                             * np.exp(-0.5j * P.omega * t)))

    roots = excitation_zeros(P.omega, (10 / P.omega, 20 / P.omega))
    x_bisect = np.array(roots) * P.omega
    x_closed = np.array([brentq(real_part, (x - 0.3) / P.omega, (x + 0.3) / P.omega,
                                xtol=1e-300, rtol=1e-15) * P.omega for x in x_bisect])
    root_err = np.max(np.abs(x_closed - x_bisect) / x_bisect)
    ok = (max(rel) < 1e-6 and root_err < 1e-9
          and np.allclose(x_bisect, [11.53, 18.19], atol=5e-3))
    report(7, ok, f"max closed-vs-quadrature rel err {max(rel):.1e} (tol 1e-6); zeros x = "
                  f"{x_bisect[0]:.4f}, {x_bisect[1]:.4f}, rel diff {root_err:.1e} (tol 1e-9)")


def test_criterion_8_fig5():
    expected = {6.4e9: 2.807e-6, 1e9: 2.883e-6, 1e10: 2.764e-6}
    r_err = {b: abs(equilibrium(fig5_params(b)).r_e - r) for b, r in expected.items()}
    data = fig5()
    cols = {b: np.array([row[i + 1] for row in data.rows]) for i, b in enumerate(FIG5_BETAS)}
    minima = {b: argrelmin(np.log(c))[0] for b, c in cols.items()}
    lo, hi = minima[1e9], minima[1e10]
    k = min(len(lo), len(hi))
    shift = np.abs(lo[:k] - hi[:k])
    ok = max(r_err.values()) <= 0.01e-6 and k > 0 and bool(np.all(shift > 1))
    report(8, ok, f"max |r_e - expected| {max(r_err.values()) * 1e6:.4f} um (tol 0.01 um); "
                  f"first {k} minima shift by {shift.min()}-{shift.max()} grid points "
                  f"between beta 1e9 and 1e10")


def test_criterion_9_nion():
    sep = max(hamiltonian_separability_check(
        ChainConfig.from_ion_mass(N, P.m, P.omega, 0.0, P.d, P.Cc, P.hbar), 0.0, 1000, N
    ).relative_residual for N in range(2, 9))
    quantum_unit = P.hbar * P.omega
    tol = 1e-9 * quantum_unit
    harm, comp = [], []
    for N in (3, 5):
        c0 = ChainConfig.from_ion_mass(N, P.m, P.omega, 0.0, P.d, P.Cc, P.hbar)
        harm.append(abs(transport_chain_classical(c0, design(c0.params, 90 * US, "unshifted"))
                        .cm_excitation))
        cb = ChainConfig.from_ion_mass(N, P.m, P.omega, P.beta, P.d, P.Cc, P.hbar)
        r = transport_chain_classical(cb, design(cb.params, 0.25 * T, "compensated"),
                                      compensate=True)
        comp.append(max(abs(r.cm_excitation), abs(r.relative_excitation)))
    ok = sep < 1e-10 and max(harm) < tol and max(comp) < tol
    report(9, ok, f"separability {sep:.1e} (tol 1e-10); harmonic CM excitation "
                  f"{max(harm) / quantum_unit:.1e} hw, compensated beta>0 at 0.25 T "
                  f"{max(comp) / quantum_unit:.1e} hw (tol 1e-9 hw)")


def strang_error(p, n):
    model = Model1D(p)
    t_f = 2 * p.period
    plan = design_polynomial(p, t_f)
    gs = ground_state(p, "1D").state
    out = propagate_split_operator(gs, plan, model, frame="trap", dt=t_f / n)
    exact = WaveFunction(gs.data, gs.grid, (float(plan.Qc(t_f)),),
                         (p.M * float(plan.Qc(t_f, 1)),), t_f, p.hbar)
    F = min(fidelity(out, exact), 1.0)
    return math.sqrt(max(1 - F * F, 0.0))


def test_criterion_10_hygiene():
    model = Model1D(P)
    gs = ground_state(P, "1D").state
    plan = design(P, 200 * US, "unshifted")
    out = propagate_split_operator(gs, plan, model, dt=200 * US / 10_000)
    drift = abs(out.norm() - gs.norm())

    p = P.replace(beta=0.0, d=1e-6)
    ns = np.array([50, 100, 200, 400])
    eps = np.array([strang_error(p, n) for n in ns])
    slope = -np.polyfit(np.log(ns), np.log(eps), 1)[0]

    start = ClassicalState([EQ.r_e + 30e-9 + 50e-9, -EQ.r_e + 50e-9], [0.0, 0.0])
    res = integrate_two_ion_classical(P, None, start, t_end=100 * T, steps_per_period=1000)
    E = [sum(two_ion_energies(P, q, v, 0.0, EQ.r_e))
         for q, v in zip(res.run.positions[[0, -1]], res.run.velocities[[0, -1]])]
    e_drift = abs(E[1] - E[0]) / abs(E[0])
    ok = drift < 1e-9 and abs(slope - 2.0) <= 0.1 and e_drift < 1e-9
    report(10, ok, f"norm drift {drift:.1e} per 1e4 steps (tol 1e-9); Strang slope {slope:.3f} "
                   f"(eps {eps[0]:.1e}..{eps[-1]:.1e}); ODE energy drift {e_drift:.1e} "
                   f"per 100 periods (tol 1e-9)")
