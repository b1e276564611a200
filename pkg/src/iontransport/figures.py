"""Data series (CSV) and static line plots (SVG) for the published figures."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import critical_time, excitation_energy_analytic
from .core import TrapParams, equilibrium, fig1_params, fig5_params
from .io import write_csv
from .perturbation import Selector, first_order_amplitudes
from .quantum.observables import simulate_transport
from .trajectory import Variant, design

FIGURES = ("fig1", "fig2", "fig3a", "fig3b", "fig4", "fig5")
FIG5_BETAS = (6.4e9, 1e9, 1e10)
US = 1e-6


@dataclass
class FigureData:
    name: str
    header: tuple[str, ...]
    rows: list
    series: list  # (column index, label)
    ylabel: str
    title: str


def _pmap(fn, args, workers):
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, args))
    return [fn(a) for a in args]


def perturbative_fidelity(params: TrapParams, t_f: float, variant="unshifted",
                          selector=Selector.FULL) -> float:
    """sqrt(1 - sum |f|^2), NaN where the first-order sum exceeds one."""
    plan = design(params, t_f, variant)
    total = first_order_amplitudes(0, t_f, plan, params, selector).probability()
    return math.sqrt(1 - total) if total <= 1 else math.nan


def _quantum_point(args):
    params, t_f, variant, model, terms, start = args
    if start == "harmonic":
        run = _harmonic_start_run(params, t_f)
    else:
        run = simulate_transport(params, t_f, variant, model, terms)
    return run.report


def _harmonic_start_run(params, t_f):
    """1D full-model transport of the ground state of the bare harmonic trap."""
    from .oscillator import eigenfunction
    from .quantum import Model1D, WaveFunction, fidelity, propagate_split_operator, translated
    from .quantum.observables import TransportRun, energy_ratio_report

    model = Model1D(params)
    grid = model.default_grid()
    (y,) = grid.axes()
    phi = eigenfunction(0, y, params.M, params.omega, params.hbar).astype(complex)
    start = WaveFunction(phi, grid, (0.0,), hbar=params.hbar).normalized()
    plan = design(params, t_f, Variant.UNSHIFTED)
    final = propagate_split_operator(start, plan, model)
    report = energy_ratio_report(start, final, model, plan, translated(start, params.d))
    return TransportRun(report, start, final, plan)


def _times(lo, hi, n):
    return list(np.linspace(lo, hi, n))


def _subset(times, n):
    idx = np.unique(np.round(np.linspace(0, len(times) - 1, n)).astype(int))
    return [times[i] for i in idx]


def _column_pairs(times, sampled, values):
    lookup = dict(zip(sampled, values))
    return [lookup.get(t, math.nan) for t in times]


def fig1(points=91, points_2d=10, workers=1, with_2d=True) -> FigureData:
    p = fig1_params()
    times = _times(20 * US, 200 * US, points)
    pert = [perturbative_fidelity(p, t) for t in times]
    q1 = _pmap(_quantum_point, [(p, t, "unshifted", "1D", "full", "ground") for t in times], workers)
    qh = _pmap(_quantum_point, [(p, t, "unshifted", "1D", "full", "harmonic") for t in times],
               workers)
    sampled = _subset(times, points_2d) if with_2d else []
    q2 = _pmap(_quantum_point, [(p, t, "unshifted", "2D", "full", "ground") for t in sampled],
               workers)
    f2 = _column_pairs(times, sampled, [r.fidelity for r in q2])
    rows = [(t, a, h.fidelity, b.fidelity, c)
            for t, a, h, b, c in zip(times, pert, qh, q1, f2)]
    header = ("t_f (s)", "F_perturbative (1)", "F_1d_harmonic_start (1)", "F_1d (1)", "F_2d (1)")
    series = [(1, "second-order perturbation"), (2, "1D, harmonic ground state"),
              (3, "1D, anharmonic ground state"), (4, "2D")]
    return FigureData("fig1", header, rows, series, "fidelity", "Fidelity vs final time")


def fig2(points=91, points_2d=10, workers=1, with_2d=True) -> FigureData:
    p = fig1_params()
    eq = equilibrium(p)
    times = _times(20 * US, 200 * US, points)
    q1 = _pmap(_quantum_point, [(p, t, "unshifted", "1D", "full", "ground") for t in times], workers)
    E0 = 0.5 * p.hbar * eq.omega_tilde
    classical = [E0 / (E0 + excitation_energy_analytic(p, t, p.omega, eq.omega_tilde, None).E_ex)
                 for t in times]
    sampled = _subset(times, points_2d) if with_2d else []
    q2 = _pmap(_quantum_point, [(p, t, "unshifted", "2D", "full", "ground") for t in sampled],
               workers)
    r2 = _column_pairs(times, sampled, [r.ratio for r in q2])
    rows = [(t, a.ratio, c, b) for t, a, c, b in zip(times, q1, classical, r2)]
    header = ("t_f (s)", "E0_over_Ef_1d (1)", "E0_over_E0_plus_Eex_classical (1)",
              "E0_over_Ef_2d (1)")
    series = [(1, "1D quantum"), (2, "classical"), (3, "2D quantum")]
    return FigureData("fig2", header, rows, series, "E0/Ef", "Energy ratio vs final time")


def _fig3(name, selector, terms, points, workers):
    p = fig1_params()
    times = _times(20 * US, 200 * US, points)
    pert = [perturbative_fidelity(p, t, selector=selector) for t in times]
    q1 = _pmap(_quantum_point, [(p, t, "unshifted", "1D", terms, "ground") for t in times], workers)
    rows = [(t, a, b.fidelity) for t, a, b in zip(times, pert, q1)]
    header = ("t_f (s)", "F_perturbative (1)", "F_1d (1)")
    series = [(1, "second-order perturbation"), (2, "1D quantum")]
    title = f"{terms.capitalize()} perturbation only (t_cr = {critical_time(p) / US:.1f} us)"
    return FigureData(name, header, rows, series, "fidelity", title)


def fig3a(points=91, workers=1, **_) -> FigureData:
    return _fig3("fig3a", Selector.QUADRATIC, "quadratic", points, workers)


def fig3b(points=91, workers=1, **_) -> FigureData:
    return _fig3("fig3b", Selector.QUARTIC, "quartic", points, workers)


def fig4(points=91, points_2d=10, workers=1, with_2d=True) -> FigureData:
    p = fig1_params()
    times = _times(20 * US, 200 * US, points)
    q1 = _pmap(_quantum_point, [(p, t, "shifted", "1D", "full", "ground") for t in times], workers)
    sampled = _subset(times, points_2d) if with_2d else []
    q2 = _pmap(_quantum_point, [(p, t, "shifted", "2D", "full", "ground") for t in sampled],
               workers)
    f2 = _column_pairs(times, sampled, [r.fidelity for r in q2])
    rows = [(t, a.fidelity, b) for t, a, b in zip(times, q1, f2)]
    header = ("t_f (s)", "F_1d (1)", "F_2d (1)")
    return FigureData("fig4", header, rows, [(1, "1D"), (2, "2D")], "fidelity",
                      "Shifted-frequency trajectory")


def fig5(points=400, **_) -> FigureData:
    times = _times(1 * US, 20 * US, points)
    cols = []
    for b in FIG5_BETAS:
        p = fig5_params(b)
        eq = equilibrium(p)
        cols.append([excitation_energy_analytic(p, t, p.omega, eq.omega_tilde,
                                                eq.omega_tilde).quanta for t in times])
    rows = [(t, *vals) for t, *vals in zip(times, *cols)]
    header = ("t_f (s)",) + tuple(f"quanta_beta_{b:.3g}_m^-2 (1)" for b in FIG5_BETAS)
    series = [(i + 1, f"beta = {b:.3g} m^-2") for i, b in enumerate(FIG5_BETAS)]
    return FigureData("fig5", header, rows, series, "excitation quanta",
                      "Classical excitation at 2 MHz")


_BUILDERS = {"fig1": fig1, "fig2": fig2, "fig3a": fig3a, "fig3b": fig3b, "fig4": fig4,
             "fig5": fig5}


def build(name: str, workers: int = 1, **kw) -> FigureData:
    if name not in _BUILDERS:
        raise ValueError(f"unknown figure {name!r} (choose from {FIGURES})")
    return _BUILDERS[name](workers=workers, **kw)


def write_svg(data: FigureData, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "iontransport"
    fig, ax = plt.subplots(figsize=(6, 4))
    t = np.array([r[0] for r in data.rows]) / US
    for col, label in data.series:
        y = np.array([r[col] for r in data.rows], dtype=float)
        mask = np.isfinite(y)
        sparse = mask.sum() < 0.5 * len(y)
        ax.plot(t[mask], y[mask], "^" if sparse else "-", label=label)
    ax.set_xlabel("t_f (us)")
    ax.set_ylabel(data.ylabel)
    if data.name == "fig5":
        ax.set_yscale("log")
    ax.set_title(data.title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def figure(name: str, out_dir, workers: int = 1, **kw) -> tuple[Path, Path]:
    data = build(name, workers=workers, **kw)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, svg_path = out / f"{name}.csv", out / f"{name}.svg"
    write_csv(csv_path, data.header, data.rows)
    write_svg(data, svg_path)
    return csv_path, svg_path
