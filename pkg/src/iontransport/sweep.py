"""t_f sweeps over methods and trajectory variants."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass

from .classical import excitation_energy_analytic
from .config import METHODS, VARIANTS, ExperimentConfig
from .core import equilibrium
from .io import write_csv
from .nion import ChainConfig, transport_chain_classical
from .perturbation import first_order_amplitudes
from .quantum.models import make_model
from .quantum.observables import simulate_transport
from .trajectory import Variant, design

NAN = math.nan


@dataclass(frozen=True)
class SweepRow:
    t_f: float
    method: str
    variant: str
    N: int
    fidelity: float = NAN
    E0: float = NAN
    Ef: float = NAN
    E_ex: float = NAN
    E_rel: float = NAN
    quanta: float = NAN
    status: str = "ok"

    def sort_key(self):
        return (self.t_f, METHODS.index(self.method), VARIANTS.index(self.variant), self.N)


HEADER = ("t_f (s)", "method", "variant", "N (1)", "fidelity (1)", "E0 (J)", "Ef (J)",
          "E_ex (J)", "E_rel (J)", "quanta (1)", "status")


def _perturbative(cfg, t_f, variant):
    if variant == Variant.COMPENSATED.value:
        # the compensating force removes every trap-frame perturbation
        return SweepRow(t_f, "perturbation", variant, 2, fidelity=1.0, quanta=0.0)
    plan = design(cfg.params, t_f, variant)
    table = first_order_amplitudes(0, t_f, plan, cfg.params)
    total = table.probability()
    quanta = sum(j * abs(a) ** 2 for j, a in table.amplitudes.items())
    if total > 1:
        return SweepRow(t_f, "perturbation", variant, 2, quanta=quanta,
                        status=f"perturbative-breakdown (sum |f|^2 = {total:.3g})")
    return SweepRow(t_f, "perturbation", variant, 2, fidelity=math.sqrt(1 - total),
                    quanta=quanta)


def _classical(cfg, t_f, variant):
    p = cfg.params
    eq = equilibrium(p)
    E0 = 0.5 * p.hbar * eq.omega_tilde
    if variant == Variant.COMPENSATED.value:
        E_ex = 0.0
    else:
        design_omega = p.omega if variant == Variant.UNSHIFTED.value else eq.omega_tilde
        E_ex = excitation_energy_analytic(p, t_f, design_omega, eq.omega_tilde, None).E_ex
    return SweepRow(t_f, "classical", variant, 2, E0=E0, Ef=E0 + E_ex, E_ex=E_ex,
                    quanta=E_ex / (p.hbar * eq.omega_tilde))


def _quantum(cfg, t_f, variant, model):
    p = cfg.params
    mdl = make_model(p, model)
    grid = mdl.default_grid(cfg.grid_1d) if model == "1D" else mdl.default_grid(*cfg.grid_2d)
    run = simulate_transport(p, t_f, variant, model, grid=grid,
                             steps_per_period=cfg.steps_per_period)
    r = run.report
    return SweepRow(t_f, f"quantum{model.lower()}", variant, 2, fidelity=r.fidelity, E0=r.E0,
                    Ef=r.Ef, E_ex=r.Ef - r.E0, quanta=r.quanta)


def _nion(cfg, t_f, variant, N):
    p = cfg.params
    chain = ChainConfig.from_ion_mass(N, p.m, p.omega, p.beta, p.d, p.Cc, p.hbar)
    plan = design(chain.params, t_f, variant if variant != "shifted" else "unshifted")
    res = transport_chain_classical(chain, plan, compensate=variant == "compensated")
    status = "ok" if variant != "shifted" else "shifted design not defined for chains; used unshifted"
    return SweepRow(t_f, "nion", variant, N, E_ex=res.cm_excitation,
                    E_rel=res.relative_excitation,
                    quanta=res.cm_excitation / (p.hbar * p.omega), status=status)


def evaluate_point(cfg: ExperimentConfig, t_f: float, method: str, variant: str) -> list[SweepRow]:
    """Rows for one (t_f, method, variant); failures become status strings."""
    sizes = cfg.chain_sizes if method == "nion" else (2,)
    rows = []
    for N in sizes:
        try:
            if method == "perturbation":
                rows.append(_perturbative(cfg, t_f, variant))
            elif method == "classical":
                rows.append(_classical(cfg, t_f, variant))
            elif method == "quantum1d":
                rows.append(_quantum(cfg, t_f, variant, "1D"))
            elif method == "quantum2d":
                rows.append(_quantum(cfg, t_f, variant, "2D"))
            else:
                rows.append(_nion(cfg, t_f, variant, N))
        except Exception as exc:  # recorded in-row; a sweep never aborts
            rows.append(SweepRow(t_f, method, variant, N,
                                 status=f"error: {type(exc).__name__}: {exc}"))
    return rows


def _task(args):
    return evaluate_point(*args)


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[SweepRow]:
    tasks = [(cfg, t, m, v) for t in cfg.t_f_values() for m in cfg.methods for v in cfg.variants]
    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    return sorted(rows, key=SweepRow.sort_key)


def all_failed(rows) -> bool:
    return bool(rows) and all(r.status.startswith("error") for r in rows)


def write_sweep_csv(path, rows) -> None:
    write_csv(path, HEADER, [astuple(r) for r in rows])
