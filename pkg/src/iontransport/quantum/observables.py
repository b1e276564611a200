"""Energies, fidelity reports and a cached one-call transport simulation."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..core import TrapParams, relative_potential
from ..trajectory import TransportPlan, Variant, design
from .grid import Grid
from .groundstate import GroundState, ground_state_imaginary_time
from .models import Model2D, make_model, rest_potential
from .propagate import lab_energy, propagate_split_operator
from .wavefunction import WaveFunction, fidelity


@dataclass(frozen=True)
class FidelityReport:
    t_f: float
    fidelity: float
    E0: float
    Ef: float
    delta: float
    variant: str
    model: str
    quantum: float  # hbar * omega_tilde, the unit of motional quanta

    @property
    def ratio(self) -> float:
        return self.E0 / self.Ef

    @property
    def quanta(self) -> float:
        return (self.Ef - self.E0) / self.quantum

    @property
    def method(self) -> str:
        return f"quantum-{self.model}"


def _relative_grid(grid: Grid) -> Grid:
    return Grid((grid.shape[1],), (grid.spacing[1],))


@functools.lru_cache(maxsize=16)
def relative_ground_energy(params: TrapParams, grid: Grid) -> tuple[float, float]:
    """(delta, zero-point energy) of H_r = p^2/2M + V_r(r) on the r axis of ``grid``.

    delta is the absolute ground energy of H_r, the constant removed from
    2D energies to make them comparable with the 1D model.
    """
    model = Model2D(params)
    rgrid = _relative_grid(grid)
    (z,) = rgrid.axes()
    V = relative_potential(params, model.r_e + z) - relative_potential(params, model.r_e)
    gs = ground_state_imaginary_time(rgrid, V, model.mass, model.hbar, model.omega_r)
    zp = gs.energy
    return float(relative_potential(params, model.r_e)) + zp, zp


def energy_ratio_report(initial: WaveFunction, final: WaveFunction, model, plan: TransportPlan,
                        target: WaveFunction | None = None) -> FidelityReport:
    """E0 at the start trap position, Ef at the final one (delta removed in 2D)."""
    delta = relative_ground_energy(model.params, initial.grid)[0] if model.dim == 2 else 0.0
    E0 = lab_energy(initial, model, float(plan.Q0(0.0))) - delta
    Ef = lab_energy(final, model, float(plan.Q0(plan.t_f))) - delta
    F = fidelity(final, target) if target is not None else math.nan
    return FidelityReport(plan.t_f, F, E0, Ef, delta, plan.variant.value, model.tag,
                          model.hbar * model.omega_tilde)


@functools.lru_cache(maxsize=16)
def ground_state(params: TrapParams, model: str = "1D", terms: str = "full",
                 grid: Grid | None = None) -> GroundState:
    """Trap ground state at Q0 = 0 (cached per parameter set and grid)."""
    mdl = make_model(params, model, terms)
    grid = mdl.default_grid() if grid is None else grid
    return ground_state_imaginary_time(grid, rest_potential(mdl, grid), mdl.mass, mdl.hbar,
                                       mdl.omega_cm, origin=mdl.rest)


def translated(state: WaveFunction, distance: float) -> WaveFunction:
    origin = (state.origin[0] + distance,) + tuple(state.origin[1:])
    return WaveFunction(state.data, state.grid, origin, state.momentum, state.t, state.hbar,
                        state.label)


@dataclass
class TransportRun:
    report: FidelityReport
    initial: WaveFunction
    final: WaveFunction
    plan: TransportPlan


def simulate_transport(params: TrapParams, t_f: float, variant: Variant | str = Variant.UNSHIFTED,
                       model: str = "1D", terms: str = "full", *, frame: str = "comoving",
                       grid: Grid | None = None, steps_per_period: int = 500,
                       compensate: bool | None = None, plan: TransportPlan | None = None,
                       trace: list | None = None) -> TransportRun:
    """Ground state at 0, transported by ``plan``; fidelity against it translated by d."""
    mdl = make_model(params, model, terms)
    gs = ground_state(params, mdl.tag, terms, grid)
    plan = design(params, t_f, variant) if plan is None else plan
    initial = gs.state
    final = propagate_split_operator(initial, plan, mdl, frame=frame, compensate=compensate,
                                     steps_per_period=steps_per_period, trace=trace)
    target = translated(initial, params.d)
    report = energy_ratio_report(initial, final, mdl, plan, target)
    return TransportRun(report, initial, final, plan)
