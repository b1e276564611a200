"""Second-order perturbation theory for the frozen-relative-coordinate model.

The unperturbed Hamiltonian is a harmonic trap with the plan's design
frequency W, whose transport modes follow Q_c(t) exactly.  The perturbation
is the difference between the effective 1D potential and that oscillator,

    dV = 1/2 M (w~^2 - W^2) x^2 + 1/2 M w^2 beta x^4,    x = Q - Q0,

and for the unshifted design (W = w) it equals beta * H1 with
H1 = 1/2 M w^2 [6 r_e^2 x^2 + x^4].
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import TrapParams, equilibrium_distance, effective_frequency
from .classical import excitation_bracket
from .oscillator import oscillator_length, position_powers
from .trajectory import TransportPlan


class Selector(str, enum.Enum):
    QUADRATIC = "quadratic"
    QUARTIC = "quartic"
    FULL = "full"


class QuadratureError(RuntimeError):
    pass


class PerturbativeBreakdown(ArithmeticError):
    """Sum of first-order transition probabilities exceeds one."""

    def __init__(self, total: float):
        super().__init__(f"perturbation theory breaks down: sum |f|^2 = {total:.6g}")
        self.total = total


MAX_JUMP = 4
PANELS_PER_PERIOD = 2000


@dataclass(frozen=True)
class TransportMode:
    n: int
    plan: TransportPlan
    params: TrapParams

    @property
    def omega(self) -> float:
        return self.plan.design_omega

    @property
    def energy(self) -> float:
        return self.params.hbar * self.omega * (self.n + 0.5)


@dataclass(frozen=True)
class AmplitudeTable:
    n: int
    t_f: float
    selector: Selector
    amplitudes: dict = field(default_factory=dict)
    quadrature_error: float = 0.0

    def __getitem__(self, j: int) -> complex:
        return self.amplitudes.get(j, 0j)

    def probability(self, jumps=None) -> float:
        """Sum of |f_jn|^2 over j != n (optionally only |j - n| in ``jumps``)."""
        return float(sum(abs(f) ** 2 for j, f in self.amplitudes.items()
                         if j != self.n and (jumps is None or abs(j - self.n) in jumps)))


def _h1_coefficients(params: TrapParams, plan: TransportPlan, r_e: float, selector: Selector):
    """(quadratic, quartic) coefficients of H1 = dV / beta in x = Q - Q0."""
    W = plan.design_omega
    if not math.isfinite(W):
        raise ValueError("perturbation theory needs a finite design frequency")
    M, w2, b = params.M, params.omega**2, params.beta
    k2 = 3 * M * w2 * r_e**2
    if W != params.omega:
        if b == 0:
            raise ValueError("H1 is undefined for beta = 0 with a shifted design")
        k2 += 0.5 * M * (w2 - W**2) / b
    k4 = 0.5 * M * w2
    if selector is Selector.QUADRATIC:
        k4 = 0.0
    elif selector is Selector.QUARTIC:
        k2 = 0.0
    return k2, k4


def _displaced_coefficients(c2, c4, delta):
    """Expand c2 (x+D)^2 + c4 (x+D)^4 in powers of the mode coordinate x.

    Returns coefficients of x^0..x^4 (arrays over time)."""
    D = np.asarray(delta, dtype=float)
    return [
        c2 * D**2 + c4 * D**4,
        2 * c2 * D + 4 * c4 * D**3,
        c2 + 6 * c4 * D**2,
        4 * c4 * D * np.ones_like(D),
        c4 * np.ones_like(D),
    ]


def _h1_elements(n, js, t, plan, params, r_e, selector):
    """<Psi_j(t)| H1(t) |Psi_n(t)> for each j in js; shape (len(js), len(t)).

    The momentum and Q_c-dependent phases of the two modes cancel; only
    e^{i(E_j - E_n)t/hbar} survives.
    """
    k2, k4 = _h1_coefficients(params, plan, r_e, selector)
    W = plan.design_omega
    a = oscillator_length(params.M, W, params.hbar)
    t = np.asarray(t, dtype=float)
    # x = Q - Q0 = (Q - Q_c) + (Q_c - Q0)
    delta = plan.Qc(t) - plan.Q0(t)
    coef = _displaced_coefficients(k2, k4, delta)
    powers = position_powers(4, max(max(js), n))
    out = np.zeros((len(js), t.size), dtype=complex)
    for row, j in enumerate(js):
        acc = np.zeros(t.size)
        for k in range(5):
            el = powers[k][j, n]
            if el != 0.0:
                acc = acc + coef[k] * el * a**k
        out[row] = acc * np.exp(1j * (j - n) * W * t)
    return out


def matrix_element_H1(n: int, j: int, t, plan: TransportPlan, params: TrapParams,
                      r_e: float | None = None, selector: Selector | str = Selector.FULL):
    """<Psi_j(t)| H1(t) |Psi_n(t)> in J/beta (dV = beta H1)."""
    if n < 0 or j < 0:
        raise ValueError("quantum numbers must be non-negative")
    selector = Selector(selector)
    if r_e is None:
        r_e = equilibrium_distance(params)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if abs(j - n) > MAX_JUMP:
        res = np.zeros(t.shape, dtype=complex)
    else:
        res = _h1_elements(n, [j], t, plan, params, r_e, selector)[0]
    return complex(res[0]) if scalar else res


def _simpson(y, h):
    return h / 3 * (y[..., 0] + y[..., -1] + 4 * y[..., 1:-1:2].sum(-1) + 2 * y[..., 2:-1:2].sum(-1))


def first_order_amplitudes(n: int, t_f: float | None, plan: TransportPlan, params: TrapParams,
                           selector: Selector | str = Selector.FULL, r_e: float | None = None,
                           panels_per_period: int = PANELS_PER_PERIOD,
                           rtol: float = 1e-8) -> AmplitudeTable:
    """f_jn = (-i/hbar) int_0^t_f <Psi_j| dV |Psi_n> dt for 1 <= |j - n| <= 4.

    Composite Simpson; the result is checked against half the panel count.
    """
    selector = Selector(selector)
    if t_f is None:
        t_f = plan.t_f
    if r_e is None:
        r_e = equilibrium_distance(params)
    js = [j for j in range(n - MAX_JUMP, n + MAX_JUMP + 1) if j >= 0 and j != n]
    if params.beta == 0:
        return AmplitudeTable(n, t_f, selector, {j: 0j for j in js})
    period = 2 * math.pi / plan.design_omega
    panels = 4 * max(4, math.ceil(panels_per_period * t_f / period / 4))
    t = np.linspace(0.0, t_f, panels + 1)
    elems = _h1_elements(n, js, t, plan, params, r_e, selector)
    h = t_f / panels
    pref = -1j * params.beta / params.hbar
    fine = pref * _simpson(elems, h)
    coarse = pref * _simpson(elems[:, ::2], 2 * h)
    err = np.abs(fine - coarse)
    scale = abs(pref) * np.abs(elems).sum(axis=1) * h
    if np.any(err > rtol * np.maximum(np.abs(fine), scale)):
        raise QuadratureError(f"time quadrature not converged (max error {err.max():.3e})")
    return AmplitudeTable(n, t_f, selector, dict(zip(js, fine)),
                          quadrature_error=float(err.max()))


def amplitude_one_quantum_closed_form(n: int, t_f: float, params: TrapParams, r_e: float,
                                      sign: int = +1) -> complex:
    """Closed-form f_{n+-1,n} for the unshifted polynomial design.

    f = -+ 360 beta r_e^2 d sqrt(2 n_> M / hbar) e^{+- i x/2} B(x) / (t_f^5 w^{9/2}),
    x = w t_f, n_> = max(n, n +- 1), B the excitation bracket.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n_big = n + 1 if sign == 1 else n
    if n_big == 0:
        return 0j
    w, M, hb = params.omega, params.M, params.hbar
    x = w * t_f
    mag = 360 * params.beta * r_e**2 * params.d * math.sqrt(2 * n_big * M / hb) / (t_f**5 * w**4.5)
    return complex(-sign * mag * np.exp(1j * sign * x / 2) * float(excitation_bracket(x)))


def fidelity_from_table(table: AmplitudeTable, jumps=None) -> float:
    total = table.probability(jumps)
    if total > 1:
        raise PerturbativeBreakdown(total)
    return math.sqrt(1.0 - total)


def fidelity_second_order(n: int, t_f: float | None, plan: TransportPlan, params: TrapParams,
                          selector: Selector | str = Selector.FULL, r_e: float | None = None,
                          jumps=None) -> float:
    """F = (1 - sum_{j != n} |f_jn|^2)^(1/2)."""
    return fidelity_from_table(first_order_amplitudes(n, t_f, plan, params, selector, r_e), jumps)


def effective_frequency_of(params: TrapParams) -> float:
    return effective_frequency(params, equilibrium_distance(params))


PERTURBATION_CSV_HEADER = ("t_f (s)", "F_full (1)", "F_quad (1)", "F_quartic (1)",
                           "|f_10| (1)", "|f_20| (1)", "|f_30| (1)", "|f_40| (1)")


def perturbation_sweep(params: TrapParams, t_fs, plan_factory) -> list[tuple]:
    """Ground-state rows for PERTURBATION_CSV_HEADER; F is NaN on breakdown."""
    r_e = equilibrium_distance(params)
    rows = []
    for t_f in t_fs:
        plan = plan_factory(params, t_f)
        fs = []
        for sel in (Selector.FULL, Selector.QUADRATIC, Selector.QUARTIC):
            table = first_order_amplitudes(0, t_f, plan, params, sel, r_e)
            total = table.probability()
            fs.append(math.sqrt(1 - total) if total <= 1 else math.nan)
            if sel is Selector.FULL:
                mags = [abs(table[j]) for j in range(1, MAX_JUMP + 1)]
        rows.append((t_f, *fs, *mags))
    return rows


def write_perturbation_csv(path, rows) -> None:
    from .io import write_csv

    write_csv(path, PERTURBATION_CSV_HEADER, rows)
