"""Invariant-based trap trajectories for rigid transport over a distance d.

The classical reference Q_c is the quintic that starts and ends at rest with
zero acceleration; the trap trajectory follows from Newton's equation,
Q0 = Q_c + Q_c'' / W^2, where W is the frequency assumed in the design.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import TrapParams, equilibrium
from .io import write_csv

# coefficients of Q_c/d and its derivatives (times t_f^k) as polynomials in s
_QC_POLY = [
    np.polynomial.Polynomial([0, 0, 0, 10, -15, 6]),
]
for _ in range(4):
    _QC_POLY.append(_QC_POLY[-1].deriv())


class Variant(str, enum.Enum):
    UNSHIFTED = "unshifted"
    SHIFTED = "shifted"
    COMPENSATED = "compensated"


@dataclass(frozen=True)
class TransportPlan:
    """A trap trajectory Q0(t) with its classical reference Q_c(t).

    Evaluation is analytic at any t; outside [0, t_f] both curves are frozen
    at their end points.  ``design_omega = inf`` means Q0 = Q_c.
    """

    variant: Variant
    t_f: float
    design_omega: float
    d: float
    n_samples: int = 10_000
    _samples: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.t_f > 0:
            raise ValueError("t_f must be positive")
        if self.n_samples < 2:
            raise ValueError("need at least two samples")

    def _qc(self, t, k):
        t = np.asarray(t, dtype=float)
        s = t / self.t_f
        inside = (s >= 0) & (s <= 1)
        val = self.d * _QC_POLY[k](np.clip(s, 0.0, 1.0)) / self.t_f**k
        if k == 0:
            return np.where(s < 0, 0.0, np.where(s > 1, self.d, val))
        return np.where(inside, val, 0.0)

    def Qc(self, t, k: int = 0):
        """k-th time derivative of the classical reference (k <= 4)."""
        return self._qc(t, k)

    def Q0(self, t, k: int = 0):
        """k-th time derivative of the trap position (k <= 2).

        Derivatives are one-sided at the end points: Q0'(0) is the value for
        t -> 0+, Q0'(t_f) the value for t -> t_f-.
        """
        if k > 2:
            raise ValueError("only derivatives up to second order are available")
        val = self._qc(t, k)
        if math.isfinite(self.design_omega):
            val = val + self._qc(t, k + 2) / self.design_omega**2
        return val

    @property
    def samples(self) -> dict:
        """Uniform samples on [0, t_f] (for export; consumers use Q0/Qc)."""
        if self._samples is None:
            t = np.linspace(0.0, self.t_f, self.n_samples)
            data = {"t": t}
            for k, name in enumerate(("Q0", "dQ0", "ddQ0")):
                data[name] = self.Q0(t, k)
            for k, name in enumerate(("Qc", "dQc", "ddQc")):
                data[name] = self.Qc(t, k)
            for arr in data.values():
                arr.setflags(write=False)
            object.__setattr__(self, "_samples", data)
        return self._samples

    def newton_residual(self, t=None) -> float:
        """max |Q_c'' + W^2 (Q_c - Q0)| over the sample grid."""
        if not math.isfinite(self.design_omega):
            return 0.0
        if t is None:
            t = self.samples["t"]
        w2 = self.design_omega**2
        return float(np.max(np.abs(self.Qc(t, 2) + w2 * (self.Qc(t) - self.Q0(t)))))

    def max_separation(self) -> float:
        """max |Q_c - Q0| = 10 d / (sqrt(3) W^2 t_f^2)."""
        if not math.isfinite(self.design_omega):
            return 0.0
        return 10 * self.d / (math.sqrt(3) * self.design_omega**2 * self.t_f**2)

    def to_csv(self, path) -> None:
        cols = [
            ("t", "t (s)"), ("Q0", "Q0 (m)"), ("dQ0", "dQ0 (m/s)"),
            ("ddQ0", "ddQ0 (m/s^2)"), ("Qc", "Qc (m)"), ("dQc", "dQc (m/s)"),
            ("ddQc", "ddQc (m/s^2)"),
        ]
        data = self.samples
        rows = zip(*(data[key] for key, _ in cols))
        write_csv(path, [label for _, label in cols], ([float(v) for v in row] for row in rows))


def design_polynomial(params: TrapParams, t_f: float, design_omega: float | None = None,
                      variant: Variant = Variant.UNSHIFTED, n_samples: int = 10_000) -> TransportPlan:
    """Quintic reference and the trap trajectory that drives it exactly."""
    if design_omega is None:
        design_omega = params.omega
    return TransportPlan(Variant(variant), float(t_f), float(design_omega), params.d, n_samples)


def design_shifted(params: TrapParams, t_f: float, n_samples: int = 10_000) -> TransportPlan:
    """Polynomial design with the coupling-shifted CM frequency."""
    w_t = equilibrium(params).omega_tilde
    return design_polynomial(params, t_f, w_t, Variant.SHIFTED, n_samples)


def design_compensated(params: TrapParams, t_f: float, n_samples: int = 10_000) -> TransportPlan:
    """Trap following Q_c itself; to be used with the compensating force."""
    return design_polynomial(params, t_f, math.inf, Variant.COMPENSATED, n_samples)


def design(params: TrapParams, t_f: float, variant: Variant | str) -> TransportPlan:
    variant = Variant(variant)
    if variant is Variant.SHIFTED:
        return design_shifted(params, t_f)
    if variant is Variant.COMPENSATED:
        return design_compensated(params, t_f)
    return design_polynomial(params, t_f)


@dataclass(frozen=True)
class ForceProfile:
    """Lab-frame compensating force F = M Q0'' on the sample grid.

    The impulses are M times the trap-velocity jumps at t = 0 and t = t_f;
    they vanish when the trap starts and stops at rest.
    """

    t: np.ndarray
    force: np.ndarray
    impulse_start: float
    impulse_end: float
    max_acceleration: float
    acceleration_bound: float


def compensating_force(plan: TransportPlan, M: float) -> ForceProfile:
    t = plan.samples["t"]
    acc = plan.samples["ddQ0"]
    return ForceProfile(
        t=t,
        force=M * acc,
        impulse_start=float(M * plan.Q0(0.0, 1)),
        impulse_end=float(-M * plan.Q0(plan.t_f, 1)),
        max_acceleration=float(np.max(np.abs(acc))),
        acceleration_bound=2 * plan.d / plan.t_f**2,
    )
