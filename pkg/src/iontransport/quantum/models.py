"""Trap-frame potentials for the quantum propagators.

Coordinates are u = (Q - Q0,) for the frozen-r 1D model and
u = (Q - Q0, r) for the full two-ion model.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import (
    TrapParams,
    equilibrium,
    potential_1d_effective,
    potential_2d,
    potential_2d_gradient,
    relative_curvature,
    relative_potential,
)
from .grid import Grid

POINTS_PER_LENGTH = 16


class Model1D:
    """Effective CM model with r frozen at r_e.

    ``terms`` selects the potential: "full" 1/2 M w^2[(1+6 b r_e^2) x^2 + b x^4],
    "quadratic" 1/2 M w~^2 x^2, "quartic" 1/2 M w^2 (x^2 + b x^4).
    """

    dim = 1
    tag = "1D"

    def __init__(self, params: TrapParams, terms: str = "full"):
        if terms not in ("full", "quadratic", "quartic"):
            raise ValueError(f"unknown terms {terms!r}")
        self.params = params
        self.terms = terms
        eq = equilibrium(params)
        self.r_e = eq.r_e
        self.omega_tilde = eq.omega_tilde
        self.mass = params.M
        self.hbar = params.hbar
        self.rest = (0.0,)
        M, w2, b = params.M, params.omega**2, params.beta
        if terms == "full":
            self._k2, self._k4 = 0.5 * M * eq.omega_tilde**2, 0.5 * M * w2 * b
        elif terms == "quadratic":
            self._k2, self._k4 = 0.5 * M * eq.omega_tilde**2, 0.0
        else:
            self._k2, self._k4 = 0.5 * M * w2, 0.5 * M * w2 * b

    @property
    def omega_cm(self) -> float:
        return math.sqrt(2 * self._k2 / self.mass)

    @property
    def omega_max(self) -> float:
        return self.omega_cm

    def potential(self, u):
        (x,) = u
        return self._k2 * x**2 + self._k4 * x**4

    def gradient(self, u):
        (x,) = u
        return (2 * self._k2 * x + 4 * self._k4 * x**3,)

    def local_potential(self, U, G, grid: Grid):
        """V(U + y) - V(U) - G.y on the grid offsets."""
        (y,) = grid.axes()
        # expanded about U to avoid cancellation when |U| >> |y|
        x0 = U[0]
        k2, k4 = self._k2, self._k4
        c1 = 2 * k2 * x0 + 4 * k4 * x0**3 - G[0]
        c2 = k2 + 6 * k4 * x0**2
        c3 = 4 * k4 * x0
        return c1 * y + c2 * y**2 + c3 * y**3 + k4 * y**4

    def default_grid(self, n: int = 1024, points_per_length: int = POINTS_PER_LENGTH) -> Grid:
        a = math.sqrt(self.hbar / (self.mass * self.omega_cm))
        return Grid((n,), (a / points_per_length,))


class Model2D:
    """Full anharmonic two-ion model in (Q - Q0, r)."""

    dim = 2
    tag = "2D"

    def __init__(self, params: TrapParams):
        self.params = params
        eq = equilibrium(params)
        self.r_e = eq.r_e
        self.omega_tilde = eq.omega_tilde
        self.omega_r = math.sqrt(relative_curvature(params, eq.r_e) / params.M)
        self.mass = params.M
        self.hbar = params.hbar
        self.rest = (0.0, eq.r_e)

    @property
    def omega_cm(self) -> float:
        return self.omega_tilde

    @property
    def omega_max(self) -> float:
        return max(self.omega_tilde, self.omega_r)

    def potential(self, u):
        return potential_2d(self.params, u[0], u[1])

    def gradient(self, u):
        return potential_2d_gradient(self.params, u[0], u[1])

    def local_potential(self, U, G, grid: Grid):
        p = self.params
        y, z = grid.axes()
        x0, r0 = U
        M, w2, b = p.M, p.omega**2, p.beta
        # CM part about x0, relative part about r0, coupling kept exact
        cm = (0.5 * M * w2 * (2 * x0 * y + y**2 + b * ((x0 + y) ** 4 - x0**4))) - G[0] * y
        rel = relative_potential(p, r0 + z) - relative_potential(p, r0) - G[1] * z
        if b:
            c = 3 * M * w2 * b
            coup = c * ((x0 + y) ** 2 * (r0 + z) ** 2 - x0**2 * r0**2)
            return cm + rel + coup
        return cm + rel

    def relative_window(self, half_width_sigmas: float = 12.0) -> float:
        sigma_r = math.sqrt(self.hbar / (2 * self.mass * self.omega_r))
        return half_width_sigmas * sigma_r

    def default_grid(self, nq: int = 512, nr: int = 256,
                     points_per_length: int = POINTS_PER_LENGTH,
                     half_width_sigmas: float = 12.0) -> Grid:
        a = math.sqrt(self.hbar / (self.mass * self.omega_tilde))
        half = self.relative_window(half_width_sigmas)
        if half >= self.r_e:
            raise ValueError("relative window reaches r = 0")
        return Grid((nq, nr), (a / points_per_length, 2 * half / nr))


def make_model(params: TrapParams, model: str = "1D", terms: str = "full"):
    tag = str(model).upper()
    if tag == "1D":
        return Model1D(params, terms)
    if tag == "2D":
        if terms != "full":
            raise ValueError("the 2D model has only the full potential")
        return Model2D(params)
    raise ValueError(f"unknown model {model!r}")


def rest_potential(model, grid: Grid) -> np.ndarray:
    """Static trap-frame potential about the rest point, minimum shifted to ~0."""
    G = (0.0,) * model.dim
    W = model.local_potential(model.rest, G, grid)
    return np.broadcast_to(W, grid.shape).astype(float)
