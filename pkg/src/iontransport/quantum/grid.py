from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform grid of offsets y around a frame origin, one axis per dimension.

    Axis 0 is the CM coordinate; in 2D axis 1 is the relative coordinate r.
    Offsets run from -n/2 dy to (n/2 - 1) dy.
    """

    shape: tuple[int, ...]
    spacing: tuple[float, ...]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        spacing = tuple(float(h) for h in self.spacing)
        if len(shape) != len(spacing) or not 1 <= len(shape) <= 2:
            raise ValueError("grid must be 1D or 2D with one spacing per axis")
        if not all(_is_power_of_two(n) for n in shape):
            raise ValueError(f"point counts must be powers of two, got {shape}")
        if not all(h > 0 for h in spacing):
            raise ValueError("spacings must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def dV(self) -> float:
        return math.prod(self.spacing)

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(n * h for n, h in zip(self.shape, self.spacing))

    def axis(self, i: int) -> np.ndarray:
        n, h = self.shape[i], self.spacing[i]
        return (np.arange(n) - n // 2) * h

    def axes(self) -> list[np.ndarray]:
        """Offsets per axis, shaped to broadcast against the full grid."""
        out = []
        for i in range(self.ndim):
            shape = [1] * self.ndim
            shape[i] = self.shape[i]
            out.append(self.axis(i).reshape(shape))
        return out

    def wavenumbers(self) -> list[np.ndarray]:
        out = []
        for i in range(self.ndim):
            shape = [1] * self.ndim
            shape[i] = self.shape[i]
            k = 2 * np.pi * np.fft.fftfreq(self.shape[i], d=self.spacing[i])
            out.append(k.reshape(shape))
        return out

    def k_max(self) -> tuple[float, ...]:
        return tuple(math.pi / h for h in self.spacing)

    def check_compatible(self, other: "Grid") -> None:
        if self.shape != other.shape or not np.allclose(self.spacing, other.spacing,
                                                         rtol=1e-12, atol=0):
            raise GridMismatchError(f"grids differ: {self} vs {other}")
