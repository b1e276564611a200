"""Grid wave functions carried in a displaced, boosted frame.

A :class:`WaveFunction` stores phi on grid offsets y and represents the lab
wave function psi(x) = exp(i P.x / hbar) phi(x - X).  Global phases are not
tracked; every observable used here is phase independent.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft

from ..core import HBAR
from .grid import Grid

CHECKPOINT_MAGIC = b"IONWF"
CHECKPOINT_VERSION = 1


@dataclass
class WaveFunction:
    data: np.ndarray
    grid: Grid
    origin: tuple[float, ...]
    momentum: tuple[float, ...] = None
    t: float = 0.0
    hbar: float = HBAR
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != self.grid.shape:
            raise ValueError(f"data shape {self.data.shape} != grid shape {self.grid.shape}")
        self.origin = tuple(float(x) for x in self.origin)
        if self.momentum is None:
            self.momentum = (0.0,) * self.grid.ndim
        self.momentum = tuple(float(p) for p in self.momentum)
        if len(self.origin) != self.grid.ndim or len(self.momentum) != self.grid.ndim:
            raise ValueError("origin and momentum need one entry per axis")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2) * self.grid.dV)

    def normalized(self) -> "WaveFunction":
        return replace(self, data=self.data / np.sqrt(self.norm()))

    def copy(self) -> "WaveFunction":
        return replace(self, data=self.data.copy())

    def density(self) -> np.ndarray:
        return np.abs(self.data) ** 2

    def mean_position(self) -> tuple[float, ...]:
        rho = self.density() * self.grid.dV
        n = rho.sum()
        return tuple(X + float(np.sum(rho * y) / n) for X, y in zip(self.origin, self.grid.axes()))

    def edge_ratio(self, width: int = 2) -> float:
        """Largest |phi| within ``width`` points of any wall, relative to max |phi|."""
        a = np.abs(self.data)
        peak = a.max()
        if peak == 0:
            return 0.0
        worst = 0.0
        for ax in range(a.ndim):
            lo = np.take(a, range(width), axis=ax).max()
            hi = np.take(a, range(a.shape[ax] - width, a.shape[ax]), axis=ax).max()
            worst = max(worst, lo, hi)
        return float(worst / peak)


def shifted(phi: np.ndarray, grid: Grid, shift) -> np.ndarray:
    """Samples of phi(y + shift) by spectral translation (periodic)."""
    if not np.any(shift):
        return phi
    spec = sfft.fftn(phi)
    for k, s in zip(grid.wavenumbers(), shift):
        if s:
            spec = spec * np.exp(1j * k * s)
    return sfft.ifftn(spec)


def _padded(phi: np.ndarray, grid: Grid):
    pads = [(n // 2, n // 2) for n in grid.shape]
    return np.pad(phi, pads), Grid(tuple(2 * n for n in grid.shape), grid.spacing)


def overlap(a: WaveFunction, b: WaveFunction) -> complex:
    """<b|a> up to a global phase."""
    a.grid.check_compatible(b.grid)
    grid = a.grid
    s = np.subtract(a.origin, b.origin)
    dp = np.subtract(a.momentum, b.momentum) / a.hbar
    # a relative boost beyond the Nyquist wavenumber aliases; such states
    # are orthogonal to double precision on any grid this package builds
    if np.any(np.abs(dp) >= np.array(grid.k_max())):
        return 0j
    phase = 1.0
    for y, q in zip(grid.axes(), dp):
        if q:
            phase = phase * np.exp(1j * q * y)
    if not np.any(s):
        return complex(np.sum(np.conj(b.data) * phase * a.data) * grid.dV)
    # translate b on a zero-padded grid so its periodic images stay away
    if np.any(np.abs(s) >= np.array(grid.extent)):
        return 0j
    pb, pgrid = _padded(b.data, grid)
    pa, _ = _padded(a.data * phase, grid)
    pb = shifted(pb, pgrid, s)
    return complex(np.sum(np.conj(pb) * pa) * grid.dV)


def fidelity(final: WaveFunction, target: WaveFunction) -> float:
    """|<target|final>| for normalised states."""
    return abs(overlap(final, target))


def rebase(state: WaveFunction, origin, momentum) -> WaveFunction:
    """Same lab state expressed in the frame (origin, momentum)."""
    origin = tuple(float(x) for x in origin)
    momentum = tuple(float(p) for p in momentum)
    s = np.subtract(origin, state.origin)
    phi = shifted(state.data, state.grid, s)
    dp = np.subtract(state.momentum, momentum) / state.hbar
    for y, q in zip(state.grid.axes(), dp):
        if q:
            phi = phi * np.exp(1j * q * y)
    return replace(state, data=phi, origin=origin, momentum=momentum)


# --- checkpoints ---------------------------------------------------------------

def save_checkpoint(path, state: WaveFunction) -> None:
    """Binary dump: magic, version, JSON header length, JSON header, then
    little-endian float64 pairs (re, im) in C order."""
    header = {
        "format": "iontransport-wavefunction",
        "version": CHECKPOINT_VERSION,
        "shape": list(state.grid.shape),
        "spacing": list(state.grid.spacing),
        "origin": list(state.origin),
        "momentum": list(state.momentum),
        "t": state.t,
        "hbar": state.hbar,
        "label": state.label,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    body = np.ascontiguousarray(state.data, dtype="<c16").view("<f8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<HI", CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(body.tobytes())


def load_checkpoint(path) -> WaveFunction:
    with open(path, "rb") as fh:
        if fh.read(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
            raise ValueError(f"{path} is not a wave-function checkpoint")
        version, n = struct.unpack("<HI", fh.read(6))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        header = json.loads(fh.read(n).decode("utf-8"))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    grid = Grid(tuple(header["shape"]), tuple(header["spacing"]))
    data = raw.view("<c16").reshape(grid.shape).astype(complex)
    return WaveFunction(data, grid, tuple(header["origin"]), tuple(header["momentum"]),
                        header["t"], header["hbar"], header.get("label", ""))
