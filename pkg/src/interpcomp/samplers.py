"""The sampling operator: coarse samples out of a dense signal, and their
re-interpolation with Sample-and-Hold or Linear Interpolation, 1-D and 2-D.

Both interpolators are zero phase on the fine grid.  The hold window is
centered on each sample; since ``ticks_per_sample`` is even, the window
boundary lands exactly midway between two samples, and that tick takes the
average of the two equidistant samples.  Tie-breaking toward either sample
would introduce a half-tick linear phase, which would leak into every
measured distortion gain and contraction factor (the compensation analysis
assumes a real, phase-free sinc^p response).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .signal_core import ConfigurationError, DenseImage, DenseSignal, GridSpec

__all__ = [
    "InterpKind",
    "CoarseSamples",
    "LatticeSamples",
    "sample",
    "sample_lattice",
    "interpolate",
    "interpolate2d",
]


class InterpKind(enum.Enum):
    """Zero-order hold vs first-order (linear) interpolation."""

    SAMPLE_AND_HOLD = "sh"
    LINEAR = "li"

    @property
    def distortion_exponent(self) -> int:
        """Power of the sinc distortion: 1 for the hold, 2 for linear."""
        return 1 if self is InterpKind.SAMPLE_AND_HOLD else 2


@dataclass(frozen=True)
class CoarseSamples:
    """One value per sampling interval; values[n] sits at fine tick n * ticks_per_sample."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.grid.n_coarse:
            raise ConfigurationError(
                f"CoarseSamples: expected {self.grid.n_coarse} values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("CoarseSamples: values must all be finite")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class LatticeSamples:
    """Samples on a rectangular lattice: values[row, col] at (row*T_y, col*T_x)."""

    grid_y: GridSpec
    grid_x: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        shape = (self.grid_y.n_coarse, self.grid_x.n_coarse)
        if arr.shape != shape:
            raise ConfigurationError(
                f"LatticeSamples: expected shape {shape}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("LatticeSamples: values must all be finite")
        object.__setattr__(self, "values", arr)


def sample(x: DenseSignal) -> CoarseSamples:
    """Pick the dense value at every coarse position: values[n] = x[n * R]."""
    return CoarseSamples(x.grid, x.values[:: x.grid.ticks_per_sample].copy())


def sample_lattice(img: DenseImage) -> LatticeSamples:
    """2-D sampling on the rectangular lattice."""
    ry = img.grid_y.ticks_per_sample
    rx = img.grid_x.ticks_per_sample
    return LatticeSamples(img.grid_y, img.grid_x, img.values[::ry, ::rx].copy())


def _interp_axis(values: np.ndarray, grid: GridSpec, kind: InterpKind, axis: int) -> np.ndarray:
    """Interpolate coarse values along one axis onto the fine grid (circular)."""
    r = grid.ticks_per_sample
    vals = np.moveaxis(np.asarray(values, dtype=np.float64), axis, -1)
    nxt = np.roll(vals, -1, axis=-1)
    if kind is InterpKind.SAMPLE_AND_HOLD:
        # one block of R ticks per sample: first half holds s[n], the midway
        # tick averages s[n] and s[n+1], the rest holds s[n+1]
        w_next = np.zeros(r)
        w_next[r // 2] = 0.5
        w_next[r // 2 + 1 :] = 1.0
    else:
        w_next = np.arange(r) / r
    fine = vals[..., :, np.newaxis] * (1.0 - w_next) + nxt[..., :, np.newaxis] * w_next
    fine = fine.reshape(*vals.shape[:-1], grid.n_fine)
    return np.moveaxis(fine, -1, axis)


def interpolate(s: CoarseSamples, kind: InterpKind) -> DenseSignal:
    """Re-interpolate coarse samples onto the fine grid (S&H or linear, circular)."""
    return DenseSignal(s.grid, _interp_axis(s.values, s.grid, kind, axis=0))


def interpolate2d(s: LatticeSamples, kind: InterpKind) -> DenseImage:
    """Separable 2-D interpolation: rows first, then columns (the order commutes)."""
    fine = _interp_axis(s.values, s.grid_x, kind, axis=1)
    fine = _interp_axis(fine, s.grid_y, kind, axis=0)
    return DenseImage(s.grid_y, s.grid_x, fine)
