"""The modular compensator: pointwise mixing with sampling-harmonic cosines.

Multiplying an interpolated signal by ``1 + 2*sum_{m=1..N} cos(2*pi*m*t/T)``
shifts the spectral replicas created by sampling back into the baseband; an
ideal lowpass then turns the per-bin distortion into the partial sinc sum
``H_N(f) = sum_{|m|<=N} sinc^p(f*T - m)``.  The mixer is phase-anchored so
that fine tick 0 is a coarse sample position.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .samplers import CoarseSamples, InterpKind, LatticeSamples, interpolate, interpolate2d
from .signal_core import ConfigurationError, DenseImage, DenseSignal
from .spectral import LowpassSpec, lowpass_array

__all__ = ["mixer_period", "cosine_mix", "cosine_mix2d", "modular_reconstruct", "modular_reconstruct2d"]


@lru_cache(maxsize=128)
def mixer_period(ticks_per_sample: int, modules: int) -> np.ndarray:
    """One period (length R) of the cosine mixer ``1 + 2*sum cos(2*pi*m*i/R)``."""
    if modules < 0:
        raise ConfigurationError(f"modules must be >= 0, got {modules}")
    if 2 * modules > ticks_per_sample:
        # harmonic m lives at m/R cycles per tick; beyond the fine-grid
        # Nyquist it would alias onto lower harmonics (or DC) and corrupt
        # the compensation instead of extending it
        raise ConfigurationError(
            f"{modules} modules need ticks_per_sample >= {2 * modules}, "
            f"got {ticks_per_sample}"
        )
    i = np.arange(ticks_per_sample)
    m = np.ones(ticks_per_sample)
    for harmonic in range(1, modules + 1):
        m += 2.0 * np.cos(2.0 * np.pi * harmonic * i / ticks_per_sample)
    m.setflags(write=False)
    return m


def _mix_axis(values: np.ndarray, ticks_per_sample: int, modules: int, axis: int) -> np.ndarray:
    if modules == 0:
        return values
    n = values.shape[axis]
    gains = np.tile(mixer_period(ticks_per_sample, modules), n // ticks_per_sample)
    shape = [1] * values.ndim
    shape[axis] = n
    return values * gains.reshape(shape)


def cosine_mix(s: DenseSignal, modules: int) -> DenseSignal:
    """Pointwise product with the harmonic mixer; ``modules=0`` is the identity."""
    if modules == 0:
        return s
    return s.with_values(_mix_axis(s.values, s.grid.ticks_per_sample, modules, axis=0))


def cosine_mix2d(img: DenseImage, modules: int) -> DenseImage:
    """Separable 2-D mixer: the product of the per-axis 1-D mixers."""
    if modules == 0:
        return img
    out = _mix_axis(img.values, img.grid_x.ticks_per_sample, modules, axis=1)
    out = _mix_axis(out, img.grid_y.ticks_per_sample, modules, axis=0)
    return img.with_values(out)


def modular_reconstruct(
    samples: CoarseSamples, kind: InterpKind, modules: int, lpf: LowpassSpec
) -> DenseSignal:
    """One-shot modular reconstruction: interpolate, mix, lowpass."""
    dense = interpolate(samples, kind)
    mixed = cosine_mix(dense, modules)
    return mixed.with_values(lowpass_array(mixed.values, lpf))


def modular_reconstruct2d(
    samples: LatticeSamples,
    kind: InterpKind,
    modules: int,
    lpf_x: LowpassSpec,
    lpf_y: LowpassSpec,
) -> DenseImage:
    """2-D modular reconstruction on the rectangular lattice."""
    dense = interpolate2d(samples, kind)
    mixed = cosine_mix2d(dense, modules)
    out = lowpass_array(mixed.values, lpf_x, axis=1)
    out = lowpass_array(out, lpf_y, axis=0)
    return mixed.with_values(out)
