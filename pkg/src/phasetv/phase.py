"""Wrapped phase, the cosine/sine channel pair, and the unit-circle diagnostic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import as_field

__all__ = [
    "PhasePair",
    "UndefinedPhaseError",
    "wrap",
    "decompose",
    "reconstruct",
    "pythagorean_deviation",
    "normalize",
]


class UndefinedPhaseError(ValueError):
    """Raised when a pixel has both channels exactly zero."""

    def __init__(self, pixel):
        self.pixel = tuple(int(k) for k in pixel)
        super().__init__(f"phase undefined at pixel {self.pixel}: both channels are zero")


@dataclass(frozen=True)
class PhasePair:
    """Cosine (``real``) and sine (``im``) channels of a unit-amplitude phase map."""

    real: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        real = as_field(self.real, "real channel")
        im = as_field(self.im, "imaginary channel")
        if real.shape != im.shape:
            raise ValueError(f"channel shapes differ: {real.shape} vs {im.shape}")
        object.__setattr__(self, "real", real)
        object.__setattr__(self, "im", im)

    @property
    def shape(self) -> tuple[int, int]:
        return self.real.shape

    def stacked(self) -> np.ndarray:
        """Both channels as a (2, m, n) array."""
        return np.stack([self.real, self.im])

    @classmethod
    def from_stacked(cls, u: np.ndarray) -> "PhasePair":
        return cls(u[0], u[1])

    def scaled(self, c: float) -> "PhasePair":
        return PhasePair(c * self.real, c * self.im)


def _principal(angle: np.ndarray) -> np.ndarray:
    # arctan2 returns -pi for (x<0, y=-0.0); the half-open range keeps +pi
    angle = np.asarray(angle, dtype=np.float64)
    return np.where(angle <= -np.pi, np.pi, angle)


def wrap(phi) -> np.ndarray:
    """Wrap absolute phase into (-pi, pi] as arctan2(sin phi, cos phi)."""
    phi = np.asarray(phi, dtype=np.float64)
    if not np.all(np.isfinite(phi)):
        raise ValueError("phase contains non-finite values")
    return _principal(np.arctan2(np.sin(phi), np.cos(phi)))


def decompose(psi) -> PhasePair:
    psi = as_field(psi, "wrapped phase")
    return PhasePair(np.cos(psi), np.sin(psi))


def reconstruct(pair: PhasePair) -> np.ndarray:
    """Quadrant-aware phase of the pair; amplitude need not be one."""
    zero = (pair.real == 0.0) & (pair.im == 0.0)
    if zero.any():
        raise UndefinedPhaseError(np.argwhere(zero)[0])
    return _principal(np.arctan2(pair.im, pair.real))


def pythagorean_deviation(pair: PhasePair) -> np.ndarray:
    """|real^2 + im^2 - 1| per pixel."""
    return np.abs(pair.real**2 + pair.im**2 - 1.0)


def normalize(pair: PhasePair) -> PhasePair:
    """Divide both channels by the pixel amplitude (opt-in for non-unit data)."""
    amp = np.hypot(pair.real, pair.im)
    if np.any(amp == 0.0):
        raise UndefinedPhaseError(np.argwhere(amp == 0.0)[0])
    return PhasePair(pair.real / amp, pair.im / amp)
