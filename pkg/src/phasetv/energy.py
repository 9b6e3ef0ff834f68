"""Discrete energy of the coupled cosine/sine model and its exact gradient.

The energy of a pair ``u = (x, y)`` given noisy channels ``(xh, yh)`` is::

    l1/2 sum (x - xh)^2 + l2/2 sum (y - yh)^2 + l3/2 sum (x^2 + y^2 - 1)^2
        + sum sqrt(|grad x|^2 + beta) + sum sqrt(|grad y|^2 + beta)

with forward differences and replicate ghosts. Sums use unit cell area.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import curvature, diffusivities, forward_magnitude
from .phase import PhasePair

__all__ = [
    "ModelParams",
    "EnergyBreakdown",
    "DominanceCertificate",
    "evaluate",
    "gradient",
    "check_diagonal_dominance",
]


@dataclass(frozen=True)
class ModelParams:
    lambda1: float = 2.5
    lambda2: float = 2.5
    lambda3: float = 5.0
    beta: float = 0.001

    def __post_init__(self):
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ValueError("lambda1 and lambda2 must be positive")
        if not self.lambda3 >= 0:
            raise ValueError("lambda3 must be non-negative")
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class EnergyBreakdown:
    fit_real: float
    fit_im: float
    pythagoras: float
    tv_real: float
    tv_im: float

    @property
    def total(self) -> float:
        return self.fit_real + self.fit_im + self.pythagoras + self.tv_real + self.tv_im

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "fit_real": self.fit_real,
            "fit_im": self.fit_im,
            "pythagoras": self.pythagoras,
            "tv_real": self.tv_real,
            "tv_im": self.tv_im,
        }


class DominanceCertificate(NamedTuple):
    ok: bool
    margin: float


def _check_shapes(pair: PhasePair, data: PhasePair) -> None:
    if pair.shape != data.shape:
        raise ValueError(f"shape mismatch: {pair.shape} vs {data.shape}")


def evaluate(pair: PhasePair, data: PhasePair, params: ModelParams) -> EnergyBreakdown:
    _check_shapes(pair, data)
    s = pair.real**2 + pair.im**2
    return EnergyBreakdown(
        fit_real=0.5 * params.lambda1 * float(np.sum((pair.real - data.real) ** 2)),
        fit_im=0.5 * params.lambda2 * float(np.sum((pair.im - data.im) ** 2)),
        pythagoras=0.5 * params.lambda3 * float(np.sum((s - 1.0) ** 2)),
        tv_real=float(np.sum(np.sqrt(forward_magnitude(pair.real) ** 2 + params.beta))),
        tv_im=float(np.sum(np.sqrt(forward_magnitude(pair.im) ** 2 + params.beta))),
    )


def gradient(pair: PhasePair, data: PhasePair, params: ModelParams) -> PhasePair:
    """Exact gradient of :func:`evaluate` with respect to both channels."""
    _check_shapes(pair, data)
    coupling = 2.0 * params.lambda3 * (pair.real**2 + pair.im**2 - 1.0)
    g_real = (
        -curvature(pair.real, params.beta)
        + params.lambda1 * (pair.real - data.real)
        + coupling * pair.real
    )
    g_im = (
        -curvature(pair.im, params.beta)
        + params.lambda2 * (pair.im - data.im)
        + coupling * pair.im
    )
    return PhasePair(g_real, g_im)


def check_diagonal_dominance(
    pair: PhasePair, params: ModelParams, shifted: bool = True
) -> DominanceCertificate:
    """Row-wise diagonal dominance of the lagged linear operator at ``pair``.

    ``shifted=True`` is the scheme with ``2*l3*u^k`` moved to the right-hand
    side; ``shifted=False`` keeps ``2*l3*(s - 1)`` on the diagonal, which loses
    dominance inside the unit circle once ``2*l3 >= l1``.
    """
    s = pair.real**2 + pair.im**2
    coupling = 2.0 * params.lambda3 * (s if shifted else s - 1.0)
    margin = np.inf
    for w, lam in ((pair.real, params.lambda1), (pair.im, params.lambda2)):
        links = diffusivities(w, params.beta)
        off = links.east + links.west + links.north + links.south
        diag = lam + coupling + off
        margin = min(margin, float(np.min(np.abs(diag) - off)))
    return DominanceCertificate(margin > 0.0, margin)
