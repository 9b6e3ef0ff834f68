"""Synthetic wrapped-phase scenes, SNR-calibrated noise, and quality metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .phase import PhasePair, pythagorean_deviation, reconstruct, wrap

__all__ = [
    "SceneSpec",
    "NoiseSpec",
    "MetricsRecord",
    "generate_scene",
    "add_noise",
    "snr_db",
    "mse",
    "iqi",
    "compute_metrics",
]

SCENE_KINDS = ("ramp_with_vertical_jump", "gaussian_peak", "custom_expression")

_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "where", "hypot", "arctan2", "pi")
}


@dataclass(frozen=True)
class SceneSpec:
    kind: str = "ramp_with_vertical_jump"
    rows: int = 128
    cols: int = 128
    phase_range: float = 14 * np.pi
    jump_height: float = np.pi
    seed: int = 0
    # numpy expression in the row/column index arrays ``i`` and ``j``
    expression: str | None = None

    def __post_init__(self):
        if self.kind not in SCENE_KINDS:
            raise ValueError(f"unknown scene kind {self.kind!r}")
        if self.rows < 2 or self.cols < 2:
            raise ValueError("scene needs at least 2x2 pixels")
        if self.kind == "custom_expression" and not self.expression:
            raise ValueError("custom_expression scenes need an expression")


@dataclass(frozen=True)
class NoiseSpec:
    target_snr_db: float
    seed: int = 0


@dataclass(frozen=True)
class MetricsRecord:
    mse_real: float
    mse_im: float
    iqi_real: float
    iqi_im: float
    snr_db: float
    pyth_mean: float
    pyth_max: float

    def as_dict(self) -> dict:
        return asdict(self)


def generate_scene(spec: SceneSpec) -> np.ndarray:
    """Absolute phase (radians) for the scene; a pure function of ``spec``."""
    i, j = np.meshgrid(
        np.arange(spec.rows, dtype=np.float64),
        np.arange(spec.cols, dtype=np.float64),
        indexing="ij",
    )
    if spec.kind == "ramp_with_vertical_jump":
        ramp = spec.phase_range * (i / (spec.rows - 1))
        return ramp + spec.jump_height * (j >= spec.cols / 2)
    if spec.kind == "gaussian_peak":
        ci, cj = (spec.rows - 1) / 2, (spec.cols - 1) / 2
        sigma = min(spec.rows, spec.cols) / 6
        return spec.phase_range * np.exp(-((i - ci) ** 2 + (j - cj) ** 2) / (2 * sigma**2))
    phi = eval(spec.expression, {"__builtins__": {}}, {**_EXPR_NAMESPACE, "i": i, "j": j})
    phi = np.broadcast_to(np.asarray(phi, dtype=np.float64), i.shape).copy()
    if not np.all(np.isfinite(phi)):
        raise ValueError("scene expression produced non-finite values")
    return phi


def snr_db(clean_psi: np.ndarray, noisy_psi: np.ndarray) -> float:
    """10 log10 of signal power over noise power on wrapped phase.

    The noise is the circular difference, so a re-wrap across the branch cut
    is not counted as a 2*pi error.
    """
    noise = wrap(np.asarray(noisy_psi) - np.asarray(clean_psi))
    signal_power = float(np.sum(np.asarray(clean_psi) ** 2))
    noise_power = float(np.sum(noise**2))
    if noise_power == 0.0:
        return np.inf
    return 10.0 * np.log10(signal_power / noise_power)


def add_noise(psi: np.ndarray, spec: NoiseSpec) -> tuple[np.ndarray, float]:
    """Add SNR-calibrated white Gaussian noise to wrapped phase and re-wrap.

    The draw is rescaled so its power hits ``spec.target_snr_db`` exactly.
    Generator: numpy PCG64 seeded with ``spec.seed``.
    """
    psi = np.asarray(psi, dtype=np.float64)
    signal_power = float(np.sum(psi**2))
    if signal_power == 0.0:
        raise ValueError("cannot calibrate SNR for an all-zero signal")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    z = rng.standard_normal(psi.shape)
    scale = np.sqrt(signal_power / (10.0 ** (spec.target_snr_db / 10.0) * float(np.sum(z**2))))
    noisy = wrap(psi + scale * z)
    return noisy, snr_db(psi, noisy)


def mse(result: np.ndarray, reference: np.ndarray) -> float:
    return float(np.mean((np.asarray(reference) - np.asarray(result)) ** 2))


def iqi(result: np.ndarray, reference: np.ndarray) -> float:
    """1 - sum((y - yhat)^2) / sum(y^2) with ``reference`` as y.

    Not the Wang-Bovik universal quality index; argument order matters.
    """
    reference = np.asarray(reference)
    energy = float(np.sum(reference**2))
    if energy == 0.0:
        raise ValueError("IQI undefined for an all-zero reference channel")
    return 1.0 - float(np.sum((reference - np.asarray(result)) ** 2)) / energy


def compute_metrics(
    result: PhasePair, reference: PhasePair, noisy: np.ndarray
) -> MetricsRecord:
    if result.shape != reference.shape or np.shape(noisy) != reference.shape:
        raise ValueError("result, reference and noisy phase must share a shape")
    dev = pythagorean_deviation(result)
    return MetricsRecord(
        mse_real=mse(result.real, reference.real),
        mse_im=mse(result.im, reference.im),
        iqi_real=iqi(result.real, reference.real),
        iqi_im=iqi(result.im, reference.im),
        snr_db=snr_db(reconstruct(reference), noisy),
        pyth_mean=float(np.mean(dev)),
        pyth_max=float(np.max(dev)),
    )
