"""Denoisers for the cosine/sine channel pair.

``fixed_point_denoise`` is the lagged-diffusivity scheme: each outer iteration
freezes the TV diffusivities and the coupling coefficient at ``u^k`` and runs
lexicographic Gauss-Seidel sweeps on the resulting diagonally dominant linear
system. ``gradient_descent_denoise`` is the explicit baseline and
``strobel_denoise`` filters each channel independently.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import ndimage

from .energy import EnergyBreakdown, ModelParams, check_diagonal_dominance, evaluate, gradient
from .grid import diffusivities
from .phase import PhasePair

__all__ = [
    "SolveConfig",
    "SolveReport",
    "DivergenceError",
    "fixed_point_denoise",
    "gradient_descent_denoise",
    "default_step",
    "strobel_denoise",
    "gauss_seidel_sweep",
    "lagged_system",
]


@dataclass(frozen=True)
class SolveConfig:
    params: ModelParams = field(default_factory=ModelParams)
    epsilon: float = 1e-7
    max_outer: int = 10_000
    gs_sweeps_per_outer: int = 1
    record_energy: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_outer < 1 or self.gs_sweeps_per_outer < 1:
            raise ValueError("max_outer and gs_sweeps_per_outer must be >= 1")


@dataclass
class SolveReport:
    method: str
    converged: bool = False
    outer_iterations: int = 0
    relative_changes: list[float] = field(default_factory=list)
    # energies[0] is the energy of the initial iterate
    energies: list[EnergyBreakdown] | None = None
    dominance_margins: list[float] = field(default_factory=list)
    wall_time: float = 0.0
    step: float | None = None

    @property
    def energy_totals(self) -> list[float] | None:
        if self.energies is None:
            return None
        return [e.total for e in self.energies]

    @property
    def final_relative_change(self) -> float | None:
        return self.relative_changes[-1] if self.relative_changes else None


class DivergenceError(RuntimeError):
    """The iteration produced non-finite values or a runaway energy."""

    def __init__(self, message: str, iteration: int, report: SolveReport):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
        self.report = report


@numba.njit(cache=True)
def gauss_seidel_sweep(u, east, west, north, south, diag, rhs):
    """One in-place lexicographic Gauss-Seidel sweep.

    Solves row ``(i, j)`` of ``diag*u - sum(weight*neighbour) = rhs``; west and
    south neighbours already hold the new values. Zero weights mark links into
    the ghost layer.
    """
    m, n = u.shape
    for i in range(m):
        for j in range(n):
            ie = min(i + 1, m - 1)
            iw = max(i - 1, 0)
            jn = min(j + 1, n - 1)
            js = max(j - 1, 0)
            num = (
                east[i, j] * u[ie, j]
                + west[i, j] * u[iw, j]
                + north[i, j] * u[i, jn]
                + south[i, j] * u[i, js]
                + rhs[i, j]
            )
            u[i, j] = num / diag[i, j]


def lagged_system(uk: np.ndarray, channel: int, data: PhasePair, params: ModelParams):
    """Frozen weights, diagonal and right-hand side for one channel at ``u^k``.

    ``uk`` is the stacked (2, m, n) iterate.
    """
    lam = params.lambda1 if channel == 0 else params.lambda2
    target = data.real if channel == 0 else data.im
    s = uk[0] ** 2 + uk[1] ** 2
    links = diffusivities(uk[channel], params.beta)
    diag = lam + 2.0 * params.lambda3 * s + links.east + links.west + links.north + links.south
    rhs = lam * target + 2.0 * params.lambda3 * uk[channel]
    return links, diag, rhs


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    den = np.linalg.norm(old)
    num = np.linalg.norm(new - old)
    return float(num / den) if den > 0 else float(num)


def fixed_point_denoise(data: PhasePair, config: SolveConfig) -> tuple[PhasePair, SolveReport]:
    """Lagged-diffusivity fixed point with Gauss-Seidel inner sweeps.

    Starts from the noisy pair and stops when the joint relative change of both
    channels drops below ``config.epsilon``.
    """
    params = config.params
    report = SolveReport("fixed-point", energies=[] if config.record_energy else None)
    t0 = time.perf_counter()
    u = data.stacked().copy()
    if config.record_energy:
        report.energies.append(evaluate(data, data, params))

    for k in range(config.max_outer):
        uk = u.copy()
        report.dominance_margins.append(
            check_diagonal_dominance(PhasePair.from_stacked(uk), params).margin
        )
        for c in (0, 1):
            links, diag, rhs = lagged_system(uk, c, data, params)
            for _ in range(config.gs_sweeps_per_outer):
                gauss_seidel_sweep(u[c], links.east, links.west, links.north, links.south, diag, rhs)

        report.outer_iterations = k + 1
        if not np.all(np.isfinite(u)):
            report.wall_time = time.perf_counter() - t0
            raise DivergenceError("non-finite values in fixed-point iterate", k + 1, report)
        rel = _relative_change(u, uk)
        report.relative_changes.append(rel)
        if config.record_energy:
            report.energies.append(evaluate(PhasePair.from_stacked(u), data, params))
        if rel < config.epsilon:
            report.converged = True
            break

    report.wall_time = time.perf_counter() - t0
    return PhasePair.from_stacked(u), report


def default_step(data: PhasePair, params: ModelParams) -> float:
    """Conservative explicit step from a bound on the Hessian spectrum."""
    s_max = float(np.max(data.real**2 + data.im**2))
    bound = (
        max(params.lambda1, params.lambda2)
        + 2.0 * params.lambda3 * 3.0 * s_max
        + 8.0 / np.sqrt(params.beta)
    )
    return 0.9 / bound


def gradient_descent_denoise(
    data: PhasePair, config: SolveConfig, tau: float | None = None
) -> tuple[PhasePair, SolveReport]:
    """Explicit descent ``u <- u - tau * grad F(u)`` from the noisy pair."""
    params = config.params
    if tau is None:
        tau = default_step(data, params)
    if not tau > 0:
        raise ValueError("tau must be positive")
    report = SolveReport(
        "gradient-descent", energies=[] if config.record_energy else None, step=tau
    )
    t0 = time.perf_counter()
    pair = data
    energy = evaluate(pair, data, params)
    if config.record_energy:
        report.energies.append(energy)
    rising = 0

    for k in range(config.max_outer):
        g = gradient(pair, data, params)
        old = pair.stacked()
        new = old - tau * g.stacked()
        report.outer_iterations = k + 1
        if not np.all(np.isfinite(new)):
            report.wall_time = time.perf_counter() - t0
            raise DivergenceError(
                f"non-finite values; try a step smaller than {tau:g}", k + 1, report
            )
        pair = PhasePair.from_stacked(new)
        with np.errstate(over="ignore", invalid="ignore"):
            new_energy = evaluate(pair, data, params)
        if not np.isfinite(new_energy.total):
            report.wall_time = time.perf_counter() - t0
            raise DivergenceError(
                f"energy overflowed; try a step smaller than {tau:g}", k + 1, report
            )
        rising = rising + 1 if new_energy.total > 1.1 * energy.total else 0
        energy = new_energy
        if config.record_energy:
            report.energies.append(energy)
        if rising >= 5:
            report.wall_time = time.perf_counter() - t0
            raise DivergenceError(
                f"energy grew for 5 consecutive steps; try a step smaller than {tau:g}",
                k + 1,
                report,
            )
        rel = _relative_change(new, old)
        report.relative_changes.append(rel)
        if rel < config.epsilon:
            report.converged = True
            break

    report.wall_time = time.perf_counter() - t0
    return pair, report


def strobel_denoise(data: PhasePair, filter: str = "mean3", sigma: float = 1.0) -> PhasePair:
    """Filter the two channels separately; no coupling, no renormalisation."""
    if filter == "mean3":
        smooth = lambda a: ndimage.uniform_filter(a, size=3, mode="nearest")
    elif filter == "gaussian":
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        smooth = lambda a: ndimage.gaussian_filter(a, sigma=sigma, mode="nearest")
    else:
        raise ValueError(f"unknown filter {filter!r}; expected 'mean3' or 'gaussian'")
    return PhasePair(smooth(data.real), smooth(data.im))
