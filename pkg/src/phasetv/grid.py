"""Scalar fields on a uniform unit grid with replicate (Neumann) ghost cells.

Index convention: ``i`` is the row (first axis), ``j`` the column. Every
stencil reaches at most one cell outside the grid, so a single clamped ghost
layer implements the zero-flux boundary condition.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "GradMagnitudes",
    "as_field",
    "sample_with_neumann",
    "forward_differences",
    "forward_magnitude",
    "grad_magnitudes",
    "curvature",
    "diffusivities",
]


class GradMagnitudes(NamedTuple):
    """Gradient norms at the east, west, north and south stencil positions."""

    east: np.ndarray
    west: np.ndarray
    north: np.ndarray
    south: np.ndarray


def as_field(values, name: str = "field") -> np.ndarray:
    """Validate and return ``values`` as a C-contiguous float64 2D array."""
    f = np.ascontiguousarray(values, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {f.shape}")
    if f.shape[0] < 2 or f.shape[1] < 2:
        raise ValueError(f"{name} needs at least 2x2 cells, got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError(f"{name} contains non-finite values")
    return f


def sample_with_neumann(f: np.ndarray, i: int, j: int) -> float:
    """Read ``f[i, j]`` allowing one replicate ghost layer around the grid."""
    m, n = f.shape
    if not (-1 <= i <= m and -1 <= j <= n):
        raise IndexError(f"index ({i}, {j}) is beyond the ghost layer of a {m}x{n} field")
    return float(f[min(max(i, 0), m - 1), min(max(j, 0), n - 1)])


def _pad(f: np.ndarray) -> np.ndarray:
    return np.pad(f, 1, mode="edge")


def forward_differences(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-sided forward differences along rows and columns.

    The difference across the far boundary is zero because the ghost cell
    replicates the last row/column.
    """
    dx = np.zeros_like(f)
    dy = np.zeros_like(f)
    dx[:-1, :] = f[1:, :] - f[:-1, :]
    dy[:, :-1] = f[:, 1:] - f[:, :-1]
    return dx, dy


def forward_magnitude(f: np.ndarray) -> np.ndarray:
    """|grad f| from forward differences at each pixel."""
    dx, dy = forward_differences(f)
    return np.sqrt(dx * dx + dy * dy)


def grad_magnitudes(f: np.ndarray) -> GradMagnitudes:
    """The four gradient norms used by the curvature stencil.

    ``east`` and ``north`` are both the forward-difference norm at ``(i, j)``,
    ``west`` is the norm at ``(i-1, j)`` and ``south`` the norm at ``(i, j-1)``,
    all evaluated with replicate ghost reads.
    """
    f = as_field(f)
    p = _pad(f)
    c = p[1:-1, 1:-1]
    # east/north: sqrt((w[i+1,j]-w[i,j])^2 + (w[i,j+1]-w[i,j])^2)
    east = np.sqrt((p[2:, 1:-1] - c) ** 2 + (p[1:-1, 2:] - c) ** 2)
    # west: sqrt((w[i,j]-w[i-1,j])^2 + (w[i-1,j+1]-w[i-1,j])^2)
    west = np.sqrt((c - p[:-2, 1:-1]) ** 2 + (p[:-2, 2:] - p[:-2, 1:-1]) ** 2)
    # south: sqrt((w[i+1,j-1]-w[i,j-1])^2 + (w[i,j]-w[i,j-1])^2)
    south = np.sqrt((p[2:, :-2] - p[1:-1, :-2]) ** 2 + (c - p[1:-1, :-2]) ** 2)
    return GradMagnitudes(east, west, east.copy(), south)


def curvature(f: np.ndarray, beta: float) -> np.ndarray:
    """div(grad w / sqrt(|grad w|^2 + beta)) by the four-flux difference formula."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    f = as_field(f)
    g = grad_magnitudes(f)
    p = _pad(f)
    c = p[1:-1, 1:-1]
    return (
        (p[2:, 1:-1] - c) / np.sqrt(g.east**2 + beta)
        - (c - p[:-2, 1:-1]) / np.sqrt(g.west**2 + beta)
        + (p[1:-1, 2:] - c) / np.sqrt(g.north**2 + beta)
        - (c - p[1:-1, :-2]) / np.sqrt(g.south**2 + beta)
    )


def diffusivities(f: np.ndarray, beta: float) -> GradMagnitudes:
    """Lagged diffusivities 1/sqrt(|grad w|^2 + beta) on the four links of each pixel.

    Links that point into the ghost layer carry zero flux and get weight 0.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    g = grad_magnitudes(f)
    east = 1.0 / np.sqrt(g.east**2 + beta)
    west = 1.0 / np.sqrt(g.west**2 + beta)
    north = 1.0 / np.sqrt(g.north**2 + beta)
    south = 1.0 / np.sqrt(g.south**2 + beta)
    east[-1, :] = 0.0
    west[0, :] = 0.0
    north[:, -1] = 0.0
    south[:, 0] = 0.0
    return GradMagnitudes(east, west, north, south)
