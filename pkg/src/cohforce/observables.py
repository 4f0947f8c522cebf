"""One-body reduced density matrix, g1 coherence and scalar diagnostics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Grid1D, integrate
from .states import ManyBodyState, rdm_components, state_density

DENSE_LIMIT = 2048
DEFAULT_REL_EPS = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix1B:
    """Per-particle one-body RDM sampled on ``grid.x[indices]``.

    ``weight`` is the quadrature weight of one sample (``dx * stride``), so
    the trace is ``sum(diag) * weight``.
    """

    grid: Grid1D
    indices: np.ndarray
    values: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.grid.x[self.indices]

    @property
    def weight(self) -> float:
        if len(self.indices) < 2:
            return self.grid.dx
        return self.grid.dx * int(self.indices[1] - self.indices[0])

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.values))

    def trace(self) -> float:
        return float(np.sum(self.diagonal) * self.weight)

    def natural_occupations(self) -> np.ndarray:
        """Eigenvalues of the RDM operator, largest first; they sum to 1."""
        w = np.linalg.eigvalsh(self.values * self.weight)
        return w[::-1]


@dataclass(frozen=True, eq=False)
class CorrelationField:
    """g1(x, x'); entries outside ``mask`` are zero and must be ignored."""

    x: np.ndarray
    values: np.ndarray
    mask: np.ndarray


def _sample_indices(grid, stride=None, window=None):
    idx = np.arange(grid.n_points)
    if window is not None:
        lo, hi = window
        idx = idx[(grid.x >= lo) & (grid.x <= hi)]
    if stride is None:
        stride = max(1, int(np.ceil(len(idx) / DENSE_LIMIT)))
    return idx[::stride]


def one_body_rdm(state: ManyBodyState, stride: int | None = None,
                 window: tuple[float, float] | None = None) -> DensityMatrix1B:
    """Dense per-particle RDM ``sum_k w_k f_k(x) f_k*(x')``.

    Grids up to 2048 points are kept at full resolution; larger ones (or an
    explicit ``stride``/``window``) are decimated, since the RDM is only a
    diagnostic.
    """
    grid = state.grid
    idx = _sample_indices(grid, stride, window)
    comps = rdm_components(state)
    weights = np.array([w for w, _ in comps])
    f = np.array([v[idx] for _, v in comps])
    rho1 = (f.T * weights) @ np.conj(f)
    rho1 = 0.5 * (rho1 + rho1.conj().T)
    return DensityMatrix1B(grid, idx, rho1)


def density(state: ManyBodyState) -> np.ndarray:
    """Per-particle density ``rho(x) = rho1(x, x)`` on the full grid."""
    return state_density(state)


def g1(rdm: DensityMatrix1B, epsilon: float | None = None,
       rel_epsilon: float = DEFAULT_REL_EPS) -> CorrelationField:
    """First-order coherence ``rho1(x,x') / sqrt(rho(x) rho(x'))``.

    A point is valid when its density exceeds ``epsilon`` (default
    ``rel_epsilon * max(rho)``); a pair is valid when both points are.
    """
    rho = rdm.diagonal
    if epsilon is None:
        epsilon = rel_epsilon * rho.max()
    ok = rho > epsilon
    mask = np.outer(ok, ok)
    safe = np.sqrt(np.where(ok, rho, 1.0))
    vals = rdm.values / np.outer(safe, safe)
    vals = np.where(mask, vals, 0.0)
    return CorrelationField(rdm.x, vals, mask)


def position_variance(rho: np.ndarray, grid: Grid1D) -> float:
    """``<x^2> - <x>^2`` of a normalized density."""
    mean = integrate(grid.x * rho, grid)
    return float(integrate((grid.x - mean) ** 2 * rho, grid))


def region_weights(grid: Grid1D, region: Sequence[tuple[float, float]]) -> np.ndarray:
    """Quadrature weights (in units of dx) of the union of closed intervals.

    Sample ``x_i`` stands for the cell ``[x_i - dx/2, x_i + dx/2]`` and is
    weighted by the fraction of that cell inside the region. Edges on a grid
    point get 1/2 (trapezoid end correction), off-grid edges stay second
    order accurate, and complementary regions add up to the full integral.
    Overlapping intervals are not double counted.
    """
    w = np.zeros(grid.n_points)
    half = grid.dx / 2
    for lo, hi in region:
        if hi < lo:
            raise ValueError(f"interval ({lo}, {hi}) is reversed")
        cover = np.minimum(hi, grid.x + half) - np.maximum(lo, grid.x - half)
        w += np.clip(cover / grid.dx, 0.0, 1.0)
    np.minimum(w, 1.0, out=w)
    return w


def trapped_fraction(rho: np.ndarray, grid: Grid1D, region: Sequence[tuple[float, float]]) -> float:
    """Probability weight ``mu`` of ``rho`` inside ``region`` (union of intervals)."""
    if not region:
        return 0.0
    return float(np.sum(region_weights(grid, region) * rho) * grid.dx)
