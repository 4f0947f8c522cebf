"""Uniform 1D grids, spectral differentiation and split-step propagation.

Units are natural (hbar = m = 1). The kinetic operator is ``-1/2 d^2/dx^2``.

Two boundary treatments are supported:

* periodic (default): plain FFT on ``n_points`` samples ``x_min + j*dx``;
* hard wall: odd extension about ``x_min`` and ``x_max``. The sample at
  ``x_min`` is the wall and is held at zero; the remaining ``n_points - 1``
  samples are the interior of a sine (DST-I) basis.

Quadrature everywhere is the uniform Riemann sum ``sum(f) * dx``. For
periodic band-limited fields this is the exact integral of the
trigonometric interpolant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy import fft as sfft

MIN_POINTS = 8
NORM_TOL = 1e-10


class PropagationError(FloatingPointError):
    """Raised when a propagated orbital stops being finite."""


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int
    periodic_wrap: bool = True

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max):
            raise ValueError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise ValueError(
                f"empty extent: x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be an integer >= {MIN_POINTS}, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + np.arange(self.n_points) * self.dx
        x.flags.writeable = False
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in standard DFT ordering (periodic grids)."""
        k = 2 * np.pi * sfft.fftfreq(self.n_points, d=self.dx)
        k.flags.writeable = False
        return k

    @cached_property
    def k_sine(self) -> np.ndarray:
        """Wavenumbers of the DST-I modes used by the hard-wall mode."""
        m = np.arange(1, self.n_points)
        k = np.pi * m / self.length
        k.flags.writeable = False
        return k

    def index_of(self, x0: float) -> int:
        """Index of the sample nearest to ``x0``."""
        return int(np.argmin(np.abs(self.x - x0)))


def make_grid(x_min: float, x_max: float, n_points: int, periodic_wrap: bool = True) -> Grid1D:
    """Build a :class:`Grid1D`; ``dx = (x_max - x_min) / n_points``."""
    return Grid1D(float(x_min), float(x_max), int(n_points), bool(periodic_wrap))


@dataclass(frozen=True, eq=False)
class Orbital:
    """Normalized single-particle wavefunction sampled on a grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"orbital has shape {values.shape}, grid expects ({self.grid.n_points},)")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        norm = self.norm()
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"orbital is not normalized: norm = {norm!r}")

    @classmethod
    def normalized(cls, grid: Grid1D, values) -> "Orbital":
        values = np.asarray(values, dtype=complex)
        n = integrate(np.abs(values) ** 2, grid)
        if not n > 0:
            raise ValueError("cannot normalize a zero field")
        return cls(grid, values / np.sqrt(n))

    def norm(self) -> float:
        return integrate(np.abs(self.values) ** 2, self.grid)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def overlap(self, other: "Orbital") -> complex:
        """``<self|other>``."""
        _check_same_grid(self.grid, other.grid)
        return complex(np.sum(np.conj(self.values) * other.values) * self.grid.dx)


def _check_same_grid(a: Grid1D, b: Grid1D):
    if a != b:
        raise ValueError("fields live on different grids")


def _field_and_grid(field, grid):
    if isinstance(field, Orbital):
        if grid is not None:
            _check_same_grid(field.grid, grid)
        return field.values, field.grid
    if grid is None:
        raise TypeError("a grid is required for bare arrays")
    arr = np.asarray(field)
    if arr.shape[-1] != grid.n_points:
        raise ValueError("field length does not match the grid")
    return arr, grid


def integrate(field, grid: Grid1D) -> float:
    """Uniform Riemann sum ``sum(field) * dx`` over the last axis."""
    arr = np.asarray(field)
    if arr.shape[-1] != grid.n_points:
        raise ValueError("field length does not match the grid")
    return np.sum(arr, axis=-1) * grid.dx


def second_derivative(field, grid: Grid1D | None = None) -> np.ndarray:
    """Spectral ``d^2/dx^2`` along the last axis.

    Exact (to round-off) for fields that are band-limited on the grid: plane
    waves with grid wavenumbers on a periodic grid, sine modes on a hard-wall
    grid.
    """
    values, grid = _field_and_grid(field, grid)
    values = np.asarray(values, dtype=complex)
    if grid.periodic_wrap:
        return sfft.ifft(-grid.k ** 2 * sfft.fft(values, axis=-1), axis=-1)
    out = np.zeros_like(values)
    out[..., 1:] = _idst(-grid.k_sine ** 2 * _dst(values[..., 1:]))
    return out


def kinetic_energy(field, grid: Grid1D | None = None) -> np.ndarray | float:
    """``<phi| -1/2 d^2/dx^2 |phi>`` evaluated in the spectral basis."""
    values, grid = _field_and_grid(field, grid)
    values = np.asarray(values, dtype=complex)
    if grid.periodic_wrap:
        c = sfft.fft(values, axis=-1)
        # Parseval: sum|f|^2 dx = sum|c|^2 dx / n
        return 0.5 * np.sum(grid.k ** 2 * np.abs(c) ** 2, axis=-1) * grid.dx / grid.n_points
    c = _dst(values[..., 1:])
    return 0.5 * np.sum(grid.k_sine ** 2 * np.abs(c) ** 2, axis=-1) * grid.dx / (2 * grid.n_points)


def _dst(a):
    return sfft.dst(a, type=1, axis=-1)


def _idst(a):
    return sfft.idst(a, type=1, axis=-1)


# Potentials are callables V(x, t) -> array. Objects exposing
# ``time_dependent = False`` are sampled once per propagation.
PotentialFn = Callable[[np.ndarray, float], np.ndarray]


def is_time_dependent(potential) -> bool:
    if potential is None:
        return False
    return bool(getattr(potential, "time_dependent", True))


def sample_potential(potential, grid: Grid1D, t: float) -> np.ndarray:
    if potential is None:
        return np.zeros(grid.n_points)
    v = np.asarray(potential(grid.x, t), dtype=float)
    if v.shape == ():
        v = np.full(grid.n_points, float(v))
    return v


def energy(field, potential, grid: Grid1D | None = None, t: float = 0.0):
    """Expectation value of ``-1/2 d^2/dx^2 + V(x, t)`` for each row."""
    values, grid = _field_and_grid(field, grid)
    v = sample_potential(potential, grid, t)
    return kinetic_energy(values, grid) + integrate(v * np.abs(values) ** 2, grid)


@dataclass(frozen=True)
class PropagationPlan:
    dt: float
    n_steps: int
    record_every: int = 1
    potential: PotentialFn | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt


class SplitStepPropagator:
    """Strang-split propagator for a batch of orbitals sharing one grid.

    One step is ``exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2)`` with ``V``
    evaluated at the mid-step time. The working buffer is owned by the
    propagator and never exposed; snapshots are copies.
    """

    def __init__(self, grid: Grid1D, dt: float, potential=None):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.grid = grid
        self.dt = dt
        self.potential = potential
        k2 = grid.k ** 2 if grid.periodic_wrap else grid.k_sine ** 2
        self._kinetic_phase = np.exp(-0.5j * k2 * dt)
        self._static_half = None
        if not is_time_dependent(potential):
            self._static_half = self._half_phase(0.0)

    def _half_phase(self, t_mid):
        v = sample_potential(self.potential, self.grid, t_mid)
        return np.exp(-0.5j * v * self.dt)

    def _kinetic(self, psi):
        if self.grid.periodic_wrap:
            return sfft.ifft(self._kinetic_phase * sfft.fft(psi, axis=-1), axis=-1)
        out = np.zeros_like(psi)
        out[..., 1:] = _idst(self._kinetic_phase * _dst(psi[..., 1:]))
        return out

    def run(self, values: np.ndarray, stops: Sequence[int], t0: float = 0.0
            ) -> Iterator[tuple[int, float, np.ndarray]]:
        """Yield ``(step, time, copy_of_values)`` at each requested step index.

        ``stops`` must be sorted; index 0 yields the initial values.
        """
        psi = np.array(values, dtype=complex)
        if not self.grid.periodic_wrap:
            psi[..., 0] = 0.0
        step = 0
        for stop in stops:
            while step < stop:
                half = self._static_half
                if half is None:
                    half = self._half_phase(t0 + (step + 0.5) * self.dt)
                psi = half * self._kinetic(half * psi)
                step += 1
            if not np.all(np.isfinite(psi)):
                raise PropagationError(
                    f"non-finite amplitude at t = {t0 + step * self.dt:g} (step {step}); "
                    "dt is too large or the potential is mis-scaled")
            yield step, t0 + step * self.dt, psi.copy()


def split_step_evolve(orbital: Orbital, plan: PropagationPlan, t0: float = 0.0
                      ) -> list[tuple[float, Orbital]]:
    """Propagate ``orbital`` and return ``(time, Orbital)`` snapshots.

    Snapshots are taken at step 0 and every ``plan.record_every`` steps
    after it, plus the final step.
    """
    stops = record_steps(plan.n_steps, plan.record_every)
    prop = SplitStepPropagator(orbital.grid, plan.dt, plan.potential)
    return [(t, Orbital(orbital.grid, psi))
            for _, t, psi in prop.run(orbital.values, stops, t0)]


def record_steps(n_steps: int, record_every: int) -> list[int]:
    stops = list(range(0, n_steps + 1, record_every))
    if stops[-1] != n_steps:
        stops.append(n_steps)
    return stops
