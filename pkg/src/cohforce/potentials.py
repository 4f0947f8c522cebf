"""Potential catalogue.

Every potential is a callable ``V(x, t)``; ``time_dependent`` tells the
propagator whether it may sample once. Square shapes switch in a single
grid cell: samples exactly on an edge get the mean of the two sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

KINDS = ("free", "square_well", "square_barrier", "step", "triple_well",
         "triple_well_dip", "driven_lattice", "custom_table")


@dataclass(frozen=True)
class PotentialSpec:
    """Parameters for one catalogue potential.

    ``height`` (barrier, step) and ``depth`` (well) may be left as ``None``
    and resolved at run time from the energy per particle. Lattice kinds use
    ``alpha * sin^2(wavenumber * x + drive_amplitude * sin(drive_frequency * t))``.
    """

    kind: str = "free"
    height: float | None = None
    depth: float | None = None
    half_width: float = 1.0
    step_position: float = 0.0
    alpha: float = 3.0
    wavenumber: float = math.pi / 6
    wall_position: float | None = 9.0
    wall_height: float = 30.0
    dip_depth: float = 2.0
    dip_width: float = 1.0
    drive_amplitude: float = 0.25
    drive_frequency: float = 30.0
    table_x: tuple[float, ...] = field(default=())
    table_v: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.wavenumber == 0:
            raise ValueError("wavenumber must be non-zero")
        if self.kind == "triple_well_dip" and self.dip_width <= 0:
            raise ValueError("dip_width must be positive")
        if self.kind == "driven_lattice" and self.drive_frequency == 0:
            raise ValueError("driven_lattice needs a non-zero drive_frequency")
        if self.wall_position is not None and self.wall_position <= 0:
            raise ValueError("wall_position must be positive")
        if self.kind == "custom_table":
            if len(self.table_x) < 2 or len(self.table_x) != len(self.table_v):
                raise ValueError("custom_table needs matching table_x/table_v of length >= 2")
            if np.any(np.diff(self.table_x) <= 0):
                raise ValueError("table_x must be strictly increasing")

    @property
    def needs_energy_scale(self) -> bool:
        return ((self.kind in ("square_barrier", "step") and self.height is None)
                or (self.kind == "square_well" and self.depth is None))

    def resolved(self, energy_per_particle: float, factor: float) -> "PotentialSpec":
        """Fill a missing height/depth with ``factor * energy_per_particle``."""
        scale = factor * energy_per_particle
        if self.kind in ("square_barrier", "step") and self.height is None:
            return replace(self, height=scale)
        if self.kind == "square_well" and self.depth is None:
            return replace(self, depth=scale)
        return self

    def as_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v)
                for f in fields(self)}


def _edge_mix(inside, on_edge, value):
    return value * np.where(inside, 1.0, np.where(on_edge, 0.5, 0.0))


def _box(x, a, value):
    tol = 1e-9 * max(1.0, a)
    ax = np.abs(x)
    return _edge_mix(ax < a - tol, np.abs(ax - a) <= tol, value)


class Potential:
    """Evaluable ``V(x, t)`` built from a :class:`PotentialSpec`."""

    def __init__(self, spec: PotentialSpec):
        self.spec = spec
        self.time_dependent = spec.kind == "driven_lattice"
        if spec.needs_energy_scale:
            raise ValueError(f"{spec.kind} height is unresolved; call spec.resolved() first")

    def __call__(self, x, t=0.0):
        s = self.spec
        x = np.asarray(x, dtype=float)
        if s.kind == "free":
            return np.zeros_like(x)
        if s.kind == "square_barrier":
            return _box(x, s.half_width, s.height)
        if s.kind == "square_well":
            return _box(x, s.half_width, -s.depth)
        if s.kind == "step":
            tol = 1e-9 * max(1.0, abs(s.step_position))
            return _edge_mix(x > s.step_position + tol, np.abs(x - s.step_position) <= tol, s.height)
        if s.kind in ("triple_well", "triple_well_dip"):
            v = s.alpha * np.sin(s.wavenumber * x) ** 2
            if s.wall_position is not None:
                v = np.where(np.abs(x) <= s.wall_position, v, s.wall_height)
            if s.kind == "triple_well_dip":
                v = v - s.dip_depth * np.exp(-(x / s.dip_width) ** 2)
            return v
        if s.kind == "driven_lattice":
            shift = s.drive_amplitude * np.sin(s.drive_frequency * t)
            return s.alpha * np.sin(s.wavenumber * x + shift) ** 2
        return np.interp(x, s.table_x, s.table_v)

    def __repr__(self):
        return f"Potential({self.spec.kind})"


def build_potential(spec: PotentialSpec) -> Potential:
    return Potential(spec)


def lattice_crests(spec: PotentialSpec, x_lo: float, x_hi: float) -> list[float]:
    """Maxima of the undriven ``sin^2`` lattice inside ``[x_lo, x_hi]``."""
    period = math.pi / abs(spec.wavenumber)
    first = math.ceil((x_lo - period / 2) / period)
    out = []
    j = first
    while (c := period / 2 + j * period) <= x_hi:
        if c >= x_lo:
            out.append(c)
        j += 1
    return out
