"""Initial orbitals and many-body state descriptors.

All states are built from non-interacting bosons, so a state is fully
described by a handful of single-particle orbitals and their occupations:

* ``SF``: every particle in one orbital ``phi0``;
* ``MI``: a Fock state with ``n`` particles in each of ``M`` orthonormal
  orbitals;
* ``NOON``: ``(|N,0> + e^{i phase}|0,N>)/sqrt(2)`` over two orthonormal
  orbitals ``phi_L``, ``phi_R``;
* ``MIXTURE``: the incoherent half/half mixture of "all particles in
  ``phi_L``" and "all particles in ``phi_R``".
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Grid1D, Orbital

ORTHO_TOL = 1e-8


class StateError(ValueError):
    pass


class StateKind(str, enum.Enum):
    SF = "SF"
    MI = "MI"
    NOON = "NOON"
    MIXTURE = "Mixture"


@dataclass(frozen=True, eq=False)
class ManyBodyState:
    kind: StateKind
    orbitals: tuple[Orbital, ...]
    occupancies: tuple[int, ...]
    noon_phase: float = 0.0

    @property
    def grid(self) -> Grid1D:
        return self.orbitals[0].grid

    @property
    def n_particles(self) -> int:
        if self.kind in (StateKind.NOON, StateKind.MIXTURE):
            return self.occupancies[0]
        return sum(self.occupancies)

    def with_orbitals(self, orbitals: Sequence[Orbital]) -> "ManyBodyState":
        """Same occupation structure on new (e.g. time-evolved) orbitals.

        No re-validation: unitary evolution preserves orthonormality.
        """
        return ManyBodyState(self.kind, tuple(orbitals), self.occupancies, self.noon_phase)


@dataclass(frozen=True, eq=False)
class PairDecomposition:
    phi_plus: Orbital
    phi_minus: Orbital
    lambda_plus: float
    lambda_minus: float
    overlap_s: float


def gaussian_orbital(grid: Grid1D, center: float, width_exponent: float = 1.0) -> Orbital:
    """Normalized real Gaussian with shape ``exp(-width_exponent * (x - center)^2)``."""
    if not width_exponent > 0:
        raise ValueError("width_exponent must be positive")
    width = 1.0 / np.sqrt(width_exponent)
    if center - grid.x_min < 3 * width or grid.x_max - center < 3 * width:
        warnings.warn(
            f"Gaussian at {center} lies within 3 widths of the grid boundary; "
            "its tail is truncated", RuntimeWarning, stacklevel=2)
    return Orbital.normalized(grid, np.exp(-width_exponent * (grid.x - center) ** 2))


def pair_decomposition(phi_L: Orbital, phi_R: Orbital) -> PairDecomposition:
    """Symmetric and antisymmetric combinations of two fragment orbitals.

    ``phi_pm = lambda_pm (phi_L +- phi_R)`` with
    ``lambda_pm = 1/sqrt(2 (1 +- s))`` and ``s = Re<phi_L|phi_R>``.
    """
    ov = phi_L.overlap(phi_R)
    s = ov.real
    if abs(ov.imag) > 1e-10:
        raise StateError("fragment overlap must be real for a +/- decomposition")
    if abs(s) >= 1 - 1e-10:
        raise StateError(f"degenerate fragment orbitals (overlap s = {s})")
    lp = 1.0 / np.sqrt(2 * (1 + s))
    lm = 1.0 / np.sqrt(2 * (1 - s))
    plus = Orbital(phi_L.grid, lp * (phi_L.values + phi_R.values))
    minus = Orbital(phi_L.grid, lm * (phi_L.values - phi_R.values))
    return PairDecomposition(plus, minus, lp, lm, s)


def overlap_matrix(orbitals: Sequence[Orbital]) -> np.ndarray:
    a = np.array([o.values for o in orbitals])
    return np.conj(a) @ a.T * orbitals[0].grid.dx


def _check_orthonormal(orbitals, what):
    s = overlap_matrix(orbitals)
    err = np.max(np.abs(s - np.eye(len(orbitals))))
    if err > ORTHO_TOL:
        raise StateError(f"{what} orbitals are not orthonormal (max deviation {err:.3g})")


def build_state(kind, orbitals: Sequence[Orbital], occupancies: Sequence[int] | None = None,
                noon_phase: float = 0.0) -> ManyBodyState:
    """Validate and assemble a :class:`ManyBodyState`.

    Default occupancies are one particle per orbital for SF and MI, and two
    particles for NOON and mixtures.
    """
    kind = StateKind(kind)
    orbitals = tuple(orbitals)
    if not orbitals:
        raise StateError("at least one orbital is required")
    grid = orbitals[0].grid
    if any(o.grid != grid for o in orbitals):
        raise StateError("orbitals live on different grids")

    if kind is StateKind.SF:
        if len(orbitals) != 1:
            raise StateError(f"SF takes exactly one orbital, got {len(orbitals)}")
        occ = tuple(occupancies) if occupancies is not None else (1,)
        if len(occ) != 1:
            raise StateError("SF takes a single occupancy")
    elif kind is StateKind.MI:
        occ = tuple(occupancies) if occupancies is not None else (1,) * len(orbitals)
        if len(occ) != len(orbitals):
            raise StateError("one occupancy per MI orbital is required")
        if len(set(occ)) != 1:
            raise StateError("MI orbitals must carry equal occupancies")
        _check_orthonormal(orbitals, "MI")
    else:
        if len(orbitals) != 2:
            raise StateError(f"{kind.value} takes exactly two orbitals (phi_L, phi_R)")
        if occupancies is None:
            occ = (2, 2)
        else:
            occ = tuple(occupancies)
            if len(occ) == 1:
                occ = occ * 2
            if len(occ) != 2 or occ[0] != occ[1]:
                raise StateError(f"{kind.value} takes one particle number N")
        if kind is StateKind.NOON:
            _check_orthonormal(orbitals, "NOON")

    if any(int(n) != n or n < 1 for n in occ):
        raise StateError(f"occupancies must be positive integers, got {occ}")
    occ = tuple(int(n) for n in occ)
    return ManyBodyState(kind, orbitals, occ, float(noon_phase) if kind is StateKind.NOON else 0.0)


def mi_density(mi: ManyBodyState) -> np.ndarray:
    """Per-particle density of an MI state: the mean of ``|chi_j|^2``."""
    if mi.kind is not StateKind.MI:
        raise StateError("an MI state is required")
    return np.mean([o.density for o in mi.orbitals], axis=0)


def sf1_orbital_from_mi_density(mi: ManyBodyState) -> Orbital:
    """Real non-negative orbital ``sqrt(rho_MI)``: same density, full coherence."""
    return Orbital(mi.grid, np.sqrt(mi_density(mi)))


def lowdin_orthonormalize(orbitals: Sequence[Orbital]) -> list[Orbital]:
    """Symmetric orthonormalization ``chi = S^{-1/2} phi``.

    Among all orthonormal sets spanning the inputs this one is closest to
    them in the least-squares sense, and it inherits any mirror symmetry of
    the input set.
    """
    orbitals = list(orbitals)
    grid = orbitals[0].grid
    s = overlap_matrix(orbitals)
    s = 0.5 * (s + s.conj().T)
    w, u = np.linalg.eigh(s)
    if w.min() <= 1e-12 * w.max():
        raise StateError(f"overlap matrix is numerically singular (eigenvalues {w})")
    s_inv_half = (u * w ** -0.5) @ u.conj().T
    a = np.array([o.values for o in orbitals])
    chi = s_inv_half.T @ a
    return [Orbital(grid, c) for c in chi]


def coherent_sum(orbitals: Sequence[Orbital], signs: Sequence[float] | None = None) -> Orbital:
    """Normalized ``sum_j sign_j phi_j``; alternating signs give an anti-correlated condensate."""
    grid = orbitals[0].grid
    if signs is None:
        signs = [1.0] * len(orbitals)
    total = sum(sg * o.values for sg, o in zip(signs, orbitals))
    return Orbital.normalized(grid, total)


def state_density(state: ManyBodyState) -> np.ndarray:
    """Per-particle density ``rho(x)`` straight from the orbitals."""
    dens = [o.density for o in state.orbitals]
    if state.kind is StateKind.SF:
        return dens[0]
    if state.kind is StateKind.MI:
        return np.mean(dens, axis=0)
    if state.kind is StateKind.NOON and state.n_particles == 1:
        return np.abs(_noon_single_orbital(state)) ** 2
    return 0.5 * (dens[0] + dens[1])


def _noon_single_orbital(state):
    # a one-particle N00N state is a coherent superposition
    l, r = (o.values for o in state.orbitals)
    return (l + np.exp(1j * state.noon_phase) * r) / np.sqrt(2)


def rdm_components(state: ManyBodyState) -> list[tuple[float, np.ndarray]]:
    """``(weight, orbital values)`` pairs with ``rho1 = sum w |f><f|``."""
    vals = [o.values for o in state.orbitals]
    if state.kind is StateKind.SF:
        return [(1.0, vals[0])]
    if state.kind is StateKind.MI:
        m = len(vals)
        return [(1.0 / m, v) for v in vals]
    if state.kind is StateKind.NOON and state.n_particles == 1:
        return [(1.0, _noon_single_orbital(state))]
    return [(0.5, vals[0]), (0.5, vals[1])]

