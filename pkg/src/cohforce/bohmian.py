"""Bohmian quantum potential, its one-body average and the quantum force.

``Q = -1/2 lap(R)/R`` with ``R = |Psi|``. ``R`` has kinks at nodes, so it is
never differentiated directly. For ``Psi = R exp(iS)``,

    lap(R)/R = Re(Psi* lap Psi)/rho + |Im(Psi* grad Psi)|^2 / rho^2,

and only the smooth ``Psi`` is differentiated, with 8th-order centered
finite differences (local stencils, so no Gibbs ringing leaks across nodes).
The density-weighted numerator ``Q rho`` is finite everywhere, which keeps
the configuration-space average well defined next to nodal lines. ``Q``
itself is reported only where ``rho > epsilon``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Orbital
from .observables import DEFAULT_REL_EPS
from .states import ManyBodyState, StateKind, state_density

# 8th-order centered stencils, offsets -4..4
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
HALF_WIDTH = 4
# centered first-derivative stencils by half-width (orders 2, 4, 6, 8)
_D1_BY_HW = {
    1: np.array([-1 / 2, 0.0, 1 / 2]),
    2: np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]),
    3: np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]),
    4: _D1,
}
DEFAULT_CONFIG_POINTS = 512


class UnsupportedStateError(ValueError):
    """The state has no configuration-space treatment here."""


@dataclass(frozen=True, eq=False)
class BohmField:
    x: np.ndarray
    q_values: np.ndarray
    f_values: np.ndarray
    mask: np.ndarray
    force_mask: np.ndarray
    spacing: float
    state_kind: str

    @property
    def masked_points(self) -> np.ndarray:
        return self.x[~self.mask]


def _odd_walls(f, hw):
    """Pad a 1D hard-wall field (zero at index 0 and at index n) by odd reflection."""
    left = -f[hw:0:-1]
    right = np.concatenate([[0.0], -f[:-hw:-1]])
    return np.concatenate([left, f, right])


def _stencil(f, h, coeffs, axis, odd_walls=False):
    hw = len(coeffs) // 2
    out = np.zeros_like(f)
    if odd_walls:
        ext = _odd_walls(f, hw)
        n = len(f)
        for j, c in enumerate(coeffs):
            if c:
                out += c * ext[j:j + n]
        return out
    for off, c in zip(range(-hw, hw + 1), coeffs):
        if c:
            out += c * np.roll(f, -off, axis=axis)
    return out


def fd_first(f, h, axis=-1, odd_walls=False):
    return _stencil(f, h, _D1, axis, odd_walls) / h


def fd_second(f, h, axis=-1, odd_walls=False):
    return _stencil(f, h, _D2, axis, odd_walls) / h ** 2


def _q_times_rho(psi, h, odd_walls=False):
    """``Q * rho`` over all axes of ``psi``, plus ``rho``.

    Stencils wrap periodically unless ``odd_walls`` (1D hard-wall grids).
    """
    rho = np.abs(psi) ** 2
    lap = np.zeros(psi.shape)
    flux2 = np.zeros(psi.shape)
    for ax in range(psi.ndim):
        lap += np.real(np.conj(psi) * fd_second(psi, h, ax, odd_walls))
        flux2 += np.imag(np.conj(psi) * fd_first(psi, h, ax, odd_walls)) ** 2
    # |j|^2/rho <= |grad psi|^2, bounded even where rho underflows
    phase_term = np.divide(flux2, rho, out=np.zeros_like(rho), where=rho > 0)
    return -0.5 * (lap + phase_term), rho


def _erode(mask, half_width=HALF_WIDTH):
    ok = mask.copy()
    for off in range(1, half_width + 1):
        ok &= np.roll(mask, off) & np.roll(mask, -off)
    return ok


def bohm_force(q_field: BohmField) -> BohmField:
    """Fill ``f = -dq/dx`` with the widest centered stencil that stays on the mask.

    The 8th-order stencil is used in the interior; towards the mask edge the
    order drops to 6, 4 and 2, so every masked point with both neighbors on
    the mask gets a force while no stencil ever reaches a masked-out value.
    """
    q, h = q_field.q_values, q_field.spacing
    f = np.zeros_like(q)
    done = np.zeros(q.shape, dtype=bool)
    for hw in range(HALF_WIDTH, 0, -1):
        ok = _erode(q_field.mask, hw) & ~done
        if ok.any():
            f[ok] = -_stencil(q, h, _D1_BY_HW[hw], -1)[ok] / h
        done |= ok
    return BohmField(q_field.x, q, f, q_field.mask, done, h, q_field.state_kind)


def _epsilon(rho, epsilon, rel_epsilon):
    return rel_epsilon * rho.max() if epsilon is None else epsilon


def quantum_potential_single(orbital: Orbital, epsilon: float | None = None,
                             rel_epsilon: float = DEFAULT_REL_EPS, state_kind: str = "single"
                             ) -> BohmField:
    """Q(x) and F(x) of one particle in ``orbital``.

    For a Gaussian ``exp(-x^2)`` this gives ``Q = 1 - 2x^2`` and ``F = 4x``.
    """
    grid = orbital.grid
    num, rho = _q_times_rho(orbital.values, grid.dx, not grid.periodic_wrap)
    mask = rho > _epsilon(rho, epsilon, rel_epsilon)
    q = np.divide(num, rho, out=np.zeros_like(rho), where=mask)
    field = BohmField(grid.x, q, np.zeros_like(q), mask, mask, grid.dx, state_kind)
    return bohm_force(field)


def _configuration_components(state, configuration_space):
    """Pure two-body components ``(weight, a, b, c, d, coef)`` of the state.

    Each component is ``(a(x1) b(x2) + coef * c(x1) d(x2)) / norm``.
    """
    kind = state.kind
    vals = [o.values for o in state.orbitals]
    if kind is StateKind.SF:
        if not configuration_space:
            return None
        if state.n_particles != 2:
            raise UnsupportedStateError("configuration-space SF pipeline needs N = 2")
        phi = vals[0]
        return [(1.0, [(1.0, phi, phi)])]
    if kind is StateKind.MI:
        if len(vals) != 2 or state.occupancies != (1, 1):
            raise UnsupportedStateError(
                f"MI with occupancies {state.occupancies} has no two-body treatment; "
                "only |11> over two orbitals is supported")
        a, b = vals
        s = 1 / np.sqrt(2)
        return [(1.0, [(s, a, b), (s, b, a)])]
    if state.n_particles != 2:
        raise UnsupportedStateError(f"{kind.value} needs exactly two particles, got {state.n_particles}")
    l, r = vals
    if kind is StateKind.NOON:
        s = 1 / np.sqrt(2)
        return [(1.0, [(s, l, l), (s * np.exp(1j * state.noon_phase), r, r)])]
    return [(0.5, [(1.0, l, l)]), (0.5, [(1.0, r, r)])]


def check_supported(state: ManyBodyState) -> None:
    """Raise :class:`UnsupportedStateError` if ``state`` has no averaged-Q path."""
    _configuration_components(state, False)


def _config_window(rho, eps, max_points):
    ok = np.flatnonzero(rho > eps)
    pad = 2 * HALF_WIDTH
    lo = max(0, ok[0] - pad)
    hi = min(len(rho) - 1, ok[-1] + pad)
    stride = max(1, int(np.ceil((hi - lo + 1) / max_points)))
    return np.arange(lo, hi + 1, stride), stride


def averaged_quantum_potential(state: ManyBodyState, epsilon: float | None = None,
                               rel_epsilon: float = DEFAULT_REL_EPS,
                               max_points: int = DEFAULT_CONFIG_POINTS,
                               configuration_space: bool = False) -> BohmField:
    """Density-weighted one-body average ``q(x1)`` of Q and its force.

    SF states factorize, so ``q = Q0 + (N - 1) <Q0>`` is taken from the
    single-orbital field; pass ``configuration_space=True`` to push a
    two-particle SF through the same two-body path as the correlated states
    (a built-in consistency check). Two-particle MI, NOON and mixture states
    are evaluated on a ``max_points``-square configuration grid cut from the
    populated part of the 1D grid.
    """
    comps = _configuration_components(state, configuration_space)
    kind = state.kind.value
    if comps is None:
        single = quantum_potential_single(state.orbitals[0], epsilon, rel_epsilon, kind)
        num, _ = _q_times_rho(state.orbitals[0].values, state.grid.dx, not state.grid.periodic_wrap)
        mean_q0 = np.sum(num) * state.grid.dx
        q = np.where(single.mask, single.q_values + (state.n_particles - 1) * mean_q0, 0.0)
        return BohmField(single.x, q, single.f_values, single.mask, single.force_mask,
                         single.spacing, kind)

    grid = state.grid
    rho_full = state_density(state)
    idx, stride = _config_window(rho_full, _epsilon(rho_full, epsilon, rel_epsilon), max_points)
    h = grid.dx * stride
    num1 = np.zeros(len(idx))
    rho1 = np.zeros(len(idx))
    for weight, terms in comps:
        psi = sum(c * np.multiply.outer(a[idx], b[idx]) for c, a, b in terms)
        num, rho = _q_times_rho(psi, h)
        num1 += weight * np.sum(num, axis=1) * h
        rho1 += weight * np.sum(rho, axis=1) * h
    mask = rho1 > _epsilon(rho1, epsilon, rel_epsilon)
    q = np.divide(num1, rho1, out=np.zeros_like(rho1), where=mask)
    field = BohmField(grid.x[idx], q, np.zeros_like(q), mask, mask, h, kind)
    return bohm_force(field)
