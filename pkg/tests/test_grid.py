import numpy as np
import pytest

from cohforce.grid import (Grid1D, Orbital, PropagationError, PropagationPlan, SplitStepPropagator,
                           energy, integrate, kinetic_energy, make_grid, record_steps,
                           second_derivative, split_step_evolve)
from cohforce.states import gaussian_orbital


def test_grid_geometry():
    g = make_grid(-32, 32, 2048)
    assert g.dx == pytest.approx(1 / 32)
    assert g.x[0] == -32 and g.x[-1] == pytest.approx(32 - 1 / 32)
    assert g.index_of(0.5) == 1040 and g.x[1040] == 0.5
    assert g.k[1] == pytest.approx(2 * np.pi / 64)


@pytest.mark.parametrize("args", [(0, 0, 64), (1, 0, 64), (-1, 1, 4)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_orbital_requires_normalization():
    g = make_grid(-10, 10, 256)
    with pytest.raises(ValueError):
        Orbital(g, np.ones(256))
    o = Orbital.normalized(g, np.ones(256))
    assert o.norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        o.values[0] = 1.0


def test_spectral_second_derivative_periodic_and_hard_wall():
    g = make_grid(0, 2 * np.pi, 128)
    assert np.allclose(second_derivative(np.sin(3 * g.x), g), -9 * np.sin(3 * g.x), atol=1e-10)
    box = make_grid(0, 1, 128, periodic_wrap=False)
    mode = np.sin(4 * np.pi * box.x)
    assert np.allclose(second_derivative(mode, box), -(4 * np.pi) ** 2 * mode, atol=1e-8)


def test_gaussian_kinetic_energy_is_one_half():
    # <-1/2 d2> for exp(-x^2) is exactly 1/2
    g = make_grid(-32, 32, 2048)
    assert kinetic_energy(gaussian_orbital(g, -3.0)) == pytest.approx(0.5, abs=1e-12)


def test_oscillator_ground_state_is_stationary():
    g = make_grid(-20, 20, 512)
    psi0 = Orbital.normalized(g, np.exp(-g.x ** 2 / 2))
    out = split_step_evolve(psi0, PropagationPlan(1e-3, 1000, 1000, lambda x, t: 0.5 * x ** 2))
    # stationary up to the O(dt^2) splitting error
    assert np.max(np.abs(out[-1][1].density - psi0.density)) < 1e-6
    assert energy(psi0.values, lambda x, t: 0.5 * x ** 2, g) == pytest.approx(0.5, abs=1e-10)


def test_box_eigenmode_phase():
    box = make_grid(0, 1, 256, periodic_wrap=False)
    psi0 = Orbital.normalized(box, np.sin(2 * np.pi * box.x))
    out = split_step_evolve(psi0, PropagationPlan(1e-4, 500))
    t, psi = out[-1]
    expected = psi0.values * np.exp(-0.5j * (2 * np.pi) ** 2 * t)
    assert np.max(np.abs(psi.values - expected)) < 1e-9


class _UniformDrive:
    time_dependent = True

    def __call__(self, x, t):
        return np.full_like(x, np.cos(t))


def test_time_dependent_potential_sampled_mid_step():
    # a uniform V(t) = cos t only imprints the phase -sin t (midpoint rule error ~ dt^2)
    g = make_grid(-20, 20, 256)
    psi0 = gaussian_orbital(g, 0.0)
    free = split_step_evolve(psi0, PropagationPlan(1e-2, 100))[-1][1].values
    driven = split_step_evolve(psi0, PropagationPlan(1e-2, 100, potential=_UniformDrive()))[-1][1].values
    assert np.max(np.abs(driven - free * np.exp(-1j * np.sin(1.0)))) < 1e-5


def test_second_order_convergence_in_dt():
    g = make_grid(-32, 32, 1024)
    psi0 = gaussian_orbital(g, -3.0)
    barrier = lambda x, t: np.exp(-x ** 2)

    def final(dt):
        return split_step_evolve(psi0, PropagationPlan(dt, int(round(1 / dt)), potential=barrier))[-1][1].values

    ref = final(1e-3 / 4)
    e1 = np.max(np.abs(final(1e-2) - ref))
    e2 = np.max(np.abs(final(5e-3) - ref))
    assert e1 / e2 == pytest.approx(4.0, rel=0.1)


def test_nan_raises_propagation_error():
    g = make_grid(-10, 10, 128)
    prop = SplitStepPropagator(g, 1e-3, lambda x, t: np.full_like(x, np.nan))
    with pytest.raises(PropagationError):
        list(prop.run(gaussian_orbital(g, 0.0).values[None, :], [5]))


def test_record_steps():
    assert record_steps(10, 3) == [0, 3, 6, 9, 10]
    assert record_steps(4, 1) == [0, 1, 2, 3, 4]


def test_integrate_is_riemann_sum():
    g = Grid1D(0.0, 1.0, 10)
    assert integrate(np.ones(10), g) == pytest.approx(1.0)
