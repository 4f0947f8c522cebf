import math

import numpy as np
import pytest

from cohforce.potentials import PotentialSpec, build_potential
from cohforce.scenarios import get_scenario, resolve_potentials


def test_triple_well_values():
    v = build_potential(PotentialSpec("triple_well"))
    assert v(np.array([3.0]))[0] == pytest.approx(3.0)
    assert v(np.array([0.0, 6.0, -6.0])) == pytest.approx([0, 0, 0], abs=1e-12)
    assert v(np.array([9.5]))[0] == 30.0
    dip = build_potential(PotentialSpec("triple_well_dip"))
    assert dip(np.array([0.0]))[0] == pytest.approx(-2.0)
    assert dip(np.array([1.0]))[0] == pytest.approx(3 * math.sin(math.pi / 6) ** 2 - 2 * math.exp(-1))


def test_driven_lattice():
    spec = PotentialSpec("driven_lattice", alpha=72 / math.pi ** 2)
    v = build_potential(spec)
    x = np.linspace(-9, 9, 37)
    assert v.time_dependent
    assert np.allclose(v(x, 0.0), 72 / math.pi ** 2 * np.sin(math.pi / 6 * x) ** 2)
    t = 0.1
    assert np.allclose(v(x, t), 72 / math.pi ** 2 * np.sin(math.pi / 6 * x + 0.25 * math.sin(3.0)) ** 2)


def test_square_shapes_switch_in_one_cell():
    x = np.array([-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
    barrier = build_potential(PotentialSpec("square_barrier", height=1.0))
    assert list(barrier(x)) == [0, 0.5, 1, 1, 1, 0.5, 0]
    well = build_potential(PotentialSpec("square_well", depth=1.0))
    assert list(well(x)) == [0, -0.5, -1, -1, -1, -0.5, 0]
    step = build_potential(PotentialSpec("step", height=2.0))
    assert list(step(x)) == [0, 0, 0, 1, 2, 2, 2]
    assert not barrier.time_dependent


def test_custom_table_interpolates():
    v = build_potential(PotentialSpec("custom_table", table_x=(0.0, 1.0), table_v=(0.0, 2.0)))
    assert v(np.array([0.25]))[0] == pytest.approx(0.5)


@pytest.mark.parametrize("kw", [
    {"kind": "trapezoid"},
    {"kind": "square_barrier", "half_width": -1.0},
    {"kind": "driven_lattice", "drive_frequency": 0.0},
    {"kind": "custom_table", "table_x": (1.0, 0.0), "table_v": (0.0, 1.0)},
    {"kind": "triple_well_dip", "dip_width": 0.0},
])
def test_invalid_specs(kw):
    with pytest.raises(ValueError):
        PotentialSpec(**kw)


def test_unresolved_height_is_rejected():
    with pytest.raises(ValueError):
        build_potential(PotentialSpec("square_barrier"))


@pytest.mark.parametrize("name,key", [("fig2_barrier", "height"), ("fig2_step", "height"),
                                      ("fig2_well", "depth")])
def test_fig2_heights_twice_energy_per_particle(name, key):
    # E = <-1/2 d2> = 1/2 for exp(-x^2), so heights resolve to 1.0
    specs, e = resolve_potentials(get_scenario(name))
    assert e == pytest.approx(0.5, abs=1e-12)
    assert getattr(specs["main"], key) == pytest.approx(1.0, abs=1e-12)
    explicit = resolve_potentials(get_scenario(name, height_factor=3.0))[0]["main"]
    assert getattr(explicit, key) == pytest.approx(1.5, abs=1e-12)
