"""Coherence-induced quantum forces in fragmented non-interacting boson gases.

Exact independent-orbital dynamics for superfluid, Mott-insulator, NOON and
mixed states of a few bosons, with one-body coherence and Bohmian
quantum-force diagnostics.
"""

__version__ = "0.1.0"

from .grid import Grid1D, Orbital, PropagationError, PropagationPlan, make_grid, split_step_evolve
from .states import ManyBodyState, StateKind, build_state, gaussian_orbital, pair_decomposition
from .observables import g1, one_body_rdm, position_variance, trapped_fraction
from .bohmian import BohmField, averaged_quantum_potential, quantum_potential_single
from .potentials import PotentialSpec, build_potential
from .scenarios import ScenarioConfig, ScenarioResult, get_scenario, run_scenario

__all__ = [
    "Grid1D", "Orbital", "PropagationError", "PropagationPlan", "make_grid", "split_step_evolve",
    "ManyBodyState", "StateKind", "build_state", "gaussian_orbital", "pair_decomposition",
    "g1", "one_body_rdm", "position_variance", "trapped_fraction",
    "BohmField", "averaged_quantum_potential", "quantum_potential_single",
    "PotentialSpec", "build_potential",
    "ScenarioConfig", "ScenarioResult", "get_scenario", "run_scenario",
]
