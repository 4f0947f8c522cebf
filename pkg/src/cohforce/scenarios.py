"""Canonical experiments: fragment states propagated through catalogue potentials.

A scenario evolves one or more initial states (``SF1``, ``SF2``, ``MI``,
``NOON``, ``Mixture`` or, for a single fragment, ``SF``) under one or more
potential variants and records, on a shared time axis, the position
variance, trapped fraction, energy and norm of each. Non-interacting
particles make this exact: each orbital of a state is propagated on its
own and the many-body observables are rebuilt from the orbitals.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from . import bohmian
from .grid import (Grid1D, Orbital, SplitStepPropagator, energy, integrate, kinetic_energy,
                   make_grid, record_steps)
from .observables import (CorrelationField, g1, one_body_rdm, position_variance,
                          trapped_fraction)
from .potentials import PotentialSpec, build_potential
from .states import (ManyBodyState, StateKind, build_state, coherent_sum, gaussian_orbital,
                     lowdin_orthonormalize, overlap_matrix, pair_decomposition,
                     sf1_orbital_from_mi_density, state_density)

STATE_LABELS = ("SF", "SF1", "SF2", "MI", "NOON", "Mixture")
SF1_MODES = ("density", "plus")
BOUNDARIES = ("periodic", "hard_wall")


class ScenarioError(ValueError):
    """Semantically invalid scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    states: tuple[str, ...]
    centers: tuple[float, ...]
    potentials: tuple[tuple[str, PotentialSpec], ...]
    x_min: float = -32.0
    x_max: float = 32.0
    n_points: int = 2048
    boundary: str = "periodic"
    dt: float = 1e-3
    duration: float = 5.0
    record_every: int = 10
    region: tuple[tuple[float, float], ...] | None = None
    width_exponent: float = 1.0
    height_factor: float = 2.0
    sf1_orbital: str = "density"
    n_particles: int = 2
    noon_phase: float = 0.0
    g1_times: tuple[float, ...] = ()
    bohm_times: tuple[float, ...] = ()
    g1_window: float = 8.0
    g1_stride: int = 4
    snapshot_every: int = 10
    snapshot_stride: int = 4
    rel_epsilon: float = 1e-8
    bohm_points: int = 512

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def potential_map(self) -> dict[str, PotentialSpec]:
        return dict(self.potentials)

    def series_labels(self) -> list[tuple[str, str, str]]:
        """``(label, state, variant)`` in output order."""
        multi = len(self.potentials) > 1
        return [(f"{s}_{v}" if multi else s, s, v)
                for v, _ in self.potentials for s in self.states]

    def step_of(self, t: float) -> int:
        step = int(round(t / self.dt))
        if abs(step * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ScenarioError(f"time {t} is not a multiple of dt = {self.dt}")
        return step

    def validate(self) -> "ScenarioConfig":
        if not self.states:
            raise ScenarioError("at least one state is required")
        for s in self.states:
            if s not in STATE_LABELS:
                raise ScenarioError(f"unknown state {s!r}; choose from {', '.join(STATE_LABELS)}")
        if len(set(self.states)) != len(self.states):
            raise ScenarioError("states must be distinct")
        if not self.potentials:
            raise ScenarioError("at least one potential is required")
        if len({v for v, _ in self.potentials}) != len(self.potentials):
            raise ScenarioError("potential variant names must be distinct")
        if not self.centers:
            raise ScenarioError("at least one fragment center is required")
        if self.x_max <= self.x_min:
            raise ScenarioError("x_max must exceed x_min")
        if self.n_points < 8:
            raise ScenarioError("n_points must be >= 8")
        if self.boundary not in BOUNDARIES:
            raise ScenarioError(f"boundary must be one of {BOUNDARIES}")
        for c in self.centers:
            if not self.x_min < c < self.x_max:
                raise ScenarioError(f"fragment center {c} lies outside the grid [{self.x_min}, {self.x_max}]")
        if not self.dt > 0:
            raise ScenarioError("dt must be positive")
        if not self.duration > 0:
            raise ScenarioError("duration must be positive")
        if self.n_steps < 1:
            raise ScenarioError("duration is shorter than one time step")
        if self.record_every < 1 or self.snapshot_every < 1 or self.snapshot_stride < 1 or self.g1_stride < 1:
            raise ScenarioError("record_every, snapshot_every, snapshot_stride and g1_stride must be >= 1")
        if self.region is not None:
            for lo, hi in self.region:
                if hi <= lo:
                    raise ScenarioError(f"region interval ({lo}, {hi}) is empty")
                if lo < self.x_min or hi > self.x_max:
                    raise ScenarioError(f"region interval ({lo}, {hi}) leaves the grid")
        if self.sf1_orbital not in SF1_MODES:
            raise ScenarioError(f"sf1_orbital must be one of {SF1_MODES}")
        if self.n_particles < 1:
            raise ScenarioError("n_particles must be >= 1")
        for t in self.g1_times + self.bohm_times:
            if not 0 <= t <= self.duration + 1e-12:
                raise ScenarioError(f"snapshot time {t} is outside [0, {self.duration}]")
            self.step_of(t)
        if self.g1_window <= 0 or not self.rel_epsilon > 0 or self.bohm_points < 16:
            raise ScenarioError("g1_window and rel_epsilon must be positive, bohm_points >= 16")
        return self


def _spec(kind, **kw):
    return PotentialSpec(kind=kind, **kw)


def _catalogue() -> dict[str, ScenarioConfig]:
    fig2 = dict(states=("SF1", "MI"), region=((-1.0, 1.0),), sf1_orbital="plus", g1_times=(3.0,))
    fig3 = dict(states=("SF1", "MI"), centers=(-6.0, 6.0), region=((-3.0, 3.0),), sf1_orbital="plus",
                duration=40.0, record_every=100)
    lattice = dict(alpha=72 / math.pi ** 2, wavenumber=math.pi / 6, drive_amplitude=0.25,
                   drive_frequency=30.0)
    return {
        "fig1_free": ScenarioConfig(
            "fig1_free", ("SF1", "MI", "SF2"), (-1.0, 1.0), (("main", _spec("free")),),
            g1_times=(0.0, 3.0), bohm_times=(0.0,)),
        "fig2_well": ScenarioConfig(
            "fig2_well", centers=(-3.0, 3.0), potentials=(("main", _spec("square_well")),), **fig2),
        "fig2_step": ScenarioConfig(
            "fig2_step", centers=(-2.0, 2.0), potentials=(("main", _spec("step")),), **fig2),
        "fig2_barrier": ScenarioConfig(
            "fig2_barrier", centers=(-3.0, 3.0), potentials=(("main", _spec("square_barrier")),), **fig2),
        "fig3_triple": ScenarioConfig(
            "fig3_triple", potentials=(("main", _spec("triple_well")),), **fig3),
        "fig3_triple_dip": ScenarioConfig(
            "fig3_triple_dip", potentials=(("main", _spec("triple_well_dip")),), **fig3),
        "fig4_driven": ScenarioConfig(
            "fig4_driven", ("SF1", "MI", "SF2"), (-6.0, 0.0, 6.0),
            (("main", _spec("driven_lattice", **lattice)),),
            duration=1.0, region=((-4.0, -2.0), (2.0, 4.0)), g1_times=(0.0,)),
        "figS4_single": ScenarioConfig(
            "figS4_single", ("SF",), (6.0,),
            (("nodip", _spec("triple_well")), ("dip", _spec("triple_well_dip"))),
            duration=40.0, record_every=100, region=((-9.0, 3.0),)),
    }


SCENARIOS = _catalogue()


def scenario_names() -> list[str]:
    return list(SCENARIOS)


def get_scenario(name: str, **overrides) -> ScenarioConfig:
    if name not in SCENARIOS:
        raise ScenarioError(f"unknown scenario {name!r}; valid choices: {', '.join(SCENARIOS)}")
    return replace(SCENARIOS[name], **fit_snapshots(SCENARIOS[name], overrides)).validate()


def fit_snapshots(base: ScenarioConfig, overrides: dict) -> dict:
    """Drop catalogue snapshot times beyond an overridden duration.

    Times given explicitly in ``overrides`` are kept (and validated).
    """
    out = dict(overrides)
    end = out.get("duration", base.duration)
    for key in ("g1_times", "bohm_times"):
        if key not in out:
            out[key] = tuple(t for t in getattr(base, key) if t <= end + 1e-12)
    return out


def make_scenario_grid(config: ScenarioConfig) -> Grid1D:
    return make_grid(config.x_min, config.x_max, config.n_points, config.boundary == "periodic")


def fragment_orbitals(config: ScenarioConfig, grid: Grid1D) -> list[Orbital]:
    return [gaussian_orbital(grid, c, config.width_exponent) for c in sorted(config.centers)]


def initial_states(config: ScenarioConfig, grid: Grid1D | None = None) -> dict[str, ManyBodyState]:
    """Build every requested initial state from the fragment Gaussians.

    Two fragments: ``MI = |11>`` over ``phi_pm``; ``SF1`` is ``sqrt(rho_MI)``
    or ``phi_+`` (``sf1_orbital``); ``SF2 = phi_-``; NOON and mixtures use
    the Lowdin-orthonormalized fragments. Three or more fragments:
    ``SF1 ~ sum phi_j``, ``SF2 ~ sum (-1)^j phi_j``, ``MI = |11...1>`` over
    Lowdin orbitals. A single fragment supports only ``SF``.
    """
    grid = grid or make_scenario_grid(config)
    frags = fragment_orbitals(config, grid)
    out: dict[str, ManyBodyState] = {}
    n = len(frags)
    if n == 1:
        for s in config.states:
            if s != "SF":
                raise ScenarioError(f"state {s} needs at least two fragments; use 'SF'")
            out[s] = build_state("SF", frags)
        return out
    if "SF" in config.states:
        raise ScenarioError("'SF' is the single-fragment state; use SF1/SF2 with several fragments")

    if n == 2:
        pair = pair_decomposition(*frags)
        mi = build_state("MI", [pair.phi_plus, pair.phi_minus])
        for s in config.states:
            if s == "MI":
                out[s] = mi
            elif s == "SF1":
                phi0 = sf1_orbital_from_mi_density(mi) if config.sf1_orbital == "density" else pair.phi_plus
                out[s] = build_state("SF", [phi0])
            elif s == "SF2":
                out[s] = build_state("SF", [pair.phi_minus])
            else:
                kind = StateKind.NOON if s == "NOON" else StateKind.MIXTURE
                out[s] = build_state(kind, lowdin_orthonormalize(frags), (config.n_particles,),
                                     config.noon_phase)
        return out

    for s in config.states:
        if s == "MI":
            out[s] = build_state("MI", lowdin_orthonormalize(frags))
        elif s == "SF1":
            out[s] = build_state("SF", [coherent_sum(frags)])
        elif s == "SF2":
            out[s] = build_state("SF", [coherent_sum(frags, [(-1) ** j for j in range(n)])])
        else:
            raise ScenarioError(f"{s} is defined for two fragments only")
    return out


def energy_per_particle(config: ScenarioConfig, grid: Grid1D | None = None) -> float:
    """Kinetic energy of the leftmost fragment, which starts where V = 0."""
    grid = grid or make_scenario_grid(config)
    return float(kinetic_energy(fragment_orbitals(config, grid)[0]))


def resolve_potentials(config: ScenarioConfig, grid: Grid1D | None = None
                       ) -> tuple[dict[str, PotentialSpec], float]:
    e = energy_per_particle(config, grid)
    return {v: spec.resolved(e, config.height_factor) for v, spec in config.potentials}, e


@dataclass(eq=False)
class ScenarioResult:
    config: ScenarioConfig
    labels: list[str]
    times: np.ndarray
    series: dict[str, dict[str, np.ndarray]]
    density_times: np.ndarray
    density_x: np.ndarray
    densities: dict[str, np.ndarray]
    g1_fields: dict[tuple[str, float], CorrelationField] = field(default_factory=dict)
    bohm_fields: dict[tuple[str, float], bohmian.BohmField] = field(default_factory=dict)
    order_parameters: dict[tuple[str, float], Orbital] = field(default_factory=dict)
    final_states: dict[str, ManyBodyState] = field(default_factory=dict)
    diagnostics: dict[str, dict[str, float]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def series_names(self) -> tuple[str, ...]:
        return ("dx2", "mu", "energy", "norm") if self.config.region is not None \
            else ("dx2", "energy", "norm")

    def at(self, t: float) -> int:
        """Index of the recorded time closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


def _run_one(config, grid, state, spec, label):
    potential = build_potential(spec)
    n_steps = config.n_steps
    rec = record_steps(n_steps, config.record_every)
    rec_set = set(rec)
    snap_set = set(rec[::config.snapshot_every])
    g1_steps = {config.step_of(t): t for t in config.g1_times}
    bohm_steps = {config.step_of(t): t for t in config.bohm_times}
    stops = sorted(rec_set | set(g1_steps) | set(bohm_steps))

    names = ("dx2", "mu", "energy", "norm") if config.region is not None else ("dx2", "energy", "norm")
    cols = {k: [] for k in names}
    dens_rows = []
    g1s, bohms, ops = {}, {}, {}
    norm_err = 0.0
    ortho_err = 0.0
    window = (-config.g1_window, config.g1_window)

    prop = SplitStepPropagator(grid, config.dt, potential)
    values = np.array([o.values for o in state.orbitals])
    current = state
    for step, t, psi in prop.run(values, stops):
        current = state.with_orbitals([Orbital(grid, p) for p in psi])
        if step in rec_set:
            rho = state_density(current)
            cols["dx2"].append(position_variance(rho, grid))
            if config.region is not None:
                cols["mu"].append(trapped_fraction(rho, grid, config.region))
            e_orb = energy(psi, potential, grid, t)
            if state.kind is StateKind.NOON and state.n_particles == 1:
                single = (psi[0] + np.exp(1j * state.noon_phase) * psi[1]) / np.sqrt(2)
                cols["energy"].append(float(energy(single, potential, grid, t)))
            else:
                cols["energy"].append(float(np.mean(e_orb)))
            cols["norm"].append(float(integrate(rho, grid)))
            norm_err = max(norm_err, float(np.max(np.abs(integrate(np.abs(psi) ** 2, grid) - 1))))
            if len(psi) > 1 and state.kind in (StateKind.MI, StateKind.NOON):
                s = overlap_matrix(current.orbitals)
                ortho_err = max(ortho_err, float(np.max(np.abs(s - np.eye(len(psi))))))
            if step in snap_set:
                dens_rows.append(rho[::config.snapshot_stride])
        if step in g1_steps:
            tt = g1_steps[step]
            g1s[(label, tt)] = g1(one_body_rdm(current, config.g1_stride, window),
                                  rel_epsilon=config.rel_epsilon)
            if state.kind is StateKind.SF:
                ops[(label, tt)] = current.orbitals[0]
        if step in bohm_steps:
            tt = bohm_steps[step]
            bohms[(label, tt)] = bohmian.averaged_quantum_potential(
                current, rel_epsilon=config.rel_epsilon, max_points=config.bohm_points)

    series = {k: np.array(v) for k, v in cols.items()}
    diag = {"max_orbital_norm_error": norm_err, "max_orthonormality_error": ortho_err}
    return series, np.array(dens_rows), g1s, bohms, ops, current, diag


def run_scenario(config: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    """Propagate every (potential variant, state) pair of ``config``.

    Runs are independent; with ``threads > 1`` they execute concurrently,
    and the output order is fixed by the configuration either way.
    """
    config.validate()
    started = time.perf_counter()
    grid = make_scenario_grid(config)
    states = initial_states(config, grid)
    specs, e_particle = resolve_potentials(config, grid)
    if config.bohm_times:
        for s in states.values():
            bohmian.check_supported(s)

    jobs = config.series_labels()

    def work(job):
        label, s, variant = job
        return _run_one(config, grid, states[s], specs[variant], label)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(work, jobs))
    else:
        outs = [work(j) for j in jobs]

    rec = record_steps(config.n_steps, config.record_every)
    times = np.array([s * config.dt for s in rec])
    result = ScenarioResult(
        config=config, labels=[j[0] for j in jobs], times=times, series={},
        density_times=times[::config.snapshot_every],
        density_x=grid.x[::config.snapshot_stride], densities={})
    for (label, _, _), (series, dens, g1s, bohms, ops, final, diag) in zip(jobs, outs):
        result.series[label] = series
        result.densities[label] = dens
        result.g1_fields.update(g1s)
        result.bohm_fields.update(bohms)
        result.order_parameters.update(ops)
        result.final_states[label] = final
        result.diagnostics[label] = diag
    result.metadata = {
        "energy_per_particle": e_particle,
        "resolved_potentials": {v: sp.as_dict() for v, sp in specs.items()},
        "conventions": _conventions(config),
        "wall_clock_seconds": time.perf_counter() - started,
    }
    if config.region is not None:
        # end-of-run trapped fractions; the sign of variant differences is reported, not asserted
        result.metadata["final_mu"] = {lb: float(result.series[lb]["mu"][-1]) for lb in result.labels}
    return result


def _conventions(config):
    notes = {
        "units": "natural units, hbar = m = 1",
        "variance": "full <x^2> - <x>^2",
        "height_rule": f"unset heights/depths = {config.height_factor} x kinetic energy of the leftmost fragment",
        "boundary": config.boundary,
        "sf1_orbital": config.sf1_orbital,
    }
    if any(sp.kind == "step" for _, sp in config.potentials):
        notes["step_orientation"] = ("elevated for x > step_position; the right fragment starts on the "
                                     "plateau; height scaled by the low-side fragment energy")
    return notes


def static_potentials(config: ScenarioConfig) -> bool:
    return all(sp.kind != "driven_lattice" for _, sp in config.potentials)


def run_many(configs: Mapping[str, ScenarioConfig], threads: int = 1) -> dict[str, ScenarioResult]:
    return {name: run_scenario(cfg, threads) for name, cfg in configs.items()}
