"""Scenario configuration documents.

A config is a YAML mapping. ``scenario`` is required and selects a
catalogue entry; every other key overrides that entry::

    scenario: fig2_barrier
    states: [SF1, MI]
    n_points: 2048
    duration: 3.0
    region: [[-1, 1]]
    potentials:
      main: {kind: square_barrier, half_width: 1.0}

Top-level keys are the :class:`ScenarioConfig` fields. ``potentials`` maps
variant names to :class:`PotentialSpec` fields and is merged into the
catalogue variants. Any potential field may also appear at top level
(``drive_frequency: 30``), in which case it applies to every variant.
JSON-style flow syntax such as ``{scenario: fig1_free}`` is valid YAML.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import fields, replace

import yaml

from .potentials import PotentialSpec
from .scenarios import SCENARIOS, ScenarioConfig, ScenarioError, fit_snapshots

_FLOAT = ("x_min", "x_max", "dt", "duration", "width_exponent", "height_factor", "noon_phase",
          "g1_window", "rel_epsilon")
_INT = ("n_points", "record_every", "n_particles", "g1_stride", "snapshot_every",
        "snapshot_stride", "bohm_points")
_STR = ("boundary", "sf1_orbital")
_POT_FIELDS = tuple(f.name for f in fields(PotentialSpec))
_POT_SHORTCUTS = tuple(n for n in _POT_FIELDS if n != "kind")


class ConfigError(ValueError):
    """Invalid config document; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def _key_marks(text):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: (k.start_mark.line + 1, k.start_mark.column + 1) for k, _ in node.value}


def _number(key, v, kind):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"{key} must be an integer, got {v!r}")
        return int(v)
    return float(v)


def _float_tuple(key, v):
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{key} must be a list of numbers")
    return tuple(_number(key, x, float) for x in v)


def _region(v):
    if v is None:
        return None
    if not isinstance(v, (list, tuple)) or not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in v):
        raise ConfigError("region must be a list of [lo, hi] pairs or null")
    return tuple((_number("region", lo, float), _number("region", hi, float)) for lo, hi in v)


def _potential_overrides(name, params):
    if not isinstance(params, dict):
        raise ConfigError(f"potential {name!r} must be a mapping")
    out = {}
    for k, v in params.items():
        if k not in _POT_FIELDS:
            raise ConfigError(f"unknown potential key {k!r} in {name!r}; valid keys: {', '.join(_POT_FIELDS)}")
        if k == "kind":
            out[k] = str(v)
        elif k in ("table_x", "table_v"):
            out[k] = _float_tuple(k, v)
        elif k in ("height", "depth", "wall_position") and v is None:
            out[k] = None
        else:
            out[k] = _number(k, v, float)
    return out


def config_from_mapping(doc: dict) -> ScenarioConfig:
    """Resolve a parsed mapping against the catalogue."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    if "scenario" not in doc:
        raise ConfigError("missing required key 'scenario'")
    name = doc["scenario"]
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; valid choices: {', '.join(SCENARIOS)}")
    base = SCENARIOS[name]
    valid = {f.name for f in fields(ScenarioConfig)} | set(_POT_SHORTCUTS)
    over = {}
    shortcuts = {}
    for key, v in doc.items():
        if key == "scenario":
            continue
        if key not in valid:
            raise ConfigError(f"unknown key {key!r}")
        if key in _FLOAT:
            over[key] = _number(key, v, float)
        elif key in _INT:
            over[key] = _number(key, v, int)
        elif key in _STR:
            over[key] = str(v)
        elif key in ("states",):
            if not isinstance(v, (list, tuple)):
                raise ConfigError("states must be a list")
            over[key] = tuple(str(s) for s in v)
        elif key in ("centers", "g1_times", "bohm_times"):
            over[key] = _float_tuple(key, v)
        elif key == "region":
            over[key] = _region(v)
        elif key == "potentials":
            if not isinstance(v, dict) or not v:
                raise ConfigError("potentials must be a non-empty mapping of variant -> parameters")
            over[key] = v
        else:
            shortcuts.update(_potential_overrides("<top level>", {key: v}))

    try:
        variants = dict(base.potentials)
        if "potentials" in over:
            given = over.pop("potentials")
            merged = {}
            for vname, params in given.items():
                params = _potential_overrides(str(vname), params)
                if str(vname) in variants:
                    merged[str(vname)] = replace(variants[str(vname)], **params)
                elif "kind" not in params:
                    raise ConfigError(f"new potential variant {vname!r} needs an explicit kind")
                else:
                    merged[str(vname)] = PotentialSpec(**params)
            variants = merged
        if shortcuts:
            variants = {k: replace(s, **shortcuts) for k, s in variants.items()}
        cfg = replace(base, potentials=tuple(variants.items()), **fit_snapshots(base, over))
        return cfg.validate()
    except (ScenarioError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> ScenarioConfig:
    """Parse a YAML config document into a fully resolved config."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        msg = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ConfigError(f"syntax error: {msg}", mark.line + 1, mark.column + 1) from exc
        raise ConfigError(f"syntax error: {msg}") from exc
    try:
        return config_from_mapping(doc)
    except ConfigError as exc:
        if exc.line is None and isinstance(doc, dict):
            marks = _key_marks(text)
            for key in doc:
                if repr(key) in str(exc) or f"{key} " in str(exc):
                    if key in marks:
                        raise ConfigError(str(exc), *marks[key]) from exc
        raise


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: ScenarioConfig) -> dict:
    """Plain-data form of a resolved config (every field explicit)."""
    out = {}
    for f in fields(ScenarioConfig):
        v = getattr(config, f.name)
        if f.name == "potentials":
            v = {name: spec.as_dict() for name, spec in v}
        elif f.name == "region":
            v = None if v is None else [list(p) for p in v]
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def dump_config(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form; stable across runs and processes."""
    blob = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
