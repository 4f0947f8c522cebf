"""Figure-ready CSV export and the run manifest.

Every number is written as ``%.17g``, which round-trips IEEE doubles
exactly, so reloaded CSVs are bitwise equal to the in-memory arrays.
Entries that are undefined (masked g1 pairs, Q below the density floor)
are written as ``nan``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_hash, config_to_dict
from .scenarios import ScenarioResult

FMT = "%.17g"
_OWNED = ("timeseries.csv", "density_*.csv", "g1_*.csv", "bohm_*.csv", "orbital_*.csv",
          "manifest.json")


@dataclass(frozen=True)
class RunManifest:
    version: str
    config_hash: str
    config: dict
    resolved: dict
    wall_clock_seconds: float
    files: dict[str, str]

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "config_hash": self.config_hash,
            "config": self.config,
            "resolved": self.resolved,
            "wall_clock_seconds": self.wall_clock_seconds,
            "files": self.files,
        }, indent=2, sort_keys=False)


def time_tag(t: float) -> str:
    return f"t{t:g}"


def _write(path: Path, table: np.ndarray, header: str | None = None):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        if header:
            fh.write(header + "\n")
        np.savetxt(fh, np.atleast_2d(table), fmt=FMT, delimiter=",")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def timeseries_table(result: ScenarioResult) -> tuple[np.ndarray, list[str]]:
    names = result.series_names
    cols = [result.times]
    header = ["time"]
    for label in result.labels:
        for n in names:
            cols.append(result.series[label][n])
            header.append(f"{label}_{n}")
    return np.column_stack(cols), header


def density_table(result: ScenarioResult, label: str) -> np.ndarray:
    top = np.concatenate([[np.nan], result.density_x])
    body = np.column_stack([result.density_times, result.densities[label]])
    return np.vstack([top, body])


def g1_table(field) -> np.ndarray:
    """Rows ``x_i, Re g(x_i,x'_0), Im g(x_i,x'_0), ...``; first row repeats x' per pair."""
    n = len(field.x)
    vals = np.where(field.mask, field.values, np.nan + 1j * np.nan)
    inter = np.empty((n, 2 * n))
    inter[:, 0::2] = vals.real
    inter[:, 1::2] = vals.imag
    top = np.concatenate([[np.nan], np.repeat(field.x, 2)])
    return np.vstack([top, np.column_stack([field.x, inter])])


def bohm_table(field) -> np.ndarray:
    q = np.where(field.mask, field.q_values, np.nan)
    f = np.where(field.force_mask, field.f_values, np.nan)
    return np.column_stack([field.x, q, f])


def orbital_table(orbital) -> np.ndarray:
    return np.column_stack([orbital.grid.x, orbital.values.real, orbital.values.imag])


def _prepare(out_dir: Path, overwrite: bool):
    out_dir.mkdir(parents=True, exist_ok=True)
    existing = [p for pat in _OWNED for p in out_dir.glob(pat)]
    if existing and not overwrite:
        raise FileExistsError(f"{out_dir} already holds results ({existing[0].name}); "
                              "pass overwrite=True (--overwrite) to replace them")
    for p in existing:
        p.unlink()


def export_result(result: ScenarioResult, out_dir, overwrite: bool = False) -> RunManifest:
    """Write all CSVs plus ``manifest.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    _prepare(out_dir, overwrite)
    written: list[Path] = []

    table, header = timeseries_table(result)
    written.append(out_dir / "timeseries.csv")
    _write(written[-1], table, ",".join(header))

    for label in result.labels:
        written.append(out_dir / f"density_{label}.csv")
        _write(written[-1], density_table(result, label))
    for (label, t), field in result.g1_fields.items():
        written.append(out_dir / f"g1_{label}_{time_tag(t)}.csv")
        _write(written[-1], g1_table(field))
    for (label, t), field in result.bohm_fields.items():
        written.append(out_dir / f"bohm_{label}_{time_tag(t)}.csv")
        _write(written[-1], bohm_table(field), "x,q,f")
    for (label, t), orb in result.order_parameters.items():
        written.append(out_dir / f"orbital_{label}_{time_tag(t)}.csv")
        _write(written[-1], orbital_table(orb), "x,re,im")

    meta = dict(result.metadata)
    wall = float(meta.pop("wall_clock_seconds", 0.0))
    meta["diagnostics"] = result.diagnostics
    manifest = RunManifest(
        version=__version__,
        config_hash=config_hash(result.config),
        config=config_to_dict(result.config),
        resolved=meta,
        wall_clock_seconds=wall,
        files={p.name: _sha256(p) for p in written},
    )
    (out_dir / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    return manifest


def read_csv(path, skip_header: bool = False) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1 if skip_header else 0, ndmin=2)
