"""Configuration-driven sweep runner.

``dwis run spec.toml`` executes every sweep cell (scheme x mu x delta0 x
seed), writing one trajectory CSV per cell, a manifest, and six SVG summary
figures; ``dwis validate spec.toml`` checks the file and lists the cells
without running. Figures are rebuilt purely from the CSVs, so the CSVs remain
the single source of truth. Output directory and worker count can also be set
through the DWIS_OUT and DWIS_JOBS environment variables (flags win).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .field import GridSpec, build_field
from .levels import LevelScheme
from .runner import RUN_CSV_HEADER, DwisConfig, run_dwis, run_to_csv
from .sensors import deploy
from .svgplot import line_plot

__all__ = ["ExperimentSpec", "SweepCell", "load_spec", "enumerate_cells", "run_sweep", "main"]

_SCHEMA = {
    "field": {"n1": int, "n2": int, "sigma_a": float, "sigma_b": float,
              "amp_a": list, "amp_b": list, "seed": int},
    "area": {"x_min": float, "x_max": float, "y_min": float, "y_max": float},
    "grid": {"nx": int, "ny": int},
    "sensors": {"count": int, "seed": int},
    "sweep": {"schemes": list, "mu": list, "delta0": list, "seeds": list},
    "run": {"m0": int, "p": int, "spatial_iters": int, "temporal_steps": int,
            "pilot_fraction": float, "delta_min": float, "dt": float,
            "drift_sigma": float, "amp_jitter": float, "pdf_bins": int},
    "output": {"dir": str},
}


@dataclass(frozen=True)
class SweepCell:
    scheme: LevelScheme
    mu: float
    delta0: float
    seed: int

    @property
    def name(self) -> str:
        return f"{self.scheme.value.lower()}_mu{self.mu:g}_d0{self.delta0:g}_s{self.seed}"


@dataclass
class ExperimentSpec:
    """Validated sweep description; defaults reproduce the standard setup."""

    n1: int = 150
    n2: int = 150
    sigma_a: float = 3.0
    sigma_b: float = 10.0
    amp_a: tuple[float, float] = (0.5, 1.5)
    amp_b: tuple[float, float] = (0.5, 1.5)
    field_seed: int = 101
    area: tuple[float, float, float, float] = (0.0, 100.0, 0.0, 100.0)
    nx: int = 100
    ny: int = 100
    sensor_count: int = 5000
    sensor_seed: int = 202
    schemes: tuple[LevelScheme, ...] = (LevelScheme.U_SG,)
    mus: tuple[float, ...] = (0.3,)
    delta0s: tuple[float, ...] = (0.2,)
    seeds: tuple[int, ...] = (0,)
    m0: int = 3
    p: int = 3
    spatial_iters: int = 12
    temporal_steps: int = 0
    pilot_fraction: float = 0.005
    delta_min: float | None = None
    dt: float = 1.0
    drift_sigma: float = 1.0
    amp_jitter: float = 0.05
    pdf_bins: int = 64
    out_dir: str = "out"


def _check_number(errors, path, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        errors.append(f"{path}: expected {kind.__name__}, got {value!r}")
        return None
    return value


def _parse_interval(errors, path, value):
    if not (isinstance(value, list) and len(value) == 2):
        errors.append(f"{path}: expected a [lo, hi] pair")
        return None
    lo, hi = value
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (lo, hi)):
        errors.append(f"{path}: bounds must be numbers")
        return None
    if not (0 < lo <= hi):
        errors.append(f"{path}: interval ({lo}, {hi}) must be positive and ordered")
        return None
    return (float(lo), float(hi))


def load_spec(path: str | Path) -> tuple[ExperimentSpec | None, list[str]]:
    """Parse and validate a sweep spec; returns (spec, errors).

    On any error the spec is None and ``errors`` names each offending field.
    """
    try:
        raw = tomllib.loads(Path(path).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        return None, [f"cannot read spec: {exc}"]

    errors: list[str] = []
    for section, table in raw.items():
        if section not in _SCHEMA:
            errors.append(f"{section}: unknown section")
            continue
        if not isinstance(table, dict):
            errors.append(f"{section}: expected a table")
            continue
        for key in table:
            if key not in _SCHEMA[section]:
                errors.append(f"{section}.{key}: unknown field")
    if "sweep" not in raw:
        errors.append("sweep: missing required section")
    if errors:
        return None, errors

    spec = ExperimentSpec()

    def get(section, key, default, kind):
        value = raw.get(section, {}).get(key)
        if value is None:
            return default
        checked = _check_number(errors, f"{section}.{key}", value, kind)
        return default if checked is None else checked

    spec.n1 = get("field", "n1", spec.n1, int)
    spec.n2 = get("field", "n2", spec.n2, int)
    spec.sigma_a = get("field", "sigma_a", spec.sigma_a, float)
    spec.sigma_b = get("field", "sigma_b", spec.sigma_b, float)
    spec.field_seed = get("field", "seed", spec.field_seed, int)
    for key in ("amp_a", "amp_b"):
        if key in raw.get("field", {}):
            parsed = _parse_interval(errors, f"field.{key}", raw["field"][key])
            if parsed:
                setattr(spec, key, parsed)
    if spec.n1 < 1 or spec.n2 < 1:
        errors.append("field.n1/field.n2: component counts must be >= 1")
    if not (spec.sigma_a > 0 and spec.sigma_b > 0):
        errors.append("field.sigma_a/field.sigma_b: must be positive")

    area = tuple(get("area", k, d, float) for k, d in
                 zip(("x_min", "x_max", "y_min", "y_max"), spec.area))
    if not (area[0] < area[1] and area[2] < area[3]):
        errors.append("area: bounds must satisfy x_min < x_max and y_min < y_max")
    spec.area = area
    spec.nx = get("grid", "nx", spec.nx, int)
    spec.ny = get("grid", "ny", spec.ny, int)
    if spec.nx < 2 or spec.ny < 2:
        errors.append("grid.nx/grid.ny: must be >= 2")

    spec.sensor_count = get("sensors", "count", spec.sensor_count, int)
    spec.sensor_seed = get("sensors", "seed", spec.sensor_seed, int)
    if spec.sensor_count < 1:
        errors.append("sensors.count: must be >= 1")

    sweep = raw["sweep"]
    schemes = []
    for i, name in enumerate(sweep.get("schemes", [])):
        try:
            schemes.append(LevelScheme(name))
        except ValueError:
            errors.append(f"sweep.schemes[{i}]: {name!r} is not one of U_SG, LM_SG, LM_FIX")
    spec.schemes = tuple(schemes)
    mus = []
    for i, mu in enumerate(sweep.get("mu", [])):
        v = _check_number(errors, f"sweep.mu[{i}]", mu, float)
        if v is not None and not (0.0 <= v <= 1.0):
            errors.append(f"sweep.mu[{i}]: {v} violates 0 <= mu <= 1")
        elif v is not None:
            mus.append(v)
    spec.mus = tuple(mus)
    d0s = []
    for i, d0 in enumerate(sweep.get("delta0", [])):
        v = _check_number(errors, f"sweep.delta0[{i}]", d0, float)
        if v is not None and not v > 0:
            errors.append(f"sweep.delta0[{i}]: must be positive")
        elif v is not None:
            d0s.append(v)
    spec.delta0s = tuple(d0s)
    seeds = []
    for i, s in enumerate(sweep.get("seeds", [])):
        v = _check_number(errors, f"sweep.seeds[{i}]", s, int)
        if v is not None:
            seeds.append(v)
    spec.seeds = tuple(seeds)

    spec.m0 = get("run", "m0", spec.m0, int)
    spec.p = get("run", "p", spec.p, int)
    spec.spatial_iters = get("run", "spatial_iters", spec.spatial_iters, int)
    spec.temporal_steps = get("run", "temporal_steps", spec.temporal_steps, int)
    spec.pilot_fraction = get("run", "pilot_fraction", spec.pilot_fraction, float)
    spec.dt = get("run", "dt", spec.dt, float)
    spec.drift_sigma = get("run", "drift_sigma", spec.drift_sigma, float)
    spec.amp_jitter = get("run", "amp_jitter", spec.amp_jitter, float)
    spec.pdf_bins = get("run", "pdf_bins", spec.pdf_bins, int)
    if "delta_min" in raw.get("run", {}):
        spec.delta_min = get("run", "delta_min", None, float)
    if spec.m0 < 1:
        errors.append("run.m0: must be >= 1")
    if spec.p < 1:
        errors.append("run.p: must be >= 1")
    if spec.spatial_iters < 1:
        errors.append("run.spatial_iters: must be >= 1")
    if spec.temporal_steps < 0:
        errors.append("run.temporal_steps: must be >= 0")
    if not (0 < spec.pilot_fraction <= 1):
        errors.append("run.pilot_fraction: must be in (0, 1]")
    if spec.delta_min is not None:
        for d0 in spec.delta0s:
            if not (d0 > spec.delta_min > 0):
                errors.append(f"run.delta_min: needs delta0 > delta_min > 0 (delta0 = {d0})")
    spec.out_dir = raw.get("output", {}).get("dir", spec.out_dir)
    if not isinstance(spec.out_dir, str):
        errors.append("output.dir: expected string")

    return (None, errors) if errors else (spec, [])


def enumerate_cells(spec: ExperimentSpec) -> list[SweepCell]:
    """Deterministic sweep enumeration: schemes x mu x delta0 x seeds."""
    return [
        SweepCell(scheme, mu, d0, seed)
        for scheme in spec.schemes
        for mu in spec.mus
        for d0 in spec.delta0s
        for seed in spec.seeds
    ]


def _derived_seed(base: int, cell_seed: int) -> int:
    return int(np.random.SeedSequence((base, cell_seed)).generate_state(1)[0])


def _run_cell(args: tuple[ExperimentSpec, SweepCell, str]) -> dict:
    spec, cell, out_dir = args
    entry = {
        "cell": cell.name,
        "scheme": cell.scheme.value,
        "mu": cell.mu,
        "delta0": cell.delta0,
        "seed": cell.seed,
    }
    try:
        f = build_field(
            spec.n1, spec.n2, spec.sigma_a, spec.sigma_b,
            amp_ranges=(spec.amp_a, spec.amp_b), area=spec.area,
            seed=_derived_seed(spec.field_seed, cell.seed),
        )
        sf = deploy(spec.sensor_count, spec.area, seed=_derived_seed(spec.sensor_seed, cell.seed))
        grid = GridSpec(*spec.area, nx=spec.nx, ny=spec.ny)
        cfg = DwisConfig(
            scheme=cell.scheme, mu=cell.mu, m0=spec.m0, p=spec.p, delta0=cell.delta0,
            spatial_iters=spec.spatial_iters, pilot_fraction=spec.pilot_fraction,
            temporal_steps=spec.temporal_steps, delta_min=spec.delta_min, seed=cell.seed,
            dt=spec.dt, drift_sigma=spec.drift_sigma, amp_jitter=spec.amp_jitter,
            pdf_bins=spec.pdf_bins,
        )
        result = run_dwis(f, sf, cfg, grid)
        csv_path = Path(out_dir) / "runs" / f"{cell.name}.csv"
        csv_path.write_text(run_to_csv(result))
        entry.update(status="ok", csv=str(csv_path))
    except Exception as exc:  # cell failures must not kill the sweep
        entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
    return entry


def _read_run_csv(path: Path) -> dict[str, list[dict]]:
    """Parse a trajectory CSV back into {phase: [row dicts]}."""
    lines = path.read_text().strip().splitlines()
    if not lines or lines[0] != RUN_CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header")
    cols = RUN_CSV_HEADER.split(",")
    phases: dict[str, list[dict]] = {"pilot": [], "spatial": [], "temporal": []}
    for line in lines[1:]:
        vals = line.split(",")
        row = dict(zip(cols, vals))
        phases[row["phase"]].append(
            {c: (row[c] if c == "phase" else float(row[c])) for c in cols}
        )
    return phases


def _median_series(cell_rows: list[list[dict]], column: str) -> tuple[list, list]:
    """Median of a column across same-length trajectories, per iteration index."""
    if not cell_rows or not cell_rows[0]:
        return [], []
    length = min(len(rows) for rows in cell_rows)
    xs = [cell_rows[0][i]["k"] for i in range(length)]
    ys = [
        float(np.median([rows[i][column] for rows in cell_rows])) for i in range(length)
    ]
    return xs, ys


def _to_db(ys: list[float]) -> list[float]:
    return [10.0 * math.log10(max(y, 1.0)) for y in ys]


def write_figures(out_dir: Path, entries: list[dict], db_axis: bool = False) -> list[Path]:
    """Rebuild the six summary figures from the per-cell CSVs."""
    groups: dict[tuple, list[dict]] = {}
    for e in entries:
        if e["status"] != "ok":
            continue
        key = (e["scheme"], e["mu"], e["delta0"])
        groups.setdefault(key, []).append(_read_run_csv(Path(e["csv"])))

    def label(key):
        return f"{key[0]} mu={key[1]:g} d0={key[2]:g}"

    ordered = sorted(groups.items(), key=lambda kv: label(kv[0]))
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    cost_label = "replies [dB]" if db_axis else "replies"

    def series_for(phase, column, to_db=False):
        out = []
        for key, runs in ordered:
            xs, ys = _median_series([r[phase] for r in runs], column)
            if to_db:
                ys = _to_db(ys)
            out.append((label(key), xs, ys))
        return out

    range_series = []
    for key, runs in ordered:
        xs, lo = _median_series([r["spatial"] for r in runs], "range_lo")
        _, hi = _median_series([r["spatial"] for r in runs], "range_hi")
        range_series.append((label(key) + " lo", xs, lo))
        range_series.append((label(key) + " hi", xs, hi))

    figures = [
        ("fig1_spatial_rmse.svg",
         line_plot(series_for("spatial", "modeling_rmse"),
                   "Spatial modeling error", "iteration", "modeling RMSE")),
        ("fig2_temporal_rmse.svg",
         line_plot(series_for("temporal", "modeling_rmse"),
                   "Temporal modeling error", "update", "modeling RMSE")),
        ("fig3_cumulative_cost.svg",
         line_plot(series_for("spatial", "cum_cost", to_db=db_axis),
                   "Cumulative spatial cost", "iteration", cost_label)),
        ("fig4_temporal_cost.svg",
         line_plot(series_for("temporal", "cost", to_db=db_axis),
                   "Temporal cost per update", "update", cost_label)),
        ("fig5_range.svg",
         line_plot(range_series, "Signal range discovery", "iteration", "signal strength")),
        ("fig6_delta.svg",
         line_plot(series_for("spatial", "delta"),
                   "Margin adaptation", "iteration", "delta")),
    ]
    paths = []
    for name, svg in figures:
        path = fig_dir / name
        path.write_text(svg)
        paths.append(path)
    return paths


def run_sweep(spec: ExperimentSpec, out_dir: str | Path, jobs: int = 1, db_axis: bool = False) -> int:
    """Execute all cells, write CSVs + manifest + figures; returns exit status."""
    out = Path(out_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    cells = enumerate_cells(spec)
    tasks = [(spec, cell, str(out)) for cell in cells]

    progress = out / "manifest.jsonl"
    entries: list[dict] = []
    with progress.open("w") as log:
        if jobs > 1 and len(tasks) > 1:
            with Pool(processes=jobs) as pool:
                for entry in pool.imap_unordered(_run_cell, tasks):
                    log.write(json.dumps(entry, sort_keys=True) + "\n")
                    log.flush()
                    entries.append(entry)
        else:
            for task in tasks:
                entry = _run_cell(task)
                log.write(json.dumps(entry, sort_keys=True) + "\n")
                log.flush()
                entries.append(entry)

    entries.sort(key=lambda e: e["cell"])
    manifest = {"cells": entries, "total": len(entries),
                "failed": sum(e["status"] != "ok" for e in entries)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    write_figures(out, entries, db_axis=db_axis)

    for e in entries:
        status = e["status"] if e["status"] == "ok" else f"failed ({e.get('error')})"
        print(f"{e['cell']}: {status}")
    print(f"{len(entries)} cells, {manifest['failed']} failed, output in {out}")
    return 1 if manifest["failed"] else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dwis",
        description="Run or validate contour-sensing simulation sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a sweep spec")
    p_run.add_argument("spec", help="TOML sweep description")
    p_run.add_argument("--out", default=None, help="output directory (or $DWIS_OUT)")
    p_run.add_argument("--jobs", type=int, default=None, help="parallel workers (or $DWIS_JOBS)")
    p_run.add_argument("--db-axis", action="store_true", help="plot costs in decibels")
    p_val = sub.add_parser("validate", help="check a sweep spec without running")
    p_val.add_argument("spec", help="TOML sweep description")
    args = parser.parse_args(argv)

    spec, errors = load_spec(args.spec)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 2

    if args.command == "validate":
        cells = enumerate_cells(spec)
        for cell in cells:
            print(cell.name)
        print(f"spec ok: {len(cells)} cells")
        return 0

    out_dir = args.out or os.environ.get("DWIS_OUT") or spec.out_dir
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("DWIS_JOBS", "1"))
    if jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    return run_sweep(spec, out_dir, jobs=jobs, db_axis=args.db_axis)


if __name__ == "__main__":
    sys.exit(main())
