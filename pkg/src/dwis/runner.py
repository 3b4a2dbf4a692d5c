"""Iterative spatiotemporal modeling loop.

The spatial phase starts from a small pilot sample that bootstraps the signal
range, then repeats: place contour levels over the discovered range, query
the sensor field (report-once), refit the spline to every reply received so
far, score tracking and modeling RMSE on the metric grid, widen the range by
the reconstruction extrema, and adapt the margin by the stochastic-gradient
rule

    delta_k = delta_{k-1} * (1 + mu * (err_{k-1} - err_{k-2}) / (2 ebar)),

with ebar the mean of the last two tracking errors. Larger level counts and a
shrinking margin trade reporting cost against estimation error; the LM_FIX
scheme keeps its margin fixed. The temporal phase reuses the final level
count and margin, re-enables all sensors per update, and reconstructs each
step from that step's replies alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import Field, GridSpec, eval_field_grid, evolve_field
from .levels import LevelScheme, Pdf1D, make_levels, true_pdf
from .reconstruct import CumulativeSpline, SplineModel, eval_spline, fit_biharmonic
from .sensors import SensorField, contour_query, reset_reported

__all__ = [
    "DwisConfig",
    "IterationRecord",
    "SpatialResult",
    "RunResult",
    "tracking_rmse",
    "modeling_rmse",
    "delta_update",
    "range_coverage",
    "spatial_phase",
    "temporal_phase",
    "run_dwis",
    "run_to_csv",
]

RUN_CSV_HEADER = "phase,k,m,delta,cost,cum_cost,tracking_rmse,modeling_rmse,range_lo,range_hi"


@dataclass(frozen=True)
class DwisConfig:
    """Knobs for one run; defaults follow the standard experiment setup."""

    scheme: LevelScheme = LevelScheme.U_SG
    mu: float = 0.3
    m0: int = 3
    p: int = 3
    delta0: float = 0.2
    spatial_iters: int = 12
    pilot_fraction: float = 0.005
    temporal_steps: int = 0
    delta_min: float | None = None  # resolved to delta0 / 100
    seed: int = 0
    dt: float = 1.0
    drift_sigma: float = 1.0
    amp_jitter: float = 0.05
    pdf_bins: int = 64
    ridge: float | None = None  # None: scale-aware default in fit_biharmonic

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0):
            raise ValueError(f"mu must satisfy 0 <= mu <= 1, got {self.mu}")
        if self.p < 1:
            raise ValueError("level increment p must be >= 1")
        if self.m0 < 1:
            raise ValueError("initial level count m0 must be >= 1")
        if not (self.delta0 > 0):
            raise ValueError("delta0 must be positive")
        if self.delta_min is None:
            object.__setattr__(self, "delta_min", self.delta0 / 100.0)
        if not (self.delta0 > self.delta_min > 0):
            raise ValueError("need delta0 > delta_min > 0")
        if self.spatial_iters < 1:
            raise ValueError("spatial_iters must be >= 1")
        if not (0 < self.pilot_fraction <= 1):
            raise ValueError("pilot_fraction must be in (0, 1]")
        if self.temporal_steps < 0:
            raise ValueError("temporal_steps must be >= 0")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    m: int
    delta: float
    cost: int
    cumulative_cost: int
    tracking_rmse: float
    modeling_rmse: float
    range_est: tuple[float, float]


@dataclass
class SpatialResult:
    """Spatial-phase trajectory plus the state the temporal phase starts from."""

    pilot: IterationRecord
    records: list[IterationRecord]
    model: SplineModel
    recon: np.ndarray
    truth: np.ndarray
    grid: GridSpec
    archive_points: np.ndarray
    archive_values: np.ndarray
    range_est: tuple[float, float]
    final_m: int
    final_delta: float


@dataclass
class RunResult:
    pilot: IterationRecord
    spatial: list[IterationRecord]
    temporal: list[IterationRecord]
    final_m: int
    final_delta: float


def tracking_rmse(g_k: np.ndarray, g_km1: np.ndarray) -> float:
    """RMS difference between consecutive reconstructions on the metric grid."""
    a, b = np.asarray(g_k, dtype=float), np.asarray(g_km1, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"grid shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def modeling_rmse(g_k: np.ndarray, truth: np.ndarray) -> float:
    """RMS difference between a reconstruction and the ground-truth grid."""
    return tracking_rmse(g_k, truth)


def delta_update(
    delta_prev: float, err_km1: float, err_km2: float, mu: float, delta_min: float
) -> float:
    """One stochastic-gradient margin step, floored at delta_min.

    The normalizer is the mean of the two error samples, which makes the step
    scale-free; a vanishing mean (stalled tracking error) leaves the margin
    untouched.
    """
    if not all(map(math.isfinite, (delta_prev, err_km1, err_km2, mu, delta_min))):
        raise ValueError("delta_update inputs must be finite")
    if not (delta_prev > 0):
        raise ValueError("delta_prev must be positive")
    ebar = 0.5 * (err_km1 + err_km2)
    if ebar < 1e-15:
        return delta_prev
    grad = err_km1 - err_km2
    return max(delta_min, delta_prev * (1.0 + mu * grad / (2.0 * ebar)))


def range_coverage(est: tuple[float, float], truth: tuple[float, float]) -> float:
    """Fraction of the true signal range covered by the estimated one."""
    t_lo, t_hi = truth
    if not (t_hi > t_lo):
        raise ValueError("truth range must have positive width")
    e_lo, e_hi = est
    overlap = min(e_hi, t_hi) - max(e_lo, t_lo)
    return max(0.0, overlap) / (t_hi - t_lo)


def _pdf_source(scheme: LevelScheme, recon: np.ndarray, known_pdf: Pdf1D | None):
    if scheme is LevelScheme.LM_SG:
        return recon.ravel()
    if scheme is LevelScheme.LM_FIX:
        return known_pdf
    return None


def _fit_and_eval(points, values, ridge, grid) -> tuple[SplineModel, np.ndarray]:
    model = fit_biharmonic(points, values, ridge=ridge)
    return model, eval_spline(model, grid)


def spatial_phase(
    f: Field, sf: SensorField, config: DwisConfig, grid: GridSpec | None = None
) -> SpatialResult:
    """Run the iterative spatial modeling phase.

    Iteration 0 draws ceil(pilot_fraction * N) sensors at random to bootstrap
    the range; their replies join the cumulative archive and the report-once
    set. Each following iteration queries with the scheduled level count
    m0 + (k - 1) p, reconstructs from the whole archive, and adapts the margin
    once two tracking-error samples exist (from iteration 3 on). Iterations
    with zero replies keep the previous reconstruction and record zero cost.
    """
    if sf.reported:
        raise ValueError("spatial phase expects an empty reported set; call reset_reported")
    if grid is None:
        grid = GridSpec(*sf.area)

    truth = eval_field_grid(f, grid)
    known_pdf = true_pdf(f, grid, config.pdf_bins) if config.scheme is LevelScheme.LM_FIX else None

    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    n = len(sf.sensors)
    n_pilot = math.ceil(config.pilot_fraction * n)
    pilot_ids = np.sort(rng.choice(n, size=n_pilot, replace=False))
    obs = sf.observe(f)  # signal is frozen during the phase, observe once
    sf.reported.update(int(i) for i in pilot_ids)

    archive = CumulativeSpline(grid.nodes())
    archive.add(sf.positions()[pilot_ids], obs[pilot_ids])
    model, recon_flat = archive.fit(config.ridge)
    recon = recon_flat.reshape(grid.ny, grid.nx)
    range_est = (float(obs[pilot_ids].min()), float(obs[pilot_ids].max()))
    cum = n_pilot
    pilot = IterationRecord(
        k=0,
        m=0,
        delta=config.delta0,
        cost=n_pilot,
        cumulative_cost=cum,
        tracking_rmse=0.0,
        modeling_rmse=modeling_rmse(recon, truth),
        range_est=range_est,
    )

    records: list[IterationRecord] = []
    errs: dict[int, float] = {}
    delta = config.delta0
    m = config.m0
    for k in range(1, config.spatial_iters + 1):
        if config.scheme is not LevelScheme.LM_FIX and k >= 3:
            delta = delta_update(delta, errs[k - 1], errs[k - 2], config.mu, config.delta_min)

        levels = make_levels(
            config.scheme,
            range_est,
            m,
            delta,
            pdf_source=_pdf_source(config.scheme, recon, known_pdf),
            bins=config.pdf_bins,
        )
        replies = contour_query(sf, f, levels, respect_report_once=True, observations=obs)
        cost = len(replies)
        cum += cost
        if cost > 0:
            archive.add(
                np.array([(r.x, r.y) for r in replies]), np.array([r.value for r in replies])
            )
            model, recon_flat = archive.fit(config.ridge)
            new_recon = recon_flat.reshape(grid.ny, grid.nx)
        else:
            new_recon = recon

        err_k = tracking_rmse(new_recon, recon)
        mod_err = modeling_rmse(new_recon, truth)
        range_est = (
            min(range_est[0], float(new_recon.min())),
            max(range_est[1], float(new_recon.max())),
        )
        records.append(
            IterationRecord(
                k=k,
                m=m,
                delta=delta,
                cost=cost,
                cumulative_cost=cum,
                tracking_rmse=err_k,
                modeling_rmse=mod_err,
                range_est=range_est,
            )
        )
        errs[k] = err_k
        recon = new_recon
        m += config.p

    return SpatialResult(
        pilot=pilot,
        records=records,
        model=model,
        recon=recon,
        truth=truth,
        grid=grid,
        archive_points=archive.points,
        archive_values=archive.values,
        range_est=range_est,
        final_m=records[-1].m,
        final_delta=records[-1].delta,
    )


def temporal_phase(
    f: Field, sf: SensorField, spatial: SpatialResult, config: DwisConfig
) -> list[IterationRecord]:
    """Run periodic temporal updates after a completed spatial phase.

    Each step evolves the signal, re-enables every sensor, recomputes the
    level range from the previous reconstruction's extrema, queries once with
    the final spatial level count and margin, and reconstructs from that
    step's replies only. Cumulative cost restarts at zero for the phase.
    """
    grid = spatial.grid
    recon = spatial.recon
    m, delta = spatial.final_m, spatial.final_delta
    cur = f
    cum = 0
    records: list[IterationRecord] = []
    for t in range(1, config.temporal_steps + 1):
        step_seed = int(np.random.SeedSequence((config.seed, 1, t)).generate_state(1)[0])
        cur = evolve_field(cur, config.dt, config.drift_sigma, config.amp_jitter, seed=step_seed)
        reset_reported(sf)
        rng_t = (float(recon.min()), float(recon.max()))
        known_pdf = (
            true_pdf(cur, grid, config.pdf_bins) if config.scheme is LevelScheme.LM_FIX else None
        )
        levels = make_levels(
            config.scheme, rng_t, m, delta,
            pdf_source=_pdf_source(config.scheme, recon, known_pdf), bins=config.pdf_bins,
        )
        replies = contour_query(sf, cur, levels, respect_report_once=True)
        cost = len(replies)
        cum += cost
        if cost > 0:
            pts = np.array([(r.x, r.y) for r in replies])
            vals = np.array([r.value for r in replies])
            _, new_recon = _fit_and_eval(pts, vals, config.ridge, grid)
        else:
            new_recon = recon

        truth_t = eval_field_grid(cur, grid)
        records.append(
            IterationRecord(
                k=t,
                m=m,
                delta=delta,
                cost=cost,
                cumulative_cost=cum,
                tracking_rmse=tracking_rmse(new_recon, recon),
                modeling_rmse=modeling_rmse(new_recon, truth_t),
                range_est=rng_t,
            )
        )
        recon = new_recon
    return records


def run_dwis(
    f: Field, sf: SensorField, config: DwisConfig, grid: GridSpec | None = None
) -> RunResult:
    """Full run: spatial phase followed by the configured temporal updates."""
    spatial = spatial_phase(f, sf, config, grid=grid)
    temporal = temporal_phase(f, sf, spatial, config) if config.temporal_steps else []
    return RunResult(
        pilot=spatial.pilot,
        spatial=spatial.records,
        temporal=temporal,
        final_m=spatial.final_m,
        final_delta=spatial.final_delta,
    )


def _csv_row(phase: str, r: IterationRecord) -> str:
    return (
        f"{phase},{r.k},{r.m},{r.delta!r},{r.cost},{r.cumulative_cost},"
        f"{r.tracking_rmse!r},{r.modeling_rmse!r},{r.range_est[0]!r},{r.range_est[1]!r}"
    )


def run_to_csv(result: RunResult) -> str:
    """Serialize a run; the pilot bootstrap is its own row so its cost stays visible."""
    lines = [RUN_CSV_HEADER, _csv_row("pilot", result.pilot)]
    lines += [_csv_row("spatial", r) for r in result.spatial]
    lines += [_csv_row("temporal", r) for r in result.temporal]
    return "\n".join(lines) + "\n"
