"""Low-cost spatiotemporal field sensing by contour-line importance sampling.

A correlated synthetic field is compressed into contour lines: only sensors
observing within an adaptive margin of the current levels reply to a query.
Replies feed a biharmonic spline reconstruction whose extrema discover the
signal range, while a stochastic-gradient rule shrinks or grows the margin to
trade estimation error against reporting cost.
"""

from .field import (
    Field,
    GaussianComponent,
    GridSpec,
    build_field,
    eval_field,
    eval_field_grid,
    evolve_field,
    field_range,
)
from .levels import (
    ContourLevels,
    LevelScheme,
    LloydMaxResult,
    Pdf1D,
    estimate_pdf,
    lloydmax_levels,
    make_levels,
    true_pdf,
    uniform_levels,
)
from .reconstruct import SplineModel, eval_spline, eval_spline_points, fit_biharmonic, greens_function
from .runner import (
    DwisConfig,
    IterationRecord,
    RunResult,
    SpatialResult,
    delta_update,
    modeling_rmse,
    range_coverage,
    run_dwis,
    run_to_csv,
    spatial_phase,
    temporal_phase,
    tracking_rmse,
)
from .sensors import QueryReply, Sensor, SensorField, contour_query, deploy, reset_reported

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GaussianComponent",
    "GridSpec",
    "build_field",
    "eval_field",
    "eval_field_grid",
    "evolve_field",
    "field_range",
    "ContourLevels",
    "LevelScheme",
    "LloydMaxResult",
    "Pdf1D",
    "estimate_pdf",
    "lloydmax_levels",
    "make_levels",
    "true_pdf",
    "uniform_levels",
    "SplineModel",
    "eval_spline",
    "eval_spline_points",
    "fit_biharmonic",
    "greens_function",
    "DwisConfig",
    "IterationRecord",
    "RunResult",
    "SpatialResult",
    "delta_update",
    "modeling_rmse",
    "range_coverage",
    "run_dwis",
    "run_to_csv",
    "spatial_phase",
    "temporal_phase",
    "tracking_rmse",
    "QueryReply",
    "Sensor",
    "SensorField",
    "contour_query",
    "deploy",
    "reset_reported",
]
