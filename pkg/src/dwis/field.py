"""Synthetic ground-truth spatial signal: a sum of positive isotropic Gaussian bumps.

The signal is built from two populations of components (a narrow-kernel group
and a wide-kernel group), each bump contributing
``a * exp(-((x-cx)^2 + (y-cy)^2) / (2 sigma^2))``. The kernel is unnormalized,
so an amplitude is the component's peak height and the signal-strength range
is controlled directly by the amplitude intervals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "GaussianComponent",
    "Field",
    "GridSpec",
    "build_field",
    "eval_field",
    "eval_field_grid",
    "evolve_field",
    "field_range",
    "grid_to_csv",
    "field_to_json",
    "field_from_json",
]


@dataclass(frozen=True)
class GaussianComponent:
    """One positive isotropic bump: peak ``amplitude`` at (center_x, center_y)."""

    amplitude: float
    center_x: float
    center_y: float
    sigma: float

    def __post_init__(self):
        if not (self.amplitude > 0):
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Field:
    """Ground-truth signal: non-empty component list plus a time stamp."""

    components: tuple[GaussianComponent, ...]
    time: float = 0.0

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValueError("Field requires at least one component")
        object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation lattice: nx x ny nodes spanning the closed bounds."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 100
    ny: int = 100

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must satisfy x_min < x_max and y_min < y_max")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs nx >= 2 and ny >= 2")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def nodes(self) -> np.ndarray:
        """All lattice nodes as an (ny*nx, 2) array, row-major (y outer, x inner)."""
        xx, yy = np.meshgrid(self.xs(), self.ys())
        return np.column_stack([xx.ravel(), yy.ravel()])


def build_field(
    n1: int,
    n2: int,
    sigma_a: float,
    sigma_b: float,
    amp_ranges: tuple[tuple[float, float], tuple[float, float]] = ((0.5, 1.5), (0.5, 1.5)),
    area: tuple[float, float, float, float] = (0.0, 100.0, 0.0, 100.0),
    seed: int = 0,
) -> Field:
    """Draw a random field with n1 narrow (sigma_a) and n2 wide (sigma_b) bumps.

    Centers are i.i.d. uniform over ``area = (x_min, x_max, y_min, y_max)``;
    amplitudes are uniform in ``amp_ranges[0]`` for the first group and
    ``amp_ranges[1]`` for the second. Deterministic for a fixed seed.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("component counts n1 and n2 must be >= 1")
    if not (sigma_a > 0 and sigma_b > 0):
        raise ValueError("sigma_a and sigma_b must be positive")
    for lo, hi in amp_ranges:
        if not (0 < lo <= hi):
            raise ValueError(f"amplitude interval ({lo}, {hi}) must be positive and ordered")
    x_min, x_max, y_min, y_max = area
    if not (x_min < x_max and y_min < y_max):
        raise ValueError("area bounds must be ordered")

    rng = np.random.default_rng(seed)
    comps = []
    for n, sigma, (a_lo, a_hi) in ((n1, sigma_a, amp_ranges[0]), (n2, sigma_b, amp_ranges[1])):
        cx = rng.uniform(x_min, x_max, n)
        cy = rng.uniform(y_min, y_max, n)
        amp = rng.uniform(a_lo, a_hi, n)
        comps.extend(
            GaussianComponent(float(a), float(x), float(y), float(sigma))
            for a, x, y in zip(amp, cx, cy)
        )
    return Field(components=tuple(comps), time=0.0)


def _component_arrays(f: Field) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    amp = np.array([c.amplitude for c in f.components])
    cx = np.array([c.center_x for c in f.components])
    cy = np.array([c.center_y for c in f.components])
    sig = np.array([c.sigma for c in f.components])
    return amp, cx, cy, sig


def eval_field(f: Field, points) -> np.ndarray:
    """Evaluate the signal at (x, y) points; returns one value per point."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if not np.isfinite(pts).all():
        raise ValueError("evaluation points must be finite")
    amp, cx, cy, sig = _component_arrays(f)
    out = np.zeros(len(pts))
    x, y = pts[:, 0], pts[:, 1]
    # One pass per component keeps the peak memory at O(points).
    for a, mx, my, s in zip(amp, cx, cy, sig):
        out += a * np.exp(-((x - mx) ** 2 + (y - my) ** 2) / (2.0 * s * s))
    return out


def eval_field_grid(f: Field, grid: GridSpec) -> np.ndarray:
    """Evaluate on the lattice; returns an (ny, nx) array, rows indexed by y."""
    values = eval_field(f, grid.nodes())
    return values.reshape(grid.ny, grid.nx)


def evolve_field(f: Field, dt: float, drift_sigma: float, amp_jitter: float, seed: int = 0) -> Field:
    """Advance the field by dt: Gaussian random-walk drift of the centers plus
    multiplicative amplitude jitter.

    Per axis each center moves by N(0, (drift_sigma * sqrt(dt))^2); each
    amplitude is scaled by (1 + u) with u uniform in +-amp_jitter and clamped
    positive. drift_sigma = amp_jitter = 0 leaves the geometry untouched.
    """
    if not (dt > 0):
        raise ValueError("dt must be positive")
    if drift_sigma < 0:
        raise ValueError("drift_sigma must be >= 0")
    if not (0 <= amp_jitter < 1):
        raise ValueError("amp_jitter must be in [0, 1)")

    if drift_sigma == 0 and amp_jitter == 0:
        return replace(f, time=f.time + dt)

    rng = np.random.default_rng(seed)
    n = len(f.components)
    step = drift_sigma * math.sqrt(dt)
    dxy = rng.normal(0.0, step, (n, 2)) if step > 0 else np.zeros((n, 2))
    u = rng.uniform(-amp_jitter, amp_jitter, n) if amp_jitter > 0 else np.zeros(n)

    tiny = 1e-12  # amplitudes stay strictly positive
    comps = tuple(
        GaussianComponent(
            amplitude=max(c.amplitude * (1.0 + ui), tiny),
            center_x=c.center_x + dx,
            center_y=c.center_y + dy,
            sigma=c.sigma,
        )
        for c, (dx, dy), ui in zip(f.components, dxy, u)
    )
    return Field(components=comps, time=f.time + dt)


def field_range(f: Field, grid: GridSpec) -> tuple[float, float]:
    """Ground-truth (min, max) of the signal over the lattice."""
    g = eval_field_grid(f, grid)
    return float(g.min()), float(g.max())


def grid_to_csv(grid: GridSpec, values: np.ndarray) -> str:
    """Serialize a grid of values as ``x,y,value`` rows, y outer and x inner."""
    values = np.asarray(values)
    if values.shape != (grid.ny, grid.nx):
        raise ValueError(f"values shape {values.shape} does not match grid ({grid.ny}, {grid.nx})")
    xs, ys = grid.xs(), grid.ys()
    lines = ["x,y,value"]
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            lines.append(f"{float(x)!r},{float(y)!r},{float(values[j, i])!r}")
    return "\n".join(lines) + "\n"


def field_to_json(f: Field) -> str:
    """Serialize components as a JSON list of {amplitude, cx, cy, sigma}."""
    return json.dumps(
        [
            {"amplitude": c.amplitude, "cx": c.center_x, "cy": c.center_y, "sigma": c.sigma}
            for c in f.components
        ]
    )


def field_from_json(text: str, time: float = 0.0) -> Field:
    comps = tuple(
        GaussianComponent(d["amplitude"], d["cx"], d["cy"], d["sigma"]) for d in json.loads(text)
    )
    return Field(components=comps, time=time)
