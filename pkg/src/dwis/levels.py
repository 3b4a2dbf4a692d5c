"""Contour level placement.

Three schemes are supported: uniformly spaced levels (U-SG), Lloyd-Max levels
computed from a histogram pdf estimated out of the current reconstruction
(LM-SG), and Lloyd-Max levels from the known signal pdf (LM-fix). Lloyd-Max
placement alternates two updates until the levels stop moving: cell boundaries
move to midpoints of adjacent levels, and each level moves to the probability
centroid of its cell. All integrals over the piecewise-constant histogram
density are evaluated in closed form, so the quantizer distortion decreases
monotonically up to floating-point error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .field import Field, GridSpec, eval_field_grid

__all__ = [
    "LevelScheme",
    "ContourLevels",
    "Pdf1D",
    "LloydMaxResult",
    "uniform_levels",
    "lloydmax_levels",
    "estimate_pdf",
    "true_pdf",
    "make_levels",
    "levels_to_csv",
    "pdf_to_csv",
]

# Cells whose probability mass falls below this keep their midpoint level.
EMPTY_CELL_MASS = 1e-12


class LevelScheme(enum.Enum):
    U_SG = "U_SG"
    LM_SG = "LM_SG"
    LM_FIX = "LM_FIX"


@dataclass(frozen=True)
class ContourLevels:
    """An ordered level set together with the margin it is queried with."""

    levels: tuple[float, ...]
    delta: float
    scheme: LevelScheme
    range: tuple[float, float]

    def __post_init__(self):
        lv = self.levels
        if len(lv) == 0:
            raise ValueError("level set must be non-empty")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError("levels must be strictly increasing")
        lo, hi = self.range
        if not (lo <= lv[0] and lv[-1] <= hi):
            raise ValueError("levels must lie within the stated range")
        if not (self.delta > 0):
            raise ValueError("delta must be positive")
        object.__setattr__(self, "levels", tuple(float(v) for v in lv))


@dataclass(frozen=True)
class Pdf1D:
    """Piecewise-constant density over contiguous bins; integrates to one."""

    bin_edges: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin_edges must be strictly increasing with >= 2 entries")
        if dens.shape != (len(edges) - 1,):
            raise ValueError("densities length must equal number of bins")
        if np.any(dens < 0):
            raise ValueError("densities must be non-negative")
        total = float(np.sum(dens * np.diff(edges)))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"density must integrate to 1, got {total}")
        edges.setflags(write=False)
        dens.setflags(write=False)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "densities", dens)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.bin_edges[0]), float(self.bin_edges[-1])


@dataclass(frozen=True)
class LloydMaxResult:
    levels: np.ndarray
    boundaries: np.ndarray
    iterations: int
    distortion: float
    distortion_history: tuple[float, ...]


def uniform_levels(rng: tuple[float, float], m: int) -> np.ndarray:
    """m cell-midpoint levels: lo + (i - 1/2)(hi - lo)/m, strictly inside rng."""
    lo, hi = float(rng[0]), float(rng[1])
    if not lo < hi:
        raise ValueError(f"degenerate range ({lo}, {hi})")
    if m < 1:
        raise ValueError("level count must be >= 1")
    i = np.arange(1, m + 1)
    return lo + (i - 0.5) * (hi - lo) / m


def _segment_moments(pdf: Pdf1D, a: float, b: float) -> tuple[float, float]:
    """Exact (mass, first moment) of the histogram density over [a, b]."""
    lo = np.maximum(pdf.bin_edges[:-1], a)
    hi = np.minimum(pdf.bin_edges[1:], b)
    mask = hi > lo
    if not mask.any():
        return 0.0, 0.0
    d = pdf.densities[mask]
    lo, hi = lo[mask], hi[mask]
    m0 = float(np.sum(d * (hi - lo)))
    m1 = float(np.sum(d * 0.5 * (hi * hi - lo * lo)))
    return m0, m1


def _segment_distortion(pdf: Pdf1D, a: float, b: float, level: float) -> float:
    """Exact integral of (x - level)^2 against the density over [a, b]."""
    lo = np.maximum(pdf.bin_edges[:-1], a)
    hi = np.minimum(pdf.bin_edges[1:], b)
    mask = hi > lo
    if not mask.any():
        return 0.0
    d = pdf.densities[mask]
    lo, hi = lo[mask], hi[mask]
    return float(np.sum(d * ((hi - level) ** 3 - (lo - level) ** 3) / 3.0))


def _boundaries(levels: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Cell edges: support ends outside, midpoints of adjacent levels inside."""
    return np.concatenate([[lo], 0.5 * (levels[:-1] + levels[1:]), [hi]])


def quantizer_distortion(pdf: Pdf1D, levels: np.ndarray) -> float:
    """Mean squared error of nearest-level quantization under the pdf."""
    levels = np.sort(np.asarray(levels, dtype=float))
    lo, hi = pdf.support
    bounds = _boundaries(levels, lo, hi)
    return sum(
        _segment_distortion(pdf, bounds[i], bounds[i + 1], levels[i]) for i in range(len(levels))
    )


def lloydmax_levels(pdf: Pdf1D, m: int, tol: float = 1e-8, max_iter: int = 500) -> LloydMaxResult:
    """Fixed-point iteration for minimum-MSE level placement.

    Starts from uniformly spaced levels, then alternates boundary (midpoint)
    and level (cell centroid) updates until the largest level movement drops
    below tol or max_iter is reached. A cell with mass below
    ``EMPTY_CELL_MASS`` keeps its midpoint, which keeps gappy estimated pdfs
    from dividing by zero.
    """
    if m < 1:
        raise ValueError("level count must be >= 1")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    lo, hi = pdf.support
    levels = uniform_levels((lo, hi), m)
    history: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        bounds = _boundaries(levels, lo, hi)
        new = np.empty(m)
        for i in range(m):
            a, b = float(bounds[i]), float(bounds[i + 1])
            mass, first = _segment_moments(pdf, a, b)
            new[i] = first / mass if mass >= EMPTY_CELL_MASS else 0.5 * (a + b)
        move = float(np.max(np.abs(new - levels)))
        levels = new
        iterations += 1
        history.append(quantizer_distortion(pdf, levels))
        if move < tol:
            break
    bounds = _boundaries(levels, lo, hi)
    return LloydMaxResult(
        levels=levels,
        boundaries=bounds,
        iterations=iterations,
        distortion=history[-1],
        distortion_history=tuple(history),
    )


def estimate_pdf(values, bins: int = 64) -> Pdf1D:
    """Normalized histogram over [min, max] of the values.

    Every bin gets a small density floor before normalization so that
    downstream Lloyd-Max centroids stay finite on sparse histograms.
    """
    v = np.asarray(values, dtype=float).ravel()
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if v.size < 2 or np.min(v) == np.max(v):
        raise ValueError("need at least two distinct values to estimate a pdf")
    counts, edges = np.histogram(v, bins=bins, range=(float(v.min()), float(v.max())))
    widths = np.diff(edges)
    dens = counts / (v.size * widths)
    dens = np.maximum(dens, 1e-9)
    dens = dens / np.sum(dens * widths)
    return Pdf1D(bin_edges=edges, densities=dens)


def true_pdf(f: Field, grid: GridSpec, bins: int = 64) -> Pdf1D:
    """Histogram of the ground-truth signal over the grid: the known-pdf oracle."""
    return estimate_pdf(eval_field_grid(f, grid).ravel(), bins)


def make_levels(
    scheme: LevelScheme,
    rng: tuple[float, float],
    m: int,
    delta: float,
    pdf_source=None,
    bins: int = 64,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> ContourLevels:
    """Build the level set for a scheme.

    U_SG ignores ``pdf_source`` and spaces levels uniformly over ``rng``. The
    Lloyd-Max schemes accept either a ready ``Pdf1D`` or raw values to
    estimate one from; their levels live on the pdf support. A degenerate
    range (or an estimation failure on constant values) falls back to a single
    level at the range midpoint, so early iterations with no spread survive.
    """
    lo, hi = float(rng[0]), float(rng[1])
    if not lo <= hi:
        raise ValueError(f"range ({lo}, {hi}) must be ordered")
    if lo == hi:
        return ContourLevels(levels=(lo,), delta=delta, scheme=scheme, range=(lo, hi))

    if scheme is LevelScheme.U_SG:
        lv = uniform_levels((lo, hi), m)
        return ContourLevels(levels=tuple(lv), delta=delta, scheme=scheme, range=(lo, hi))

    if scheme in (LevelScheme.LM_SG, LevelScheme.LM_FIX):
        if isinstance(pdf_source, Pdf1D):
            pdf = pdf_source
        else:
            if pdf_source is None:
                raise ValueError(f"{scheme.value} needs a pdf source")
            try:
                pdf = estimate_pdf(pdf_source, bins)
            except ValueError:
                mid = 0.5 * (lo + hi)
                return ContourLevels(levels=(mid,), delta=delta, scheme=scheme, range=(lo, hi))
        result = lloydmax_levels(pdf, m, tol=tol, max_iter=max_iter)
        return ContourLevels(
            levels=tuple(result.levels), delta=delta, scheme=scheme, range=pdf.support
        )

    raise ValueError(f"unknown scheme {scheme!r}")


def levels_to_csv(levels: ContourLevels) -> str:
    lines = ["index,level"]
    lines += [f"{i},{v!r}" for i, v in enumerate(levels.levels)]
    return "\n".join(lines) + "\n"


def pdf_to_csv(pdf: Pdf1D) -> str:
    lines = ["bin_lo,bin_hi,density"]
    edges, dens = pdf.bin_edges, pdf.densities
    lines += [
        f"{float(edges[i])!r},{float(edges[i + 1])!r},{float(d)!r}" for i, d in enumerate(dens)
    ]
    return "\n".join(lines) + "\n"
