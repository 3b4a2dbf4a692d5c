"""Biharmonic spline interpolation of scattered observations.

The interpolant is a weighted sum of radial Green's functions
``phi(r) = r^2 (ln r - 1)`` centered at the observation sites. Weights come
from the dense symmetric system ``(G + ridge I) w = d`` with
``G_ij = phi(|p_i - p_j|)``. With ridge 0 the fit interpolates exactly;
a small ridge keeps the system well conditioned when replies cluster tightly
on contour bands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .field import GridSpec

__all__ = ["SplineModel", "greens_function", "fit_biharmonic", "eval_spline", "eval_spline_points"]

# Points closer than this are treated as one observation (values averaged):
# exact duplicates make the Green's matrix singular.
DEDUP_DISTANCE = 1e-9

# Grid nodes are evaluated in blocks to bound the size of the distance matrix.
_EVAL_BLOCK = 4096


@dataclass(frozen=True)
class SplineModel:
    """Fitted interpolant: g(q) = offset + sum_j weights[j] * phi(|q - centers[j]|).

    ``offset`` is zero except for the degenerate single-center fit, where the
    model is the constant observed value (phi(0) = 0 makes a one-center
    expansion unable to reproduce it otherwise).
    """

    centers: np.ndarray
    weights: np.ndarray
    ridge: float
    offset: float = 0.0

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if centers.ndim != 2 or centers.shape[1] != 2:
            raise ValueError("centers must be an (n, 2) array")
        if weights.shape != (centers.shape[0],) or centers.shape[0] < 1:
            raise ValueError("need one weight per center and at least one center")
        centers.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)


def _phi_sq(d2: np.ndarray) -> np.ndarray:
    """Kernel from squared distances: r^2 (ln r - 1) = d2 ln(d2)/2 - d2.

    The max() clamp only rewrites entries whose kernel value underflows to
    zero anyway, so r = 0 comes out as an exact 0 without masking.
    """
    out = np.maximum(d2, 1e-300)
    np.log(out, out=out)
    out *= d2
    out *= 0.5
    out -= d2
    return out


def greens_function(r):
    """Radial kernel r^2 (ln r - 1); the singularity at r = 0 is removable."""
    scalar = np.isscalar(r) or np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    out = _phi_sq(r * r)
    return float(out[0]) if scalar else out


def _kernel_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _phi_sq(cdist(a, b, "sqeuclidean"))


def _solve_weights(gram: np.ndarray, values: np.ndarray, ridge: float | None) -> tuple[np.ndarray, float]:
    """Solve (G + ridge I) w = d; ridge None scales with the mean kernel size."""
    if ridge is None:
        ridge = 1e-8 * float(np.mean(np.abs(gram)))
    a = gram if ridge == 0 else gram + ridge * np.eye(len(gram))
    try:
        w = np.linalg.solve(a, values)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"biharmonic system is singular: {exc}") from exc
    if not np.isfinite(w).all():
        raise np.linalg.LinAlgError("biharmonic solve produced non-finite weights")
    return w, float(ridge)


def _dedup(points: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge coincident points (distance < DEDUP_DISTANCE), averaging values."""
    pairs = cKDTree(points).query_pairs(r=DEDUP_DISTANCE)
    if not pairs:
        return points, values
    parent = np.arange(len(points))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(len(points))])
    keep = np.unique(roots)
    merged = np.array([values[roots == r].mean() for r in keep])
    return points[keep], merged


def fit_biharmonic(points, values, ridge: float | None = None) -> SplineModel:
    """Fit spline weights to scattered (x, y) -> value observations.

    ridge None picks 1e-8 times the mean kernel magnitude (scale-aware
    regularization); pass 0.0 for exact interpolation. Raises
    ``numpy.linalg.LinAlgError`` when the system is singular or produces
    non-finite weights.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d = np.asarray(values, dtype=float).ravel()
    if len(pts) != len(d):
        raise ValueError("points and values must have equal length")
    if len(pts) < 1:
        raise ValueError("need at least one point")
    if not (np.isfinite(pts).all() and np.isfinite(d).all()):
        raise ValueError("points and values must be finite")

    pts, d = _dedup(pts, d)
    if len(pts) == 1:
        return SplineModel(centers=pts, weights=np.zeros(1), ridge=0.0, offset=float(d[0]))

    w, used = _solve_weights(_kernel_matrix(pts, pts), d, ridge)
    return SplineModel(centers=pts, weights=w, ridge=used)


def eval_spline_points(model: SplineModel, points) -> np.ndarray:
    """Evaluate the interpolant at arbitrary (x, y) points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.empty(len(pts))
    for start in range(0, len(pts), _EVAL_BLOCK):
        block = pts[start : start + _EVAL_BLOCK]
        out[start : start + _EVAL_BLOCK] = _kernel_matrix(block, model.centers) @ model.weights
    out += model.offset
    if not np.isfinite(out).all():
        raise FloatingPointError("spline evaluation produced non-finite values")
    return out


def eval_spline(model: SplineModel, grid: GridSpec) -> np.ndarray:
    """Evaluate on the lattice; returns an (ny, nx) array, rows indexed by y."""
    return eval_spline_points(model, grid.nodes()).reshape(grid.ny, grid.nx)


class CumulativeSpline:
    """Incrementally refitted spline over a growing reply archive.

    Appending a batch extends the Gram matrix and the node-kernel matrix with
    only the new blocks, so refitting after each query batch costs one solve
    instead of a full reassembly. Assumes appended points are pairwise
    distinct (the report-once rule guarantees this for query replies).
    """

    def __init__(self, nodes: np.ndarray):
        self._nodes = np.asarray(nodes, dtype=float)
        self._pts = np.empty((0, 2))
        self._vals = np.empty(0)
        self._gram = np.empty((0, 0))
        self._nodek = np.empty((len(self._nodes), 0))

    def __len__(self) -> int:
        return len(self._pts)

    @property
    def points(self) -> np.ndarray:
        return self._pts

    @property
    def values(self) -> np.ndarray:
        return self._vals

    def add(self, points: np.ndarray, values: np.ndarray) -> None:
        new_pts = np.asarray(points, dtype=float).reshape(-1, 2)
        new_vals = np.asarray(values, dtype=float).ravel()
        if len(new_pts) == 0:
            return
        cross = _kernel_matrix(self._pts, new_pts) if len(self._pts) else np.empty((0, len(new_pts)))
        block = _kernel_matrix(new_pts, new_pts)
        self._gram = np.block([[self._gram, cross], [cross.T, block]])
        self._nodek = np.hstack([self._nodek, _kernel_matrix(self._nodes, new_pts)])
        self._pts = np.vstack([self._pts, new_pts])
        self._vals = np.concatenate([self._vals, new_vals])

    def fit(self, ridge: float | None = None) -> tuple[SplineModel, np.ndarray]:
        """Refit on everything added so far; returns (model, values at nodes)."""
        if len(self._pts) == 0:
            raise ValueError("no observations added yet")
        if len(self._pts) == 1:
            model = SplineModel(
                centers=self._pts.copy(), weights=np.zeros(1), ridge=0.0, offset=float(self._vals[0])
            )
            return model, np.full(len(self._nodes), model.offset)
        w, used = _solve_weights(self._gram, self._vals, ridge)
        model = SplineModel(centers=self._pts.copy(), weights=w, ridge=used)
        return model, self._nodek @ w
