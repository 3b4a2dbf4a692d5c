"""Sensor population and contour-margin querying.

Sensors observe the ground-truth field without noise. A query carries a set
of contour levels and a margin; exactly the sensors whose observation lies
within the margin of at least one level reply, and under the report-once rule
a sensor that has already replied during the current spatial phase stays
silent. Replies are per sensor, not per level: the reply count is the
iteration's cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import Field, eval_field

__all__ = ["Sensor", "SensorField", "QueryReply", "deploy", "contour_query", "reset_reported", "replies_to_csv"]


@dataclass(frozen=True)
class Sensor:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class QueryReply:
    sensor_id: int
    x: float
    y: float
    value: float


@dataclass
class SensorField:
    """Deployed sensors plus the ids that already reported this spatial phase.

    ``contour_query`` mutates ``reported``; serialize queries on one instance.
    """

    sensors: tuple[Sensor, ...]
    area: tuple[float, float, float, float]
    reported: set[int] = dc_field(default_factory=set)

    def positions(self) -> np.ndarray:
        return np.array([(s.x, s.y) for s in self.sensors])

    def observe(self, f: Field) -> np.ndarray:
        """Noiseless observation of every sensor, in sensor order."""
        return eval_field(f, self.positions())


def deploy(n: int, area: tuple[float, float, float, float], seed: int = 0) -> SensorField:
    """Place n sensors i.i.d. uniform over area = (x_min, x_max, y_min, y_max)."""
    if n < 1:
        raise ValueError("sensor count must be >= 1")
    x_min, x_max, y_min, y_max = area
    if not (x_min < x_max and y_min < y_max):
        raise ValueError("area bounds must be ordered")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x_min, x_max, n)
    ys = rng.uniform(y_min, y_max, n)
    sensors = tuple(Sensor(i, float(x), float(y)) for i, (x, y) in enumerate(zip(xs, ys)))
    return SensorField(sensors=sensors, area=tuple(area))


def contour_query(
    sf: SensorField,
    f: Field,
    levels,
    respect_report_once: bool = True,
    observations: np.ndarray | None = None,
) -> list[QueryReply]:
    """Collect replies from sensors within the margin of any contour level.

    ``levels`` provides ``.levels`` (sorted values) and ``.delta`` (margin).
    A sensor replies when min_j |S - l_j| <= delta, once per query even if it
    is inside several bands. Returned ids are added to ``reported``.
    ``observations`` may carry precomputed ``sf.observe(f)`` values; the field
    is frozen during a spatial phase, so callers can observe once per phase.
    """
    lv = np.asarray(levels.levels, dtype=float)
    delta = float(levels.delta)
    if lv.size == 0:
        raise ValueError("levels must be non-empty")
    if not (delta > 0):
        raise ValueError("margin delta must be positive")

    obs = sf.observe(f) if observations is None else np.asarray(observations, dtype=float)
    if obs.shape != (len(sf.sensors),):
        raise ValueError("observations must hold one value per sensor")
    within = np.abs(obs[:, None] - lv[None, :]).min(axis=1) <= delta
    ids = np.nonzero(within)[0]
    if respect_report_once and sf.reported:
        ids = np.array([i for i in ids if int(i) not in sf.reported], dtype=int)

    replies = [
        QueryReply(int(i), sf.sensors[i].x, sf.sensors[i].y, float(obs[i])) for i in ids
    ]
    sf.reported.update(int(i) for i in ids)
    return replies


def reset_reported(sf: SensorField) -> SensorField:
    """Re-enable every sensor; used at the start of each temporal update."""
    sf.reported.clear()
    return sf


def replies_to_csv(batches: list[list[QueryReply]]) -> str:
    """Serialize reply batches as ``iteration,sensor_id,x,y,value`` rows."""
    lines = ["iteration,sensor_id,x,y,value"]
    for k, batch in enumerate(batches):
        for r in batch:
            lines.append(f"{k},{r.sensor_id},{r.x!r},{r.y!r},{r.value!r}")
    return "\n".join(lines) + "\n"
