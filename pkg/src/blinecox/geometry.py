"""Exact geometric primitives for binomial line processes.

A line is parameterized by its generating point ``(theta, r)`` on the
cylinder ``[0, pi) x [-R, R]``: the line is the solution set of
``x*cos(theta) + y*sin(theta) = r``, so the segment from the origin to
``(r*cos(theta), r*sin(theta))`` is normal to it.  The canonical test
point at radial distance ``r0`` from the origin sits on the x-axis at
``(r0, 0)``; with that convention the distance from a line ``(theta, r)``
to the test point is ``|r0*cos(theta) - r|``.

Points living on a line are stored as signed 1-D offsets along the line,
measured from the foot of the line's normal through the origin, in the
direction ``(-sin(theta), cos(theta))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LineParams",
    "BlpModel",
    "BlcpModel",
    "PlanePoint",
    "Realization",
    "sample_blp",
    "sample_blcp",
    "line_point_distance",
    "chord_length",
    "point_on_line",
    "line_through_points",
    "to_half_domain",
    "to_full_domain",
    "pairwise_intersections",
    "nearest_point_distance",
    "test_point",
]


@dataclass(frozen=True)
class LineParams:
    """Generating point of a line: angle ``theta`` in [0, pi), signed normal
    distance ``r``."""

    theta: float
    r: float


@dataclass(frozen=True)
class BlpModel:
    """A binomial line process: ``n_b`` lines generated within radius ``radius``."""

    n_b: int
    radius: float

    def __post_init__(self) -> None:
        if self.n_b < 1:
            raise ValueError(f"n_b must be >= 1, got {self.n_b}")
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def domain_measure(self) -> float:
        """Measure of the generating cylinder [0, pi) x [-R, R]."""
        return 2.0 * math.pi * self.radius


@dataclass(frozen=True)
class BlcpModel:
    """A binomial line Cox process: an independent 1-D PPP of linear
    intensity ``intensity`` on each line of ``blp``."""

    blp: BlpModel
    intensity: float

    def __post_init__(self) -> None:
        if self.intensity <= 0:
            raise ValueError(f"intensity must be positive, got {self.intensity}")


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float


@dataclass
class Realization:
    """One sampled BLP/BLCP: the lines, plus per-line sorted point offsets.

    Offsets are materialized only on the chord each line cuts out of the
    ball of ``materialize_radius`` around the origin (empty arrays for a
    bare BLP).
    """

    lines: list[LineParams]
    points_on_line: list[np.ndarray] = field(default_factory=list)
    materialize_radius: float | None = None

    def __post_init__(self) -> None:
        if not self.points_on_line:
            self.points_on_line = [np.empty(0) for _ in self.lines]
        if len(self.points_on_line) != len(self.lines):
            raise ValueError("points_on_line must have one entry per line")

    @property
    def n_points(self) -> int:
        return sum(len(p) for p in self.points_on_line)


def _as_rng(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def test_point(r0: float) -> PlanePoint:
    """Canonical test point at radial distance ``r0``: on the x-axis."""
    return PlanePoint(float(r0), 0.0)


def sample_blp(model: BlpModel, rng_seed) -> Realization:
    """Draw ``n_b`` lines, i.i.d. uniform on [0, pi) x [-R, R]."""
    rng = _as_rng(rng_seed)
    thetas = rng.uniform(0.0, math.pi, size=model.n_b)
    rs = rng.uniform(-model.radius, model.radius, size=model.n_b)
    return Realization(lines=[LineParams(float(t), float(r)) for t, r in zip(thetas, rs)])


def sample_blcp(model: BlcpModel, materialize_radius: float, rng_seed) -> Realization:
    """Draw a BLP plus per-line Poisson points on the chords inside the ball
    of ``materialize_radius`` around the origin.

    Each line at distance ``|r|`` from the origin cuts a chord of half-length
    ``sqrt(M^2 - r^2)``; the point count is Poisson(intensity * chord length)
    and the offsets are uniform on the chord, returned sorted.
    """
    if materialize_radius <= 0:
        raise ValueError("materialize_radius must be positive")
    rng = _as_rng(rng_seed)
    real = sample_blp(model.blp, rng)
    m = materialize_radius
    pts: list[np.ndarray] = []
    for line in real.lines:
        if abs(line.r) >= m:
            pts.append(np.empty(0))
            continue
        half = math.sqrt(m * m - line.r * line.r)
        n = rng.poisson(model.intensity * 2.0 * half)
        pts.append(np.sort(rng.uniform(-half, half, size=n)))
    real.points_on_line = pts
    real.materialize_radius = m
    return real


def line_point_distance(line: LineParams, r0: float) -> float:
    """Distance from the line to the test point ``(r0, 0)``."""
    return abs(r0 * math.cos(line.theta) - line.r)


def chord_length(line: LineParams, r0: float, t: float) -> float:
    """Length of the chord the line cuts out of the ball of radius ``t``
    around the test point ``(r0, 0)``; zero if the line misses the ball."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    d = line_point_distance(line, r0)
    if d >= t:
        return 0.0
    return 2.0 * math.sqrt(t * t - d * d)


def point_on_line(line: LineParams, offset: float) -> PlanePoint:
    """Plane location of the point at a signed 1-D offset along the line."""
    ct, st = math.cos(line.theta), math.sin(line.theta)
    return PlanePoint(line.r * ct - offset * st, line.r * st + offset * ct)


def line_through_points(p: PlanePoint, q: PlanePoint) -> LineParams:
    """Recover (theta, r) in [0, pi) x R for the line through two points."""
    dx, dy = q.x - p.x, q.y - p.y
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise ValueError("points coincide")
    # Normal direction is the left-rotated unit tangent.
    theta = math.atan2(dx, -dy) % math.pi
    r = p.x * math.cos(theta) + p.y * math.sin(theta)
    return LineParams(theta, r)


def to_full_domain(theta: float, r: float) -> tuple[float, float]:
    """Map a generating point from [0, pi) x [-R, R] to [0, 2*pi) x [0, R].

    Both parameterizations carry the same total measure 2*pi*R and describe
    the same line; a negative signed distance flips the normal direction.
    """
    if r < 0:
        return (theta + math.pi) % (2.0 * math.pi), -r
    return theta, r


def to_half_domain(theta: float, r: float) -> tuple[float, float]:
    """Inverse of :func:`to_full_domain`."""
    if theta >= math.pi:
        return theta - math.pi, -r
    return theta, r


def intersect_lines(a: LineParams, b: LineParams) -> PlanePoint | None:
    """Intersection point of two lines, or None for exactly parallel pairs."""
    det = math.sin(b.theta - a.theta)
    if det == 0.0:
        return None
    x = (a.r * math.sin(b.theta) - b.r * math.sin(a.theta)) / det
    y = (b.r * math.cos(a.theta) - a.r * math.cos(b.theta)) / det
    return PlanePoint(x, y)


def pairwise_intersections(realization: Realization) -> list[PlanePoint]:
    """All intersection points of distinct line pairs; exactly parallel
    pairs (a probability-zero event under sampling) are omitted."""
    out: list[PlanePoint] = []
    lines = realization.lines
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            p = intersect_lines(lines[i], lines[j])
            if p is not None:
                out.append(p)
    return out


def nearest_point_distance(realization: Realization, r0: float, k: int = 1) -> float:
    """k-th smallest Euclidean distance from the test point ``(r0, 0)`` to
    any materialized point of the realization.

    Raises ValueError when fewer than ``k`` points are materialized; the
    caller should widen the materialize radius.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    d2: list[np.ndarray] = []
    for line, offs in zip(realization.lines, realization.points_on_line):
        if len(offs) == 0:
            continue
        l = r0 * math.cos(line.theta) - line.r
        # Offset of the test point's projection onto the line.
        proj = -r0 * math.sin(line.theta)
        d2.append((offs - proj) ** 2 + l * l)
    total = sum(len(a) for a in d2)
    if total < k:
        raise ValueError(
            f"only {total} points materialized, need {k}; widen materialize_radius"
        )
    alld2 = np.concatenate(d2)
    return float(np.sqrt(np.partition(alld2, k - 1)[k - 1]))
