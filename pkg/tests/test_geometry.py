import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blinecox.geometry import (
    BlcpModel,
    BlpModel,
    LineParams,
    PlanePoint,
    Realization,
    chord_length,
    intersect_lines,
    line_point_distance,
    line_through_points,
    nearest_point_distance,
    pairwise_intersections,
    point_on_line,
    sample_blcp,
    sample_blp,
    to_full_domain,
    to_half_domain,
)


def test_model_validation():
    with pytest.raises(ValueError):
        BlpModel(n_b=0, radius=50.0)
    with pytest.raises(ValueError):
        BlpModel(n_b=10, radius=-1.0)
    with pytest.raises(ValueError):
        BlcpModel(BlpModel(n_b=1, radius=1.0), intensity=-0.1)


def test_domain_measure():
    assert BlpModel(n_b=3, radius=50.0).domain_measure == pytest.approx(100 * math.pi)


def test_sample_blp_shapes_and_ranges():
    model = BlpModel(n_b=10, radius=100.0)
    real = sample_blp(model, 42)
    assert len(real.lines) == 10
    for line in real.lines:
        assert 0.0 <= line.theta < math.pi
        assert -100.0 <= line.r <= 100.0
    assert real.n_points == 0


def test_sample_blp_seeded_repeatable():
    model = BlpModel(n_b=5, radius=50.0)
    a = sample_blp(model, 7)
    b = sample_blp(model, 7)
    assert a.lines == b.lines


def test_sample_blcp_points_on_their_lines():
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.2)
    real = sample_blcp(model, 30.0, 3)
    assert real.n_points > 0
    for line, offsets in zip(real.lines, real.points_on_line):
        for off in offsets:
            pt = point_on_line(line, float(off))
            # the point satisfies the line equation and sits in the window
            lhs = pt.x * math.cos(line.theta) + pt.y * math.sin(line.theta)
            assert lhs == pytest.approx(line.r, abs=1e-9)
            assert math.hypot(pt.x, pt.y) <= 30.0 + 1e-9
        assert np.all(np.diff(offsets) >= 0)


def test_sample_blcp_poisson_consistent_counts():
    model = BlcpModel(BlpModel(n_b=1, radius=1e-9), intensity=0.5)
    # the single line passes nearly through the origin: chord length ~ 2M
    rng = np.random.default_rng(11)
    counts = [sample_blcp(model, 10.0, rng).n_points for _ in range(2000)]
    assert np.mean(counts) == pytest.approx(0.5 * 20.0, rel=0.05)


def test_line_point_distance_matches_projection():
    line = LineParams(theta=0.3, r=5.0)
    assert line_point_distance(line, 0.0) == pytest.approx(5.0)
    d = line_point_distance(line, 10.0)
    assert d == pytest.approx(abs(10.0 * math.cos(0.3) - 5.0))


def test_chord_length_cases():
    line = LineParams(theta=0.0, r=3.0)
    assert chord_length(line, 0.0, 5.0) == pytest.approx(8.0)
    assert chord_length(line, 0.0, 2.0) == 0.0


def test_intersect_lines():
    a = LineParams(theta=0.0, r=2.0)  # vertical line x = 2
    b = LineParams(theta=math.pi / 2.0, r=3.0)  # horizontal line y = 3
    pt = intersect_lines(a, b)
    assert pt.x == pytest.approx(2.0)
    assert pt.y == pytest.approx(3.0)
    assert intersect_lines(a, LineParams(theta=0.0, r=5.0)) is None


def test_pairwise_intersections_count():
    real = sample_blp(BlpModel(n_b=10, radius=50.0), 5)
    pts = pairwise_intersections(real)
    assert len(pts) == 45  # parallel pairs have probability zero


def test_line_through_points_roundtrip():
    p, q = PlanePoint(1.0, 2.0), PlanePoint(-3.0, 0.5)
    line = line_through_points(p, q)
    for pt in (p, q):
        assert pt.x * math.cos(line.theta) + pt.y * math.sin(line.theta) == pytest.approx(
            line.r, abs=1e-9
        )


def test_nearest_point_distance():
    line = LineParams(theta=0.0, r=1.0)
    real = Realization(lines=[line], points_on_line=[np.array([-2.0, 0.5, 4.0])])
    d = nearest_point_distance(real, 0.0)
    assert d == pytest.approx(math.hypot(0.5, 1.0))


@given(
    theta=st.floats(0.0, 2.0 * math.pi, exclude_max=True),
    r=st.floats(-50.0, 50.0),
)
@settings(max_examples=50, deadline=None)
def test_domain_folding_roundtrip(theta, r):
    th, rr = to_half_domain(theta, r)
    assert 0.0 <= th < math.pi
    # the folded parameters describe the same line
    x = rr * math.cos(th)
    y = rr * math.sin(th)
    assert x * math.cos(theta) + y * math.sin(theta) == pytest.approx(r, abs=1e-6)
    th2, r2 = to_full_domain(th, rr)
    assert (th2, r2) == (th, rr) or r2 == pytest.approx(-rr)


def test_realization_validates_point_lists():
    with pytest.raises(ValueError):
        Realization(lines=[LineParams(0.0, 1.0)], points_on_line=[np.empty(0), np.empty(0)])
