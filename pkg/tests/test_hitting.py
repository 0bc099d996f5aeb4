import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_kite_union
from robustguard.errors import DegenerateParameters, FatnessOutOfRange
from robustguard.hitting import cardinality_bound, hitting_points
from robustguard.oracles import fatness_estimate


def test_grid_side():
    H = hitting_points((0, 0), 1.0, 0.25)
    assert H.grid_side == pytest.approx(1 / 24)


@pytest.mark.parametrize("gamma", [1 / 16, 1 / 8, 1 / 4])
def test_points_in_reach_and_bounded(gamma):
    H = hitting_points((0.3, -1.2), 2.0, gamma)
    pts = H.points
    assert len(pts) == len(H)
    assert (np.linalg.norm(pts - np.asarray(H.origin), axis=1) <= 4 * H.R * (1 + 1e-9)).all()
    assert len(H) <= cardinality_bound(gamma)
    # node exactly at the origin
    assert np.any(np.all(pts == np.asarray(H.origin), axis=1))


def test_errors():
    with pytest.raises(FatnessOutOfRange):
        hitting_points((0, 0), 1, 0.3)
    with pytest.raises(DegenerateParameters):
        hitting_points((0, 0), 0, 0.1)
    with pytest.raises(DegenerateParameters):
        hitting_points((0, 0), 1, 0)


def test_box_query_and_stride():
    H = hitting_points((0, 0), 1.0, 0.25)
    box = H.points_in_box((-0.5, -0.5), (0.5, 0.5))
    full = H.points
    inside = full[(np.abs(full) <= 0.5 + 1e-12).all(axis=1)]
    assert len(box) == len(inside)
    sub = H.points_in_box((-0.5, -0.5), (0.5, 0.5), stride=4)
    idx = np.round(sub / H.grid_side).astype(int)
    assert (idx % 4 == 0).all()


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 10), st.sampled_from([1 / 16, 1 / 8, 1 / 4]),
       st.floats(-1, 1), st.floats(-1, 1))
def test_region_containing_disk_is_hit(ox, oy, R, gamma, dx, dy):
    H = hitting_points((ox, oy), R, gamma)
    c = np.array([ox + dx * R, oy + dy * R])

    def member(pts):
        return np.linalg.norm(pts - c, axis=1) <= R

    assert H.first_hit(member) is not None


def test_kite_unions_are_hit(rng):
    for gamma in (1 / 16, 1 / 8, 1 / 4):
        H = hitting_points((0, 0), 1.0, gamma)
        kept = 0
        while kept < 20:
            c, _, member, (lo, hi) = random_kite_union(rng, gamma)
            if fatness_estimate(member, c, 1.0, samples=8, n_radii=4, resolution=24).lower < gamma:
                continue
            kept += 1
            assert H.first_hit(member, lo, hi) is not None


def test_thin_rectangle_not_fat():
    def member(pts):
        return (np.abs(pts[:, 0]) <= 50) & (np.abs(pts[:, 1]) <= 0.5)
    est = fatness_estimate(member, (0, 0), 50.0, samples=16)
    assert est.value < 1 / (10 * math.pi)


def test_disk_fatness_quarter():
    def member(pts):
        return np.linalg.norm(pts, axis=1) <= 1.0
    est = fatness_estimate(member, (0, 0), 1.0, samples=32, probe_points=[(1.0, 0.0)])
    assert 0.2 <= est.value <= 0.5
