import numpy as np
import pytest

from robustguard.errors import DegenerateDisk, Infeasible
from robustguard.geometry import PolygonWithHoles
from robustguard.instances import apex_fixture, corridor
from robustguard.oracles import (coverage_samples, exact_opt_small, guard_matrix, min_set_cover,
                                 verify_coverage, visible_area_fraction)


def test_square_centre_covers(square):
    rep = verify_coverage(square, [(0.5, 0.5)], 0.25, density=60)
    assert rep.ok and rep.samples > 3600


def test_strip_ends_uncovered(strip):
    rep = verify_coverage(strip, [(5, 0.5)], 0.5, density=80)
    assert not rep.ok
    xs = np.array([u["point"][0] for u in rep.uncovered])
    assert (np.abs(xs - 5) > 0.9).all()
    assert (xs < 5).any() and (xs > 5).any()
    assert rep.to_json()["uncovered_count"] == rep.samples - rep.covered


def test_coverage_samples_deterministic(square):
    a = coverage_samples(square, 20, seed=3)
    b = coverage_samples(square, 20, seed=3)
    assert np.array_equal(a, b)
    assert square.contains_batch(a).all()


def test_min_set_cover_exact():
    M = np.array([[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 1, 0]], dtype=bool)
    assert len(min_set_cover(M)) == 2
    with pytest.raises(Infeasible):
        min_set_cover(np.array([[1, 0], [1, 0]], dtype=bool))


def test_exact_opt_examples(square):
    assert exact_opt_small(square, [(0.3, 0.3)], 0.5, [(0.3, 0.3), (0.9, 0.9)]) == 1
    # two apex tips: only their own bisectors see them
    P = PolygonWithHoles([(0, 0), (4, -0.6), (4, 0.6), (8, 0), (4, 2), (4, 0.8)])
    tips = [(0.0, 0.0), (8.0, 0.0)]
    from robustguard.oracles import random_points_in
    cand = np.vstack([tips, random_points_in(P, 30, np.random.default_rng(1))])
    assert exact_opt_small(P, tips, 0.1, cand) == 2
    with pytest.raises(ValueError):
        exact_opt_small(square, [(0.5, 0.5)], 0.5, np.zeros((41, 2)) + 0.5)


def test_guard_matrix_shape(square):
    M = guard_matrix(square, [(0.5, 0.5), (0.1, 0.1)], [(0.5, 0.9), (0.9, 0.9), (0.5, 0.5)], 0.5)
    assert M.shape == (2, 3) and M[0].all()


def test_visible_fraction_convex(square):
    e = visible_area_fraction(square, (0.5, 0.5), (0.5, 0.8), 0.5, samples=5000)
    assert e.value == 1.0


def test_visible_fraction_half_wall():
    P = corridor(2, 2)
    e = visible_area_fraction(P, (1.0, 0.0), (1.0, 1.0), 0.5, samples=20000, seed=4)
    assert abs(e.value - 0.5) <= 2 * e.half_width + 1e-3


def test_visible_fraction_blocked():
    P = apex_fixture(0.5)
    with pytest.raises(DegenerateDisk):
        visible_area_fraction(P, (0.5, 0.0), (0.5, 0.0), 0.5)
