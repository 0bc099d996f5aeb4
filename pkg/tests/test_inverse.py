import math

import numpy as np
import pytest

from robustguard.errors import DegenerateParameters, NotRobustlyGuarded, PointOutsideDomain
from robustguard.instances import apex_fixture, apex_segment_end, l_shape, random_polygon
from robustguard.inverse import fat_kite, inverse_region, inverse_region_size
from robustguard.oracles import fatness_estimate, random_points_in
from robustguard.params import RobustParams
from robustguard.robust import robustly_guards_batch


def test_square_center(square):
    r = inverse_region(square, (0.5, 0.5), RobustParams(0.5))
    assert r.area > 0
    assert r.contains((0.5, 0.5))


def test_square_size_small_alpha(square):
    prm = RobustParams(0.01)
    assert inverse_region_size(square, (0.5, 0.5), prm) == pytest.approx(math.sqrt(2) / 2, rel=0.02)


def test_alpha_one_rejected(square):
    with pytest.raises(DegenerateParameters):
        inverse_region(square, (0.5, 0.5), RobustParams(1.0))


def test_outside(square):
    with pytest.raises(PointOutsideDomain):
        inverse_region(square, (2, 2), RobustParams(0.5))


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5])
def test_apex_segment(alpha):
    P = apex_fixture(alpha)
    r = inverse_region(P, (0, 0), RobustParams(alpha))
    end = apex_segment_end(alpha)
    assert "segment" in r.flags and r.area == 0
    assert r.geom.length == pytest.approx(end[0], rel=1e-6)
    assert inverse_region_size(P, (0, 0), RobustParams(alpha), r) == pytest.approx(end[0], rel=1e-6)


def test_sharp_corner_self_guard_only():
    # apex angle 2 asin(0.3) is narrower than the alpha = 0.5 cone
    P = apex_fixture(0.3)
    r = inverse_region(P, (0, 0), RobustParams(0.5))
    assert "self-guard-only" in r.flags
    assert inverse_region_size(P, (0, 0), RobustParams(0.5), r) == 0.0


def test_boundary_point_guarded_from_inside(square):
    r = inverse_region(square, (1.0, 0.3), RobustParams(0.5))
    assert r.area > 0 and not r.flags


def test_lshape_agreement(rng):
    P = l_shape()
    prm = RobustParams(0.3)
    p = (1.5, 0.25)
    r = inverse_region(P, p, prm)
    X = random_points_in(P, 10000, rng)
    truth = robustly_guards_batch(P, X, np.broadcast_to(p, X.shape), 0.3)
    got = r.contains_approx_batch(X)
    bad = truth != got
    assert bad.mean() <= 0.005
    if bad.any():
        assert r.boundary_distance(X[bad]).max() <= prm.arc_tol(P)
    # every accepted g respects the clearance bound
    assert (P.boundary_distance(X[truth]) >= 0.3 * np.linalg.norm(X[truth] - p, axis=1) * (1 - 1e-9)).all()


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_size_matches_rejection_sampling(seed):
    P = random_polygon(12, 1, seed=seed)
    rng = np.random.default_rng(seed)
    prm = RobustParams(0.25)
    p = random_points_in(P, 1, rng)[0]
    X = random_points_in(P, 100000, rng)
    ok = robustly_guards_batch(P, X, np.broadcast_to(p, X.shape), 0.25)
    sampled = np.linalg.norm(X[ok] - p, axis=1).max()
    size = inverse_region_size(P, p, prm)
    assert size >= sampled * (1 - 1e-9)
    assert size == pytest.approx(sampled, rel=0.02)


def test_asymmetry_witness():
    # g near the centre of a wide room, p deep inside a thin pocket
    from robustguard.geometry import PolygonWithHoles
    P = PolygonWithHoles([(0, 0), (4, 0), (4, 4), (2.1, 4), (2.1, 6), (1.9, 6), (1.9, 4), (0, 4)])
    g, p = (2.0, 2.0), (2.0, 4.5)
    assert robustly_guards_batch(P, [g], [p], 0.05)[0]
    assert not robustly_guards_batch(P, [p], [g], 0.05)[0]


def test_fat_kite_strip(strip, rng):
    prm = RobustParams(0.5)
    K = fat_kite(strip, (5, 0.5), (5.8, 0.5), prm)
    assert K.apex_angle_at_p == pytest.approx(math.pi / 6)
    assert K.angle_at_g == pytest.approx(math.pi - 2 * math.pi / 6)
    Q = K.sample(2000, rng)
    ok = robustly_guards_batch(strip, Q, np.broadcast_to((5.8, 0.5), Q.shape), 0.25)
    assert ok.all()


def test_fat_kite_requires_guarding(strip):
    with pytest.raises(NotRobustlyGuarded):
        fat_kite(strip, (5, 0.5), (9.5, 0.5), RobustParams(0.5))


@pytest.mark.parametrize("alpha", [0.2, 0.35, 0.5])
def test_kite_points_half_guard(alpha, rng):
    P = random_polygon(14, 1, seed=5)
    G = random_points_in(P, 3000, rng)
    Pp = random_points_in(P, 3000, rng)
    ok = robustly_guards_batch(P, G, Pp, alpha) & (np.linalg.norm(G - Pp, axis=1) > 1e-3)
    checked = 0
    for g, p in zip(G[ok][:20], Pp[ok][:20]):
        K = fat_kite(P, g, p, RobustParams(alpha))
        Q = K.sample(300, rng)
        assert robustly_guards_batch(P, Q, np.broadcast_to(p, Q.shape), alpha / 2).all()
        checked += 1
    assert checked > 0


def test_kite_union_fatness(rng):
    # kites sharing the apex p, union fatness at least gamma/4 minus sampling slack
    prm = RobustParams(0.5)
    from robustguard.instances import corridor
    P = corridor(10, 6)
    p = np.array([5.0, 3.0])
    kites = []
    for a in rng.uniform(0, 2 * math.pi, 3):
        g = p + 1.5 * np.array([math.cos(a), math.sin(a)])
        kites.append(fat_kite(P, g, p, prm))

    def member(pts):
        return np.any([K.contains_batch(pts) for K in kites], axis=0)

    single = min(fatness_estimate(K.contains_batch, p, 1.0, samples=16, seed=1).value for K in kites)
    union = fatness_estimate(member, p, 1.0, samples=16, seed=1).value
    assert union >= single / 4 - 0.02
