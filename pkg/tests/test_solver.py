import json

import numpy as np
import pytest
import shapely

from robustguard.errors import AlphaTooLarge, BudgetExceeded, PointOutsideDomain
from robustguard.instances import apex_fixture, corridor, l_shape, unit_square
from robustguard.oracles import exact_opt_small, random_points_in, verify_coverage
from robustguard.params import RobustParams
from robustguard.robust import robustly_guards_batch
from robustguard.solver import (GuardSolution, arrangement_samples, discrete_robust_guarding,
                                expand_implicit, guard_polygon)


def _covered(P, G, S, level):
    ok = np.zeros(len(S), dtype=bool)
    for g in G:
        ok |= robustly_guards_batch(P, np.broadcast_to(g, S.shape), S, level)
    return ok


def test_single_point(square):
    sol = discrete_robust_guarding(square, [(0.3, 0.6)], RobustParams(0.5))
    assert len(sol.witnesses) == 1
    assert sol.certified_alpha == 0.25
    assert _covered(square, sol.guards, np.array([[0.3, 0.6]]), 0.25).all()


def test_two_far_points_in_corridor():
    P = corridor(20, 1)
    S = np.array([[1.0, 0.5], [19.0, 0.5]])
    prm = RobustParams(0.5)
    sol = discrete_robust_guarding(P, S, prm)
    assert len(sol.witnesses) == 2
    cand = np.vstack([S, random_points_in(P, 30, np.random.default_rng(0))])
    assert exact_opt_small(P, S, 0.5, cand) == 2
    assert _covered(P, sol.guards, S, 0.25).all()


def test_lshape_random_points(rng):
    P = l_shape()
    S = random_points_in(P, 50, rng)
    sol = discrete_robust_guarding(P, S, RobustParams(0.25))
    assert _covered(P, sol.guards, S, 0.125).all()
    assert len(sol.guards) <= sol.stats["maxH"] * len(sol.witnesses)
    assert sol.stats["fallbacks"] == 0


def test_outside_target(square):
    with pytest.raises(PointOutsideDomain):
        discrete_robust_guarding(square, [(2, 2)], RobustParams(0.5))


def test_zero_size_targets():
    P = apex_fixture(0.3)
    S = np.array([[0.0, 0.0], [0.5, 0.0]])
    sol = discrete_robust_guarding(P, S, RobustParams(0.5))
    assert _covered(P, sol.guards, S, 0.25).all()


def test_arrangement_single_cover(square):
    arr = arrangement_samples(square, np.array([[0.5, 0.5]]), RobustParams(0.25))
    assert len(arr.samples) == 1 and arr.signatures == [(0,)]


def test_arrangement_representatives_interior(square):
    Q = np.array([[0.1, 0.1], [0.9, 0.2], [0.5, 0.8]])
    arr = arrangement_samples(square, Q, RobustParams(0.5), reduce=False)
    assert arr.faces == len(arr.samples) > 1
    for s, sig in zip(arr.samples, arr.signatures):
        for i, r in enumerate(arr.regions):
            inside = shapely.contains_xy(r.geom, s[0], s[1])
            assert inside == (i in sig)
            assert r.boundary_distance(s[None])[0] > 0


def test_arrangement_refinement_stable():
    P = l_shape()
    Q = np.array([[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [0.3, 0.2]])
    a = arrangement_samples(P, Q, RobustParams(0.5), reduce=False)
    fine = RobustParams(0.5, tol_arc=0.5 * RobustParams(0.5).arc_tol(P))
    b = arrangement_samples(P, Q, fine, reduce=False)
    assert abs(a.faces - b.faces) <= 0.02 * a.faces


def test_arrangement_budget(square):
    Q = random_points_in(square, 12, np.random.default_rng(0))
    with pytest.raises(BudgetExceeded):
        arrangement_samples(square, Q, RobustParams(0.5), max_faces=2)


def test_alpha_too_large(square):
    with pytest.raises(AlphaTooLarge):
        guard_polygon(square, RobustParams(0.6))
    with pytest.raises(AlphaTooLarge):
        guard_polygon(apex_fixture(0.2), RobustParams(0.3))


def test_square_pipeline(square):
    sol = guard_polygon(square, RobustParams(0.25))
    assert sol.certified_alpha == pytest.approx(0.25 / 8)
    rep = verify_coverage(square, sol.all_guards(), sol.certified_alpha, density=100)
    assert rep.ok
    assert sol.count <= sol.stats["maxH"] * sol.stats["maxQ"]


def test_corridor_implicit_and_expand():
    P = corridor(20, 1)
    sol = guard_polygon(P, RobustParams(0.5))
    assert sol.implicit_purple
    n_imp = sum(ip.count for ip in sol.implicit_purple)
    ex = expand_implicit(sol)
    assert not ex.implicit_purple
    assert len(ex.guards) == len(sol.guards) + n_imp
    assert ex.stats["expanded"] == n_imp
    assert verify_coverage(P, ex.guards, sol.certified_alpha, density=100).ok
    assert expand_implicit(ex) is ex


def test_implicit_count_grows_with_length():
    a = guard_polygon(corridor(20, 1), RobustParams(0.5))
    b = guard_polygon(corridor(40, 1), RobustParams(0.5))
    ca = sum(ip.count for ip in a.implicit_purple)
    cb = sum(ip.count for ip in b.implicit_purple)
    assert cb > ca
    assert len(b.guards) <= len(a.guards) + 2


def test_solution_json_roundtrip():
    sol = guard_polygon(corridor(20, 1), RobustParams(0.5))
    obj = json.loads(json.dumps(sol.to_json()))
    back = GuardSolution.from_json(obj)
    assert np.allclose(back.all_guards(), sol.all_guards())
    assert back.certified_alpha == sol.certified_alpha
