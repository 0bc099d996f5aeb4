import math

import numpy as np
import pytest

from robustguard.errors import PointOutsideDomain
from robustguard.geometry import PolygonWithHoles
from robustguard.instances import corridor, l_shape, random_polygon, square_with_hole
from robustguard.medial import (associate_disks, build_decomposition, classify_cells,
                                insert_purple_disks, medial_axis)
from robustguard.oracles import random_points_in
from robustguard.params import RobustParams


def _centres(ma):
    return sorted((round(ma.vertices[i].point[0], 9), round(ma.vertices[i].point[1], 9),
                   round(ma.vertices[i].radius, 9)) for i in ma.M)


def test_square_axis(square):
    ma = medial_axis(square)
    assert _centres(ma) == [(0.5, 0.5, 0.5)]
    v = ma.M[0]
    assert ma.vertices[v].degree == 4
    assert all(e.kind == "segment" for e in ma.edges)
    assert len(ma.edges) == 4


def test_rectangle_axis():
    ma = medial_axis(corridor(4, 2))
    assert _centres(ma) == [(1.0, 1.0, 1.0), (3.0, 1.0, 1.0)]
    assert len(ma.edges) == 5


def test_lshape_axis_equidistant():
    P = l_shape()
    ma = medial_axis(P)
    assert any(e.kind == "parabola" for e in ma.edges)
    for x, e in ma.samples(32):
        d = [ma.sites[s].distance(x[None])[0] for s in e.sites]
        assert abs(d[0] - d[1]) < 1e-7
        # nearest boundary distance equals the site distance
        assert abs(P.boundary_distance(x[None])[0] - d[0]) < 1e-7
    pts = {(round(ma.vertices[i].point[0], 6), round(ma.vertices[i].point[1], 6)) for i in ma.M}
    assert (round(2 - math.sqrt(2), 6), round(2 - math.sqrt(2), 6)) in pts


@pytest.mark.parametrize("P", [square_with_hole(), random_polygon(16, 1, seed=3)], ids=["hole", "random"])
def test_axis_vertices_are_maximal_disks(P):
    ma = medial_axis(P)
    for i in ma.M:
        v = ma.vertices[i]
        c = np.asarray(v.point)[None]
        assert P.contains_batch(c)[0]
        assert abs(P.boundary_distance(c)[0] - v.radius) <= 1e-7 * P.diameter
        assert len(v.contacts(ma.sites)) >= 2


def test_square_cells(square):
    dec = classify_cells(square, medial_axis(square))
    assert dec.counts() == {"red": 4, "purple": 0, "blue": 0}


def test_tangent_disks_rectangle():
    dec = classify_cells(corridor(4, 2), medial_axis(corridor(4, 2)))
    assert dec.counts()["red"] == 4
    assert dec.counts()["purple"] == 0


def test_purple_between_separated_disks():
    P = corridor(5, 2)
    dec = classify_cells(P, medial_axis(P))
    assert dec.counts() == {"red": 4, "purple": 1, "blue": 0}
    cell = next(c for c in dec.cells if c.kind == "purple")
    assert sorted(tuple(dec.disk(i).center) for i in cell.disks) == [(1.0, 1.0), (4.0, 1.0)]


def test_lshape_cells():
    P = l_shape()
    dec = classify_cells(P, medial_axis(P))
    assert dec.counts()["blue"] >= 1
    for c in dec.cells:
        assert c.geom.area > 0
        if c.kind == "red":
            assert len(c.disks) == 1
    # cells and disks tile P
    import shapely
    from robustguard.region import circle_polygon
    union = shapely.union_all([c.geom for c in dec.cells]
                              + [circle_polygon(d.center, d.radius, 1e-6) for d in dec.disks])
    assert abs(union.intersection(P.shapely).area - P.area) < 1e-4


def test_chain_spacing():
    P = PolygonWithHoles([(-1, 0), (11, 0), (11, 2), (-1, 2)])
    dec = build_decomposition(P, RobustParams(0.5))
    (ch,) = dec.chains
    xs = [p[0] for p, _ in ch.inserted]
    assert xs == pytest.approx([i * math.sqrt(3) for i in range(1, 6)], rel=1e-9)
    assert all(r == pytest.approx(1.0) for _, r in ch.inserted)
    assert all(dec.disk(i).origin == "chain" for i in ch.disk_ids)
    assert dec.counts()["purple"] == 0


def test_short_purple_no_insertion():
    P = corridor(5, 2)
    dec = build_decomposition(P, RobustParams(0.25))
    assert [len(c.inserted) for c in dec.chains] == [0]


def test_trapezoid_spacing_monotone():
    P = PolygonWithHoles([(0, -1.5), (14, -0.8), (14, 0.8), (0, 1.5)])
    dec = build_decomposition(P, RobustParams(0.5))
    (ch,) = dec.chains
    v = dec.disk(ch.v)
    xs = [v.center[0]] + [p[0] for p, _ in ch.inserted]
    rs = [v.radius] + [r for _, r in ch.inserted]
    gaps = np.diff(xs)
    assert (np.diff(rs) < 0).all()
    assert (np.diff(gaps) < 0).all()


def test_chain_endpoint_order_independent():
    P = corridor(12, 2)
    dec = classify_cells(P, medial_axis(P))
    cell = next(c for c in dec.cells if c.kind == "purple")
    a = insert_purple_disks(P, dec, (cell.disks[0], cell.disks[1], cell.edges), RobustParams(0.5))
    b = insert_purple_disks(P, dec, (cell.disks[1], cell.disks[0], cell.edges), RobustParams(0.5))
    assert a.inserted == b.inserted


def test_association_examples():
    P = corridor(4, 2)
    dec = build_decomposition(P)
    (d,) = associate_disks(P, dec, (1, 1))
    assert d.center == (1.0, 1.0)
    ds = associate_disks(P, dec, (2, 1.99))
    assert sorted(x.center for x in ds) == [(1.0, 1.0), (3.0, 1.0)]
    corner = associate_disks(P, dec, (0.02, 0.02))
    assert len(corner) == 1 and corner[0].center == (1.0, 1.0)
    with pytest.raises(PointOutsideDomain):
        associate_disks(P, dec, (5, 5))


def test_largest_disk_bound(rng):
    # alpha |g - p| <= R_v of g's largest associated disk
    from robustguard.robust import robustly_guards_batch
    for P, alpha in ((l_shape(), 0.5), (square_with_hole(), 0.5), (corridor(20, 1), 0.5)):
        dec = build_decomposition(P, RobustParams(alpha))
        G = random_points_in(P, 4000, rng)
        Q = random_points_in(P, 4000, rng)
        ok = robustly_guards_batch(P, G, Q, alpha)
        for g, p in zip(G[ok], Q[ok]):
            R = max(d.radius for d in associate_disks(P, dec, g))
            assert alpha * np.linalg.norm(g - p) <= R * (1 + 1e-9)


def test_decomposition_json(lshape):
    import json
    s = json.dumps(build_decomposition(lshape, RobustParams(0.5)).to_json())
    assert '"cells"' in s
