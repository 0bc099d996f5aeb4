"""Medial axis, medial disks, the red/purple/blue decomposition and purple chains.

The axis is the part of the Voronoi diagram of the boundary sites (open
edges and reflex vertices) that lies inside P.  Vertices come from solving
every site triple for the centre of a disk tangent to all three, then
keeping the solutions whose disk is empty.  Junctions where an edge bisector
turns into a parabola show up as triples of an edge, its own reflex endpoint
and a third site, so they land in M as degree-2 vertices.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import Polygon

from .errors import NonTermination
from .geometry import PolygonWithHoles, as_point, seg_dist2
from .params import RobustParams
from .region import circle_polygon, polygons_of


# -- sites --------------------------------------------------------------------

@dataclass(frozen=True)
class Site:
    kind: str          # "edge" or "vertex"
    index: int         # edge index or vertex index in P
    a: tuple
    b: tuple | None = None

    def distance(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if self.kind == "vertex":
            return np.linalg.norm(pts - np.asarray(self.a), axis=1)
        return np.sqrt(seg_dist2(pts, np.asarray([self.a]), np.asarray([self.b]))[:, 0])

    def foot(self, x) -> np.ndarray:
        if self.kind == "vertex":
            return np.asarray(self.a)
        a, b = np.asarray(self.a), np.asarray(self.b)
        t = np.clip((np.asarray(x) - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
        return a + t * (b - a)

    def line(self):
        """Inward unit normal n and offset c with n.x - c the signed distance."""
        a, b = np.asarray(self.a), np.asarray(self.b)
        d = (b - a) / np.linalg.norm(b - a)
        n = np.array([-d[1], d[0]])
        return n, float(n @ a), d


def boundary_sites(P: PolygonWithHoles) -> list:
    sites = [Site("edge", i, tuple(P.edge_a[i]), tuple(P.edge_b[i])) for i in range(P.n)]
    sites += [Site("vertex", int(i), tuple(P.vertices[i])) for i in np.nonzero(P.reflex)[0]]
    return sites


def _endpoint_of(P, e: Site, v: Site) -> bool:
    return e.kind == "edge" and v.kind == "vertex" and v.index in (e.index, int(P.next_index[e.index]))


def _solve_triple(P, sites) -> list:
    """Centres (x, y, r) of circles tangent to three sites (r > 0, before validation)."""
    rows, rhs = [], []
    free = []
    edges = [s for s in sites if s.kind == "edge"]
    for s in sites:
        if s.kind == "edge":
            n, c, _ = s.line()
            rows.append([n[0], n[1], -1.0])
            rhs.append(c)
        else:
            own = [e for e in edges if _endpoint_of(P, e, s)]
            if len(own) >= 2:
                return []  # tangent at the vertex itself: radius 0
            if own:
                # foot on the edge is the vertex: x - v is normal to the edge
                _, _, d = own[0].line()
                rows.append([d[0], d[1], 0.0])
                rhs.append(float(d @ np.asarray(s.a)))
            else:
                free.append(np.asarray(s.a))
    for q in free[1:]:
        q0 = free[0]
        rows.append([2 * (q[0] - q0[0]), 2 * (q[1] - q0[1]), 0.0])
        rhs.append(float(q @ q - q0 @ q0))
    A, b = np.asarray(rows), np.asarray(rhs)
    if not free:
        if abs(np.linalg.det(A)) < 1e-12:
            return []
        return [np.linalg.solve(A, b)]
    if len(rows) != 2:
        return []
    nvec = np.cross(A[0], A[1])
    if np.linalg.norm(nvec) < 1e-12:
        return []
    X0 = np.linalg.lstsq(A, b, rcond=None)[0]
    q = free[0]
    # |x(t) - q|^2 - r(t)^2 = 0 with X(t) = X0 + t nvec
    dx, r0 = X0[:2] - q, X0[2]
    nx, nr = nvec[:2], nvec[2]
    qa = nx @ nx - nr * nr
    qb = 2 * (dx @ nx - r0 * nr)
    qc = dx @ dx - r0 * r0
    if abs(qa) < 1e-14:
        if abs(qb) < 1e-14:
            return []
        ts = [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        scale = max(qb * qb, abs(4 * qa * qc), 1e-300)
        if disc < 0:
            if disc < -1e-10 * scale:
                return []
            disc = 0.0
        sq = math.sqrt(disc)
        ts = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
    return [X0 + t * nvec for t in ts]


# -- axis ---------------------------------------------------------------------

@dataclass
class MedialVertex:
    point: tuple
    radius: float
    sites: tuple
    degree: int = 0
    on_boundary: bool = False

    def contacts(self, sites) -> list:
        pts = []
        for s in self.sites:
            f = sites[s].foot(self.point)
            if not any(np.linalg.norm(f - p) < 1e-9 * max(1.0, self.radius) for p in pts):
                pts.append(f)
        return pts


@dataclass
class MedialEdge:
    ends: tuple            # vertex indices
    kind: str              # "segment" or "parabola"
    sites: tuple           # the two site indices
    data: dict = field(default_factory=dict)


@dataclass
class MedialAxis:
    polygon: PolygonWithHoles
    sites: list
    vertices: list
    edges: list

    @property
    def M(self) -> list:
        """Indices of the vertices off the boundary."""
        return [i for i, v in enumerate(self.vertices) if not v.on_boundary]

    def point_at(self, e: MedialEdge, t: float) -> np.ndarray:
        """Point on edge e at parameter t in [0, 1]."""
        a = np.asarray(self.vertices[e.ends[0]].point)
        b = np.asarray(self.vertices[e.ends[1]].point)
        if e.kind == "segment":
            return a + t * (b - a)
        d = e.data
        o, ax, nrm, h = (np.asarray(d["foot"]), np.asarray(d["axis"]),
                         np.asarray(d["normal"]), d["h"])
        s0, s1 = (a - o) @ ax, (b - o) @ ax
        s = s0 + t * (s1 - s0)
        return o + s * ax + ((s * s + h * h) / (2 * h)) * nrm

    def samples(self, per_edge: int = 16) -> list:
        """(point, edge) pairs spread along every edge."""
        out = []
        for e in self.edges:
            for t in np.linspace(0, 1, per_edge + 2)[1:-1]:
                out.append((self.point_at(e, t), e))
        return out

    def to_json(self) -> dict:
        return {"vertices": [{"point": list(v.point), "radius": v.radius, "degree": v.degree,
                              "on_boundary": v.on_boundary} for v in self.vertices],
                "edges": [{"ends": list(e.ends), "kind": e.kind, "sites": list(e.sites),
                           **({"site_data": e.data} if e.data else {})} for e in self.edges]}


def _valid_centres(P, sites, X, tol):
    """Mask of candidate (x, y, r) rows whose disk is empty and still touches its sites."""
    X = np.atleast_2d(X)
    if len(X) == 0:
        return np.zeros(0, dtype=bool)
    pts, r = X[:, :2], X[:, 2]
    clr = P.boundary_distance(pts)
    inside = P._parity(pts)
    return inside & (r > tol) & (np.abs(clr - r) <= tol)


def _bisector_kind(P, s1: Site, s2: Site):
    if s1.kind == "edge" and s2.kind == "edge":
        return "segment"
    if s1.kind == "vertex" and s2.kind == "vertex":
        return "segment"
    e, v = (s1, s2) if s1.kind == "edge" else (s2, s1)
    if _endpoint_of(P, e, v):
        return None
    return "parabola"


def medial_axis(P: PolygonWithHoles) -> MedialAxis:
    sites = boundary_sites(P)
    tol = 1e-8 * P.diameter
    cands, trip = [], []
    for tr in itertools.combinations(range(len(sites)), 3):
        for X in _solve_triple(P, [sites[i] for i in tr]):
            cands.append(X)
            trip.append(tr)
    verts = []
    if cands:
        C = np.asarray(cands)
        ok = _valid_centres(P, sites, C, tol)
        for X, tr in zip(C[ok], np.asarray(trip)[ok]):
            # all three sites must be touched on their closed extent
            if any(abs(sites[i].distance(X[:2])[0] - X[2]) > tol for i in tr):
                continue
            verts.append(X)
    # merge coincident solutions and collect every touched site
    merged = []
    for X in verts:
        for m in merged:
            if np.linalg.norm(m[0][:2] - X[:2]) <= 10 * tol:
                break
        else:
            merged.append((X, None))
    vertices = []
    for X, _ in merged:
        touched = tuple(i for i, s in enumerate(sites) if abs(s.distance(X[:2])[0] - X[2]) <= 2 * tol)
        vertices.append(MedialVertex((float(X[0]), float(X[1])), float(X[2]), touched))
    # convex corners end the axis
    for i in range(P.n):
        if not P.reflex[i]:
            vertices.append(MedialVertex(tuple(map(float, P.vertices[i])), 0.0,
                                         (int(P.prev_index[i]), i), on_boundary=True))
    vertices.sort(key=lambda v: (v.on_boundary, v.point))
    edges = _connect(P, sites, vertices, tol)
    for e in edges:
        for k in e.ends:
            vertices[k].degree += 1
    return MedialAxis(P, sites, vertices, edges)


def _connect(P, sites, vertices, tol) -> list:
    by_pair = {}
    for k, v in enumerate(vertices):
        for a, b in itertools.combinations(sorted(v.sites), 2):
            by_pair.setdefault((a, b), []).append(k)
    edges = []
    for (a, b), ks in sorted(by_pair.items()):
        if len(ks) < 2:
            continue
        s1, s2 = sites[a], sites[b]
        kind = _bisector_kind(P, s1, s2)
        if kind is None:
            continue
        param, midpoint, data = _bisector_param(s1, s2, kind)
        if param is None:
            continue
        ks = sorted(ks, key=lambda k: param(vertices[k].point))
        for k1, k2 in zip(ks, ks[1:]):
            t1, t2 = param(vertices[k1].point), param(vertices[k2].point)
            if abs(t2 - t1) <= tol:
                continue
            m = midpoint(0.5 * (t1 + t2))
            d1 = s1.distance(m)[0]
            d2 = s2.distance(m)[0]
            clr = P.boundary_distance(m[None])[0]
            if P._parity(m[None])[0] and abs(d1 - d2) <= 4 * tol and abs(clr - d1) <= 4 * tol:
                edges.append(MedialEdge((k1, k2), kind, (a, b), data))
    return edges


def _bisector_param(s1: Site, s2: Site, kind):
    """Parameter along the bisector, the inverse map and the parabola data."""
    if kind == "parabola":
        e, v = (s1, s2) if s1.kind == "edge" else (s2, s1)
        n, c, d = e.line()
        q = np.asarray(v.a)
        h = float(n @ q - c)
        if h <= 0:
            return None, None, None
        foot = q - h * n

        def par(x):
            return float((np.asarray(x) - foot) @ d)

        def mid(s):
            return foot + s * d + ((s * s + h * h) / (2 * h)) * n
        data = {"focus": q.tolist(), "foot": foot.tolist(), "axis": d.tolist(),
                "normal": n.tolist(), "h": h}
        return par, mid, data
    if s1.kind == "edge":
        n1, c1, _ = s1.line()
        n2, c2, _ = s2.line()
        w = n1 - n2
        if np.linalg.norm(w) < 1e-12:
            return None, None, None
        # points with n1.x - c1 = n2.x - c2: w.x = c1 - c2
        w_n = w / np.linalg.norm(w)
        base = w_n * (c1 - c2) / np.linalg.norm(w)
    else:
        p, q = np.asarray(s1.a), np.asarray(s2.a)
        w_n = (q - p) / np.linalg.norm(q - p)
        base = 0.5 * (p + q)
    t = np.array([-w_n[1], w_n[0]])

    def par(x):
        return float((np.asarray(x) - base) @ t)

    def mid(s):
        return base + s * t
    return par, mid, {}


# -- disks and cells ---------------------------------------------------------------

@dataclass(frozen=True)
class MedialDisk:
    id: int
    center: tuple
    radius: float
    origin: str = "medial"     # "medial" or "chain"


@dataclass
class Cell:
    kind: str                  # "red", "purple" or "blue"
    geom: Polygon
    disks: tuple               # ids of the defining disks
    edges: tuple               # indices of the defining edges of P
    expected: bool = True      # blue cells: two intersecting disks and one edge

    def to_json(self) -> dict:
        return {"kind": self.kind, "disks": list(self.disks), "edges": list(self.edges),
                "area": self.geom.area, "boundary": np.asarray(self.geom.exterior.coords).tolist()}


@dataclass
class PurpleChain:
    id: int
    v: int                     # disk ids of the endpoints, R_v >= R_w
    w: int
    edges: tuple
    inserted: list             # [(point, radius)]
    disk_ids: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"id": self.id, "v": self.v, "w": self.w, "edges": list(self.edges),
                "inserted": [{"center": list(p), "radius": r} for p, r in self.inserted],
                "disk_ids": list(self.disk_ids)}


@dataclass
class CellDecomposition:
    polygon: PolygonWithHoles
    axis: MedialAxis
    disks: list
    cells: list
    chains: list = field(default_factory=list)
    alpha: float | None = None

    def disk(self, i) -> MedialDisk:
        return self.disks[i]

    def counts(self) -> dict:
        out = {"red": 0, "purple": 0, "blue": 0}
        for c in self.cells:
            out[c.kind] += 1
        return out

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "axis": self.axis.to_json(),
                "disks": [{"id": d.id, "center": list(d.center), "radius": d.radius,
                           "origin": d.origin} for d in self.disks],
                "cells": [c.to_json() for c in self.cells],
                "chains": [c.to_json() for c in self.chains]}


def _disk_tol(P):
    return 1e-6 * P.diameter


def _cells_of(P: PolygonWithHoles, disks: list) -> list:
    """Components of P minus the (slightly enlarged) disks, classified."""
    tol = _disk_tol(P)
    # enlarged so that tangent edges are crossed, which splits cells at tangencies
    polys = [circle_polygon(d.center, d.radius + tol, tol, outer=True) for d in disks]
    rest = P.shapely.difference(shapely.unary_union(polys)) if polys else P.shapely
    min_area = 1e-10 * P.area
    cells = []
    centers = np.asarray([d.center for d in disks]) if disks else np.zeros((0, 2))
    radii = np.asarray([d.radius for d in disks])
    for comp in polygons_of(rest):
        if comp.area <= min_area:
            continue
        ring = np.asarray(comp.exterior.coords)[:-1]
        for h in comp.interiors:
            ring = np.vstack((ring, np.asarray(h.coords)[:-1]))
        near_tol = 20 * tol
        dd = np.abs(np.linalg.norm(ring[:, None, :] - centers[None], axis=2) - radii[None]) \
            if len(disks) else np.zeros((len(ring), 0))
        touch_d = tuple(int(disks[j].id) for j in range(len(disks))
                        if np.count_nonzero(dd[:, j] <= near_tol) >= 2)
        de = np.sqrt(seg_dist2(ring, P.edge_a, P.edge_b))
        touch_e = []
        for i in range(P.n):
            on = ring[de[:, i] <= near_tol]
            if len(on) >= 2 and np.ptp(on, axis=0).max() > near_tol:
                touch_e.append(i)
        cells.append(_classify(P, comp, touch_d, tuple(touch_e), disks))
    cells.sort(key=lambda c: (c.geom.representative_point().x, c.geom.representative_point().y))
    return cells


def _classify(P, comp, dids, eids, disks) -> Cell:
    by_id = {d.id: d for d in disks}
    if len(dids) == 1 and len(eids) == 2:
        e1, e2 = eids
        shared = {e1, int(P.next_index[e1])} & {e2, int(P.next_index[e2])}
        if shared and not P.reflex[shared.pop()]:
            return Cell("red", comp, dids, eids)
    if len(dids) == 2 and len(eids) == 2:
        d1, d2 = by_id[dids[0]], by_id[dids[1]]
        e1, e2 = eids
        disjoint_e = not ({e1, int(P.next_index[e1])} & {e2, int(P.next_index[e2])})
        gap = np.linalg.norm(np.subtract(d1.center, d2.center)) - d1.radius - d2.radius
        if disjoint_e and gap > 0:
            tangent = all(abs(math.sqrt(seg_dist2(np.asarray([d.center]), P.edge_a[[e]], P.edge_b[[e]])[0, 0])
                              - d.radius) <= 1e-6 * P.diameter for d in (d1, d2) for e in eids)
            if tangent:
                return Cell("purple", comp, dids, eids)
    expected = len(dids) == 2 and len(eids) == 1 and (
        np.linalg.norm(np.subtract(by_id[dids[0]].center, by_id[dids[1]].center))
        <= by_id[dids[0]].radius + by_id[dids[1]].radius + _disk_tol(P))
    return Cell("blue", comp, dids, eids, expected)


def classify_cells(P: PolygonWithHoles, ma: MedialAxis) -> CellDecomposition:
    disks = [MedialDisk(k, ma.vertices[i].point, ma.vertices[i].radius) for k, i in enumerate(ma.M)]
    return CellDecomposition(P, ma, disks, _cells_of(P, disks))


# -- purple chains --------------------------------------------------------------------

def _line_circle_toward(a, b, c, R, toward):
    """Intersection of segment line ab with circle (c, R) on the side of ``toward``."""
    a, b, c = map(np.asarray, (a, b, c))
    d = (b - a) / np.linalg.norm(b - a)
    f = a + ((c - a) @ d) * d
    h2 = R * R - float((f - c) @ (f - c))
    if h2 < 0:
        return None
    s = math.sqrt(h2)
    sgn = 1.0 if (np.asarray(toward) - f) @ d >= 0 else -1.0
    return f + sgn * s * d


def insert_purple_disks(P: PolygonWithHoles, decomp: CellDecomposition, chain_endpoints,
                        params: RobustParams) -> PurpleChain:
    """Grow a chain of medial disks from the larger end disk of a purple cell.

    ``chain_endpoints`` is (disk id, disk id, (edge, edge)).
    """
    i1, i2, eids = chain_endpoints
    d1, d2 = decomp.disks[i1], decomp.disks[i2]
    # anchor at the larger disk; ties by lexicographic centre
    if (d2.radius, tuple(-x for x in d2.center)) > (d1.radius, tuple(-x for x in d1.center)):
        d1, d2 = d2, d1
    v, w = np.asarray(d1.center), np.asarray(d2.center)
    alpha = params.alpha
    vw = w - v
    L = float(np.linalg.norm(vw))
    u = vw / L
    k = math.sqrt(max(1.0 / alpha ** 2 - 1.0, 0.0))
    cap = math.ceil(L / (d2.radius * k)) + 2 if k > 0 else 2
    # tangency points of D_w on both edges
    tw = [_foot(P, e, w) for e in eids]
    c, Rc = v, d1.radius
    inserted = []
    while True:
        reach = Rc / alpha
        if all(np.linalg.norm(t - c) <= reach * (1 + 1e-12) for t in tw):
            break
        best = None
        for e in eids:
            q = _line_circle_toward(P.edge_a[e], P.edge_b[e], c, reach, w)
            if q is None:
                continue
            # the medial disk touching edge e at q: centre on line vw, normal through q
            a, b = P.edge_a[e], P.edge_b[e]
            de = (b - a) / np.linalg.norm(b - a)
            nrm = np.array([-de[1], de[0]])
            den = float(u @ de)
            t = float((q - v) @ de) / den if abs(den) > 1e-15 else None
            if t is None:
                # edge normal to vw: cannot happen for a purple cell
                continue
            p = v + t * u
            if best is None or t < best[0]:
                best = (t, p, abs(float((p - a) @ nrm)))
        if best is None:
            break
        t, p, Rp = best
        if t >= L:
            break
        if (p - c) @ u <= 1e-12 * L:
            raise NonTermination("purple chain does not advance")
        inserted.append((tuple(map(float, p)), float(Rp)))
        if len(inserted) > cap:
            raise NonTermination(f"purple chain exceeded {cap} insertions")
        c, Rc = p, Rp
    return PurpleChain(len(decomp.chains), d1.id, d2.id, tuple(eids), inserted)


def _foot(P, e, x):
    a, b = P.edge_a[e], P.edge_b[e]
    t = np.clip((x - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
    return a + t * (b - a)


def build_decomposition(P: PolygonWithHoles, params: RobustParams | None = None) -> CellDecomposition:
    """Medial axis, cells and (when params are given) purple chains with reclassification."""
    ma = medial_axis(P)
    dec = classify_cells(P, ma)
    if params is None:
        return dec
    dec.alpha = params.alpha
    disks = list(dec.disks)
    chains = []
    for cell in [c for c in dec.cells if c.kind == "purple"]:
        ch = insert_purple_disks(P, CellDecomposition(P, ma, disks, [], chains),
                                 (cell.disks[0], cell.disks[1], cell.edges), params)
        for p, r in ch.inserted:
            ch.disk_ids.append(len(disks))
            disks.append(MedialDisk(len(disks), p, r, "chain"))
        chains.append(ch)
    if chains:
        dec = CellDecomposition(P, ma, disks, _cells_of(P, disks), chains, params.alpha)
    return dec


# -- association ----------------------------------------------------------------------

def associate_batch(decomp: CellDecomposition, pts) -> list:
    pts = np.atleast_2d(np.asarray(pts, float))
    D = decomp.disks
    C = np.asarray([d.center for d in D])
    R = np.asarray([d.radius for d in D])
    tol = _disk_tol(decomp.polygon)
    dist = np.linalg.norm(pts[:, None, :] - C[None], axis=2)
    inside = dist <= R[None] + tol
    out = [None] * len(pts)
    for i in np.nonzero(inside.any(axis=1))[0]:
        cand = np.nonzero(inside[i])[0]
        out[i] = (int(D[cand[np.argmax(R[cand])]].id),)
    rest = [i for i in range(len(pts)) if out[i] is None]
    if rest:
        cells = decomp.cells
        q = shapely.points(pts[rest])
        dd = np.stack([shapely.distance(c.geom, q) for c in cells], axis=1) if cells else None
        for k, i in enumerate(rest):
            if dd is None:
                out[i] = (int(D[int(np.argmin(dist[i] - R))].id),)
                continue
            j = int(np.argmin(dd[k]))
            ids = cells[j].disks
            if not ids:
                ids = (int(D[int(np.argmin(dist[i] - R))].id),)
            out[i] = tuple(ids)
    return out


def associate_disks(P: PolygonWithHoles, decomp: CellDecomposition, g) -> list:
    g = as_point(g)
    P.require_inside(g)
    return [decomp.disks[i] for i in associate_batch(decomp, [g])[0]]
