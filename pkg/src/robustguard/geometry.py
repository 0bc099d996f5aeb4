"""Planar primitives: polygons with holes, disks, visibility and clearance.

Points are plain ``(x, y)`` tuples or numpy arrays of shape (2,).  Batch
functions take arrays of shape (N, 2).  The domain is closed: a point within
``P.eps`` of the boundary belongs to P.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InvalidPolygon, PointOutsideDomain

EPS_GEOM = 1e-9
# error bound of the float orientation determinant (Shewchuk's ccwerrboundA)
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53
_CHUNK = 4096


def as_point(q) -> tuple:
    x, y = float(q[0]), float(q[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {q!r}")
    return (x, y)


def orient2d(a, b, c) -> int:
    """Sign of the determinant (b - a) x (c - a): 1 left turn, -1 right, 0 collinear.

    Float filter first; exact rational arithmetic only when the filter cannot
    decide.
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    exact = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (exact > 0) - (exact < 0)


def orient2d_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized orient2d over broadcast arrays of points (..., 2)."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    detleft = (a[..., 0] - c[..., 0]) * (b[..., 1] - c[..., 1])
    detright = (a[..., 1] - c[..., 1]) * (b[..., 0] - c[..., 0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    unsure = np.argwhere((np.abs(det) <= bound))
    for idx in unsure:
        idx = tuple(idx)
        out[idx] = orient2d(a[idx], b[idx], c[idx])
    return out


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed segment intersection test with exact orientation."""
    o1, o2 = orient2d(p1, p2, q1), orient2d(p1, p2, q2)
    o3, o4 = orient2d(q1, q2, p1), orient2d(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))
    if o1 == 0 and on_seg(p1, p2, q1):
        return True
    if o2 == 0 and on_seg(p1, p2, q2):
        return True
    if o3 == 0 and on_seg(q1, q2, p1):
        return True
    if o4 == 0 and on_seg(q1, q2, p2):
        return True
    return False


def signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def seg_dist2(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distances from points (N,2) to segments a->b (E,2); shape (N,E)."""
    d = b - a
    L2 = np.einsum("ij,ij->i", d, d)
    L2 = np.where(L2 > 0, L2, 1.0)
    px = pts[:, None, 0] - a[None, :, 0]
    py = pts[:, None, 1] - a[None, :, 1]
    t = np.clip((px * d[None, :, 0] + py * d[None, :, 1]) / L2[None, :], 0.0, 1.0)
    ex = px - t * d[None, :, 0]
    ey = py - t * d[None, :, 1]
    return ex * ex + ey * ey


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius >= 0:
            raise ValueError("disk radius must be nonnegative")

    def contains(self, q, tol: float = 0.0) -> bool:
        return math.dist(self.center, q) <= self.radius + tol


class PolygonWithHoles:
    """Closed polygonal domain: CCW outer ring plus CW hole rings."""

    def __init__(self, outer, holes=(), check: bool = True, eps_geom: float = EPS_GEOM):
        outer = self._clean(outer)
        holes = [self._clean(h) for h in holes]
        if check:
            for r in [outer] + holes:
                if len(r) < 3:
                    raise InvalidPolygon("ring with fewer than 3 vertices")
        if signed_area(outer) < 0:
            outer = outer[::-1].copy()
        holes = [h[::-1].copy() if signed_area(h) > 0 else h for h in holes]
        self.outer = outer
        self.holes = holes
        self.rings = [outer] + holes
        verts = np.vstack(self.rings)
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        self.bbox = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        self.diameter = float(math.hypot(*(hi - lo)))
        self.eps_geom = eps_geom
        self.eps = eps_geom * max(self.diameter, 1e-300)
        a, b, ring_id, nxt, prv = [], [], [], [], []
        off = 0
        for k, r in enumerate(self.rings):
            m = len(r)
            a.append(r)
            b.append(np.roll(r, -1, axis=0))
            ring_id += [k] * m
            nxt += [off + (i + 1) % m for i in range(m)]
            prv += [off + (i - 1) % m for i in range(m)]
            off += m
        self.vertices = verts
        self.edge_a = np.vstack(a)
        self.edge_b = np.vstack(b)
        self.ring_id = np.array(ring_id)
        self.next_index = np.array(nxt)
        self.prev_index = np.array(prv)
        self.n = len(verts)
        for arr in (self.vertices, self.edge_a, self.edge_b):
            arr.setflags(write=False)
        if check:
            self._validate()

    @staticmethod
    def _clean(ring) -> np.ndarray:
        r = np.asarray(ring, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(r)):
            raise InvalidPolygon("non-finite coordinate")
        if len(r) > 1 and np.allclose(r[0], r[-1], rtol=0, atol=0):
            r = r[:-1]
        return r.copy()

    def _validate(self):
        tol = self.eps
        for r in self.rings:
            d = np.linalg.norm(np.roll(r, -1, axis=0) - r, axis=1)
            if np.any(d <= tol):
                raise InvalidPolygon("consecutive vertices coincide")
        A, B = self.edge_a, self.edge_b
        # candidate pairs by bounding box overlap, then exact test
        lo = np.minimum(A, B)
        hi = np.maximum(A, B)
        ov = ((lo[:, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[:, None, 0])
              & (lo[:, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[:, None, 1]))
        for i, j in zip(*np.nonzero(np.triu(ov, 1))):
            if self.next_index[i] == j or self.next_index[j] == i:
                # adjacent edges may only share their common vertex
                if self.next_index[i] == j:
                    u, w, x = A[i], B[i], B[j]
                else:
                    u, w, x = A[j], B[j], B[i]
                if orient2d(u, w, x) == 0 and np.dot(w - u, x - w) < 0:
                    raise InvalidPolygon("ring folds back on itself")
                if self.next_index[i] == j and self.next_index[j] == i:
                    raise InvalidPolygon("degenerate two-edge ring")
                continue
            if _segments_intersect(A[i], B[i], A[j], B[j]):
                raise InvalidPolygon(f"edges {i} and {j} intersect")
        outer = self.outer
        for h in self.holes:
            if not _ring_contains_strict(outer, h[0]):
                raise InvalidPolygon("hole not inside outer ring")
        for i, h in enumerate(self.holes):
            for j, h2 in enumerate(self.holes):
                if i != j and _ring_contains_strict(h2, h[0]):
                    raise InvalidPolygon("nested holes")

    # -- serialization -------------------------------------------------
    @classmethod
    def from_json(cls, obj: dict, **kw) -> "PolygonWithHoles":
        if not isinstance(obj, dict) or "outer" not in obj:
            raise InvalidPolygon("polygon JSON needs an 'outer' ring")
        return cls(obj["outer"], obj.get("holes", []), **kw)

    def to_json(self) -> dict:
        return {"outer": self.outer.tolist(), "holes": [h.tolist() for h in self.holes]}

    # -- derived data ----------------------------------------------------
    @cached_property
    def area(self) -> float:
        return sum(signed_area(r) for r in self.rings)

    @cached_property
    def reflex(self) -> np.ndarray:
        """Per-vertex flag: interior angle > pi (interior is left of every edge)."""
        out = np.zeros(self.n, dtype=bool)
        for i in range(self.n):
            u = self.vertices[self.prev_index[i]]
            w = self.vertices[i]
            x = self.vertices[self.next_index[i]]
            out[i] = orient2d(u, w, x) < 0
        return out

    def interior_angles(self) -> np.ndarray:
        V = self.vertices
        u = V[self.prev_index] - V
        x = V[self.next_index] - V
        ang = np.arctan2(u[:, 1], u[:, 0]) - np.arctan2(x[:, 1], x[:, 0])
        return np.mod(ang, 2 * math.pi)

    def min_interior_angle(self) -> float:
        return float(self.interior_angles().min())

    @cached_property
    def shapely(self):
        from shapely.geometry import Polygon
        return Polygon(self.outer, [h for h in self.holes])

    # -- point queries ---------------------------------------------------
    def boundary_distance(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(len(pts))
        for s in range(0, len(pts), _CHUNK):
            d2 = seg_dist2(pts[s:s + _CHUNK], self.edge_a, self.edge_b)
            out[s:s + _CHUNK] = np.sqrt(d2.min(axis=1))
        return out

    def _parity(self, pts: np.ndarray) -> np.ndarray:
        A, B = self.edge_a, self.edge_b
        inside = np.zeros(len(pts), dtype=bool)
        for s in range(0, len(pts), _CHUNK):
            p = pts[s:s + _CHUNK]
            py = p[:, None, 1]
            ay, by = A[None, :, 1], B[None, :, 1]
            straddle = (ay > py) != (by > py)
            dy = np.where(by - ay == 0, 1.0, by - ay)
            xint = A[None, :, 0] + (py - ay) * (B[None, :, 0] - A[None, :, 0]) / dy
            cross = straddle & (p[:, None, 0] < xint)
            inside[s:s + _CHUNK] = (np.count_nonzero(cross, axis=1) % 2) == 1
        return inside

    def contains_batch(self, pts, tol: float | None = None) -> np.ndarray:
        """Closed membership; points within ``tol`` (default eps) of the boundary count."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        tol = self.eps if tol is None else tol
        near = self.boundary_distance(pts) <= tol
        return near | self._parity(pts)

    def contains(self, q, tol: float | None = None) -> bool:
        return bool(self.contains_batch(np.asarray([as_point(q)]), tol)[0])

    def require_inside(self, *pts):
        for q in pts:
            if not self.contains(q):
                raise PointOutsideDomain(f"point {tuple(q)} is outside the polygon")

    def __repr__(self):
        return f"PolygonWithHoles(n={self.n}, holes={len(self.holes)})"


def _ring_contains_strict(ring: np.ndarray, q) -> bool:
    n = len(ring)
    c = False
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if orient2d(a, b, q) == 0 and min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= q[1] <= max(a[1], b[1]):
            return False
        if (a[1] > q[1]) != (b[1] > q[1]):
            # q strictly left of the upward edge <=> crossing to the right
            o = orient2d(a, b, q)
            if (b[1] > a[1] and o > 0) or (b[1] < a[1] and o < 0):
                c = not c
    return c


# ---------------------------------------------------------------------------
# clearance and containment predicates

def clearance_batch(P: PolygonWithHoles, pts) -> np.ndarray:
    return P.boundary_distance(pts)


def clearance(P: PolygonWithHoles, g) -> float:
    g = as_point(g)
    P.require_inside(g)
    return float(P.boundary_distance(np.asarray([g]))[0])


def disk_in_polygon(P: PolygonWithHoles, d: Disk) -> bool:
    c = np.asarray([d.center])
    if not P.contains_batch(c)[0]:
        return False
    return bool(P.boundary_distance(c)[0] >= d.radius - P.eps_geom * d.radius)


def disks_in_polygon_batch(P: PolygonWithHoles, centers, radii) -> np.ndarray:
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.asarray(radii, dtype=float)
    dist = P.boundary_distance(centers)
    inside = (dist <= P.eps) | P._parity(centers)
    return inside & (dist >= radii * (1.0 - P.eps_geom))


def segments_in_polygon_batch(P: PolygonWithHoles, p0, p1, check_ends: bool = True) -> np.ndarray:
    """Row-wise test that the closed segment p0[i] p1[i] lies in P.

    A segment fails if it properly crosses a boundary edge, or if a piece
    between consecutive boundary contacts leaves P (e.g. passing through two
    vertices of a notch).
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    N = len(p0)
    ok = np.ones(N, dtype=bool)
    if check_ends:
        ok &= P.contains_batch(p0) & P.contains_batch(p1)
    tol = P.eps
    A, B, V = P.edge_a, P.edge_b, P.vertices
    e = B - A
    elen = np.maximum(np.linalg.norm(e, axis=1), 1e-300)
    for s in range(0, N, _CHUNK):
        sl = slice(s, min(s + _CHUNK, N))
        idx = np.nonzero(ok[sl])[0] + s
        if len(idx) == 0:
            continue
        a, b = p0[idx], p1[idx]
        d = b - a
        dlen = np.linalg.norm(d, axis=1)
        good_len = dlen > tol
        dl = np.where(good_len, dlen, 1.0)
        # signed distances of edge endpoints from the segment line
        ra = (d[:, None, 0] * (A[None, :, 1] - a[:, None, 1])
              - d[:, None, 1] * (A[None, :, 0] - a[:, None, 0])) / dl[:, None]
        rb = (d[:, None, 0] * (B[None, :, 1] - a[:, None, 1])
              - d[:, None, 1] * (B[None, :, 0] - a[:, None, 0])) / dl[:, None]
        # signed distances of segment endpoints from the edge lines
        sa = (e[None, :, 0] * (a[:, None, 1] - A[None, :, 1])
              - e[None, :, 1] * (a[:, None, 0] - A[None, :, 0])) / elen[None, :]
        sb = (e[None, :, 0] * (b[:, None, 1] - A[None, :, 1])
              - e[None, :, 1] * (b[:, None, 0] - A[None, :, 0])) / elen[None, :]
        straddle1 = ((ra > tol) & (rb < -tol)) | ((ra < -tol) & (rb > tol))
        straddle2 = ((sa > tol) & (sb < -tol)) | ((sa < -tol) & (sb > tol))
        proper = np.any(straddle1 & straddle2, axis=1) & good_len
        res = ~proper
        # boundary vertices touching the segment interior
        rv = (d[:, None, 0] * (V[None, :, 1] - a[:, None, 1])
              - d[:, None, 1] * (V[None, :, 0] - a[:, None, 0])) / dl[:, None]
        tv = ((V[None, :, 0] - a[:, None, 0]) * d[:, None, 0]
              + (V[None, :, 1] - a[:, None, 1]) * d[:, None, 1]) / (dl[:, None] ** 2)
        touch = (np.abs(rv) <= tol) & (tv > 0) & (tv < 1) & good_len[:, None] & res[:, None]
        rows = np.nonzero(touch.any(axis=1))[0]
        if len(rows):
            mids, owner = [], []
            for r in rows:
                ts = np.concatenate(([0.0], np.sort(tv[r, touch[r]]), [1.0]))
                m = 0.5 * (ts[:-1] + ts[1:])
                m = m[(ts[1:] - ts[:-1]) * dlen[r] > tol]
                mids.append(a[r] + m[:, None] * d[r])
                owner += [r] * len(m)
            if owner:
                inside = P.contains_batch(np.vstack(mids))
                owner = np.asarray(owner)
                bad = np.unique(owner[~inside])
                res[bad] = False
        ok[idx] = res
    return ok


def sees_batch(P: PolygonWithHoles, p, q) -> np.ndarray:
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    p, q = np.broadcast_arrays(p, q)
    return segments_in_polygon_batch(P, p, q)


def sees(P: PolygonWithHoles, p, q) -> bool:
    p, q = as_point(p), as_point(q)
    P.require_inside(p, q)
    return bool(segments_in_polygon_batch(P, [p], [q], check_ends=False)[0])


def triangles_in_polygon_batch(P: PolygonWithHoles, a, b, c) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    c = np.atleast_2d(np.asarray(c, dtype=float))
    ok = P.contains_batch(a) & P.contains_batch(b) & P.contains_batch(c)
    for u, w in ((a, b), (b, c), (c, a)):
        live = np.nonzero(ok)[0]
        if len(live) == 0:
            return ok
        ok[live] = segments_in_polygon_batch(P, u[live], w[live], check_ends=False)
    live = np.nonzero(ok)[0]
    if len(live) == 0:
        return ok
    tol = P.eps
    V = P.vertices
    ta, tb, tc = a[live], b[live], c[live]
    cr = ((tb[:, 0] - ta[:, 0]) * (tc[:, 1] - ta[:, 1])
          - (tb[:, 1] - ta[:, 1]) * (tc[:, 0] - ta[:, 0]))
    flip = cr < 0
    tb2 = np.where(flip[:, None], tc, tb)
    tc2 = np.where(flip[:, None], tb, tc)
    strictly = np.ones((len(live), len(V)), dtype=bool)
    for u, w in ((ta, tb2), (tb2, tc2), (tc2, ta)):
        dvec = w - u
        L = np.maximum(np.linalg.norm(dvec, axis=1), 1e-300)
        sd = (dvec[:, None, 0] * (V[None, :, 1] - u[:, None, 1])
              - dvec[:, None, 1] * (V[None, :, 0] - u[:, None, 0])) / L[:, None]
        strictly &= sd > tol
    ok[live] = ~strictly.any(axis=1)
    return ok


def triangle_in_polygon(P: PolygonWithHoles, a, b, c) -> bool:
    return bool(triangles_in_polygon_batch(P, [as_point(a)], [as_point(b)], [as_point(c)])[0])


# ---------------------------------------------------------------------------
# visibility polygon

def _local_cone(P: PolygonWithHoles, p: np.ndarray):
    """Interior cone of P at a boundary point p as (start, span) angles, or None."""
    d = np.sqrt(seg_dist2(p[None, :], P.edge_a, P.edge_b)[0])
    on = np.nonzero(d <= P.eps)[0]
    if len(on) == 0:
        return None
    V = P.vertices
    vd = np.linalg.norm(V - p, axis=1)
    at = np.nonzero(vd <= P.eps)[0]
    if len(at):
        i = int(at[0])
        u, x = V[P.prev_index[i]], V[P.next_index[i]]
        start = math.atan2(x[1] - p[1], x[0] - p[0])
        end = math.atan2(u[1] - p[1], u[0] - p[0])
    else:
        i = int(on[0])
        a, b = P.edge_a[i], P.edge_b[i]
        start = math.atan2(b[1] - a[1], b[0] - a[0])
        end = start + math.pi
    span = (end - start) % (2 * math.pi)
    if span == 0:
        span = 2 * math.pi
    return start, span


def _cast(P: PolygonWithHoles, p: np.ndarray, dirs: np.ndarray):
    """Nearest boundary hit along each ray; returns (t, edge index)."""
    A, B = P.edge_a, P.edge_b
    e = B - A
    ap = A - p
    denom = dirs[:, None, 0] * e[None, :, 1] - dirs[:, None, 1] * e[None, :, 0]
    safe = np.where(np.abs(denom) > 1e-300, denom, np.inf)
    t = (ap[None, :, 0] * e[None, :, 1] - ap[None, :, 1] * e[None, :, 0]) / safe
    s = (ap[None, :, 0] * dirs[:, None, 1] - ap[None, :, 1] * dirs[:, None, 0]) / safe
    valid = (s >= -1e-12) & (s <= 1 + 1e-12) & (t > P.eps) & np.isfinite(safe)
    t = np.where(valid, t, np.inf)
    k = np.argmin(t, axis=1)
    return t[np.arange(len(dirs)), k], k


def visibility_polygon(P: PolygonWithHoles, p) -> PolygonWithHoles:
    """VP(p) by an angular sweep of rays just before and after every vertex direction."""
    p = np.asarray(as_point(p))
    P.require_inside(tuple(p))
    V = P.vertices
    rel = V - p
    dist = np.linalg.norm(rel, axis=1)
    keep = dist > P.eps
    ang = np.sort(np.arctan2(rel[keep, 1], rel[keep, 0]))
    # merge collinear event directions
    uniq = [ang[0]]
    for x in ang[1:]:
        if x - uniq[-1] > 1e-13:
            uniq.append(x)
    uniq = np.asarray(uniq)
    gaps = np.diff(np.concatenate((uniq, [uniq[0] + 2 * math.pi])))
    delta = min(1e-7, 0.25 * float(gaps.min())) if len(uniq) > 1 else 1e-7
    cone = _local_cone(P, p)
    phis = np.repeat(uniq, 2) + np.tile([-delta, delta], len(uniq))
    dirs = np.stack((np.cos(phis), np.sin(phis)), axis=1)
    t, k = _cast(P, p, dirs)
    exact = np.repeat(np.stack((np.cos(uniq), np.sin(uniq)), axis=1), 2, axis=0)
    pts = []
    A, B = P.edge_a, P.edge_b
    for j in range(len(phis)):
        if cone is not None:
            rel_ang = (phis[j] - cone[0]) % (2 * math.pi)
            if rel_ang > cone[1]:
                pts.append(p.copy())
                continue
        if not np.isfinite(t[j]):
            pts.append(p.copy())
            continue
        a, e = A[k[j]], B[k[j]] - A[k[j]]
        d = exact[j]
        den = d[0] * e[1] - d[1] * e[0]
        hit = p + t[j] * dirs[j]
        if abs(den) > 1e-12 * np.linalg.norm(e):
            tt = ((a[0] - p[0]) * e[1] - (a[1] - p[1]) * e[0]) / den
            if tt > 0:
                hit = p + tt * d
        pts.append(hit)
    ring = [pts[0]]
    for q in pts[1:]:
        if np.linalg.norm(q - ring[-1]) > P.eps:
            ring.append(q)
    if len(ring) > 1 and np.linalg.norm(ring[0] - ring[-1]) <= P.eps:
        ring.pop()
    ring = np.asarray(ring)
    return PolygonWithHoles(ring, check=False, eps_geom=P.eps_geom)
