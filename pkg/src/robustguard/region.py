"""Curved regions: exact boundary pieces plus a polyline approximation.

Curves are discretized with chords (sagitta bounded by a tolerance) and the
boolean operations run on the resulting polygons through shapely.  Every
approximate boundary edge is then labelled with the exact curve it traces, so
the region keeps an analytic description next to its polygon.
"""
import math

import numpy as np
import shapely
from shapely.geometry import LineString, MultiPolygon, Point, Polygon, GeometryCollection


# -- curve primitives ---------------------------------------------------------

class LineCurve:
    kind = "segment"

    def __init__(self, a, b):
        self.a = np.asarray(a, float)
        self.b = np.asarray(b, float)
        d = self.b - self.a
        self.n = np.array([-d[1], d[0]]) / max(np.linalg.norm(d), 1e-300)

    def residual(self, pts):
        return np.abs((pts - self.a) @ self.n)

    def piece(self, start, end):
        return {"kind": "segment", "from": list(map(float, start)), "to": list(map(float, end))}


class CircleCurve:
    kind = "arc"

    def __init__(self, center, radius):
        self.c = np.asarray(center, float)
        self.r = float(radius)

    def residual(self, pts):
        return np.abs(np.linalg.norm(pts - self.c, axis=1) - self.r)

    def piece(self, start, end):
        return {"kind": "arc", "center": self.c.tolist(), "radius": self.r,
                "from": list(map(float, start)), "to": list(map(float, end))}


class HyperbolaCurve:
    """Level set k*y^2 + 2*h*y - (x^2 + h^2) = 0 in a rigid frame.

    Frame: origin o, unit axis t along the edge, normal nrm pointing to the
    guarded point, which sits at (0, h).  ``k = 1/alpha^2 - 1``.
    """
    kind = "hyperbola"

    def __init__(self, origin, axis, h, alpha):
        self.o = np.asarray(origin, float)
        self.t = np.asarray(axis, float)
        self.nrm = np.array([-self.t[1], self.t[0]])
        self.h = float(h)
        self.alpha = float(alpha)
        self.k = 1.0 / alpha ** 2 - 1.0

    def local(self, pts):
        rel = np.atleast_2d(pts) - self.o
        return rel @ self.t, rel @ self.nrm

    def world(self, x, y):
        return self.o + np.outer(x, self.t) + np.outer(y, self.nrm)

    def residual(self, pts):
        x, y = self.local(pts)
        F = self.k * y * y + 2 * self.h * y - (x * x + self.h * self.h)
        gx, gy = -2 * x, 2 * self.k * y + 2 * self.h
        return np.abs(F) / np.maximum(np.hypot(gx, gy), 1e-300)

    def piece(self, start, end):
        return {"kind": "hyperbola", "origin": self.o.tolist(), "axis": self.t.tolist(),
                "h": self.h, "alpha": self.alpha,
                "canonical": [1.0, 1.0 - self.alpha ** -2, -2.0, 1.0],
                "from": list(map(float, start)), "to": list(map(float, end))}


def arc_steps(radius: float, sweep: float, tol: float) -> int:
    """Chord count so the sagitta of each chord stays below tol."""
    if radius <= tol or sweep <= 0:
        return 1
    step = 2.0 * math.acos(max(-1.0, 1.0 - tol / radius))
    return max(1, int(math.ceil(abs(sweep) / max(step, 1e-6))))


def arc_points(center, radius, a0, a1, tol) -> np.ndarray:
    """Points on the circle from angle a0 to a1 (counterclockwise if a1 > a0)."""
    m = arc_steps(radius, abs(a1 - a0), tol)
    t = np.linspace(a0, a1, m + 1)
    return np.column_stack((center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)))


def circle_polygon(center, radius, tol, outer: bool = False) -> Polygon:
    """Chord polygon of a circle; ``outer`` scales it to circumscribe the disk."""
    m = max(8, arc_steps(radius, 2 * math.pi, tol))
    t = np.linspace(0, 2 * math.pi, m, endpoint=False)
    r = radius / math.cos(math.pi / m) if outer else radius
    return Polygon(np.column_stack((center[0] + r * np.cos(t), center[1] + r * np.sin(t))))


def adaptive_curve(f, x0, x1, tol, depth: int = 18):
    """Sample y = f(x) on [x0, x1] so each chord is within tol of the curve."""
    xs = [x0]

    def rec(a, b, fa, fb, d):
        m = 0.5 * (a + b)
        fm = f(m)
        if d <= 0 or abs(fm - 0.5 * (fa + fb)) <= tol:
            xs.append(b)
            return
        rec(a, m, fa, fm, d - 1)
        rec(m, b, fm, fb, d - 1)

    n0 = 8
    grid = np.linspace(x0, x1, n0 + 1)
    vals = [f(x) for x in grid]
    for i in range(n0):
        rec(grid[i], grid[i + 1], vals[i], vals[i + 1], depth)
    return np.asarray(xs)


# -- region ---------------------------------------------------------------------

def polygons_of(geom) -> list:
    if geom is None or geom.is_empty:
        return []
    if isinstance(geom, Polygon):
        return [geom]
    if isinstance(geom, (MultiPolygon, GeometryCollection)):
        out = []
        for g in geom.geoms:
            out += polygons_of(g)
        return out
    return []


def label_pieces(geom, curves, tol) -> list:
    """Split each approximate ring into runs of edges that trace one curve."""
    pieces = []
    for poly in polygons_of(geom):
        for ring in [poly.exterior] + list(poly.interiors):
            pts = np.asarray(ring.coords)[:-1]
            if len(pts) < 3 or not curves:
                continue
            res = np.stack([c.residual(pts) for c in curves], axis=1)
            edge_res = np.maximum(res, np.roll(res, -1, axis=0))
            lab = np.argmin(edge_res, axis=1)
            # start the walk at a label change so runs do not wrap
            change = np.nonzero(lab != np.roll(lab, 1))[0]
            start = int(change[0]) if len(change) else 0
            order = [(start + i) % len(pts) for i in range(len(pts))]
            run_start = order[0]
            for j in range(1, len(order) + 1):
                i = order[j % len(order)]
                if j == len(order) or lab[i] != lab[run_start]:
                    c = curves[lab[run_start]]
                    pieces.append(c.piece(pts[run_start], pts[i]))
                    run_start = i
    return pieces


class Region:
    """Closed region with exact pieces, an approximate shapely geometry and
    an optional exact membership function (array (N,2) -> bool)."""

    def __init__(self, geom, pieces, anchor, member=None, flags=(), tol=0.0):
        self.geom = geom
        self.pieces = list(pieces)
        self.anchor = tuple(map(float, anchor)) if anchor is not None else None
        self._member = member
        self.flags = tuple(flags)
        self.tol = float(tol)

    @property
    def area(self) -> float:
        return float(self.geom.area) if self.geom is not None else 0.0

    @property
    def is_degenerate(self) -> bool:
        return self.area == 0.0

    @property
    def is_empty(self) -> bool:
        return self.geom is None or self.geom.is_empty

    def contains_batch(self, pts) -> np.ndarray:
        """Exact membership when available, else the approximation."""
        pts = np.atleast_2d(np.asarray(pts, float))
        if self._member is not None:
            return np.asarray(self._member(pts), dtype=bool)
        return self.contains_approx_batch(pts)

    def contains(self, q) -> bool:
        return bool(self.contains_batch([q])[0])

    def contains_approx_batch(self, pts, tol: float | None = None) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        tol = max(self.tol * 1e-3, 1e-12) if tol is None else tol
        if self.area > 0:
            inside = shapely.contains_xy(self.geom, pts[:, 0], pts[:, 1])
            if tol > 0:
                out = ~inside
                if out.any():
                    d = shapely.distance(self.geom, shapely.points(pts[out]))
                    inside[out] = d <= tol
            return inside
        d = shapely.distance(self.geom, shapely.points(pts))
        return d <= tol

    def boundary_distance(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        if self.is_empty:
            return np.full(len(pts), np.inf)
        b = self.geom.boundary if self.area > 0 else self.geom
        return shapely.distance(b, shapely.points(pts))

    def distance(self, q) -> float:
        if self.is_empty:
            return math.inf
        return float(self.geom.distance(Point(q)))

    def rings(self) -> list:
        out = []
        for poly in polygons_of(self.geom):
            out.append(np.asarray(poly.exterior.coords))
            out += [np.asarray(r.coords) for r in poly.interiors]
        if not out and self.geom is not None and not self.geom.is_empty:
            out.append(np.asarray(shapely.get_coordinates(self.geom)))
        return out

    def max_distance_from(self, o) -> float:
        """Farthest point of the exact boundary from o."""
        o = np.asarray(o, float)
        best = 0.0
        for pc in self.pieces:
            for key in ("from", "to", "at"):
                if key in pc:
                    best = max(best, float(np.linalg.norm(np.asarray(pc[key]) - o)))
            if pc["kind"] == "arc":
                c, r = np.asarray(pc["center"]), pc["radius"]
                u = c - o
                nu = np.linalg.norm(u)
                if nu > 0:
                    far = c + r * u / nu
                    if self._on_arc(pc, far):
                        best = max(best, float(np.linalg.norm(far - o)))
        for ring in self.rings():
            if len(ring):
                best = max(best, float(np.max(np.linalg.norm(ring - o, axis=1))))
        return best

    @staticmethod
    def _on_arc(pc, q) -> bool:
        c = np.asarray(pc["center"])
        a0 = math.atan2(pc["from"][1] - c[1], pc["from"][0] - c[0])
        a1 = math.atan2(pc["to"][1] - c[1], pc["to"][0] - c[0])
        aq = math.atan2(q[1] - c[1], q[0] - c[0])
        sweep = (a1 - a0) % (2 * math.pi)
        return (aq - a0) % (2 * math.pi) <= sweep

    def to_json(self) -> dict:
        return {"anchor": list(self.anchor) if self.anchor else None,
                "area": self.area,
                "flags": list(self.flags),
                "tol_arc": self.tol,
                "pieces": self.pieces,
                "approx": [r.tolist() for r in self.rings()]}

    @classmethod
    def from_json(cls, obj: dict) -> "Region":
        rings = [np.asarray(r, float) for r in obj.get("approx", [])]
        if obj.get("area", 0) > 0:
            polys = [Polygon(r) for r in rings]
            geom = shapely.unary_union(polys) if polys else Polygon()
        elif rings and len(rings[0]) > 1:
            geom = LineString(rings[0])
        elif rings:
            geom = Point(rings[0][0])
        else:
            geom = Polygon()
        return cls(geom, obj.get("pieces", []), obj.get("anchor"), None,
                   obj.get("flags", ()), obj.get("tol_arc", 0.0))

    def __repr__(self):
        return f"Region(area={self.area:.6g}, pieces={len(self.pieces)}, flags={self.flags})"


def largest_component(geom, near=None):
    polys = polygons_of(geom)
    if not polys:
        return Polygon()
    if near is not None:
        pt = Point(near)
        touching = [p for p in polys if p.distance(pt) <= 1e-9 * max(1.0, p.length)]
        if touching:
            return max(touching, key=lambda p: p.area)
    return max(polys, key=lambda p: p.area)
