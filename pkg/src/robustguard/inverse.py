"""Robust inverse visibility VP^-1_alpha(p): every guard position that alpha-robustly guards p.

g is admissible iff g sees p and dist(g, boundary of VP(p)) >= alpha |p - g|.
Per edge e of VP(p) the forbidden zone {dist(g, e) < alpha |p - g|} splits
into a slab part bounded by a hyperbola and two Apollonius disks around the
endpoints.
"""
import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon

from .errors import DegenerateParameters, NotRobustlyGuarded
from .geometry import PolygonWithHoles, _local_cone, as_point, visibility_polygon
from .params import RobustParams
from .region import (CircleCurve, HyperbolaCurve, LineCurve, Region, adaptive_curve,
                     circle_polygon, label_pieces, largest_component, polygons_of)
from .robust import _tangents, robustly_guards_batch

ANGLE_TOL = 1e-6


@dataclass
class EdgeConstraint:
    """Forbidden zone of one edge u->w of VP(p), in the edge frame.

    The frame puts the edge on the x-axis and p at (0, h); dividing by h the
    slab boundary reads x^2 + (1 - alpha^-2) y^2 - 2y + 1 = 0.
    """
    u: np.ndarray
    w: np.ndarray
    p: np.ndarray
    alpha: float

    def __post_init__(self):
        d = self.w - self.u
        self.length = float(np.linalg.norm(d))
        self.axis = d / self.length
        self.nrm = np.array([-self.axis[1], self.axis[0]])
        self.h = float((self.p - self.u) @ self.nrm)
        self.origin = self.p - self.h * self.nrm
        self.xu = float((self.u - self.origin) @ self.axis)
        self.xw = float((self.w - self.origin) @ self.axis)
        self.k = 1.0 / self.alpha ** 2 - 1.0
        a2 = self.alpha ** 2
        self.disk_u = self._apollonius(self.u, a2)
        self.disk_v = self._apollonius(self.w, a2)
        self.hyperbola = HyperbolaCurve(self.origin, self.axis, self.h, self.alpha)

    def _apollonius(self, q, a2):
        c = (q - a2 * self.p) / (1 - a2)
        r = self.alpha * float(np.linalg.norm(q - self.p)) / (1 - a2)
        return (c, r)

    @property
    def canonical(self) -> tuple:
        """Coefficients (x^2, y^2, y, 1) of the scaled slab boundary."""
        return (1.0, 1.0 - self.alpha ** -2, -2.0, 1.0)

    def frame(self, pts):
        rel = np.atleast_2d(pts) - self.origin
        return rel @ self.axis, rel @ self.nrm

    def y_bounds(self, x):
        disc = np.sqrt(self.h ** 2 + self.k * (x * x + self.h ** 2))
        return (-self.h - disc) / self.k, (-self.h + disc) / self.k

    def forbidden_batch(self, pts, slack: float = 0.0) -> np.ndarray:
        """Open forbidden zone, shrunk by ``slack`` (boundary counts as allowed)."""
        pts = np.atleast_2d(pts)
        x, y = self.frame(pts)
        F = self.k * y * y + 2 * self.h * y - (x * x + self.h * self.h)
        grad = np.maximum(np.hypot(2 * x, 2 * self.k * y + 2 * self.h), 1e-300)
        slab = (x >= self.xu) & (x <= self.xw) & (F / grad < -slack)
        out = slab
        for c, r in (self.disk_u, self.disk_v):
            out |= np.linalg.norm(pts - c, axis=1) < r - slack
        return out

    def polygon(self, tol: float):
        """Outer approximation of the forbidden zone."""
        parts = [circle_polygon(c, r, tol, outer=True) for c, r in (self.disk_u, self.disk_v) if r > 0]
        if self.xw - self.xu > 0:
            xs = adaptive_curve(lambda x: self.y_bounds(x)[1], self.xu, self.xw, tol)
            lo, hi = self.y_bounds(xs)
            top = self.hyperbola.world(xs, hi)
            bot = self.hyperbola.world(xs[::-1], lo[::-1])
            band = Polygon(np.vstack((top, bot)))
            if not band.is_valid:
                band = band.buffer(0)
            parts.append(band)
        return shapely.unary_union(parts)

    def curves(self):
        return [self.hyperbola, CircleCurve(*self.disk_u), CircleCurve(*self.disk_v)]


def edge_constraints(vp: PolygonWithHoles, p, alpha: float, tol: float) -> list:
    R = vp.outer
    out = []
    for i in range(len(R)):
        u, w = R[i], R[(i + 1) % len(R)]
        if np.linalg.norm(w - u) > tol:
            out.append(EdgeConstraint(u.copy(), w.copy(), np.asarray(p, float), alpha))
    return out


def _bisector_segment(P, p, cone, alpha, params):
    """Far end of the admissible bisector segment from the apex p."""
    mid = cone[0] + 0.5 * cone[1]
    u = np.array([math.cos(mid), math.sin(mid)])
    pp = np.asarray(p)

    def ok(t):
        return bool(robustly_guards_batch(P, pp + t * u, pp, alpha)[0])
    hi = P.diameter
    lo = 0.0
    # find the first step that fails, then bisect
    steps = np.linspace(0, hi, 257)[1:]
    good = robustly_guards_batch(P, pp + steps[:, None] * u, np.repeat(pp[None], len(steps), 0), alpha)
    if not good[0]:
        hi = steps[0]
    else:
        first_bad = np.nonzero(~good)[0]
        j = int(first_bad[0]) if len(first_bad) else len(steps) - 1
        lo, hi = steps[j - 1] if j > 0 else 0.0, steps[j]
        if not len(first_bad):
            return pp + hi * u
    for _ in range(60):
        m = 0.5 * (lo + hi)
        if ok(m):
            lo = m
        else:
            hi = m
    return pp + lo * u


def inverse_region(P: PolygonWithHoles, p, params: RobustParams) -> Region:
    p = as_point(p)
    P.require_inside(p)
    alpha = params.alpha
    if alpha >= 1.0 - 1e-12:
        raise DegenerateParameters("the inverse region needs alpha < 1")
    tol = params.arc_tol(P)
    chord_tol = 0.25 * tol
    pp = np.asarray(p)
    cone = _local_cone(P, pp)
    two_theta = 2 * params.theta
    if cone is not None and cone[1] < two_theta + ANGLE_TOL:
        if cone[1] < two_theta - ANGLE_TOL:
            return Region(Point(p), [{"kind": "point", "at": list(p)}], p,
                          member=lambda q: np.linalg.norm(np.atleast_2d(q) - pp, axis=1) <= P.eps,
                          flags=("self-guard-only",), tol=tol)
        far = _bisector_segment(P, p, cone, alpha, params)
        seg = LineString([p, tuple(far)])
        dirv = far - pp
        L = float(np.linalg.norm(dirv))

        def seg_member(q):
            q = np.atleast_2d(q)
            t = np.clip((q - pp) @ dirv / max(L * L, 1e-300), 0, 1)
            return np.linalg.norm(q - (pp + t[:, None] * dirv), axis=1) <= max(P.eps, 1e-9 * L)
        return Region(seg, [{"kind": "segment", "from": list(p), "to": far.tolist()}], p,
                      member=seg_member, flags=("segment",), tol=tol)
    vp = visibility_polygon(P, p)
    geom = Polygon(vp.outer).buffer(0)
    cons = edge_constraints(vp, p, alpha, P.eps)
    zones = [c.polygon(chord_tol) for c in cons]
    geom = geom.difference(shapely.unary_union(zones))
    geom = largest_component(geom, near=p) if polygons_of(geom) else Polygon()
    curves = [LineCurve(c.u, c.w) for c in cons]
    for c in cons:
        curves += c.curves()
    pieces = label_pieces(geom, curves, tol)

    def member(q):
        q = np.atleast_2d(q)
        ok = vp.contains_batch(q, tol=P.eps)
        for c in cons:
            ok &= ~c.forbidden_batch(q, slack=P.eps)
        return ok
    flags = () if geom.area > 0 else ("self-guard-only",)
    if geom.is_empty:
        geom = Point(p)
        pieces = [{"kind": "point", "at": list(p)}]
    return Region(geom, pieces, p, member=member, flags=flags, tol=tol)


def inverse_region_size(P: PolygonWithHoles, p, params: RobustParams, region: Region | None = None) -> float:
    """Radius of the smallest disk centred at p that contains VP^-1_alpha(p)."""
    if region is None:
        region = inverse_region(P, p, params)
    if "self-guard-only" in region.flags:
        return 0.0
    return region.max_distance_from(as_point(p))


@dataclass(frozen=True)
class FatKite:
    vertices: tuple  # (g, a', p, b')
    apex_angle_at_p: float
    angle_at_g: float

    def contains_batch(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        V = np.asarray(self.vertices)
        sgn = np.sign(sum(V[i, 0] * V[(i + 1) % 4, 1] - V[(i + 1) % 4, 0] * V[i, 1] for i in range(4)))
        ok = np.ones(len(pts), dtype=bool)
        for i in range(4):
            a, b = V[i], V[(i + 1) % 4]
            cr = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
            ok &= sgn * cr >= -1e-12
        return ok

    def sample(self, n: int, rng) -> np.ndarray:
        V = np.asarray(self.vertices)
        lo, hi = V.min(axis=0), V.max(axis=0)
        out = []
        while sum(len(o) for o in out) < n:
            q = rng.uniform(lo, hi, size=(2 * n, 2))
            out.append(q[self.contains_batch(q)])
        return np.vstack(out)[:n]


def _angle(at, a, b) -> float:
    u, v = np.asarray(a) - at, np.asarray(b) - at
    return math.atan2(abs(u[0] * v[1] - u[1] * v[0]), float(u @ v))


def fat_kite(P: PolygonWithHoles, g, p, params: RobustParams) -> FatKite:
    g, p = as_point(g), as_point(p)
    P.require_inside(g, p)
    alpha = params.alpha
    if np.allclose(g, p) or not robustly_guards_batch(P, [g], [p], alpha)[0]:
        raise NotRobustlyGuarded(f"{g} does not {alpha}-robustly guard {p}")
    gg, pp = np.asarray(g), np.asarray(p)
    a, b = (x[0] for x in _tangents(gg[None], pp[None], alpha))
    th = params.theta
    u = (gg - pp) / np.linalg.norm(gg - pp)

    def cut(tangent, sign):
        ang = sign * th / 2
        r = np.array([u[0] * math.cos(ang) - u[1] * math.sin(ang), u[0] * math.sin(ang) + u[1] * math.cos(ang)])
        # solve p + s r = g + t (tangent - g)
        M = np.column_stack((r, gg - tangent))
        s, t = np.linalg.solve(M, gg - pp)
        return pp + s * r
    a2, b2 = cut(a, 1.0), cut(b, -1.0)
    verts = (tuple(gg), tuple(a2), tuple(pp), tuple(b2))
    return FatKite(verts, _angle(pp, a2, b2), _angle(gg, a2, b2))
