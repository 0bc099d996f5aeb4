"""The alpha-robust guarding predicate and the robust visibility region VP_alpha(g)."""
import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Point, Polygon

from .errors import DegenerateCone
from .geometry import (Disk, PolygonWithHoles, as_point, clearance, disks_in_polygon_batch,
                       triangles_in_polygon_batch, visibility_polygon)
from .params import RobustParams
from .region import CircleCurve, LineCurve, Region, arc_points, circle_polygon, label_pieces, \
    largest_component


@dataclass(frozen=True)
class IceCreamCone:
    apex: tuple
    disk: Disk
    tangents: tuple

    @property
    def half_angle(self) -> float:
        a = np.asarray(self.tangents[0]) - self.apex
        g = np.asarray(self.disk.center) - self.apex
        return math.atan2(abs(a[0] * g[1] - a[1] * g[0]), float(a @ g))

    def contains_batch(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        c, r = np.asarray(self.disk.center), self.disk.radius
        in_disk = np.linalg.norm(pts - c, axis=1) <= r * (1 + 1e-12) + 1e-15
        p = np.asarray(self.apex)
        a, b = (np.asarray(t) for t in self.tangents)
        tri = np.ones(len(pts), dtype=bool)
        s = np.sign((b[0] - p[0]) * (a[1] - p[1]) - (b[1] - p[1]) * (a[0] - p[0]))
        for u, w in ((p, a), (a, b), (b, p)):
            cr = (w[0] - u[0]) * (pts[:, 1] - u[1]) - (w[1] - u[1]) * (pts[:, 0] - u[0])
            tri &= -s * cr >= -1e-12 * max(1.0, r)
        return in_disk | tri


def _tangents(g: np.ndarray, p: np.ndarray, alpha):
    """Tangency points a (left of p->g) and b (right) of rays from p to D(g, alpha|p-g|)."""
    v = g - p
    d = np.linalg.norm(v, axis=1)
    u = v / np.where(d > 0, d, 1.0)[:, None]
    s = np.broadcast_to(np.asarray(alpha, float), d.shape)
    c = np.sqrt(1.0 - s * s)
    L = (d * c)[:, None]
    a = p + L * np.column_stack((c * u[:, 0] - s * u[:, 1], s * u[:, 0] + c * u[:, 1]))
    b = p + L * np.column_stack((c * u[:, 0] + s * u[:, 1], -s * u[:, 0] + c * u[:, 1]))
    return a, b


def ice_cream_cone(g, p, alpha: float) -> IceCreamCone:
    g, p = np.asarray(as_point(g)), np.asarray(as_point(p))
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    d = float(np.linalg.norm(g - p))
    if d == 0:
        raise DegenerateCone("apex coincides with the guard")
    a, b = _tangents(g[None], p[None], alpha)
    return IceCreamCone(tuple(p), Disk(tuple(g), alpha * d), (tuple(a[0]), tuple(b[0])))


def robustly_guards_batch(P: PolygonWithHoles, G, Q, alpha) -> np.ndarray:
    """Row-wise robust guarding test: does G[i] alpha-robustly guard Q[i]?

    ``alpha`` may be a scalar or one value per row.  Points outside P give False.
    """
    G = np.atleast_2d(np.asarray(G, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    G, Q = np.broadcast_arrays(G, Q)
    alpha = np.broadcast_to(np.asarray(alpha, float), (len(G),))
    d = np.linalg.norm(G - Q, axis=1)
    same = d <= P.eps
    ok = np.zeros(len(G), dtype=bool)
    if same.any():
        ok[same] = P.contains_batch(Q[same])
    rest = np.nonzero(~same)[0]
    if len(rest) == 0:
        return ok
    g, q, al = G[rest], Q[rest], alpha[rest]
    disk_ok = disks_in_polygon_batch(P, g, al * d[rest])
    live = np.nonzero(disk_ok)[0]
    if len(live):
        a, b = _tangents(g[live], q[live], al[live])
        disk_ok[live] = triangles_in_polygon_batch(P, q[live], a, b)
    ok[rest] = disk_ok
    return ok


def robustly_guards(P: PolygonWithHoles, g, p, params) -> bool:
    """True iff g alpha-robustly guards p (the ice-cream cone from p to g lies in P)."""
    alpha = params.alpha if isinstance(params, RobustParams) else float(params)
    g, p = as_point(g), as_point(p)
    P.require_inside(g, p)
    return bool(robustly_guards_batch(P, [g], [p], alpha)[0])


def disk_in_cone_check(p, rho0_dir: float, theta: float, q, c: float) -> bool:
    """Is D(q, c sin(theta) |p-q|) inside the cone between rays rho0_dir and rho0_dir + theta?"""
    p = np.asarray(as_point(p))
    q = np.asarray(as_point(q))
    rel = q - p
    dist = float(np.linalg.norm(rel))
    if dist == 0:
        return c <= 0
    r = c * math.sin(theta) * dist
    ang = (math.atan2(rel[1], rel[0]) - rho0_dir) % (2 * math.pi)
    if ang > theta:
        return False
    for phi in (rho0_dir, rho0_dir + theta):
        u = np.array([math.cos(phi), math.sin(phi)])
        t = float(rel @ u)
        dray = abs(rel[0] * u[1] - rel[1] * u[0]) if t >= 0 else dist
        if dray < r:
            return False
    return True


# -- VP_alpha(g) ---------------------------------------------------------------------

def reflex_vertices_of(vp: PolygonWithHoles, g, tol: float) -> np.ndarray:
    """Reflex vertices of a star-shaped ring, excluding the kernel point g."""
    R = vp.outer
    prev_, next_ = np.roll(R, 1, axis=0), np.roll(R, -1, axis=0)
    e1, e2 = R - prev_, next_ - R
    cr = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    n1 = np.linalg.norm(e1, axis=1)
    n2 = np.linalg.norm(e2, axis=1)
    sin = cr / np.maximum(n1 * n2, 1e-300)
    far = np.linalg.norm(R - np.asarray(g), axis=1) > tol
    return R[(sin < -1e-9) & far]


class Heart:
    """Set of points that the reflex vertex v does not hide from g at level alpha.

    Frame: g at the origin, v on the positive x-axis at distance d.  C0 is
    D(g, d/alpha) left of the line x = d; B1, B2 are the disks with diameters
    g p1 and g p2, p1,2 = (d, +-d sqrt(1/alpha^2 - 1)), kept right of x = d.
    """

    def __init__(self, g, v, alpha):
        self.g = np.asarray(g, float)
        self.v = np.asarray(v, float)
        self.d = float(np.linalg.norm(self.v - self.g))
        self.u = (self.v - self.g) / self.d
        self.nrm = np.array([-self.u[1], self.u[0]])
        self.alpha = alpha
        self.h = self.d * math.sqrt(max(1.0 / alpha ** 2 - 1.0, 0.0))
        self.rho = self.d / (2.0 * alpha)
        self.c1 = self.g + 0.5 * self.d * self.u + 0.5 * self.h * self.nrm
        self.c2 = self.g + 0.5 * self.d * self.u - 0.5 * self.h * self.nrm
        self.p1 = self.g + self.d * self.u + self.h * self.nrm
        self.p2 = self.g + self.d * self.u - self.h * self.nrm

    def contains_batch(self, pts, slack: float = 0.0) -> np.ndarray:
        rel = np.atleast_2d(pts) - self.g
        x = rel @ self.u
        left = (x <= self.d + slack) & (np.linalg.norm(rel, axis=1) <= self.d / self.alpha + slack)
        right = (x >= self.d - slack) & (
            (np.linalg.norm(pts - self.c1, axis=1) <= self.rho + slack)
            | (np.linalg.norm(pts - self.c2, axis=1) <= self.rho + slack))
        return left | right

    def curves(self):
        return [CircleCurve(self.g, self.d / self.alpha), CircleCurve(self.c1, self.rho),
                CircleCurve(self.c2, self.rho)]

    def polygon(self, tol: float) -> Polygon:
        def ang(c, q):
            return math.atan2(q[1] - c[1], q[0] - c[0])

        R0 = self.d / self.alpha
        a1 = ang(self.g, self.p1)
        a2 = ang(self.g, self.p2)
        sweep = (a2 - a1) % (2 * math.pi)
        big = arc_points(self.g, R0, a1, a1 + sweep, tol)
        b2s = ang(self.c2, self.p2)
        b2e = b2s + (ang(self.c2, self.v) - b2s) % (2 * math.pi)
        b1s = ang(self.c1, self.v)
        b1e = b1s + (ang(self.c1, self.p1) - b1s) % (2 * math.pi)
        ring = np.vstack((big, arc_points(self.c2, self.rho, b2s, b2e, tol)[1:],
                          arc_points(self.c1, self.rho, b1s, b1e, tol)[1:-1]))
        poly = Polygon(ring)
        if not poly.is_valid:
            poly = shapely.make_valid(poly)
            poly = largest_component(poly)
        return poly


def robust_visibility_region(P: PolygonWithHoles, g, params: RobustParams) -> Region:
    """VP_alpha(g): VP(g) cut by D(g, R_g/alpha) and the heart of every reflex vertex."""
    g = as_point(g)
    P.require_inside(g)
    alpha = params.alpha
    tol = params.arc_tol(P)
    chord_tol = 0.25 * tol
    Rg = clearance(P, g)
    if Rg <= P.eps:
        return Region(Point(g), [{"kind": "point", "at": list(g)}], g,
                      member=lambda pts: np.linalg.norm(np.atleast_2d(pts) - np.asarray(g), axis=1) <= P.eps,
                      flags=("self-guard-only",), tol=tol)
    vp = visibility_polygon(P, g)
    vp_poly = Polygon(vp.outer).buffer(0)
    reach = Rg / alpha
    geom = vp_poly.intersection(circle_polygon(g, reach, chord_tol))
    hearts = []
    for v in reflex_vertices_of(vp, g, P.eps):
        if np.linalg.norm(v - np.asarray(g)) <= P.eps:
            continue
        H = Heart(g, v, alpha)
        hearts.append(H)
        # hearts only bite inside the reach disk; skip those that cannot
        geom = geom.intersection(H.polygon(chord_tol))
    geom = largest_component(geom, near=g)
    curves = [LineCurve(vp.outer[i], vp.outer[(i + 1) % len(vp.outer)]) for i in range(len(vp.outer))]
    curves.append(CircleCurve(g, reach))
    for H in hearts:
        curves += H.curves()
    pieces = label_pieces(geom, curves, tol)
    gg = np.asarray(g)

    def member(pts):
        pts = np.atleast_2d(pts)
        ok = vp.contains_batch(pts, tol=P.eps)
        ok &= np.linalg.norm(pts - gg, axis=1) <= reach * (1 + 1e-12)
        for H in hearts:
            ok &= H.contains_batch(pts, slack=P.eps)
        return ok

    return Region(geom, pieces, g, member=member, tol=tol)
