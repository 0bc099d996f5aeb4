"""Random test-configuration generators shared by unit and acceptance tests."""
import math

import numpy as np


def rot(a):
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def kite(c, u, length, phi, psi):
    """Kite with apex c (angle phi), far vertex c + length*u (angle psi)."""
    s = length * math.sin(psi / 2) / math.sin(math.pi - phi / 2 - psi / 2)
    c = np.asarray(c, float)
    return np.array([c, c + s * rot(phi / 2) @ u, c + length * u, c + s * rot(-phi / 2) @ u])


def in_kite(K, pts):
    # vertices run clockwise
    ok = np.ones(len(pts), dtype=bool)
    for i in range(4):
        a, b = K[i], K[(i + 1) % 4]
        cr = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        ok &= cr <= 1e-12
    return ok


# per gamma: (min apex angle, max apex angle, max kite count)
KITE_SHAPES = {1 / 16: (0.4, 1.6, 4), 1 / 8: (0.8, 2.0, 5), 1 / 4: (1.4, 2.4, 7)}


def random_kite_union(rng, gamma, R=1.0):
    """Union of kites through a common vertex inside D(o, R), each of length >= R."""
    lo, hi, kmax = KITE_SHAPES[gamma]
    r, a = R * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
    c = r * np.array([math.cos(a), math.sin(a)])
    kites = []
    for _ in range(int(rng.integers(1, kmax + 1))):
        a = rng.uniform(0, 2 * math.pi)
        u = np.array([math.cos(a), math.sin(a)])
        phi = rng.uniform(lo, hi)
        psi = rng.uniform(phi, min(2.8, 2 * math.pi - phi - 0.4))
        kites.append(kite(c, u, R * rng.uniform(1, 3), phi, psi))

    def member(pts):
        pts = np.atleast_2d(pts)
        return np.any([in_kite(K, pts) for K in kites], axis=0)
    box = (np.min([K.min(0) for K in kites], 0), np.max([K.max(0) for K in kites], 0))
    return c, kites, member, box


def circle_intersections(c1, r1, c2, r2):
    d = np.linalg.norm(c2 - c1)
    if d > r1 + r2 or d < abs(r1 - r2) or d == 0:
        return None
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    m = c1 + a * (c2 - c1) / d
    perp = np.array([-(c2 - c1)[1], (c2 - c1)[0]]) / d
    return m + h * perp, m - h * perp


def angle_configuration(rng):
    """p = 0, g = (1, 0), cone of half angle theta; D_v with v above the x axis,
    g in D_v, tangency point a outside D_v, R_v >= alpha|p - g|.  Returns
    (alpha, w1, w2) or None when the draw misses the hypotheses."""
    al = rng.uniform(0.01, 0.5)
    th = math.asin(al)
    g = np.array([1.0, 0.0])
    a = math.cos(th) * np.array([math.cos(th), math.sin(th)])
    Rv = al * math.exp(rng.uniform(0, 3))
    phi, dist = rng.uniform(0, 2 * math.pi), Rv * math.sqrt(rng.uniform())
    v = g + dist * np.array([math.cos(phi), math.sin(phi)])
    if v[1] <= 0 or np.linalg.norm(a - v) <= Rv:
        return None
    w = circle_intersections(v, Rv, g, al)
    if w is None:
        return None
    return al, w[0], w[1]


def grazing_configuration(rng):
    """Cone K at the origin between directions 0 and theta, and a disk D_v
    meeting both rays (sometimes only just).  Returns (alpha, v, R_v) or None."""
    al = rng.uniform(0.05, 0.5)
    th = math.asin(al)
    phi = rng.uniform(-0.5 * th, 1.5 * th)
    v = np.array([math.cos(phi), math.sin(phi)])
    need = max(abs(math.sin(phi)), abs(math.sin(phi - th)))
    if need >= 1:
        return None
    Rv = need + rng.uniform() * (1 - need)
    if rng.uniform() < 0.3:
        Rv = need * (1 + 1e-7)
    return al, v, min(Rv, 0.999)
