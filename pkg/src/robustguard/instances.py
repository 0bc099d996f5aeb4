"""Test instances: corridors, apex triangles, random polygons and spike boxes."""
import itertools
import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon

from .errors import DegenerateParameters, ParallelLines
from .geometry import PolygonWithHoles


def corridor(length: float, width: float) -> PolygonWithHoles:
    if not (length > 0 and width > 0):
        raise DegenerateParameters("corridor needs positive length and width")
    return PolygonWithHoles([(0, 0), (length, 0), (length, width), (0, width)])


def unit_square() -> PolygonWithHoles:
    return corridor(1.0, 1.0)


def l_shape() -> PolygonWithHoles:
    return PolygonWithHoles([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def square_with_hole() -> PolygonWithHoles:
    return PolygonWithHoles([(0, 0), (4, 0), (4, 4), (0, 4)],
                            [[(1.5, 1.5), (1.5, 2.5), (2.5, 2.5), (2.5, 1.5)]])


def apex_fixture(alpha: float, leg: float = 1.0) -> PolygonWithHoles:
    """Isosceles triangle with apex (0, 0) of angle exactly 2 arcsin(alpha), opening to +x."""
    if not (0 < alpha < 1) or leg <= 0:
        raise DegenerateParameters("apex fixture needs 0 < alpha < 1 and leg > 0")
    th = math.asin(alpha)
    c, s = leg * math.cos(th), leg * math.sin(th)
    return PolygonWithHoles([(0.0, 0.0), (c, -s), (c, s)])


def apex_segment_end(alpha: float, leg: float = 1.0) -> tuple:
    """Far end of the guard segment of the apex fixture (disk touches the base)."""
    th = math.asin(alpha)
    return (leg * math.cos(th) / (1 + alpha), 0.0)


def random_polygon(n: int, holes: int = 0, seed: int = 0) -> PolygonWithHoles:
    """Star-shaped random polygon around the origin with small polygonal holes."""
    if n < 3 or holes < 0:
        raise DegenerateParameters("random_polygon needs n >= 3 and holes >= 0")
    rng = np.random.default_rng(seed)
    base = np.linspace(0, 2 * math.pi, n, endpoint=False)
    ang = base + rng.uniform(-0.3, 0.3, n) * (2 * math.pi / n)
    rad = rng.uniform(0.65, 1.0, n)
    outer = np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
    shell = Polygon(outer)
    rings = []
    placed = []
    tries = 0
    while len(rings) < holes:
        tries += 1
        if tries > 2000:
            raise DegenerateParameters("could not place the requested holes")
        c = rng.uniform(-0.55, 0.55, 2)
        r = rng.uniform(0.06, 0.12)
        k = int(rng.integers(3, 6))
        a0 = rng.uniform(0, 2 * math.pi)
        t = a0 + np.arange(k) * 2 * math.pi / k
        ring = c + r * np.column_stack((np.cos(t), np.sin(t)))
        hp = Polygon(ring)
        if shell.exterior.distance(hp) < 0.08 or not shell.contains(hp):
            continue
        if any(hp.distance(o) < 0.08 for o in placed):
            continue
        placed.append(hp)
        rings.append(ring[::-1])
    return PolygonWithHoles(outer, rings)


# -- spike boxes ----------------------------------------------------------------------

@dataclass
class LineSet:
    lines: list  # [((x1, y1), (x2, y2)), ...] integer points
    N: int = 0   # coordinate bound; 0 means derive from the points

    def __post_init__(self):
        if not self.N:
            self.N = max(abs(c) for ln in self.lines for pt in ln for c in pt)
        for (a, b) in self.lines:
            if tuple(a) == tuple(b):
                raise DegenerateParameters("line given by two equal points")
        for i, j in itertools.combinations(range(len(self.lines)), 2):
            if _cross(self.direction(i), self.direction(j)) == 0:
                raise ParallelLines(f"lines {i} and {j} are parallel")

    def direction(self, i):
        (x1, y1), (x2, y2) = self.lines[i]
        return (x2 - x1, y2 - y1)

    def intersection(self, i, j) -> np.ndarray:
        p = np.asarray(self.lines[i][0], float)
        r = np.asarray(self.direction(i), float)
        q = np.asarray(self.lines[j][0], float)
        s = np.asarray(self.direction(j), float)
        t = _cross(q - p, s) / _cross(r, s)
        return p + t * r

    @classmethod
    def from_json(cls, obj) -> "LineSet":
        lines = obj["lines"] if isinstance(obj, dict) else obj
        lines = [(tuple(map(int, a)), tuple(map(int, b))) for a, b in lines]
        N = obj.get("N", 0) if isinstance(obj, dict) else 0
        return cls(lines, int(N))


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def hitting_number(lines: LineSet) -> int:
    """Fewest points hitting every line (points anywhere in the plane)."""
    k = len(lines.lines)
    # a point hits one line, or all lines through one intersection point
    groups = []
    pts = {}
    for i, j in itertools.combinations(range(k), 2):
        x = lines.intersection(i, j)
        key = (round(x[0], 9), round(x[1], 9))
        pts.setdefault(key, set()).update((i, j))
    groups = [frozenset(s) for s in pts.values()] + [frozenset([i]) for i in range(k)]
    for size in range(1, k + 1):
        for combo in itertools.combinations(groups, size):
            if len(frozenset().union(*combo)) == k:
                return size
    return k


@dataclass
class SpikeBox:
    polygon: PolygonWithHoles
    tips: list            # [(tip point, line index)]
    apex_angle: float
    lines: LineSet
    box: tuple            # (x0, y0, x1, y1)
    alpha: float

    def line_candidates(self, per_line: int = 3) -> np.ndarray:
        """Candidate guards on the lines: pairwise intersections plus a few points per line."""
        ls = self.lines
        pts = [ls.intersection(i, j) for i, j in itertools.combinations(range(len(ls.lines)), 2)]
        x0, y0, x1, y1 = self.box
        for t, li in self.tips:
            tip = np.asarray(t)
            d = np.asarray(self.bisectors[li])
            for f in np.linspace(0.3, 0.7, per_line):
                pts.append(tip - d * f * self.depth[li])
        return np.asarray(pts)


def spike_box(lines: LineSet, alpha: float) -> SpikeBox:
    """Box around all line intersections with one spike of apex angle 2 arcsin(alpha) per line.

    Box margins are tried from a fixed list until every spike fits on a wall
    and every core point on a line robustly guards that line's tip.
    """
    if not (0 < alpha < 2 / 3):
        raise DegenerateParameters("spike box needs 0 < alpha < 2/3")
    k = len(lines.lines)
    if k == 0:
        raise DegenerateParameters("empty line set")
    if k == 1:
        core = np.asarray(lines.lines[0], float)
    else:
        core = np.asarray([lines.intersection(i, j) for i, j in itertools.combinations(range(k), 2)])
    lo, hi = core.min(axis=0), core.max(axis=0)
    diag = max(float(np.linalg.norm(hi - lo)), 1.0)
    # margin so that D(x, alpha |x - tip|) stays in the box for x in the core
    base = 2.0 * alpha * diag / (1 - 1.5 * alpha) + 1.0
    for sx, sy in ((1, 1), (1.5, 1), (1, 1.5), (2, 1), (1, 2), (2.5, 1.5), (1.5, 2.5), (3, 1), (1, 3)):
        sb = _try_spike_box(lines, alpha, core, lo, hi, base * sx, base * sy, base * 0.5)
        if sb is not None:
            return sb
    raise DegenerateParameters("no box layout fits one spike per line")


def _try_spike_box(lines, alpha, core, lo, hi, mx, my, spike_len):
    from .robust import robustly_guards_batch
    k = len(lines.lines)
    th = math.asin(alpha)
    x0, y0 = lo[0] - mx, lo[1] - my
    x1, y1 = hi[0] + mx, hi[1] + my
    box = (float(x0), float(y0), float(x1), float(y1))
    walls = [((x0, y0), (x1, y0)), ((x1, y0), (x1, y1)), ((x1, y1), (x0, y1)), ((x0, y1), (x0, y0))]
    gap = 0.05 * min(mx, my)
    spikes = []   # (wall index, params of the two bases, bases, tip, line idx)
    bis, depth = {}, {}
    for li in range(k):
        d0 = np.asarray(lines.direction(li), float)
        d0 /= np.linalg.norm(d0)
        p0 = np.asarray(lines.lines[li][0], float)
        placed = False
        for d in (d0, -d0):
            hit = _box_exit(p0, d, box)
            if hit is None:
                continue
            E, wi = hit
            tip = E + spike_len * d
            a0, b0 = np.asarray(walls[wi][0]), np.asarray(walls[wi][1])
            wdir = (b0 - a0) / np.linalg.norm(b0 - a0)
            bases = []
            for sgn in (1, -1):
                ang = math.atan2(-d[1], -d[0]) + sgn * th
                r = np.array([math.cos(ang), math.sin(ang)])
                den = _cross(r, wdir)
                if abs(den) < 1e-12:
                    break
                s = _cross(a0 - tip, wdir) / den
                bases.append(tip + s * r)
            if len(bases) < 2:
                continue
            ts = sorted(float((b - a0) @ wdir) for b in bases)
            L = float(np.linalg.norm(b0 - a0))
            if ts[0] < gap or ts[1] > L - gap:
                continue
            if any(sw == wi and not (ts[1] + gap < st[0] or st[1] + gap < ts[0])
                   for sw, st, *_ in spikes):
                continue
            b_sorted = sorted(bases, key=lambda b: float((b - a0) @ wdir))
            spikes.append((wi, ts, b_sorted, tip, li))
            bis[li] = tuple(d)
            depth[li] = float(np.linalg.norm(tip - p0))
            placed = True
            break
        if not placed:
            return None
    ring = []
    for wi, (a, b) in enumerate(walls):
        ring.append(a)
        on = sorted((s for s in spikes if s[0] == wi), key=lambda s: s[1][0])
        for _, _, (b1, b2), tip, _ in on:
            ring += [tuple(b1), tuple(tip), tuple(b2)]
    poly = PolygonWithHoles(ring)
    tips = [(tuple(s[3]), s[4]) for s in sorted(spikes, key=lambda s: s[4])]
    for t, li in tips:
        on_line = [x for x in core if _on_line(lines, li, x)]
        if on_line and not robustly_guards_batch(poly, np.asarray(on_line),
                                                 np.broadcast_to(t, (len(on_line), 2)), alpha).all():
            return None
    sb = SpikeBox(poly, tips, 2 * th, lines, box, alpha)
    sb.bisectors = bis
    sb.depth = depth
    return sb


def _on_line(lines, li, x) -> bool:
    a = np.asarray(lines.lines[li][0], float)
    d = np.asarray(lines.direction(li), float)
    return abs(_cross(d, x - a)) <= 1e-9 * max(1.0, float(np.linalg.norm(d)) * float(np.linalg.norm(x - a)))


def _box_exit(p, d, box):
    x0, y0, x1, y1 = box
    best = None
    # wall order: bottom, right, top, left
    for wi, (axis, val) in enumerate(((1, y0), (0, x1), (1, y1), (0, x0))):
        if abs(d[axis]) < 1e-15:
            continue
        t = (val - p[axis]) / d[axis]
        if t <= 0:
            continue
        q = p + t * d
        o = 1 - axis
        lo, hi = (x0, x1) if o == 0 else (y0, y1)
        if lo - 1e-9 <= q[o] <= hi + 1e-9 and (best is None or t < best[0]):
            best = (t, q, wi)
    return None if best is None else (best[1], best[2])
