"""Brute-force oracles: dense coverage checks, exhaustive set cover, Monte Carlo areas.

Only the geometry primitives and the predicate are shared with the code
under test; no region machinery is used here.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DegenerateDisk, Infeasible, PointOutsideDomain
from .geometry import PolygonWithHoles, as_point, disks_in_polygon_batch, sees_batch
from .robust import robustly_guards_batch


@dataclass
class AreaEstimate:
    value: float
    half_width: float
    samples: int
    seed: int

    @property
    def lower(self) -> float:
        return self.value - self.half_width

    def to_json(self) -> dict:
        return {"value": self.value, "half_width": self.half_width,
                "samples": self.samples, "seed": self.seed}


def _estimate(hits: int, n: int, seed: int) -> AreaEstimate:
    v = hits / n if n else 0.0
    return AreaEstimate(v, 1.96 * math.sqrt(v * (1 - v) / n) if n else 1.0, n, seed)


@dataclass
class CoverageReport:
    samples: int
    covered: int
    uncovered: list = field(default_factory=list)
    level: float = 0.0
    seed: int = 0
    density: int = 0

    @property
    def ok(self) -> bool:
        return self.covered == self.samples

    def to_json(self) -> dict:
        return {"samples": self.samples, "covered": self.covered,
                "uncovered_count": self.samples - self.covered,
                "uncovered": self.uncovered, "level": self.level,
                "seed": self.seed, "density": self.density}


def random_points_in(P: PolygonWithHoles, n: int, rng) -> np.ndarray:
    lo, hi = np.asarray(P.bbox[:2]), np.asarray(P.bbox[2:])
    out, have = [], 0
    frac = max(P.area / max((hi - lo).prod(), 1e-300), 1e-3)
    while have < n:
        q = rng.uniform(lo, hi, size=(int((n - have) / frac * 1.2) + 16, 2))
        q = q[P.contains_batch(q)]
        out.append(q)
        have += len(q)
    return np.vstack(out)[:n]


def coverage_samples(P: PolygonWithHoles, density: int, seed: int, n_random: int = 1000) -> np.ndarray:
    x0, y0, x1, y1 = P.bbox
    xs = np.linspace(x0, x1, density)
    ys = np.linspace(y0, y1, density)
    X, Y = np.meshgrid(xs, ys)
    grid = np.column_stack((X.ravel(), Y.ravel()))
    grid = grid[P.contains_batch(grid)]
    rnd = random_points_in(P, n_random, np.random.default_rng(seed)) if n_random else np.zeros((0, 2))
    return np.vstack((grid, P.vertices, rnd))


def _failure_reason(P, g, p, level) -> str:
    if not sees_batch(P, [g], [p])[0]:
        return "not visible"
    r = level * float(np.linalg.norm(np.asarray(g) - p))
    if not disks_in_polygon_batch(P, [g], [r])[0]:
        return "disk leaves P"
    return "cone leaves P"


def verify_coverage(P: PolygonWithHoles, guards, level_alpha: float, density: int = 200,
                    seed: int = 0, n_random: int = 1000, max_report: int = 50) -> CoverageReport:
    guards = np.asarray(guards, float).reshape(-1, 2)
    if len(guards):
        inside = P.contains_batch(guards)
        if not inside.all():
            raise PointOutsideDomain(f"guard {guards[~inside][0].tolist()} outside P")
    pts = coverage_samples(P, density, seed, n_random)
    left = np.ones(len(pts), dtype=bool)
    for g in guards:
        idx = np.nonzero(left)[0]
        if len(idx) == 0:
            break
        ok = robustly_guards_batch(P, g[None, :], pts[idx], level_alpha)
        left[idx[ok]] = False
    bad = np.nonzero(left)[0]
    report = []
    for i in bad[:max_report]:
        p = pts[i]
        if len(guards):
            j = int(np.argmin(np.linalg.norm(guards - p, axis=1)))
            g = guards[j]
            report.append({"point": p.tolist(), "nearest_guard": g.tolist(),
                           "reason": _failure_reason(P, g, p, level_alpha)})
        else:
            report.append({"point": p.tolist(), "nearest_guard": None, "reason": "no guards"})
    return CoverageReport(len(pts), int(len(pts) - len(bad)), report, level_alpha, seed, density)


def guard_matrix(P: PolygonWithHoles, candidates, targets, alpha) -> np.ndarray:
    """M[i, j] = candidate i alpha-robustly guards target j."""
    C = np.asarray(candidates, float).reshape(-1, 2)
    T = np.asarray(targets, float).reshape(-1, 2)
    M = np.zeros((len(C), len(T)), dtype=bool)
    for i, c in enumerate(C):
        M[i] = robustly_guards_batch(P, c[None, :], T, alpha)
    return M


def min_set_cover(M: np.ndarray) -> list:
    """Exact minimum cover of the columns of a boolean matrix by rows (branch and bound)."""
    n_rows, n_cols = M.shape
    masks = [sum(1 << j for j in np.nonzero(M[i])[0]) for i in range(n_rows)]
    full = (1 << n_cols) - 1
    if n_cols == 0:
        return []
    union = 0
    for m in masks:
        union |= m
    if union != full:
        raise Infeasible("candidates cannot cover every target")
    covering = [[i for i in range(n_rows) if masks[i] >> j & 1] for j in range(n_cols)]
    best = [list(range(n_rows))]
    # greedy upper bound first
    cov, pick = 0, []
    while cov != full:
        i = max(range(n_rows), key=lambda r: bin(masks[r] & ~cov).count("1"))
        pick.append(i)
        cov |= masks[i]
    best[0] = pick
    max_gain = max(bin(m).count("1") for m in masks)

    def rec(cov, chosen):
        if cov == full:
            if len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        rest = bin(full & ~cov).count("1")
        if len(chosen) + math.ceil(rest / max_gain) >= len(best[0]):
            return
        # branch on the uncovered target with fewest options
        j = min((j for j in range(n_cols) if not cov >> j & 1), key=lambda j: len(covering[j]))
        for i in sorted(covering[j], key=lambda r: -bin(masks[r] & ~cov).count("1")):
            chosen.append(i)
            rec(cov | masks[i], chosen)
            chosen.pop()

    rec(0, [])
    return sorted(best[0])


def exact_opt_small(P: PolygonWithHoles, targets, alpha: float, candidates) -> int:
    C = np.asarray(candidates, float).reshape(-1, 2)
    T = np.asarray(targets, float).reshape(-1, 2)
    if len(C) > 40:
        raise ValueError("exact_opt_small accepts at most 40 candidates")
    if len(T) > 10 ** 4:
        raise ValueError("exact_opt_small accepts at most 10^4 targets")
    if len(T) == 0:
        return 0
    return len(min_set_cover(guard_matrix(P, C, T, alpha)))


def visible_area_fraction(P: PolygonWithHoles, g, p, alpha: float, samples: int = 100000,
                          seed: int = 0, variant: str = "guard") -> AreaEstimate:
    """Fraction of D(g, alpha|p-g|) seen from p (variant 'point': D(p, .) seen from g)."""
    g, p = np.asarray(as_point(g)), np.asarray(as_point(p))
    d = float(np.linalg.norm(p - g))
    if d == 0:
        raise DegenerateDisk("p coincides with g")
    center, viewer = (g, p) if variant == "guard" else (p, g)
    r = alpha * d
    rng = np.random.default_rng(seed)
    rad = r * np.sqrt(rng.uniform(size=samples))
    ang = rng.uniform(0, 2 * math.pi, size=samples)
    pts = center + np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
    inside = P.contains_batch(pts)
    vis = np.zeros(samples, dtype=bool)
    idx = np.nonzero(inside)[0]
    if len(idx):
        vis[idx] = sees_batch(P, viewer[None, :], pts[idx])
    return _estimate(int(vis.sum()), samples, seed)


def disk_component_fraction(member, p, r, resolution: int = 64):
    """Area fraction of D(p, r) covered by the component of region ∩ D(p, r) holding p."""
    h = r / resolution
    ticks = np.arange(-resolution, resolution + 1) * h
    X, Y = np.meshgrid(p[0] + ticks, p[1] + ticks, indexing="ij")
    pts = np.column_stack((X.ravel(), Y.ravel()))
    in_disk = (np.hypot(X - p[0], Y - p[1]) <= r).ravel()
    mask = np.zeros(len(pts), dtype=bool)
    mask[in_disk] = np.asarray(member(pts[in_disk]), dtype=bool)
    mask = mask.reshape(X.shape)
    c = resolution
    mask[c, c] = True
    lab, _ = ndimage.label(mask)
    comp = lab == lab[c, c]
    n_disk = int(in_disk.sum())
    return comp.sum() / n_disk, n_disk


def fatness_estimate(member, center, size: float, samples: int = 64, seed: int = 0,
                     probe_points=None, n_radii: int = 8, resolution: int = 64) -> AreaEstimate:
    """Minimum observed area fraction of C(p, r) over sampled p and log-spaced r.

    ``member`` maps an (N,2) array to a boolean mask.  Pairs whose disk
    already contains D(center, size) are skipped.
    """
    rng = np.random.default_rng(seed)
    c = np.asarray(as_point(center))
    pts = []
    tries = 0
    while sum(len(x) for x in pts) < samples and tries < 200:
        tries += 1
        rad = size * np.sqrt(rng.uniform(size=4 * samples))
        ang = rng.uniform(0, 2 * math.pi, size=4 * samples)
        q = c + np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
        pts.append(q[np.asarray(member(q), dtype=bool)])
    P_ = np.vstack(pts)[:samples] if pts else np.zeros((0, 2))
    if probe_points is not None:
        P_ = np.vstack((np.asarray(probe_points, float).reshape(-1, 2), P_))
    best, best_n = 1.0, 1
    for p in P_:
        rmax = (np.linalg.norm(p - c) + size) * 0.999
        for r in np.geomspace(size / 64, rmax, n_radii):
            f, n = disk_component_fraction(member, p, r, resolution)
            if f < best:
                best, best_n = f, n
    return AreaEstimate(float(best), 1.96 * math.sqrt(best * (1 - best) / best_n), best_n, seed)


def cone_oracle_batch(P: PolygonWithHoles, G, Q, alpha, m: int = 64) -> np.ndarray:
    """Direct check of robust guarding: D(g, alpha|p-g|) in P and p sees m points of
    the arc of its boundary facing p (tangency points included)."""
    G = np.atleast_2d(np.asarray(G, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    G, Q = np.broadcast_arrays(G, Q)
    d = np.linalg.norm(Q - G, axis=1)
    r = alpha * d
    ok = disks_in_polygon_batch(P, G, r) & P.contains_batch(Q)
    same = d <= P.eps
    live = np.nonzero(ok & ~same)[0]
    if len(live) == 0:
        return ok
    g, q = G[live], Q[live]
    base = np.arctan2(q[:, 1] - g[:, 1], q[:, 0] - g[:, 0])
    half = np.arccos(np.clip(alpha, -1, 1))  # angle at g between g->p and g->tangency point
    offs = np.linspace(-half, half, m)
    ang = base[:, None] + offs[None, :]
    arc = g[:, None, :] + r[live][:, None, None] * np.stack((np.cos(ang), np.sin(ang)), axis=-1)
    seen = sees_batch(P, np.repeat(q, m, axis=0), arc.reshape(-1, 2)).reshape(len(live), m)
    ok[live] = seen.all(axis=1)
    return ok
