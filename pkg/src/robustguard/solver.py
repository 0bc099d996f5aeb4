"""Greedy robust guarding of point sets and of whole polygons."""
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import Polygon

from .candidates import build_Q, candidates_for_batch
from .errors import AlphaTooLarge, BudgetExceeded, PointOutsideDomain
from .geometry import PolygonWithHoles
from .hitting import hitting_points
from .inverse import inverse_region, inverse_region_size
from .medial import build_decomposition
from .params import RobustParams
from .region import polygons_of
from .robust import robust_visibility_region, robustly_guards_batch


@dataclass
class ImplicitPurple:
    chain_id: int
    count: int
    generator: dict          # {"kind": "chain-centres", "centres": [...]}

    def points(self) -> np.ndarray:
        return np.asarray(self.generator["centres"], float).reshape(-1, 2)

    def to_json(self) -> dict:
        return {"chain_id": self.chain_id, "count": self.count, "generator": self.generator}


@dataclass
class GuardSolution:
    guards: np.ndarray
    certified_alpha: float
    witnesses: np.ndarray
    target: str                          # "discrete" or "polygon"
    implicit_purple: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.guards) + sum(ip.count for ip in self.implicit_purple)

    def all_guards(self) -> np.ndarray:
        parts = [np.asarray(self.guards, float).reshape(-1, 2)]
        parts += [ip.points() for ip in self.implicit_purple]
        return np.vstack(parts)

    def to_json(self) -> dict:
        return {"certified_alpha": self.certified_alpha,
                "target": self.target,
                "guards": np.asarray(self.guards).tolist(),
                "witnesses": np.asarray(self.witnesses).tolist(),
                "implicit": [ip.to_json() for ip in self.implicit_purple],
                "stats": self.stats}

    @classmethod
    def from_json(cls, obj: dict) -> "GuardSolution":
        imp = [ImplicitPurple(d["chain_id"], d["count"], d["generator"]) for d in obj.get("implicit", [])]
        return cls(np.asarray(obj["guards"], float).reshape(-1, 2), float(obj["certified_alpha"]),
                   np.asarray(obj.get("witnesses", []), float).reshape(-1, 2),
                   obj.get("target", "polygon"), imp, obj.get("stats", {}))


# -- discrete ------------------------------------------------------------------

def _greedy_cover(M: np.ndarray) -> list:
    """Greedy rows covering every coverable column of M."""
    left = M.any(axis=0).copy()
    picked = []
    while left.any():
        gain = (M & left).sum(axis=1)
        i = int(np.argmax(gain))
        picked.append(i)
        left &= ~M[i]
    return picked


def _hit_cover(P, hs, targets, level, budget=2_000_000):
    """Hitting points (coarse sub-lattices first) covering targets at ``level``."""
    o = np.asarray(hs.origin)
    lo, hi = o - hs.reach, o + hs.reach
    M = hs.index_radius
    stride = 1
    while (2 * M // stride + 1) ** 2 > 256:
        stride *= 2
    chosen = []
    left = np.ones(len(targets), dtype=bool)
    while True:
        pts = hs.points_in_box(lo, hi, stride)
        pts = pts[P.contains_batch(pts)] if len(pts) else pts
        idx = np.nonzero(left)[0]
        if len(pts) and len(pts) * len(idx) <= budget:
            T = targets[idx]
            G = np.repeat(pts, len(T), axis=0)
            ok = robustly_guards_batch(P, G, np.tile(T, (len(pts), 1)), level).reshape(len(pts), len(T))
            for i in _greedy_cover(ok):
                chosen.append(pts[i])
                left[idx[ok[i]]] = False
        if not left.any() or stride == 1 or len(pts) * max(1, left.sum()) > budget:
            break
        stride //= 2
    return chosen, left


def discrete_robust_guarding(P: PolygonWithHoles, S, params: RobustParams,
                             regions: list | None = None) -> GuardSolution:
    """Greedy witness selection with grid hitting points; certifies alpha/2 on S."""
    S = np.asarray(S, float).reshape(-1, 2)
    if len(S) and not P.contains_batch(S).all():
        bad = S[~P.contains_batch(S)][0]
        raise PointOutsideDomain(f"target {bad.tolist()} outside P")
    alpha = params.alpha
    level = alpha / 2
    if regions is None:
        regions = [inverse_region(P, s, params) for s in S]
    sizes = np.asarray([inverse_region_size(P, s, params, regions[i]) for i, s in enumerate(S)])
    gamma = params.const("k_fat") * alpha
    remaining = np.ones(len(S), dtype=bool)
    guards, witnesses = [], []
    max_h, fallbacks, hit_bound = 0, 0, 0
    while remaining.any():
        idx = np.nonzero(remaining)[0]
        j = int(idx[np.lexsort((idx, sizes[idx]))[0]])
        g, R = S[j], float(sizes[j])
        witnesses.append(g)
        removed = [i for i in idx if i == j or regions[i].distance(g) <= R + P.eps]
        remaining[removed] = False
        T = S[removed]
        if R <= P.eps:
            picks, left = [g], np.zeros(len(T), dtype=bool)
            # targets sharing a zero-size region may still need their own guard
            left = ~robustly_guards_batch(P, np.broadcast_to(g, T.shape), T, level)
        else:
            hs = hitting_points(g, R, gamma, params.const("c_grid"))
            hit_bound = max(hit_bound, len(hs))
            picks, left = _hit_cover(P, hs, T, level)
        for t in T[left]:
            picks.append(t)
            fallbacks += 1
        max_h = max(max_h, len(picks))
        guards += [tuple(p) for p in picks]
    G = np.unique(np.asarray(guards, float).reshape(-1, 2), axis=0) if guards else np.zeros((0, 2))
    stats = {"targets": int(len(S)), "witnesses": len(witnesses), "maxH": int(max_h),
             "hitting_grid_size": int(hit_bound), "fallbacks": int(fallbacks),
             "internal_alpha": alpha}
    return GuardSolution(G, level, np.asarray(witnesses).reshape(-1, 2), "discrete", [], stats)


# -- arrangement -------------------------------------------------------------------

@dataclass
class Arrangement:
    samples: np.ndarray
    signatures: list           # per sample: tuple of candidate indices whose region holds it
    faces: int
    regions: list


def arrangement_samples(P: PolygonWithHoles, Q, params: RobustParams, reduce: bool = True,
                        max_faces: int | None = None) -> Arrangement:
    """One interior point per face of the overlay of VP_alpha(q), q in Q.

    ``params.alpha`` is the level of the regions.  With ``reduce`` only faces
    whose signature is inclusion-minimal are kept: covering them covers the rest.
    """
    Qp = Q.points if hasattr(Q, "points") else np.asarray(Q, float).reshape(-1, 2)
    cap = int(params.const("max_faces")) if max_faces is None else max_faces
    regs = [robust_visibility_region(P, q, params) for q in Qp]
    lines = [P.shapely.boundary]
    for r in regs:
        for poly in polygons_of(r.geom):
            lines.append(poly.boundary)
    noded = shapely.unary_union(lines)
    faces = [f for f in polygons_of(shapely.polygonize(shapely.get_parts(noded)))
             if f.area > 1e-12 * P.area]
    if len(faces) > cap:
        raise BudgetExceeded(f"arrangement has {len(faces)} faces (cap {cap})")
    reps = np.asarray([f.representative_point().coords[0] for f in faces]).reshape(-1, 2)
    inside = P.contains_batch(reps) if len(reps) else np.zeros(0, dtype=bool)
    reps = reps[inside]
    member = np.zeros((len(Qp), len(reps)), dtype=bool)
    for i, r in enumerate(regs):
        if r.area > 0:
            member[i] = shapely.contains_xy(r.geom, reps[:, 0], reps[:, 1])
    sigs = [tuple(np.nonzero(member[:, k])[0]) for k in range(len(reps))]
    n_faces = len(reps)
    if reduce and len(reps):
        order = sorted(range(len(reps)), key=lambda k: (len(sigs[k]), sigs[k]))
        kept, kept_sets = [], []
        for k in order:
            s = frozenset(sigs[k])
            if any(ks <= s for ks in kept_sets):
                continue
            kept.append(k)
            kept_sets.append(s)
        kept.sort()
        reps = reps[kept]
        sigs = [sigs[k] for k in kept]
    return Arrangement(reps, sigs, n_faces, regs)


# -- full polygon ---------------------------------------------------------------------

def _cut_line(P, e, centre):
    """Polyline from the foot on edge e1 through the centre to the foot on e2."""
    feet = []
    for k in e:
        a, b = P.edge_a[k], P.edge_b[k]
        t = np.clip((centre - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
        feet.append(a + t * (b - a))
    return feet[0], np.asarray(centre), feet[1]


def _inner_sections(P, dec, params):
    """Inner parts of long chains: (chain, section polygon, implicit centres)."""
    k_thr = int(params.const("purple_threshold"))
    margin = int(params.const("purple_margin"))
    out = []
    for ch in dec.chains:
        k = len(ch.inserted)
        if k <= k_thr:
            continue
        cs = [np.asarray(p) for p, _ in ch.inserted]
        # section strictly between the cuts at p_{margin+2} and p_{k-margin-1}
        a, b = margin + 1, k - margin - 2
        if b <= a:
            continue
        f1a, ca, f2a = _cut_line(P, ch.edges, cs[a])
        f1b, cb, f2b = _cut_line(P, ch.edges, cs[b])
        sec = Polygon([f1a, f1b, cb, f2b, f2a, ca])
        if not sec.is_valid:
            sec = shapely.make_valid(sec)
        centres = [tuple(map(float, c)) for c in cs[a - 1:b + 2]]
        out.append((ch, sec, centres))
    return out


def _alpha_limit(P) -> float:
    return min(0.5, math.sin(P.min_interior_angle() / 2))


def guard_polygon(P: PolygonWithHoles, params: RobustParams, implicit: bool = True) -> GuardSolution:
    """Guards that alpha/8-robustly guard all of P."""
    alpha = params.alpha
    lim = _alpha_limit(P)
    if alpha > lim * (1 + 1e-9):
        raise AlphaTooLarge(f"alpha={alpha} exceeds min(1/2, sin(phi/2)) = {lim:.6g}")
    dec = build_decomposition(P, params)
    sections = _inner_sections(P, dec, params) if implicit else []
    if sections:
        rest = P.shapely
        for _, sec, _ in sections:
            rest = rest.difference(sec)
        subs = []
        for comp in polygons_of(rest):
            if comp.area <= 1e-9 * P.area:
                continue
            subs.append(_as_polygon(comp))
        parts = [_guard_part(S_, params) for S_ in subs]
        guards = np.vstack([p.guards for p in parts]) if parts else np.zeros((0, 2))
        wit = np.vstack([p.witnesses for p in parts]) if parts else np.zeros((0, 2))
        imp = [ImplicitPurple(ch.id, len(c), {"kind": "chain-centres", "centres": c})
               for ch, _, c in sections]
        stats = {"subpolygons": len(subs), "chains": len(dec.chains),
                 "parts": [p.stats for p in parts]}
        stats.update(_merge_stats(parts))
        return GuardSolution(guards, alpha / 8, wit, "polygon", imp, stats)
    return _guard_part(P, params, dec)


def _merge_stats(parts) -> dict:
    keys = ("samples", "faces", "witnesses", "fallbacks", "replacement_fallbacks")
    out = {k: int(sum(p.stats.get(k, 0) for p in parts)) for k in keys}
    out["maxH"] = max((p.stats.get("maxH", 0) for p in parts), default=0)
    out["maxQ"] = max((p.stats.get("maxQ", 0) for p in parts), default=0)
    return out


def _as_polygon(geom) -> PolygonWithHoles:
    # cut lines leave almost collinear vertices behind
    minx, miny, maxx, maxy = geom.bounds
    geom = geom.simplify(1e-9 * math.hypot(maxx - minx, maxy - miny), preserve_topology=True)
    ext = np.asarray(geom.exterior.coords)[:-1]
    holes = [np.asarray(h.coords)[:-1] for h in geom.interiors]
    return PolygonWithHoles(ext, holes)


def _guard_part(P: PolygonWithHoles, params: RobustParams, dec=None) -> GuardSolution:
    alpha = params.alpha
    low = params.with_alpha(alpha / 8)
    if dec is None:
        dec = build_decomposition(P, params)
    Q = build_Q(dec, low, k_qgrid=params.const("pipeline_k_qgrid"))
    Qp = Q.points
    arr = arrangement_samples(P, Q, low)
    S = arr.samples
    sol = discrete_robust_guarding(P, S, params)
    # assign every sample to a guard that alpha/2-guards it
    G = sol.guards
    owner = np.full(len(S), -1)
    for gi, g in enumerate(G):
        free = np.nonzero(owner < 0)[0]
        if len(free) == 0:
            break
        ok = robustly_guards_batch(P, np.broadcast_to(g, (len(free), 2)), S[free], alpha / 2)
        owner[free[ok]] = gi
    per_g = candidates_for_batch(G, dec, Q) if len(G) else []
    out, fallbacks = [], 0
    max_q = max((len(c) for c in per_g), default=0)
    for gi in range(len(G)):
        T = S[owner == gi]
        if len(T) == 0:
            continue
        C = per_g[gi]
        M = np.zeros((len(C), len(T)), dtype=bool)
        for ti, t in enumerate(T):
            M[:, ti] = robustly_guards_batch(P, C, np.broadcast_to(t, C.shape), alpha / 8)
        picks = _greedy_cover(M)
        out += [tuple(C[i]) for i in picks]
        left = ~M[picks].any(axis=0) if picks else np.ones(len(T), dtype=bool)
        for t in T[left]:
            out.append(_fallback(P, t, Qp, arr, S, alpha / 8))
            fallbacks += 1
    for t in S[owner < 0]:
        out.append(_fallback(P, t, Qp, arr, S, alpha / 8))
        fallbacks += 1
    guards = np.unique(np.asarray(out, float).reshape(-1, 2), axis=0) if out else np.zeros((0, 2))
    stats = {"samples": int(len(S)), "faces": int(arr.faces), "candidates": int(len(Qp)),
             "disks": len(dec.disks), "chains": len(dec.chains),
             "witnesses": sol.stats["witnesses"], "maxH": sol.stats["maxH"], "maxQ": int(max_q),
             "fallbacks": sol.stats["fallbacks"], "replacement_fallbacks": int(fallbacks)}
    return GuardSolution(guards, alpha / 8, sol.witnesses, "polygon", [], stats)


def _fallback(P, t, Qp, arr, S, level):
    """A candidate whose region holds the sample (any q of its signature)."""
    k = int(np.argmin(np.linalg.norm(S - t, axis=1)))
    for i in arr.signatures[k]:
        if robustly_guards_batch(P, Qp[i], t, level)[0]:
            return tuple(Qp[i])
    return tuple(t)


def expand_implicit(solution: GuardSolution) -> GuardSolution:
    if not solution.implicit_purple:
        return solution
    guards = solution.all_guards()
    stats = dict(solution.stats)
    stats["expanded"] = int(sum(ip.count for ip in solution.implicit_purple))
    return GuardSolution(guards, solution.certified_alpha, solution.witnesses, solution.target,
                         [], stats)
