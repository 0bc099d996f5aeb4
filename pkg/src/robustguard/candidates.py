"""Candidate guard sets on medial disks: square grids Q_v and boundary points."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, NotRobustlyGuarded, ReplacementNotFound
from .geometry import PolygonWithHoles, as_point
from .medial import CellDecomposition, associate_batch
from .oracles import visible_area_fraction
from .params import RobustParams
from .robust import robustly_guards_batch


@dataclass
class CandidateSet:
    grids: dict              # disk id -> (k, 2) array, centre first
    spacing: dict            # disk id -> grid side
    alpha: float
    k_qgrid: float

    @property
    def points(self) -> np.ndarray:
        if not self.grids:
            return np.zeros((0, 2))
        return np.vstack([self.grids[k] for k in sorted(self.grids)])

    @property
    def owner(self) -> np.ndarray:
        return np.concatenate([np.full(len(self.grids[k]), k) for k in sorted(self.grids)]) \
            if self.grids else np.zeros(0, dtype=int)

    def __len__(self) -> int:
        return sum(len(g) for g in self.grids.values())

    def per_disk_bound(self) -> int:
        return int((2 / (self.k_qgrid * self.alpha ** 2) + 1) ** 2) + 1

    def to_json(self) -> list:
        return [{"disk_id": int(k), "spacing": self.spacing[k], "points": self.grids[k].tolist()}
                for k in sorted(self.grids)]


def _disk_grid(center, radius, side) -> np.ndarray:
    m = int(math.floor(radius / side + 1e-12))
    ticks = np.arange(-m, m + 1) * side
    X, Y = np.meshgrid(ticks, ticks, indexing="ij")
    keep = X ** 2 + Y ** 2 <= radius ** 2 * (1 + 1e-12)
    off = np.column_stack((X[keep], Y[keep]))
    # centre first
    off = off[np.argsort(np.hypot(off[:, 0], off[:, 1]), kind="stable")]
    return np.asarray(center) + off


def build_Q(decomp: CellDecomposition, params: RobustParams, k_qgrid: float | None = None,
            cap: int | None = None) -> CandidateSet:
    alpha = params.alpha
    k = params.const("k_qgrid") if k_qgrid is None else k_qgrid
    cap = int(params.const("max_candidates")) if cap is None else cap
    total = 0
    sides = {}
    for d in decomp.disks:
        side = k * alpha ** 2 * d.radius
        sides[d.id] = side
        total += int(math.pi * (d.radius / side + 1) ** 2)
    if total > cap:
        raise BudgetExceeded(f"candidate set would hold about {total} points (cap {cap})")
    grids = {d.id: _disk_grid(d.center, d.radius, sides[d.id]) for d in decomp.disks}
    return CandidateSet(grids, sides, alpha, k)


def candidates_for(g, decomp: CellDecomposition, Q: CandidateSet) -> np.ndarray:
    g = as_point(g)
    decomp.polygon.require_inside(g)
    ids = associate_batch(decomp, [g])[0]
    return np.vstack([Q.grids[i] for i in ids])


def candidates_for_batch(pts, decomp: CellDecomposition, Q: CandidateSet) -> list:
    return [np.vstack([Q.grids[i] for i in ids]) for ids in associate_batch(decomp, pts)]


@dataclass
class BoundaryCandidateSet:
    points: dict             # disk id -> (m + 1, 2) array, centre last
    count: int               # boundary points per disk
    c_boundary: float
    alpha: float
    spacing: dict = field(default_factory=dict)

    def to_json(self) -> list:
        return [{"disk_id": int(k), "spacing": self.spacing[k], "points": self.points[k].tolist()}
                for k in sorted(self.points)]


def boundary_points(center, radius, alpha, c_boundary=2 * math.pi) -> np.ndarray:
    m = int(math.ceil(c_boundary / alpha - 1e-12))
    t = 2 * math.pi * np.arange(m) / m
    ring = np.asarray(center) + radius * np.column_stack((np.cos(t), np.sin(t)))
    return np.vstack((ring, np.asarray(center)[None]))


def build_Q_hat(decomp: CellDecomposition, params: RobustParams) -> BoundaryCandidateSet:
    c = params.const("c_boundary")
    if c < 2 * math.pi - 1e-12:
        raise ValueError("c_boundary must be at least 2 pi")
    m = int(math.ceil(c / params.alpha - 1e-12))
    pts = {d.id: boundary_points(d.center, d.radius, params.alpha, c) for d in decomp.disks}
    spacing = {d.id: 2 * math.pi * d.radius / m for d in decomp.disks}
    return BoundaryCandidateSet(pts, m, c, params.alpha, spacing)


def candidate_replacement_check(P: PolygonWithHoles, g, p, candidates, level: str,
                                params: RobustParams, samples: int = 20000, seed: int = 0):
    """A candidate replacing g for p: alpha/4-robust (grid level) or seeing a 1/16
    fraction of its alpha-disk from p (boundary level)."""
    g, p = as_point(g), as_point(p)
    alpha = params.alpha
    if not robustly_guards_batch(P, [g], [p], alpha)[0]:
        raise NotRobustlyGuarded(f"{g} does not {alpha}-robustly guard {p}")
    C = np.asarray(candidates, float).reshape(-1, 2)
    if level == "grid":
        # the disk centre leads each grid; try it first
        if len(C) and robustly_guards_batch(P, C[:1], [p], alpha / 4)[0]:
            return tuple(C[0])
        # nearby candidates are the likely hits; scan outward in chunks
        C = C[np.argsort(np.linalg.norm(C - np.asarray(g), axis=1), kind="stable")]
        for s in range(0, len(C), 256):
            ch = C[s:s + 256]
            ok = robustly_guards_batch(P, ch, np.broadcast_to(p, ch.shape), alpha / 4)
            if ok.any():
                return tuple(ch[int(np.argmax(ok))])
        raise ReplacementNotFound(f"no candidate {alpha / 4}-robustly guards {p}")
    if level == "boundary":
        best, best_q = -1.0, None
        for q in C:
            if np.linalg.norm(q - np.asarray(p)) == 0 or not P.contains(q):
                continue
            est = visible_area_fraction(P, q, p, alpha, samples=samples, seed=seed)
            if est.lower > best:
                best, best_q = est.lower, tuple(q)
        if best_q is None or best < 1 / 16:
            raise ReplacementNotFound(f"no boundary candidate sees 1/16 of its disk from {p}")
        return best_q
    raise ValueError(f"unknown level {level!r}")
