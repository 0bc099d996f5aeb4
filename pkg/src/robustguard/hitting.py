"""Grid hitting points for fat star-shaped regions near a disk."""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateParameters, FatnessOutOfRange
from .geometry import as_point

C_GRID = 6.0


@dataclass(frozen=True)
class HittingSet:
    """Grid of side gamma*R/c_grid anchored at o, clipped to D(o, 4R).

    Points are enumerated lazily; ``points_in_box`` avoids materializing the
    full grid for small query windows.
    """
    origin: tuple
    R: float
    gamma: float
    grid_side: float

    @property
    def reach(self) -> float:
        return 4.0 * self.R

    @property
    def index_radius(self) -> int:
        return int(math.floor(self.reach / self.grid_side + 1e-9))

    @cached_property
    def points(self) -> np.ndarray:
        return self.points_in_box(np.asarray(self.origin) - self.reach,
                                  np.asarray(self.origin) + self.reach)

    def __len__(self) -> int:
        M = self.index_radius
        lim = (self.reach / self.grid_side) ** 2 * (1 + 1e-12)
        i = np.arange(-M, M + 1)
        jmax = np.floor(np.sqrt(np.maximum(lim - i * i, 0.0)))
        return int(np.sum(2 * jmax + 1))

    def points_in_box(self, lo, hi, stride: int = 1) -> np.ndarray:
        """Grid points inside the axis box [lo, hi] (and inside D(o, 4R)).

        With ``stride`` > 1 only indices divisible by stride are returned,
        a sub-lattice of the same grid.
        """
        o = np.asarray(self.origin)
        s = self.grid_side
        M = self.index_radius
        i0 = max(-M, int(math.ceil((lo[0] - o[0]) / s - 1e-9)))
        i1 = min(M, int(math.floor((hi[0] - o[0]) / s + 1e-9)))
        j0 = max(-M, int(math.ceil((lo[1] - o[1]) / s - 1e-9)))
        j1 = min(M, int(math.floor((hi[1] - o[1]) / s + 1e-9)))
        if i0 > i1 or j0 > j1:
            return np.zeros((0, 2))
        ii = np.arange(i0, i1 + 1)
        jj = np.arange(j0, j1 + 1)
        if stride > 1:
            ii = ii[ii % stride == 0]
            jj = jj[jj % stride == 0]
        I, J = np.meshgrid(ii, jj, indexing="ij")
        I, J = I.ravel(), J.ravel()
        keep = (I * I + J * J) * s * s <= self.reach ** 2 * (1 + 1e-12)
        return np.column_stack((o[0] + I[keep] * s, o[1] + J[keep] * s))

    def first_hit(self, member, lo=None, hi=None):
        """Some grid point accepted by ``member`` (vectorized), or None."""
        lo = np.asarray(self.origin) - self.reach if lo is None else lo
        hi = np.asarray(self.origin) + self.reach if hi is None else hi
        pts = self.points_in_box(lo, hi)
        if len(pts) == 0:
            return None
        ok = np.asarray(member(pts), dtype=bool)
        idx = np.nonzero(ok)[0]
        return pts[idx[0]] if len(idx) else None


def hitting_points(o, R: float, gamma: float, c_grid: float = C_GRID) -> HittingSet:
    o = as_point(o)
    if not R > 0:
        raise DegenerateParameters("hitting grid needs R > 0")
    if not gamma > 0:
        raise DegenerateParameters("gamma must be positive")
    if gamma > 0.25:
        raise FatnessOutOfRange(f"gamma={gamma} exceeds 1/4")
    return HittingSet(o, float(R), float(gamma), gamma * R / c_grid)


def cardinality_bound(gamma: float) -> int:
    """Grid points of side gamma*R/6 in the 8R x 8R box around D(o, 4R)."""
    return int(math.ceil(48.0 / gamma + 1)) ** 2
