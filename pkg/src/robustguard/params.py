"""Run parameters: alpha, tolerances and the tunable constants."""
import math
from dataclasses import dataclass, field, replace

from .errors import DegenerateParameters

DEFAULT_CONSTANTS = {
    "k_qgrid": 1 / 8,          # grid side = k_qgrid * alpha^2 * R_v
    "k_fat": 1 / 8,            # fatness parameter of H(g) = k_fat * alpha
    "c_boundary": 2 * math.pi, # boundary candidates per disk = ceil(c / alpha)
    "c_grid": 6.0,             # hitting grid side = gamma * R / c_grid
    "sample_density": 200,     # coverage grid is density x density
    "area_samples": 100000,
    "fatness_resolution": 64,
    "random_samples": 1000,    # extra random points in verify_coverage
    "max_candidates": 200000,
    "max_faces": 200000,
    # grid constant used by guard_polygon; the arrangement step cannot
    # afford the 1/8 grid at alpha/8 (see README)
    "pipeline_k_qgrid": 128.0,
    "purple_threshold": 8,
    "purple_margin": 4,
}


@dataclass(frozen=True)
class RobustParams:
    alpha: float
    eps_geom: float = 1e-9
    tol_arc: float | None = None  # absolute; None means 1e-4 * diameter(P)
    constants: dict = field(default_factory=lambda: dict(DEFAULT_CONSTANTS))

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise DegenerateParameters(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.eps_geom <= 0:
            raise DegenerateParameters("eps_geom must be positive")
        if self.tol_arc is not None and self.tol_arc <= 0:
            raise DegenerateParameters("tol_arc must be positive")
        merged = dict(DEFAULT_CONSTANTS)
        merged.update(self.constants)
        object.__setattr__(self, "constants", merged)

    @property
    def theta(self) -> float:
        return math.asin(self.alpha)

    def const(self, name):
        return self.constants[name]

    def arc_tol(self, P) -> float:
        if self.tol_arc is not None:
            return self.tol_arc
        return 1e-4 * P.diameter

    def with_alpha(self, alpha: float) -> "RobustParams":
        return replace(self, alpha=alpha)

    def with_constants(self, **kw) -> "RobustParams":
        c = dict(self.constants)
        c.update(kw)
        return replace(self, constants=c)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "theta": self.theta, "eps_geom": self.eps_geom,
                "tol_arc": self.tol_arc, "constants": dict(self.constants)}
