"""Command line entry point: robustguard <subcommand> [options]."""
import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import InputError, RobustGuardError
from .geometry import PolygonWithHoles
from .params import DEFAULT_CONSTANTS, RobustParams

CONFIG_ENV = "ROBUSTGUARD_CONFIG"


@dataclass
class RunConfig:
    alpha: float = 0.25
    tol_arc: float | None = None
    eps_geom: float = 1e-9
    k_qgrid: float = DEFAULT_CONSTANTS["k_qgrid"]
    k_fat: float = DEFAULT_CONSTANTS["k_fat"]
    c_boundary: float = DEFAULT_CONSTANTS["c_boundary"]
    sample_density: int = DEFAULT_CONSTANTS["sample_density"]
    seed: int = 0
    max_candidates: int = DEFAULT_CONSTANTS["max_candidates"]
    max_faces: int = DEFAULT_CONSTANTS["max_faces"]
    pipeline_k_qgrid: float = DEFAULT_CONSTANTS["pipeline_k_qgrid"]

    def params(self) -> RobustParams:
        consts = {k: getattr(self, k) for k in ("k_qgrid", "k_fat", "c_boundary", "sample_density",
                                                "max_candidates", "max_faces", "pipeline_k_qgrid")}
        return RobustParams(self.alpha, self.eps_geom, self.tol_arc, consts)

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        path = path or os.environ.get(CONFIG_ENV)
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise InputError(f"cannot read config {path}: {e}") from e
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None and k in names})
        cfg = cls(**data)
        cfg.params()  # validates
        return cfg


def _point(text: str) -> tuple:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y but got {text!r}")
    return (x, y)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _polygon(path) -> PolygonWithHoles:
    obj = _read_json(path)
    if isinstance(obj, dict) and "polygon" in obj:
        obj = obj["polygon"]
    return PolygonWithHoles.from_json(obj)


def _points(path) -> np.ndarray:
    obj = _read_json(path)
    if isinstance(obj, dict):
        obj = obj.get("points", obj.get("guards"))
    try:
        return np.asarray(obj, float).reshape(-1, 2)
    except (TypeError, ValueError) as e:
        raise InputError(f"{path}: expected a list of [x, y] points") from e


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(obj, out):
    text = json.dumps(obj, default=_default, sort_keys=True, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _svg(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_vis(a, cfg):
    from .robust import robust_visibility_region
    from .svg import render_scene
    P = _polygon(a.polygon)
    r = robust_visibility_region(P, a.guard, cfg.params())
    _emit({"config": asdict(cfg), "guard": a.guard, "region": r.to_json()}, a.out)
    _svg(a.svg, render_scene(P, [r], guards=[a.guard]))
    return 0


def cmd_inv_vis(a, cfg):
    from .inverse import inverse_region, inverse_region_size
    from .svg import render_scene
    P = _polygon(a.polygon)
    prm = cfg.params()
    r = inverse_region(P, a.point, prm)
    _emit({"config": asdict(cfg), "point": a.point, "size": inverse_region_size(P, a.point, prm, r),
           "region": r.to_json()}, a.out)
    _svg(a.svg, render_scene(P, [r], points=[a.point]))
    return 0


def cmd_guard_discrete(a, cfg):
    from .solver import discrete_robust_guarding
    from .svg import render_scene
    P = _polygon(a.polygon)
    S = _points(a.points)
    sol = discrete_robust_guarding(P, S, cfg.params())
    _emit({"config": asdict(cfg), **sol.to_json()}, a.out)
    _svg(a.svg, render_scene(P, guards=sol.guards, points=S))
    return 0


def cmd_guard_polygon(a, cfg):
    from .solver import guard_polygon
    from .svg import render_scene
    P = _polygon(a.polygon)
    sol = guard_polygon(P, cfg.params(), implicit=not a.explicit)
    _emit({"config": asdict(cfg), **sol.to_json()}, a.out)
    _svg(a.svg, render_scene(P, guards=sol.all_guards()))
    return 0


def cmd_expand(a, cfg):
    from .solver import GuardSolution, expand_implicit
    obj = _read_json(a.solution)
    sol = expand_implicit(GuardSolution.from_json(obj))
    _emit({"config": obj.get("config", asdict(cfg)), **sol.to_json()}, a.out)
    return 0


def cmd_verify(a, cfg):
    from .oracles import verify_coverage
    from .robust import robustly_guards_batch
    from .solver import GuardSolution
    P = _polygon(a.polygon)
    obj = _read_json(a.solution)
    sol = GuardSolution.from_json(obj)
    level = a.level if a.level is not None else sol.certified_alpha
    G = sol.all_guards()
    if a.points:
        S = _points(a.points)
        ok = np.zeros(len(S), dtype=bool)
        for g in G:
            ok |= robustly_guards_batch(P, np.broadcast_to(g, S.shape), S, level)
        rep = {"samples": int(len(S)), "covered": int(ok.sum()),
               "uncovered_count": int((~ok).sum()),
               "uncovered": [{"point": p.tolist()} for p in S[~ok][:50]], "level": level}
        bad = int((~ok).sum())
    else:
        r = verify_coverage(P, G, level, density=cfg.sample_density, seed=cfg.seed)
        rep = r.to_json()
        bad = r.samples - r.covered
    _emit({"config": asdict(cfg), "report": rep}, a.out)
    return 0 if bad == 0 else 1


def cmd_gen(a, cfg):
    from . import instances as I
    kind = a.kind
    extra = {}
    if kind == "corridor":
        P = I.corridor(a.length, a.width)
    elif kind == "square":
        P = I.unit_square()
    elif kind == "lshape":
        P = I.l_shape()
    elif kind == "apex":
        P = I.apex_fixture(cfg.alpha)
    elif kind == "random":
        P = I.random_polygon(a.n, a.holes, cfg.seed)
        extra["min_interior_angle"] = P.min_interior_angle()
    elif kind == "spikebox":
        if not a.lines:
            raise InputError("gen spikebox needs --lines")
        sb = I.spike_box(I.LineSet.from_json(_read_json(a.lines)), cfg.alpha)
        P = sb.polygon
        extra["tips"] = [{"point": list(t), "line": li} for t, li in sb.tips]
        extra["apex_angle"] = sb.apex_angle
    else:
        raise InputError(f"unknown generator {kind!r}")
    _emit({"config": asdict(cfg), **P.to_json(), **extra}, a.out)
    if a.svg:
        from .svg import render_scene
        _svg(a.svg, render_scene(P))
    return 0


def cmd_render(a, cfg):
    from .medial import build_decomposition
    from .region import Region
    from .svg import render_scene
    P = _polygon(a.polygon)
    regions = [Region.from_json(_read_json(p).get("region", {})) for p in a.region or []]
    guards = points = None
    if a.solution:
        from .solver import GuardSolution
        guards = GuardSolution.from_json(_read_json(a.solution)).all_guards()
    if a.points:
        points = _points(a.points)
    dec = build_decomposition(P, cfg.params()) if a.decomposition else None
    if not a.svg:
        raise InputError("render needs --svg")
    _svg(a.svg, render_scene(P, regions, dec, guards, points))
    if a.out and dec is not None:
        _emit({"config": asdict(cfg), "decomposition": dec.to_json()}, a.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: $%s)" % CONFIG_ENV)
    common.add_argument("--alpha", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--density", type=int, dest="sample_density")
    common.add_argument("--tol-arc", type=float, dest="tol_arc")
    common.add_argument("--out", help="output JSON path (default stdout)")
    common.add_argument("--svg", help="also write an SVG picture")

    p = argparse.ArgumentParser(prog="robustguard", description="Robust guarding of polygons with holes.")
    sub = p.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("vis", parents=[common], help="robust visibility region of a guard")
    s.add_argument("--polygon", required=True)
    s.add_argument("--guard", type=_point, required=True)
    s.set_defaults(func=cmd_vis)
    s = sub.add_parser("inv-vis", parents=[common], help="guard positions that robustly see a point")
    s.add_argument("--polygon", required=True)
    s.add_argument("--point", type=_point, required=True)
    s.set_defaults(func=cmd_inv_vis)
    s = sub.add_parser("guard-discrete", parents=[common], help="guard a finite point set")
    s.add_argument("--polygon", required=True)
    s.add_argument("--points", required=True)
    s.set_defaults(func=cmd_guard_discrete)
    s = sub.add_parser("guard-polygon", parents=[common], help="guard the whole polygon")
    s.add_argument("--polygon", required=True)
    s.add_argument("--explicit", action="store_true", help="no implicit purple chains")
    s.set_defaults(func=cmd_guard_polygon)
    s = sub.add_parser("expand", parents=[common], help="expand implicit chain guards")
    s.add_argument("--solution", required=True)
    s.set_defaults(func=cmd_expand)
    s = sub.add_parser("verify", parents=[common], help="check a solution by dense sampling")
    s.add_argument("--polygon", required=True)
    s.add_argument("--solution", required=True)
    s.add_argument("--level", type=float, help="robustness level (default: certified_alpha)")
    s.add_argument("--points", help="check these points instead of a dense sample")
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("gen", parents=[common], help="generate a test polygon")
    s.add_argument("kind", choices=["corridor", "square", "lshape", "apex", "random", "spikebox"])
    s.add_argument("--length", type=float, default=10.0)
    s.add_argument("--width", type=float, default=1.0)
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--holes", type=int, default=0)
    s.add_argument("--lines", help="JSON list of integer point pairs")
    s.set_defaults(func=cmd_gen)
    s = sub.add_parser("render", parents=[common], help="draw polygon, regions and guards")
    s.add_argument("--polygon", required=True)
    s.add_argument("--region", action="append", help="region JSON (repeatable)")
    s.add_argument("--solution")
    s.add_argument("--points")
    s.add_argument("--decomposition", action="store_true", help="draw medial disks and cells")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(a.config, vars(a))
        return a.func(a, cfg)
    except InputError as e:
        print(f"robustguard: error: {e}", file=sys.stderr)
        return 2
    except RobustGuardError as e:
        print(f"robustguard: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
