"""Static SVG rendering of polygons, regions, disks, cells and guards."""
from xml.sax.saxutils import escape

import numpy as np

from .region import polygons_of

CELL_COLORS = {"red": "#e06666", "purple": "#9b59b6", "blue": "#5d8fd6"}


class SVG:
    def __init__(self, bbox, width: int = 800, pad: float = 0.05):
        x0, y0, x1, y1 = bbox
        w, h = max(x1 - x0, 1e-12), max(y1 - y0, 1e-12)
        self.x0, self.y0 = x0 - pad * w, y0 - pad * h
        self.w, self.h = w * (1 + 2 * pad), h * (1 + 2 * pad)
        self.width = width
        self.height = int(round(width * self.h / self.w))
        self.scale = width / self.w
        self.items = []

    def _xy(self, p):
        return (p[0] - self.x0) * self.scale, (self.y0 + self.h - p[1]) * self.scale

    def _path(self, rings) -> str:
        out = []
        for r in rings:
            r = np.asarray(r)
            if len(r) == 0:
                continue
            pts = [self._xy(p) for p in r]
            out.append("M" + " L".join(f"{x:.3f},{y:.3f}" for x, y in pts) + " Z")
        return " ".join(out)

    def polygon(self, rings, fill="none", stroke="black", opacity=1.0, width=1.0):
        self.items.append(f'<path d="{self._path(rings)}" fill="{fill}" fill-opacity="{opacity}" '
                          f'stroke="{stroke}" stroke-width="{width}" fill-rule="evenodd"/>')

    def geom(self, g, **kw):
        for poly in polygons_of(g):
            rings = [np.asarray(poly.exterior.coords)] + [np.asarray(r.coords) for r in poly.interiors]
            self.polygon(rings, **kw)

    def circle(self, c, r, fill="#f4d03f", stroke="#b7950b", opacity=0.5):
        x, y = self._xy(c)
        self.items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r * self.scale:.3f}" fill="{fill}" '
                          f'fill-opacity="{opacity}" stroke="{stroke}" stroke-width="0.5"/>')

    def dot(self, p, r=3.0, fill="black", title=None):
        x, y = self._xy(p)
        t = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r}" fill="{fill}">{t}</circle>')

    def polyline(self, pts, stroke="#555", width=1.0):
        s = " ".join(f"{x:.3f},{y:.3f}" for x, y in (self._xy(p) for p in pts))
        self.items.append(f'<polyline points="{s}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def render(self) -> str:
        body = "\n".join(self.items)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">\n<rect width="100%" height="100%" fill="white"/>\n'
                f"{body}\n</svg>\n")


def render_scene(P, regions=(), decomposition=None, guards=None, points=None, width=800) -> str:
    s = SVG(P.bbox, width)
    s.polygon(P.rings, fill="#eeeeee", stroke="black", width=1.5)
    if decomposition is not None:
        for c in decomposition.cells:
            s.geom(c.geom, fill=CELL_COLORS[c.kind], stroke="none", opacity=0.6)
        for d in decomposition.disks:
            s.circle(d.center, d.radius)
        ma = decomposition.axis
        for e in ma.edges:
            s.polyline([ma.point_at(e, t) for t in np.linspace(0, 1, 17)], stroke="#333", width=0.8)
    for r in regions:
        s.geom(r.geom, fill="#f5a9c9", stroke="#c2185b", opacity=0.6)
        if r.anchor is not None and r.area == 0:
            s.dot(r.anchor, 2.0, "#c2185b")
    if points is not None:
        for p in np.asarray(points).reshape(-1, 2):
            s.dot(p, 1.5, "#1e8449")
    if guards is not None:
        for g in np.asarray(guards).reshape(-1, 2):
            s.dot(g, 3.0, "black")
    return s.render()
