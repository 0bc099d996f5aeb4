"""Robust visibility and robust guarding of polygons with holes."""
