"""Harbor geometry: water-area polygons, containment tests, ship domain.

The navigable water area is a closed simple polygon.  Containment uses the
winding-number test (sum of signed angles subtended by the edges: about 2*pi
inside, about 0 outside).  Points on or within ``EDGE_TOLERANCE`` of the
boundary are treated as outside, erring on the safe side.

For gradient-based optimization a smooth surrogate is provided: the signed
boundary depth (positive inside), with the minimum over boundary segments
softened by a softmin so the constraint rows stay differentiable away from
the boundary's medial axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ship import ShipParams

__all__ = [
    "Polygon",
    "ShipDomain",
    "winding_number",
    "is_inside",
    "collision_residuals",
    "WINDING_TOLERANCE",
    "EDGE_TOLERANCE",
]

#: agreement tolerance on the winding angle sum [rad]
WINDING_TOLERANCE = 1e-6
#: distance below which a point counts as on the boundary [m]
EDGE_TOLERANCE = 1e-9

TWO_PI = 2.0 * np.pi


class Polygon:
    """Closed simple polygon, normalized counterclockwise on construction.

    ``vertices`` may be passed open or closed; stored closed (first vertex
    repeated at the end), with at least four stored points.
    """

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (N, 2) array")
        if len(v) >= 2 and np.allclose(v[0], v[-1], atol=0.0):
            v = v[:-1]
        if len(v) < 3:
            raise ValueError("polygon needs at least three distinct vertices")
        seg = np.diff(np.vstack([v, v[:1]]), axis=0)
        if np.any(np.hypot(seg[:, 0], seg[:, 1]) <= EDGE_TOLERANCE):
            raise ValueError("polygon has coincident consecutive vertices")
        area2 = float(np.sum(v[:, 0] * np.roll(v[:, 1], -1)
                             - np.roll(v[:, 0], -1) * v[:, 1]))
        if area2 == 0.0:
            raise ValueError("polygon is degenerate (zero area)")
        if area2 < 0.0:
            v = v[::-1]
        self.vertices = np.vstack([v, v[:1]])  # closed ring

    # ------------------------------------------------------------------
    @property
    def area(self) -> float:
        v = self.vertices[:-1]
        return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1)
                                  - np.roll(v[:, 0], -1) * v[:, 1]))

    @property
    def edge_starts(self) -> np.ndarray:
        return self.vertices[:-1]

    @property
    def edge_vectors(self) -> np.ndarray:
        return self.vertices[1:] - self.vertices[:-1]

    def bounds(self):
        v = self.vertices[:-1]
        return v.min(axis=0), v.max(axis=0)

    # ------------------------------------------------------------------
    def winding_angle(self, points) -> np.ndarray:
        """Summed signed subtended angle at each query point.

        Broadcasts over leading axes of ``points (..., 2)``; approximately
        2*pi for interior points and 0 for exterior points of this
        (counterclockwise) polygon.
        """
        pts = np.asarray(points, dtype=float)
        a = self.vertices[:-1] - pts[..., None, :]   # (..., E, 2)
        b = self.vertices[1:] - pts[..., None, :]
        cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
        return np.sum(np.arctan2(cross, dot), axis=-1)

    def boundary_distance(self, points) -> np.ndarray:
        """Unsigned distance from each point to the nearest boundary segment."""
        return np.min(self._segment_distances(points), axis=-1)

    def _segment_distances(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        s = self.edge_starts
        d = self.edge_vectors
        rel = pts[..., None, :] - s                   # (..., E, 2)
        seg_len_sq = np.sum(d * d, axis=-1)
        t = np.clip(np.sum(rel * d, axis=-1) / seg_len_sq, 0.0, 1.0)
        closest = rel - t[..., None] * d
        return np.hypot(closest[..., 0], closest[..., 1])

    def contains(self, points) -> np.ndarray:
        """Strict interior test; boundary points (within EDGE_TOLERANCE)
        report False."""
        wn = self.winding_angle(points)
        inside = np.abs(wn - TWO_PI) <= WINDING_TOLERANCE
        return inside & (self.boundary_distance(points) > EDGE_TOLERANCE)

    def signed_depth(self, points, beta: float | None = None) -> np.ndarray:
        """Signed distance to the boundary: positive inside, negative outside.

        With ``beta`` set, the minimum over boundary segments is replaced by
        a softmin of that sharpness [1/m], which lower-bounds the true
        distance and is smooth in the point coordinates away from the
        boundary.  The sign always comes from the winding classification, so
        the sign of the result agrees with :meth:`contains` for points off
        the boundary.
        """
        dists = self._segment_distances(points)
        if beta is None:
            depth = np.min(dists, axis=-1)
        else:
            d_min = np.min(dists, axis=-1, keepdims=True)
            depth = d_min[..., 0] - np.log(
                np.sum(np.exp(-beta * (dists - d_min)), axis=-1)) / beta
        wn = self.winding_angle(points)
        sign = np.where(np.abs(wn - TWO_PI) <= np.pi, 1.0, -1.0)
        return sign * depth


def softmin(values, beta: float, axis: int = -1) -> np.ndarray:
    """Smooth minimum ``-log(sum(exp(-beta*v)))/beta`` along ``axis``.

    Lies within ``[min - log(n)/beta, min]``, so a non-negative softmin
    certifies that every aggregated value is non-negative (with a margin of
    at most ``log(n)/beta``).  Computed with a max-shift for stability.
    """
    v = np.asarray(values, dtype=float)
    v_min = np.min(v, axis=axis, keepdims=True)
    out = -np.log(np.sum(np.exp(-beta * (v - v_min)), axis=axis)) / beta
    return np.squeeze(v_min, axis=axis) + out


def winding_number(point, polygon: Polygon) -> float:
    """Winding angle sum of ``polygon`` around ``point`` (radians)."""
    return float(polygon.winding_angle(np.asarray(point, dtype=float)))


def is_inside(point, polygon: Polygon) -> bool:
    """Strict containment; boundary points are classified outside."""
    return bool(polygon.contains(np.asarray(point, dtype=float)))


# ----------------------------------------------------------------------
# ship safety domain
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ShipDomain:
    """Speed-scaled elliptical safety region around the ship.

    Semi-axes grow linearly with the resultant speed U:
    a = (L/2)(1 + k_a U / u_nominal), b = (B/2)(1 + k_b U / u_nominal),
    rotated with the heading and centered at midship.  The boundary is
    discretized into ``n_vertices`` points for the containment constraints.
    """

    length: float
    breadth: float
    u_nominal: float
    k_a: float = 1.0
    k_b: float = 1.0
    n_vertices: int = 16

    def __post_init__(self):
        if self.n_vertices < 8:
            raise ValueError("ship domain needs at least 8 boundary vertices")
        if min(self.length, self.breadth, self.u_nominal) <= 0.0:
            raise ValueError("length, breadth and u_nominal must be positive")

    @staticmethod
    def for_ship(p: ShipParams, k_a: float = 1.0, k_b: float = 1.0,
                 n_vertices: int = 16) -> "ShipDomain":
        return ShipDomain(p.length, p.breadth, p.u_nominal, k_a, k_b, n_vertices)

    def semi_axes(self, u_s, v_m):
        u_res = np.hypot(np.asarray(u_s, dtype=float), np.asarray(v_m, dtype=float))
        a = 0.5 * self.length * (1.0 + self.k_a * u_res / self.u_nominal)
        b = 0.5 * self.breadth * (1.0 + self.k_b * u_res / self.u_nominal)
        return a, b

    def vertices(self, states) -> np.ndarray:
        """Domain boundary points for states ``(..., 6)``; returns
        ``(..., n_vertices, 2)``."""
        x = np.asarray(states, dtype=float)
        a, b = self.semi_axes(x[..., 3], x[..., 4])
        phi = np.linspace(0.0, TWO_PI, self.n_vertices, endpoint=False)
        ex = a[..., None] * np.cos(phi)
        ey = b[..., None] * np.sin(phi)
        c, s = np.cos(x[..., 2])[..., None], np.sin(x[..., 2])[..., None]
        px = x[..., 0:1] + ex * c - ey * s
        py = x[..., 1:2] + ex * s + ey * c
        return np.stack([px, py], axis=-1)


def collision_residuals(states, polygon: Polygon, domain: ShipDomain) -> np.ndarray:
    """Winding-based containment residuals per state and domain vertex.

    Returns ``(..., n_vertices)`` of winding angle minus 2*pi: about zero
    for contained vertices, about -2*pi for vertices outside the water area.
    """
    verts = domain.vertices(states)
    return polygon.winding_angle(verts) - TWO_PI
