"""Convex geometry and quadrature kernel.

Half-plane/box clipping, Minkowski sums with axis-aligned boxes, convex
hulls, centroid-fan triangulation, and Gauss rules on intervals and
triangles. One-dimensional geometry is handled as the degenerate interval
case of the same interfaces so that the basis code stays dimension
generic. All operations are pure functions on immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Relative geometric tolerance; scaled by the characteristic length of the
# input coordinates before use.
EPS_GEOM = 1e-12

# Largest supported polynomial exactness degree for quadrature rules.
MAX_GAUSS_DEGREE = 60


def _char_length(coords: np.ndarray) -> float:
    if coords.size == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(coords))))


@dataclass(frozen=True)
class ConvexPolytope:
    """Convex cell or support region: a 1D interval or a CCW 2D polygon.

    The vertex array has shape (n, dim). A 1D interval stores its two
    endpoints a < b as rows; a 2D polygon stores its vertices in
    counter-clockwise order without duplicates. An empty polytope (e.g.
    the result of clipping two disjoint shapes) has zero rows.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2:
            raise ValueError("vertices must be a (n, dim) array")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def interval(cls, a: float, b: float) -> "ConvexPolytope":
        if not a < b:
            raise ValueError(f"interval endpoints must satisfy a < b, got [{a}, {b}]")
        return cls(np.array([[float(a)], [float(b)]]))

    @classmethod
    def polygon(cls, vertices) -> "ConvexPolytope":
        """Build a validated CCW convex polygon from a vertex list."""
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 two-dimensional vertices")
        tol = EPS_GEOM * _char_length(v)
        # CCW convex loop: the cross product of every pair of consecutive
        # edges is >= -tol.
        edges = np.roll(v, -1, axis=0) - v
        nxt = np.roll(edges, -1, axis=0)
        turn = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        if np.any(turn < -tol):
            raise ValueError("polygon is not convex and counter-clockwise")
        return cls(v)

    @classmethod
    def empty(cls, dim: int) -> "ConvexPolytope":
        return cls(np.zeros((0, dim)))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0


@dataclass(frozen=True)
class AxisBox:
    """Axis-aligned box given by its center and per-axis halfwidth."""

    center: np.ndarray
    halfwidth: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        h = np.broadcast_to(
            np.atleast_1d(np.asarray(self.halfwidth, dtype=float)), c.shape
        ).copy()
        if np.any(h <= 0):
            raise ValueError("box halfwidth must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "halfwidth", h)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def lo(self) -> np.ndarray:
        return self.center - self.halfwidth

    @property
    def hi(self) -> np.ndarray:
        return self.center + self.halfwidth

    def corners(self) -> np.ndarray:
        if self.dim == 1:
            return np.array([self.lo, self.hi])
        (x0, y0), (x1, y1) = self.lo, self.hi
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


@dataclass(frozen=True)
class QuadratureRule:
    """Points and positive weights on a physical interval or triangle."""

    points: np.ndarray
    weights: np.ndarray
    degree: int


# ---------------------------------------------------------------------------
# clipping


def _clip_halfplane_verts(verts, normal, offset, tol):
    """Sutherland-Hodgman pass keeping points with normal . v <= offset."""
    d = verts @ normal - offset
    inside = d <= tol
    if inside.all():
        return verts
    if not inside.any():
        return None
    out = []
    n = len(verts)
    for i in range(n):
        j = (i + 1) % n
        if inside[i]:
            out.append(verts[i])
        if inside[i] != inside[j]:
            t = d[i] / (d[i] - d[j])
            out.append(verts[i] + t * (verts[j] - verts[i]))
    return np.asarray(out)


def _dedup_ring(verts, tol):
    """Drop consecutive near-duplicate vertices of a closed loop."""
    if len(verts) == 0:
        return verts
    keep = np.ones(len(verts), dtype=bool)
    prev = len(verts) - 1
    for i in range(len(verts)):
        if np.max(np.abs(verts[i] - verts[prev])) <= tol:
            keep[i] = False
        else:
            prev = i
    return verts[keep]


def _poly_area(verts) -> float:
    if len(verts) < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_halfplane(poly: ConvexPolytope, point, normal) -> ConvexPolytope:
    """Clip a 2D polygon against the half-plane (v - point) . normal <= 0."""
    if poly.is_empty:
        return poly
    point = np.asarray(point, dtype=float)
    normal = np.asarray(normal, dtype=float)
    tol = EPS_GEOM * _char_length(poly.vertices) * max(1.0, float(np.abs(normal).max()))
    out = _clip_halfplane_verts(poly.vertices, normal, float(normal @ point), tol)
    return _finish_poly(out, poly.dim)


def _finish_poly(verts, dim) -> ConvexPolytope:
    """Dedup and sliver-reject a clipped vertex loop."""
    if verts is None or len(verts) == 0:
        return ConvexPolytope.empty(dim)
    tol = EPS_GEOM * _char_length(verts)
    verts = _dedup_ring(verts, tol)
    if len(verts) < 3 or _poly_area(verts) < tol * tol:
        return ConvexPolytope.empty(dim)
    return ConvexPolytope(verts)


def clip_to_box(poly: ConvexPolytope, box: AxisBox) -> ConvexPolytope:
    """Exact convex intersection of a polytope with an axis-aligned box.

    Degenerate output (area below the squared geometric tolerance) is
    returned as the empty polytope, never as a sliver.
    """
    if poly.is_empty:
        return poly
    if poly.dim != box.dim:
        raise ValueError("dimension mismatch between polytope and box")
    if poly.dim == 1:
        a = max(poly.vertices[0, 0], box.lo[0])
        b = min(poly.vertices[-1, 0], box.hi[0])
        tol = EPS_GEOM * _char_length(poly.vertices)
        if b - a <= tol:
            return ConvexPolytope.empty(1)
        return ConvexPolytope.interval(a, b)

    verts = poly.vertices
    tol = EPS_GEOM * _char_length(np.vstack([verts, box.corners()]))
    (x0, y0), (x1, y1) = box.lo, box.hi
    for normal, offset in (
        ((1.0, 0.0), x1),
        ((-1.0, 0.0), -x0),
        ((0.0, 1.0), y1),
        ((0.0, -1.0), -y0),
    ):
        verts = _clip_halfplane_verts(verts, np.array(normal), offset, tol)
        if verts is None:
            return ConvexPolytope.empty(2)
    return _finish_poly(verts, 2)


# ---------------------------------------------------------------------------
# hulls and Minkowski sums


def convex_hull(points) -> ConvexPolytope:
    """Minimal CCW convex polygon containing all input points.

    Uses Andrew's monotone chain. Collinear input raises with a
    "degenerate hull" message; points interior to the hull are dropped,
    points strictly on the hull are retained in angular order.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("convex hull needs at least 3 points in 2D")
    tol = EPS_GEOM * _char_length(pts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(pts, axis=0)) > tol, axis=1)
    pts = pts[keep]
    if len(pts) < 3:
        raise ValueError("degenerate hull: fewer than 3 distinct points")

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                cross = (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1]) - (
                    out[-1][1] - out[-2][1]
                ) * (p[0] - out[-2][0])
                if cross <= tol:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.asarray(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise ValueError("degenerate hull: input points are collinear")
    return ConvexPolytope(hull)


def minkowski_with_box(poly: ConvexPolytope, halfwidth) -> ConvexPolytope:
    """Minkowski sum of a polytope with an origin-centered axis box.

    Computed as the convex hull of every polytope vertex shifted by every
    box corner, which contains the original polytope.
    """
    if poly.is_empty:
        raise ValueError("cannot expand an empty polytope")
    hw = np.broadcast_to(np.atleast_1d(np.asarray(halfwidth, dtype=float)), (poly.dim,))
    if np.any(hw <= 0):
        raise ValueError("halfwidth must be positive")
    if poly.dim == 1:
        return ConvexPolytope.interval(
            poly.vertices[0, 0] - hw[0], poly.vertices[-1, 0] + hw[0]
        )
    corners = np.array(
        [[-hw[0], -hw[1]], [hw[0], -hw[1]], [hw[0], hw[1]], [-hw[0], hw[1]]]
    )
    cloud = (poly.vertices[:, None, :] + corners[None, :, :]).reshape(-1, 2)
    return convex_hull(cloud)


# ---------------------------------------------------------------------------
# measures and triangulation


def area_centroid(poly: ConvexPolytope):
    """Measure and centroid: shoelace area / area-weighted centroid in 2D,
    length and midpoint in 1D."""
    if poly.is_empty:
        return 0.0, np.zeros(poly.dim)
    v = poly.vertices
    if poly.dim == 1:
        a, b = v[0, 0], v[-1, 0]
        return b - a, np.array([0.5 * (a + b)])
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) < (EPS_GEOM * _char_length(v)) ** 2:
        return 0.0, v.mean(axis=0)
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return area, np.array([cx, cy])


def fan_triangulate(poly: ConvexPolytope) -> np.ndarray:
    """Partition a convex polygon into triangles joining each edge to the
    centroid. Returns an (n_tri, 3, 2) array; triangle areas sum to the
    polygon area."""
    if poly.dim != 2 or poly.vertices.shape[0] < 3:
        raise ValueError("fan triangulation needs a 2D polygon")
    _, c = area_centroid(poly)
    v = poly.vertices
    nxt = np.roll(v, -1, axis=0)
    tris = np.empty((len(v), 3, 2))
    tris[:, 0] = v
    tris[:, 1] = nxt
    tris[:, 2] = c
    return tris


def contains_point(poly: ConvexPolytope, x, tol=None) -> bool:
    """Membership test for a point in a convex polytope (closed set)."""
    if poly.is_empty:
        return False
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if tol is None:
        tol = EPS_GEOM * _char_length(poly.vertices)
    v = poly.vertices
    if poly.dim == 1:
        return v[0, 0] - tol <= x[0] <= v[-1, 0] + tol
    nxt = np.roll(v, -1, axis=0)
    cross = (nxt[:, 0] - v[:, 0]) * (x[1] - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (
        x[0] - v[:, 0]
    )
    return bool(np.all(cross >= -tol))


# ---------------------------------------------------------------------------
# Gauss rules


@lru_cache(maxsize=None)
def _gauss_legendre_01(n: int):
    """n-point Gauss-Legendre nodes and weights on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (t + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _reference_triangle_rule(degree: int):
    """Conical-product rule on the reference triangle (0,0),(1,0),(0,1).

    Collapsed tensor Gauss-Legendre with the Duffy Jacobian absorbed into
    the weights; exact for all polynomials of total degree <= degree.
    Weights sum to the reference area 1/2.
    """
    n_xi = (degree + 2) // 2
    n_eta = (degree + 3) // 2
    xi, w_xi = _gauss_legendre_01(n_xi)
    eta, w_eta = _gauss_legendre_01(n_eta)
    X, E = np.meshgrid(xi, eta, indexing="ij")
    W = np.outer(w_xi, w_eta) * (1.0 - E)
    pts = np.column_stack([(X * (1.0 - E)).ravel(), E.ravel()])
    return pts, W.ravel()


def gauss_rule_interval(a: float, b: float, degree: int) -> QuadratureRule:
    """Gauss-Legendre rule exact to the given degree on [a, b]."""
    _check_degree(degree)
    n = (degree + 2) // 2
    t, w = _gauss_legendre_01(n)
    return QuadratureRule((a + (b - a) * t)[:, None], (b - a) * w, degree)


def gauss_rule_triangle(tri_vertices, degree: int) -> QuadratureRule:
    """Rule exact for polynomials of total degree <= degree on a triangle."""
    _check_degree(degree)
    v = np.asarray(tri_vertices, dtype=float)
    ref_pts, ref_w = _reference_triangle_rule(degree)
    pts = v[0] + np.outer(ref_pts[:, 0], v[1] - v[0]) + np.outer(ref_pts[:, 1], v[2] - v[0])
    jac = (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[1, 1] - v[0, 1]) * (
        v[2, 0] - v[0, 0]
    )
    return QuadratureRule(pts, ref_w * abs(jac), degree)


def _check_degree(degree: int):
    if not 1 <= degree <= MAX_GAUSS_DEGREE:
        raise ValueError(f"unsupported quadrature degree {degree}")


def gauss_rule(element, degree: int) -> QuadratureRule:
    """Quadrature rule on an interval or triangle element.

    The element is a 1D ConvexPolytope (interval), a 2D ConvexPolytope
    with exactly three vertices, or a (3, 2) vertex array.
    """
    if isinstance(element, ConvexPolytope):
        if element.dim == 1:
            return gauss_rule_interval(
                element.vertices[0, 0], element.vertices[-1, 0], degree
            )
        if element.vertices.shape[0] == 3:
            return gauss_rule_triangle(element.vertices, degree)
        raise ValueError("2D quadrature elements must be triangles")
    element = np.asarray(element, dtype=float)
    if element.shape == (3, 2):
        return gauss_rule_triangle(element, degree)
    raise ValueError("unsupported element for gauss_rule")
