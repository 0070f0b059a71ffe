"""Mollified basis functions on polytopic meshes.

Each cell carries scaled monomials centred at its centroid; the basis
functions are their convolutions with a compact mollifier. Point values
and derivatives are obtained by exact quadrature over the intersection of
the cell with the mollifier support box positioned at the evaluation
point. For B-spline mollifiers the intersection is additionally split
along the kernel knot lines so that every quadrature sub-region carries a
single polynomial piece and the Gauss rule stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    ConvexPolytope,
    _clip_halfplane_verts,
    _dedup_ring,
    _gauss_legendre_01,
    _poly_area,
    _reference_triangle_rule,
    area_centroid,
    minkowski_with_box,
)
from .mesh import Mesh
from .mollifier import Mollifier


def monomial_exponents(r_p: int, dim: int) -> np.ndarray:
    """Multi-indices of total degree <= r_p in graded order."""
    if r_p < 0:
        raise ValueError("polynomial order must be non-negative")
    if dim == 1:
        return np.arange(r_p + 1, dtype=int)[:, None]
    exps = [(i, d - i) for d in range(r_p + 1) for i in range(d, -1, -1)]
    return np.asarray(exps, dtype=int)


@dataclass(frozen=True)
class MonomialSet:
    """Scaled monomials of one cell: prod_ax (2 (y - c) / h)^e."""

    exponents: np.ndarray
    centroid: np.ndarray
    scale: float


class BasisSet:
    """All mollified basis functions of a mesh.

    Column j of the global system corresponds to the pair
    (cell = j // n_per_cell, monomial = j % n_per_cell); ghost cells carry
    columns like interior ones. Supports are Minkowski sums of the cells
    with the mollifier box and are precomputed at build time.
    """

    def __init__(self, mesh: Mesh, mollifier: Mollifier, r_p: int):
        if mollifier.dim != mesh.dim:
            raise ValueError("mollifier and mesh dimensions differ")
        self.mesh = mesh
        self.mollifier = mollifier
        self.r_p = int(r_p)
        self.exponents = monomial_exponents(self.r_p, mesh.dim)
        self.n_per_cell = len(self.exponents)
        self.n_b = self.n_per_cell * mesh.n_cells

        h_avg = mesh.h_avg
        h_cell = mesh.h_cell
        self.monomials = []
        self.supports = []
        half = 0.5 * mollifier.width
        for i, cell in enumerate(mesh.cells):
            _, c = area_centroid(cell)
            scale = h_cell[i] if mesh.dim == 1 else h_avg
            self.monomials.append(
                MonomialSet(exponents=self.exponents, centroid=c, scale=scale)
            )
            self.supports.append(minkowski_with_box(cell, half))
        self._bbox_lo = np.array([s.vertices.min(axis=0) for s in self.supports])
        self._bbox_hi = np.array([s.vertices.max(axis=0) for s in self.supports])
        # quadrature degree: per-axis kernel degree times the number of
        # axes, plus the monomial total degree
        self.quad_degree = mesh.dim * mollifier.degree + self.r_p

    @property
    def dim(self) -> int:
        return self.mesh.dim

    def column_cell(self, col: int) -> int:
        return col // self.n_per_cell

    def cell_columns(self, cell_index: int) -> np.ndarray:
        start = cell_index * self.n_per_cell
        return np.arange(start, start + self.n_per_cell)


def build(mesh: Mesh, mollifier: Mollifier, r_p: int) -> BasisSet:
    """Construct the basis set with precomputed supports and index map."""
    return BasisSet(mesh, mollifier, r_p)


def support_of(basis: BasisSet, cell_index: int) -> ConvexPolytope:
    """Precomputed Minkowski support of one cell's basis functions."""
    return basis.supports[cell_index]


# ---------------------------------------------------------------------------
# point evaluation


def _split_segments(lo, hi, cuts):
    """Subintervals of [lo, hi] between the interior cut coordinates."""
    inner = np.sort(cuts[(cuts > lo) & (cuts < hi)])
    pts = np.concatenate([[lo], inner, [hi]])
    return list(zip(pts[:-1], pts[1:]))


def _split_polygon_axis(pieces, axis, cut, tol):
    """Split every polygon piece along an axis-aligned line."""
    out = []
    normal = np.zeros(2)
    for verts in pieces:
        lo_ax = verts[:, axis].min()
        hi_ax = verts[:, axis].max()
        if not lo_ax < cut < hi_ax:
            out.append(verts)
            continue
        normal[axis] = 1.0
        left = _clip_halfplane_verts(verts, normal.copy(), cut, tol)
        normal[axis] = -1.0
        right = _clip_halfplane_verts(verts, normal.copy(), -cut, tol)
        normal[axis] = 0.0
        for part in (left, right):
            if part is not None:
                part = _dedup_ring(part, tol)
                if len(part) >= 3 and _poly_area(part) > tol * tol:
                    out.append(part)
    return out


def _quadrature_1d(basis, cell_lo, cell_hi, x):
    mol = basis.mollifier
    half = 0.5 * mol.width
    lo = max(cell_lo, x - half)
    hi = min(cell_hi, x + half)
    if hi - lo <= 1e-14 * max(1.0, abs(x)):
        return None
    cuts = x - mol.interior_breaks
    n = (basis.quad_degree + 2) // 2
    t, w = _gauss_legendre_01(n)
    pts, wts = [], []
    for a, b in _split_segments(lo, hi, cuts):
        pts.append(a + (b - a) * t)
        wts.append((b - a) * w)
    return np.concatenate(pts)[:, None], np.concatenate(wts)


def _clip_box_raw(verts, lo, hi, tol):
    """Clip a CCW polygon (raw vertex array) against an axis box."""
    for normal, offset in (
        ((1.0, 0.0), hi[0]),
        ((-1.0, 0.0), -lo[0]),
        ((0.0, 1.0), hi[1]),
        ((0.0, -1.0), -lo[1]),
    ):
        verts = _clip_halfplane_verts(verts, np.asarray(normal), offset, tol)
        if verts is None:
            return None
    verts = _dedup_ring(verts, tol)
    if len(verts) < 3 or _poly_area(verts) < tol * tol:
        return None
    return verts


def _quadrature_2d(basis, verts, x):
    mol = basis.mollifier
    half = 0.5 * mol.width
    tol = 1e-13 * max(1.0, abs(x[0]) + half, abs(x[1]) + half)
    tau = _clip_box_raw(verts, x - half, x + half, tol)
    if tau is None:
        return None
    pieces = [tau]
    for axis in range(2):
        for brk in mol.interior_breaks:
            pieces = _split_polygon_axis(pieces, axis, x[axis] - brk, tol)
    ref_pts, ref_w = _reference_triangle_rule(basis.quad_degree)
    pts, wts = [], []
    for pv in pieces:
        c = _centroid_raw(pv)
        v1 = np.empty_like(pv)
        v1[:-1] = pv[1:]
        v1[-1] = pv[0]
        e1 = v1 - pv
        e2 = c[None, :] - pv
        tri_areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        p = (
            pv[:, None, :]
            + ref_pts[None, :, 0, None] * e1[:, None, :]
            + ref_pts[None, :, 1, None] * e2[:, None, :]
        )
        pts.append(p.reshape(-1, 2))
        wts.append((2.0 * tri_areas[:, None] * ref_w[None, :]).ravel())
    if len(pts) == 1:
        return pts[0], wts[0]
    return np.vstack(pts), np.concatenate(wts)


def _centroid_raw(verts):
    x, y = verts[:, 0], verts[:, 1]
    xn = np.empty_like(x)
    yn = np.empty_like(y)
    xn[:-1], xn[-1] = x[1:], x[0]
    yn[:-1], yn[-1] = y[1:], y[0]
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if area <= 0:
        return verts.mean(axis=0)
    return np.array([np.dot(x + xn, cross), np.dot(y + yn, cross)]) / (6.0 * area)


def _monomial_values(points, mono: MonomialSet):
    """Vandermonde-style matrix of the scaled cell monomials at points."""
    xi = 2.0 * (points - mono.centroid) / mono.scale
    max_deg = int(mono.exponents.max())
    dim = points.shape[1]
    pw = np.ones((dim, len(points), max_deg + 1))
    for k in range(1, max_deg + 1):
        pw[:, :, k] = pw[:, :, k - 1] * xi.T
    vals = pw[0, :, mono.exponents[:, 0]]
    for ax in range(1, dim):
        vals = vals * pw[ax, :, mono.exponents[:, ax]]
    return vals.T  # (n_points, n_monomials)


def eval_rows(basis: BasisSet, x, derivs):
    """Sparse rows of basis values at a point for several derivative
    multi-indices at once. The clipping and quadrature geometry is shared
    across the requested derivatives, and the kernel is evaluated over the
    pooled quadrature points of all contributing cells.

    Returns (cols, vals) with cols of shape (n_entries,) and vals of shape
    (len(derivs), n_entries); entries appear only for cells whose Minkowski
    support contains the point.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dim = basis.dim
    for k in derivs:
        if len(k) != dim:
            raise ValueError("derivative multi-index length must match dim")
    cand = np.nonzero(
        np.all(basis._bbox_lo <= x, axis=1) & np.all(basis._bbox_hi >= x, axis=1)
    )[0]
    mol = basis.mollifier

    kept, quads, mono_w = [], [], []
    for ci in cand:
        verts = basis.mesh.cells[ci].vertices
        if dim == 1:
            quad = _quadrature_1d(basis, verts[0, 0], verts[-1, 0], x[0])
        else:
            quad = _quadrature_2d(basis, verts, x)
        if quad is None:
            continue
        kept.append(ci)
        quads.append(quad)
        mono_w.append(
            _monomial_values(quad[0], basis.monomials[ci]) * quad[1][:, None]
        )
    if not kept:
        return np.zeros(0, dtype=int), np.zeros((len(derivs), 0))

    all_pts = quads[0][0] if len(quads) == 1 else np.vstack([q[0] for q in quads])
    offs = x[None, :] - all_pts
    axis_vals = {}
    for k in derivs:
        for ax in range(dim):
            if (ax, k[ax]) not in axis_vals:
                axis_vals[(ax, k[ax])] = mol.eval1d(offs[:, ax], k[ax])
    kern = np.empty((len(derivs), len(all_pts)))
    for row, k in enumerate(derivs):
        prod = axis_vals[(0, k[0])]
        for ax in range(1, dim):
            prod = prod * axis_vals[(ax, k[ax])]
        kern[row] = prod

    n_mono = basis.n_per_cell
    cols = np.empty(len(kept) * n_mono, dtype=int)
    vals = np.empty((len(derivs), len(kept) * n_mono))
    start = 0
    for j, (ci, mw) in enumerate(zip(kept, mono_w)):
        stop = start + len(mw)
        vals[:, j * n_mono : (j + 1) * n_mono] = kern[:, start:stop] @ mw
        cols[j * n_mono : (j + 1) * n_mono] = basis.cell_columns(ci)
        start = stop
    return cols, vals


def eval_at(basis: BasisSet, x, deriv=None) -> dict:
    """Sparse row (column index -> value) of one derivative at a point."""
    if deriv is None:
        deriv = (0,) * basis.dim
    cols, vals = eval_rows(basis, x, [tuple(deriv)])
    return dict(zip(cols.tolist(), vals[0].tolist()))
