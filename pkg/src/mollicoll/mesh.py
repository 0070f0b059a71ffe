"""Polytopic domain partitions.

1D interval chains, 2D Voronoi tessellations built by per-seed half-plane
clipping, and structured quadrilateral grids for the plate-with-hole
benchmark. Meshes can be padded with a layer of ghost cells outside the
physical domain so that mollified bases keep polynomial reproduction up
to the boundary.

Domain geometry (needed for signed distances and boundary collocation) is
carried alongside the cells: an axis-aligned box, or a box minus a disk
for the plate with a circular hole.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    EPS_GEOM,
    AxisBox,
    ConvexPolytope,
    area_centroid,
    clip_halfplane,
)


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box domain; the signed distance is positive inside."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError("box domain needs lo < hi per axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def measure(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def signed_distance(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.minimum(pts - self.lo, self.hi - pts)
        return d.min(axis=1)


@dataclass(frozen=True)
class BoxMinusDiskDomain:
    """Box domain with a disk removed (plate with a circular hole)."""

    box: BoxDomain
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(
            self, "center", np.atleast_1d(np.asarray(self.center, dtype=float))
        )
        if self.radius <= 0:
            raise ValueError("hole radius must be positive")

    @property
    def dim(self) -> int:
        return self.box.dim

    def signed_distance(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.linalg.norm(pts - self.center, axis=1)
        return np.minimum(self.box.signed_distance(pts), r - self.radius)


# ---------------------------------------------------------------------------
# mesh container


@dataclass(frozen=True)
class Mesh:
    """Immutable collection of convex cells with ghost flags.

    Interior cells come first and tile the domain box; ghost cells (added
    by pad_ghost) live outside the physical domain. h_cell is the cell
    length in 1D and sqrt(area) in 2D.
    """

    cells: tuple
    is_ghost: np.ndarray
    domain: object
    seeds: np.ndarray | None = None
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        flags = np.asarray(self.is_ghost, dtype=bool)
        if flags.shape[0] != len(self.cells):
            raise ValueError("ghost flag count must match cell count")
        object.__setattr__(self, "is_ghost", flags)

    @property
    def dim(self) -> int:
        return self.cells[0].dim

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_interior(self) -> int:
        return int((~self.is_ghost).sum())

    @property
    def n_ghost(self) -> int:
        return int(self.is_ghost.sum())

    @property
    def h_cell(self) -> np.ndarray:
        sizes = np.empty(self.n_cells)
        for i, cell in enumerate(self.cells):
            measure, _ = area_centroid(cell)
            sizes[i] = measure if self.dim == 1 else np.sqrt(measure)
        return sizes

    @property
    def interior_measure(self) -> float:
        return float(
            sum(area_centroid(c)[0] for c, g in zip(self.cells, self.is_ghost) if not g)
        )

    @property
    def h_avg(self) -> float:
        """Characteristic size: mean interior length in 1D, square root of
        the average interior cell area in 2D."""
        if self.dim == 1:
            return self.interior_measure / self.n_interior
        return float(np.sqrt(self.interior_measure / self.n_interior))

    @property
    def h_max(self) -> float:
        return float(self.h_cell[~self.is_ghost].max())


def mollifier_width(mesh: Mesh, kappa: float = 1.0) -> float:
    """Kernel width rule: 2*kappa*max_j h_cell_j in 1D and
    2*kappa*sqrt(domain area / n_c) in 2D."""
    if kappa <= 0:
        raise ValueError("width factor kappa must be positive")
    if mesh.dim == 1:
        return 2.0 * kappa * mesh.h_max
    return 2.0 * kappa * mesh.h_avg


# ---------------------------------------------------------------------------
# 1D meshes


def intervals_1d(breakpoints) -> Mesh:
    """Consecutive interval cells from strictly increasing breakpoints."""
    pts = np.asarray(breakpoints, dtype=float)
    if pts.ndim != 1 or pts.size < 2 or np.any(np.diff(pts) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    cells = [ConvexPolytope.interval(a, b) for a, b in zip(pts[:-1], pts[1:])]
    domain = BoxDomain(pts[:1], pts[-1:])
    return Mesh(
        cells=cells,
        is_ghost=np.zeros(len(cells), dtype=bool),
        domain=domain,
        generator={"kind": "intervals", "breakpoints": tuple(float(p) for p in pts)},
    )


def bisect(mesh: Mesh) -> Mesh:
    """Refine a 1D interval mesh by splitting every cell in two."""
    if mesh.dim != 1 or mesh.generator.get("kind") != "intervals":
        raise ValueError("bisection is defined for 1D interval meshes")
    old = np.asarray(mesh.generator["breakpoints"])
    mids = 0.5 * (old[:-1] + old[1:])
    new = np.empty(old.size + mids.size)
    new[0::2] = old
    new[1::2] = mids
    return intervals_1d(new)


# ---------------------------------------------------------------------------
# Voronoi tessellation


def _as_box(bbox) -> BoxDomain:
    if isinstance(bbox, BoxDomain):
        return bbox
    lo, hi = bbox
    return BoxDomain(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))


def _box_polygon(box: BoxDomain) -> ConvexPolytope:
    (x0, y0), (x1, y1) = box.lo, box.hi
    return ConvexPolytope(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))


def _voronoi_cell(i, seeds, box_poly):
    """Cell of seed i: the bounding box clipped by the bisector half-plane
    against every other seed, visited in distance order with a security
    radius cutoff."""
    si = seeds[i]
    d2 = np.sum((seeds - si) ** 2, axis=1)
    order = np.argsort(d2)
    cell = box_poly
    for j in order:
        if j == i or d2[j] == 0.0:
            continue
        if cell.is_empty:
            break
        # no farther seed can cut the cell once the bisector distance
        # d_ij / 2 exceeds the cell radius around the seed
        r2 = np.max(np.sum((cell.vertices - si) ** 2, axis=1))
        if d2[j] >= 4.0 * r2:
            break
        mid = 0.5 * (si + seeds[j])
        cell = clip_halfplane(cell, mid, seeds[j] - si)
    return cell


def voronoi_2d(seeds, bbox) -> Mesh:
    """Voronoi tessellation of a bounding box from distinct seed points.

    Each cell is the box clipped by the half-planes bisecting its seed
    against every other seed; the cells tile the box exactly.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    if seeds.shape[0] < 2 or seeds.shape[1] != 2:
        raise ValueError("voronoi_2d needs at least two 2D seeds")
    box = _as_box(bbox)
    scale = max(1.0, float(np.abs(seeds).max()))
    d = np.linalg.norm(seeds[:, None, :] - seeds[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    if d.min() <= 10 * EPS_GEOM * scale:
        raise ValueError("duplicate seeds")
    box_poly = _box_polygon(box)
    cells = [_voronoi_cell(i, seeds, box_poly) for i in range(len(seeds))]
    return Mesh(
        cells=cells,
        is_ghost=np.zeros(len(cells), dtype=bool),
        domain=box,
        seeds=seeds,
        generator={"kind": "voronoi"},
    )


def quasi_uniform_seeds(n: int, bbox, seed: int, lloyd_iters: int = 10) -> np.ndarray:
    """Quasi-uniform Voronoi seeds: fixed-seed pseudo-random samples
    followed by Lloyd centroid relaxation iterations."""
    box = _as_box(bbox)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    pts = box.lo + rng.random((n, 2)) * (box.hi - box.lo)
    for _ in range(lloyd_iters):
        mesh = voronoi_2d(pts, box)
        pts = np.array([area_centroid(c)[1] for c in mesh.cells])
    return pts


# ---------------------------------------------------------------------------
# ghost padding


def _mirror_seeds_for_padding(mesh: Mesh, h_m: float):
    """Seeds to reflect across box edges (and corners) when padding.

    Every seed whose cell touches an edge is mirrored, which makes the
    mirror bisector reproduce that edge exactly so interior cells are
    preserved; the mirrored cells then tile the whole padded band. Cells
    touching two edges additionally get the double (corner) mirror.
    """
    box = mesh.domain
    seeds = mesh.seeds
    tol = 1e-9 * max(1.0, float(np.abs(box.hi).max()))
    mirrors = []
    touch = {}
    for axis in (0, 1):
        for side, bound in ((0, box.lo[axis]), (1, box.hi[axis])):
            sel = np.zeros(len(seeds), dtype=bool)
            for i, cell in enumerate(mesh.cells):
                if cell.is_empty:
                    continue
                if np.min(np.abs(cell.vertices[:, axis] - bound)) <= tol:
                    sel[i] = True
            touch[(axis, side)] = sel
            m = seeds[sel].copy()
            m[:, axis] = 2.0 * bound - m[:, axis]
            mirrors.append(m)
    # double mirrors across corners
    for sx, bx in ((0, box.lo[0]), (1, box.hi[0])):
        for sy, by in ((0, box.lo[1]), (1, box.hi[1])):
            sel = touch[(0, sx)] & touch[(1, sy)]
            m = seeds[sel].copy()
            m[:, 0] = 2.0 * bx - m[:, 0]
            m[:, 1] = 2.0 * by - m[:, 1]
            mirrors.append(m)
    return np.vstack(mirrors) if mirrors else np.zeros((0, 2))


def _pad_voronoi(mesh: Mesh, h_m: float) -> Mesh:
    box = mesh.domain
    mirrors = _mirror_seeds_for_padding(mesh, h_m)
    all_seeds = np.vstack([mesh.seeds, mirrors])
    big = BoxDomain(box.lo - h_m, box.hi + h_m)
    big_poly = _box_polygon(big)
    cells = [_voronoi_cell(i, all_seeds, big_poly) for i in range(len(all_seeds))]
    n_orig = len(mesh.seeds)
    keep_cells, ghost, keep_seeds = [], [], []
    for i, cell in enumerate(cells):
        if cell.is_empty:
            if i < n_orig:
                raise RuntimeError("padding emptied an interior Voronoi cell")
            continue
        keep_cells.append(cell)
        ghost.append(i >= n_orig)
        keep_seeds.append(all_seeds[i])
    return Mesh(
        cells=keep_cells,
        is_ghost=np.array(ghost, dtype=bool),
        domain=box,
        seeds=np.asarray(keep_seeds),
        generator=dict(mesh.generator, padded=True),
    )


def _pad_intervals(mesh: Mesh, h_m: float) -> Mesh:
    a = mesh.cells[0].vertices[0, 0]
    b = mesh.cells[-1].vertices[-1, 0]
    cells = list(mesh.cells) + [
        ConvexPolytope.interval(a - h_m, a),
        ConvexPolytope.interval(b, b + h_m),
    ]
    flags = np.concatenate([mesh.is_ghost, [True, True]])
    return Mesh(
        cells=cells,
        is_ghost=flags,
        domain=mesh.domain,
        generator=dict(mesh.generator, padded=True),
    )


def _pad_quadgrid(mesh: Mesh, h_m: float) -> Mesh:
    n = mesh.generator["n"]
    box = mesh.generator["box"]
    lo, hi = np.asarray(box[0]), np.asarray(box[1])
    spacing = (hi - lo) / n
    rings = max(1, int(np.ceil(0.5 * h_m / spacing.min())))
    cells = list(mesh.cells)
    flags = [False] * len(cells)
    for i in range(-rings, n + rings):
        for j in range(-rings, n + rings):
            if 0 <= i < n and 0 <= j < n:
                continue
            x0, y0 = lo + np.array([i, j]) * spacing
            x1, y1 = lo + np.array([i + 1, j + 1]) * spacing
            cells.append(
                ConvexPolytope(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))
            )
            flags.append(True)
    return Mesh(
        cells=cells,
        is_ghost=np.array(flags, dtype=bool),
        domain=mesh.domain,
        generator=dict(mesh.generator, padded=True, rings=rings),
    )


def pad_ghost(mesh: Mesh, h_m: float) -> Mesh:
    """Append a ghost-cell layer outside the domain.

    1D: one cell of width h_m at each end. 2D Voronoi: the tessellation is
    regenerated on the bounding box enlarged by h_m per side with mirrored
    boundary seeds, which reproduces the interior cells exactly and tiles
    the padded band with ghost cells. Structured quad grids are extended
    by enough uniform rings to cover depth h_m/2.
    """
    if h_m <= 0:
        raise ValueError("ghost padding needs a positive mollifier width")
    if mesh.n_ghost:
        raise ValueError("mesh is already padded")
    if mesh.dim == 1:
        return _pad_intervals(mesh, h_m)
    kind = mesh.generator.get("kind")
    if kind == "voronoi":
        return _pad_voronoi(mesh, h_m)
    if kind == "quadgrid":
        return _pad_quadgrid(mesh, h_m)
    raise ValueError(f"cannot pad mesh generated by '{kind}'")


# ---------------------------------------------------------------------------
# plate-with-hole quadrilateral mesh


def quarter_plate_hole_mesh(level: int) -> Mesh:
    """Quadrilateral mesh of the quarter plate with a corner hole.

    A uniform (4*2^level)^2 grid covering the full unit square; the cell
    edges are not fitted to the hole arc, which is handled at the
    collocation stage by signed-distance filtering. Refinement by
    edge-midpoint quadrisection coincides with doubling the grid.
    """
    if level < 0:
        raise ValueError("refinement level must be non-negative")
    n = 4 * 2**level
    xs = np.linspace(0.0, 1.0, n + 1)
    cells = []
    for j in range(n):
        for i in range(n):
            x0, x1 = xs[i], xs[i + 1]
            y0, y1 = xs[j], xs[j + 1]
            cells.append(
                ConvexPolytope(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))
            )
    box = BoxDomain(np.zeros(2), np.ones(2))
    domain = BoxMinusDiskDomain(box=box, center=np.zeros(2), radius=0.25)
    return Mesh(
        cells=cells,
        is_ghost=np.zeros(len(cells), dtype=bool),
        domain=domain,
        generator={"kind": "quadgrid", "n": n, "box": ((0.0, 0.0), (1.0, 1.0))},
    )


# ---------------------------------------------------------------------------
# text import/export


def save_text(mesh: Mesh, path):
    """Write the textual mesh format.

    Line 1: "DIM n_vertices n_cells"; one vertex per line ("x" in 1D,
    "x y" in 2D); one cell per line: "k i_1 ... i_k ghostflag".
    """
    vid = {}
    verts = []
    cell_rows = []
    for cell, ghost in zip(mesh.cells, mesh.is_ghost):
        idx = []
        for v in cell.vertices:
            key = v.tobytes()
            if key not in vid:
                vid[key] = len(verts)
                verts.append(v)
            idx.append(vid[key])
        cell_rows.append((idx, int(ghost)))
    with open(path, "w") as fh:
        fh.write(f"{mesh.dim} {len(verts)} {len(cell_rows)}\n")
        for v in verts:
            fh.write(" ".join(repr(float(c)) for c in v) + "\n")
        for idx, ghost in cell_rows:
            fh.write(f"{len(idx)} " + " ".join(map(str, idx)) + f" {ghost}\n")


def load_text(path) -> Mesh:
    """Read the textual mesh format written by save_text.

    The domain is reconstructed as the bounding box of the interior
    cells; generator metadata is not round-tripped.
    """
    with open(path) as fh:
        dim, n_verts, n_cells = map(int, fh.readline().split())
        verts = np.array(
            [[float(t) for t in fh.readline().split()] for _ in range(n_verts)]
        )
        cells, flags = [], []
        for _ in range(n_cells):
            row = fh.readline().split()
            k = int(row[0])
            idx = list(map(int, row[1 : 1 + k]))
            flags.append(bool(int(row[1 + k])))
            cells.append(ConvexPolytope(verts[idx]))
    flags = np.asarray(flags, dtype=bool)
    interior = np.vstack([c.vertices for c, g in zip(cells, flags) if not g])
    domain = BoxDomain(interior.min(axis=0), interior.max(axis=0))
    return Mesh(
        cells=cells, is_ghost=flags, domain=domain, generator={"kind": "imported"}
    )
