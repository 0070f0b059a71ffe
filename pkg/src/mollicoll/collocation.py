"""Interior and boundary collocation point generation.

Three distribution schemes are supported: uniform (tensor grids on box
domains), Gauss (per-cell quadrature abscissae) and quasi-random (uniform
grids with bounded iid perturbations). The Gauss order gamma counts points
per axis on tensor elements (segments and quadrilaterals) and is the
polynomial exactness degree on triangles.

Randomness comes from the counter-based Philox generator keyed by the
configured seed (plus replicate index), so point sets are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import _gauss_legendre_01, _poly_area, _reference_triangle_rule
from .mesh import BoxDomain, BoxMinusDiskDomain, Mesh

# interior points closer than this to the zero level set of the domain's
# signed distance are discarded
SIGNED_DISTANCE_CUTOFF = 1e-5


def make_rng(seed: int, *stream) -> np.random.Generator:
    """Philox generator on an independent stream (seed, *stream)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)]))
    )


@dataclass(frozen=True)
class CollocationSet:
    """Interior points plus boundary points with outward normals.

    Every boundary point enforces the same boundary-condition row kinds
    (bc_kinds), e.g. ("value",) for Dirichlet problems and
    ("value", "normal") for clamped biharmonic problems.
    """

    interior: np.ndarray
    boundary: np.ndarray
    normals: np.ndarray
    bc_kinds: tuple = ("value",)
    meta: dict = field(default_factory=dict)

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def n_z(self) -> int:
        return self.n_interior + self.n_boundary

    @property
    def dim(self) -> int:
        return self.interior.shape[1]

    def all_points(self) -> np.ndarray:
        return np.vstack([self.interior, self.boundary])


# ---------------------------------------------------------------------------
# interior distributions


def _require_box(domain):
    if not isinstance(domain, BoxDomain):
        raise ValueError(
            "uniform collocation points require a tensor-product box domain"
        )
    return domain


def uniform_points(domain, n_interior: int) -> np.ndarray:
    """Equidistant interior points on a box domain.

    1D: n points with spacing L/(n+1), endpoints excluded. 2D: the tensor
    grid of M = ceil(sqrt(n)) points per axis (at least n points total).
    """
    box = _require_box(domain)
    if n_interior < 1:
        raise ValueError("need at least one interior point")
    if box.dim == 1:
        t = np.arange(1, n_interior + 1) / (n_interior + 1)
        return (box.lo + t[:, None] * (box.hi - box.lo)).reshape(-1, 1)
    m = int(np.ceil(np.sqrt(n_interior)))
    t = np.arange(1, m + 1) / (m + 1)
    xs = box.lo[0] + t * (box.hi[0] - box.lo[0])
    ys = box.lo[1] + t * (box.hi[1] - box.lo[1])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def quasirandom_points(domain, n_interior, sigma_fraction, rng) -> np.ndarray:
    """Uniform grid plus iid per-axis perturbations U(-sigma, sigma) with
    sigma equal to sigma_fraction of the equidistant spacing."""
    if not 0.0 <= sigma_fraction < 0.5:
        raise ValueError("sigma_fraction must lie in [0, 0.5)")
    box = _require_box(domain)
    pts = uniform_points(domain, n_interior)
    if box.dim == 1:
        spacing = (box.hi - box.lo) / (n_interior + 1)
    else:
        m = int(np.ceil(np.sqrt(n_interior)))
        spacing = (box.hi - box.lo) / (m + 1)
    sigma = sigma_fraction * spacing
    return pts + rng.uniform(-sigma, sigma, size=pts.shape)


def _quad_tensor_points(verts, n_axis):
    """Tensor Gauss abscissae mapped bilinearly into a quadrilateral."""
    t, _ = _gauss_legendre_01(n_axis)
    U, V = np.meshgrid(t, t, indexing="ij")
    u, v = U.ravel(), V.ravel()
    shape = np.column_stack(
        [(1 - u) * (1 - v), u * (1 - v), u * v, (1 - u) * v]
    )
    return shape @ verts


def gauss_points(mesh: Mesh, gamma: int) -> np.ndarray:
    """Per-cell Gauss collocation points over the interior cells.

    Quadrilateral cells use the native tensor rule with gamma points per
    axis; other polygons are fan-triangulated and receive the abscissae of
    the degree-gamma triangle rule in each triangle.
    """
    if gamma < 1:
        raise ValueError("gauss order must be at least 1")
    pts = []
    for cell, ghost in zip(mesh.cells, mesh.is_ghost):
        if ghost:
            continue
        v = cell.vertices
        if mesh.dim == 1:
            t, _ = _gauss_legendre_01(gamma)
            pts.append((v[0, 0] + (v[-1, 0] - v[0, 0]) * t)[:, None])
        elif len(v) == 4:
            pts.append(_quad_tensor_points(v, gamma))
        else:
            ref_pts, _ = _reference_triangle_rule(gamma)
            c = v.mean(axis=0)
            v1 = np.roll(v, -1, axis=0)
            p = (
                v[:, None, :]
                + ref_pts[None, :, 0, None] * (v1 - v)[:, None, :]
                + ref_pts[None, :, 1, None] * (c - v)[:, None, :]
            )
            pts.append(p.reshape(-1, 2))
    return np.vstack(pts)


def count_gauss_points(mesh: Mesh, gamma: int) -> int:
    """Number of interior Gauss collocation points the mesh would yield."""
    ref_n = len(_reference_triangle_rule(gamma)[0])
    total = 0
    for cell, ghost in zip(mesh.cells, mesh.is_ghost):
        if ghost:
            continue
        if mesh.dim == 1:
            total += gamma
        elif len(cell.vertices) == 4:
            total += gamma * gamma
        else:
            total += len(cell.vertices) * ref_n
    return total


def choose_gauss_order(mesh: Mesh, n_b: int, margin: float = 1.5) -> int:
    """Smallest Gauss order whose interior point count is at least
    margin * n_b (the loose overdetermination criterion with headroom)."""
    for gamma in range(1, 21):
        if count_gauss_points(mesh, gamma) >= margin * n_b:
            return gamma
    raise ValueError("no gauss order up to 20 satisfies the counting rule")


def filter_signed_distance(points, domain) -> np.ndarray:
    """Keep points with signed distance above the 1e-5 cutoff."""
    sd = domain.signed_distance(points)
    return points[sd > SIGNED_DISTANCE_CUTOFF]


# ---------------------------------------------------------------------------
# boundary distributions


def _edge_parameters(scheme, n):
    if scheme == "gauss":
        t, _ = _gauss_legendre_01(n)
        return t
    # uniform / quasirandom: endpoints included; corner points are emitted
    # once per incident edge, each with that edge's normal
    return np.linspace(0.0, 1.0, n)


def boundary_points(domain, scheme: str, n_per_edge: int, arc_segments: int = 1):
    """Boundary collocation points with outward unit normals.

    Returns (points, normals). Box domains place n_per_edge points on each
    edge; the plate-with-hole domain additionally covers the quarter arc
    with arc_segments chunks of 8-point Gauss abscissae in angle.
    """
    if isinstance(domain, BoxDomain):
        if domain.dim == 1:
            pts = np.array([[domain.lo[0]], [domain.hi[0]]])
            normals = np.array([[-1.0], [1.0]])
            return pts, normals
        t = _edge_parameters(scheme, n_per_edge)
        (x0, y0), (x1, y1) = domain.lo, domain.hi
        edges = [
            ((x0, y0), (x1, y0), (0.0, -1.0)),
            ((x1, y0), (x1, y1), (1.0, 0.0)),
            ((x1, y1), (x0, y1), (0.0, 1.0)),
            ((x0, y1), (x0, y0), (-1.0, 0.0)),
        ]
        pts, normals = [], []
        for a, b, nrm in edges:
            a, b = np.asarray(a), np.asarray(b)
            pts.append(a + t[:, None] * (b - a))
            normals.append(np.tile(nrm, (len(t), 1)))
        return np.vstack(pts), np.vstack(normals)

    if isinstance(domain, BoxMinusDiskDomain):
        box, c, a = domain.box, domain.center, domain.radius
        (x0, y0), (x1, y1) = box.lo, box.hi
        t = _edge_parameters("gauss", n_per_edge)
        segments = [
            ((x0 + a, y0), (x1, y0), (0.0, -1.0)),
            ((x1, y0), (x1, y1), (1.0, 0.0)),
            ((x1, y1), (x0, y1), (0.0, 1.0)),
            ((x0, y1), (x0, y0 + a), (-1.0, 0.0)),
        ]
        pts, normals = [], []
        for p, q, nrm in segments:
            p, q = np.asarray(p), np.asarray(q)
            pts.append(p + t[:, None] * (q - p))
            normals.append(np.tile(nrm, (len(t), 1)))
        # quarter arc: 8-point Gauss in angle on each sub-arc, outward
        # normal pointing into the hole
        tg, _ = _gauss_legendre_01(8)
        for k in range(arc_segments):
            theta = (k + tg) * (np.pi / 2) / arc_segments
            arc = c + a * np.column_stack([np.cos(theta), np.sin(theta)])
            pts.append(arc)
            normals.append(-np.column_stack([np.cos(theta), np.sin(theta)]))
        return np.vstack(pts), np.vstack(normals)

    raise ValueError(f"no boundary representation for domain {type(domain)}")


# ---------------------------------------------------------------------------
# export


def export_csv(colloc: CollocationSet, path):
    """Write the point set as CSV rows "x,y,kind,tag" (y = 0 in 1D)."""
    with open(path, "w") as fh:
        fh.write("x,y,kind,tag\n")
        for p in colloc.interior:
            y = p[1] if colloc.dim == 2 else 0.0
            fh.write(f"{p[0]!r},{y!r},interior,\n")
        tag = "+".join(colloc.bc_kinds)
        for p in colloc.boundary:
            y = p[1] if colloc.dim == 2 else 0.0
            fh.write(f"{p[0]!r},{y!r},boundary,{tag}\n")
