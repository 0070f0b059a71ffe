"""Collocation system assembly and least-squares solution.

One row is generated per interior collocation point and PDE component,
plus one row per boundary point and boundary-condition kind. Rows holding
n-th derivatives of the basis are scaled by h_m^n together with their
right-hand sides, which improves the conditioning of the rectangular
matrix without changing the equations. The overdetermined system is
solved through an orthogonal factorization of the matrix itself (QR),
never through the normal equations; the normal-equation route is kept
only as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import BasisSet, eval_rows

RANK_TOL = 1e-12

# dense solves beyond this entry count switch to the blockwise QR reduction
_DENSE_ENTRY_LIMIT = 40_000_000

_INTERIOR_DERIVS = {
    ("poisson", 1): [(2,)],
    ("poisson", 2): [(2, 0), (0, 2)],
    ("elasticity", 2): [(2, 0), (0, 2), (1, 1)],
    ("biharmonic", 1): [(4,)],
    ("biharmonic", 2): [(4, 0), (2, 2), (0, 4)],
}


@dataclass
class CollocationSystem:
    """Rectangular collocation system with sparse rows.

    row_cols[i] / row_vals[i] hold the nonzero pattern of row i; rhs is the
    scaled right-hand side; row_kind distinguishes interior rows from
    boundary value/normal-derivative rows; row_scale records the h_m^n
    factor applied to each row and its rhs entry.
    """

    row_cols: list
    row_vals: list
    rhs: np.ndarray
    row_kind: list
    row_scale: np.ndarray
    n_cols: int

    @property
    def n_rows(self) -> int:
        return len(self.row_cols)

    def to_dense(self) -> np.ndarray:
        C = np.zeros((self.n_rows, self.n_cols))
        for i, (cols, vals) in enumerate(zip(self.row_cols, self.row_vals)):
            C[i, cols] = vals
        return C

    def dump_text(self, path):
        """Write C, s and optionally u in a triplet text format:
        header "ROWS COLS NNZ", one "i j value" line per nonzero, then one
        "rhs i value" line per row."""
        nnz = sum(len(c) for c in self.row_cols)
        with open(path, "w") as fh:
            fh.write(f"{self.n_rows} {self.n_cols} {nnz}\n")
            for i, (cols, vals) in enumerate(zip(self.row_cols, self.row_vals)):
                for j, v in zip(cols, vals):
                    fh.write(f"{i} {j} {v!r}\n")
            for i, b in enumerate(self.rhs):
                fh.write(f"rhs {i} {b!r}\n")


@dataclass
class Solution:
    """Least-squares coefficients tied to the basis that produced them."""

    coefficients: np.ndarray
    basis: BasisSet
    n_components: int = 1

    def component(self, c: int) -> np.ndarray:
        n_b = self.basis.n_b
        return self.coefficients[c * n_b : (c + 1) * n_b]


def _required_smoothness(pde: str) -> int:
    # second-order operators need a C^2 basis (C^1 mollifier); fourth-order
    # operators need C^4 (C^3 mollifier)
    return 1 if pde in ("poisson", "elasticity") else 3


def assemble(problem, basis: BasisSet, colloc) -> CollocationSystem:
    """Assemble interior PDE rows and boundary-condition rows.

    The mollifier smoothness is checked against the PDE order, and the
    collocation count against the basis count (n_z >= n_b), before any
    evaluation happens.
    """
    need = _required_smoothness(problem.pde)
    if basis.mollifier.smoothness < need:
        raise ValueError(
            f"'{problem.pde}' needs a mollifier of class C^{need} or higher, "
            f"got C^{basis.mollifier.smoothness} '{basis.mollifier.family}'"
        )
    if colloc.n_z < basis.n_b:
        raise ValueError(
            f"underdetermined: n_z={colloc.n_z} < n_b={basis.n_b}"
        )

    dim = basis.dim
    n_comp = problem.n_components
    n_b = basis.n_b
    h_m = basis.mollifier.width
    op_scale = h_m**problem.pde_order
    # normalize the momentum equations by the elastic modulus so interior
    # rows and boundary-value rows carry comparable weight in the least
    # squares (both sides are scaled; the equations are unchanged)
    if problem.pde == "elasticity":
        op_scale /= problem.material["E"]
    derivs = _INTERIOR_DERIVS[(problem.pde, dim)]

    row_cols, row_vals, rhs, kinds, scales = [], [], [], [], []

    src = problem.source(colloc.interior)
    for p_idx, z in enumerate(colloc.interior):
        cols, d = eval_rows(basis, z, derivs)
        if problem.pde == "poisson":
            row = -(d[0] + d[1]) if dim == 2 else -d[0]
            row_cols.append(cols)
            row_vals.append(op_scale * row)
            rhs.append(op_scale * src[p_idx, 0])
            kinds.append("interior")
            scales.append(op_scale)
        elif problem.pde == "biharmonic":
            if dim == 1:
                row = d[0]
            else:
                row = d[0] + 2.0 * d[1] + d[2]
            row_cols.append(cols)
            row_vals.append(op_scale * problem.material.get("D", 1.0) * row)
            rhs.append(op_scale * src[p_idx, 0])
            kinds.append("interior")
            scales.append(op_scale)
        elif problem.pde == "elasticity":
            mu = problem.material["mu"]
            lam = problem.material["lambda_star"]
            dxx, dyy, dxy = d[0], d[1], d[2]
            lap = dxx + dyy
            h = {(0, 0): dxx, (0, 1): dxy, (1, 0): dxy, (1, 1): dyy}
            for a in range(2):
                full_cols = np.concatenate([cols, cols + n_b])
                blocks = []
                for b in range(2):
                    block = (lam + mu) * h[(a, b)]
                    if a == b:
                        block = block + mu * lap
                    blocks.append(-block)
                row_cols.append(full_cols)
                row_vals.append(op_scale * np.concatenate(blocks))
                rhs.append(op_scale * src[p_idx, a])
                kinds.append("interior")
                scales.append(op_scale)
        else:
            raise ValueError(f"unknown pde '{problem.pde}'")

    if colloc.n_boundary:
        bvals = problem.exact(colloc.boundary)
        bgrad = None
        if "normal" in colloc.bc_kinds:
            bgrad = problem.exact_grad(colloc.boundary)
        value_deriv = [(0,) * dim]
        grad_derivs = [tuple(np.eye(dim, dtype=int)[ax]) for ax in range(dim)]
        want = value_deriv + (grad_derivs if bgrad is not None else [])
        for p_idx, z in enumerate(colloc.boundary):
            cols, d = eval_rows(basis, z, want)
            for kind in colloc.bc_kinds:
                if kind == "value":
                    for c in range(n_comp):
                        row_cols.append(cols + c * n_b)
                        row_vals.append(d[0].copy())
                        rhs.append(bvals[p_idx, c])
                        kinds.append("boundary-value")
                        scales.append(1.0)
                elif kind == "normal":
                    nrm = colloc.normals[p_idx]
                    grad_row = sum(nrm[ax] * d[1 + ax] for ax in range(dim))
                    for c in range(n_comp):
                        gn = float(bgrad[p_idx, c] @ nrm)
                        row_cols.append(cols + c * n_b)
                        row_vals.append(h_m * grad_row)
                        rhs.append(h_m * gn)
                        kinds.append("boundary-normal")
                        scales.append(h_m)
                else:
                    raise ValueError(f"unknown boundary kind '{kind}'")

    return CollocationSystem(
        row_cols=row_cols,
        row_vals=row_vals,
        rhs=np.asarray(rhs),
        row_kind=kinds,
        row_scale=np.asarray(scales),
        n_cols=n_comp * n_b,
    )


# ---------------------------------------------------------------------------
# solvers


def _solve_dense(system: CollocationSystem):
    C = system.to_dense()
    u, _, rank, _ = scipy.linalg.lstsq(
        C, system.rhs, cond=RANK_TOL, lapack_driver="gelsy"
    )
    if rank < system.n_cols:
        sv = scipy.linalg.svdvals(C) if system.n_rows * system.n_cols < 1e6 else None
        cond = f"{sv[0] / sv[-1]:.3e}" if sv is not None and sv[-1] > 0 else "inf"
        raise np.linalg.LinAlgError(
            f"rank-deficient collocation matrix: rank {rank} < {system.n_cols} "
            f"(condition estimate {cond})"
        )
    return u


def _solve_blockwise(system: CollocationSystem):
    """Memory-bounded QR reduction of [C | s] in row chunks.

    Maintains the triangular factor of the rows seen so far; equivalent to
    a full Householder QR of C without ever materializing the dense
    matrix.
    """
    n = system.n_cols
    chunk_rows = max(n, 8192)
    R = np.zeros((0, n + 1))
    i = 0
    while i < system.n_rows:
        j = min(i + chunk_rows, system.n_rows)
        block = np.zeros((j - i + R.shape[0], n + 1))
        block[: R.shape[0]] = R
        for k in range(i, j):
            row = block[R.shape[0] + k - i]
            row[system.row_cols[k]] = system.row_vals[k]
            row[n] = system.rhs[k]
        R = np.linalg.qr(block, mode="r")[: n + 1]
        i = j
    diag = np.abs(np.diag(R)[:n])
    if diag.min() <= RANK_TOL * diag.max():
        raise np.linalg.LinAlgError(
            "rank-deficient collocation matrix "
            f"(triangular factor condition estimate {diag.max() / max(diag.min(), 1e-300):.3e})"
        )
    return scipy.linalg.solve_triangular(R[:n, :n], R[:n, n])


def solve(system: CollocationSystem, basis=None, n_components: int = 1) -> Solution:
    """Least-squares minimizer of ||C u - s||_2 via QR factorization."""
    if system.n_rows < system.n_cols:
        raise ValueError("system has fewer rows than columns")
    if system.n_rows * system.n_cols <= _DENSE_ENTRY_LIMIT:
        u = _solve_dense(system)
    else:
        u = _solve_blockwise(system)
    if not np.all(np.isfinite(u)):
        raise np.linalg.LinAlgError("non-finite least-squares solution")
    return Solution(coefficients=u, basis=basis, n_components=n_components)


def solve_normal_equations(system: CollocationSystem) -> np.ndarray:
    """Cross-check oracle: solve C^T C u = C^T s directly."""
    C = system.to_dense()
    return np.linalg.solve(C.T @ C, C.T @ system.rhs)


# ---------------------------------------------------------------------------
# field evaluation and error metrics


def evaluate_field(solution: Solution, points, deriv=None) -> np.ndarray:
    """Evaluate the discrete field (or a derivative) at points.

    Returns an array of shape (n_points, n_components).
    """
    basis = solution.basis
    if deriv is None:
        deriv = (0,) * basis.dim
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((len(pts), solution.n_components))
    comps = [solution.component(c) for c in range(solution.n_components)]
    for i, z in enumerate(pts):
        cols, vals = eval_rows(basis, z, [tuple(deriv)])
        for c, u in enumerate(comps):
            out[i, c] = vals[0] @ u[cols]
    return out


def evaluate_gradient(solution: Solution, points) -> np.ndarray:
    """Gradient of every component: shape (n_points, n_components, dim)."""
    basis = solution.basis
    dim = basis.dim
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = [tuple(np.eye(dim, dtype=int)[ax]) for ax in range(dim)]
    out = np.zeros((len(pts), solution.n_components, dim))
    comps = [solution.component(c) for c in range(solution.n_components)]
    for i, z in enumerate(pts):
        cols, vals = eval_rows(basis, z, derivs)
        for c, u in enumerate(comps):
            out[i, c] = vals @ u[cols]
    return out


def _relative(v, vh) -> float:
    num = float(np.sum((v - vh) ** 2))
    den = float(np.sum(v**2))
    if den == 0.0:
        raise ZeroDivisionError("relative error undefined for a zero field")
    return float(np.sqrt(num / den))


def relative_error(exact_field, solution: Solution, points, deriv=None) -> float:
    """Discrete relative error at the given points.

    deriv=None compares field values (the L2-norm figure of merit);
    deriv="grad" compares all first derivatives (H1-seminorm).
    exact_field(points) must return (n_points, n_components) values or
    (n_points, n_components, dim) gradients accordingly.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(exact_field(pts), dtype=float)
    if deriv == "grad":
        vh = evaluate_gradient(solution, pts)
    else:
        vh = evaluate_field(solution, pts, deriv)
    return _relative(v.reshape(len(pts), -1), vh.reshape(len(pts), -1))


def energy_error(problem, solution: Solution, points) -> float:
    """Discrete relative energy-norm error for plane-stress elasticity.

    Strains come from the first derivatives of the exact and computed
    displacement fields; the energy pairing uses the problem's
    constitutive matrix.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ge = problem.exact_grad(pts)
    gh = evaluate_gradient(solution, pts)

    def strain(g):
        # engineering shear in the third slot, so that sum(strain * stress)
        # equals the double contraction eps : sigma
        return np.stack([g[:, 0, 0], g[:, 1, 1], g[:, 0, 1] + g[:, 1, 0]], axis=1)

    def stress(e):
        mu = problem.material["mu"]
        lam = problem.material["lambda_star"]
        sxx = (lam + 2 * mu) * e[:, 0] + lam * e[:, 1]
        syy = lam * e[:, 0] + (lam + 2 * mu) * e[:, 1]
        sxy = mu * e[:, 2]
        return np.stack([sxx, syy, sxy], axis=1)

    ee, eh = strain(ge), strain(gh)
    de = ee - eh
    num = float(np.sum(de * stress(de)))
    den = float(np.sum(ee * stress(ee)))
    if den == 0.0:
        raise ZeroDivisionError("energy error undefined for a zero strain field")
    return float(np.sqrt(num / den))
