"""PDE benchmark cases with manufactured or analytic solutions.

Each case bundles the domain, the exact solution (with gradient), the
source term consistent with it under the strong-form operator, the
boundary-condition kinds, and material parameters. Sources and analytic
stress fields are derived in closed form and cross-checked against
finite-difference oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import BoxDomain, BoxMinusDiskDomain


@dataclass(frozen=True)
class ProblemCase:
    name: str
    pde: str  # poisson | elasticity | biharmonic
    dim: int
    n_components: int
    pde_order: int
    domain: object
    exact: object  # (n, dim) -> (n, n_components)
    exact_grad: object  # (n, dim) -> (n, n_components, dim)
    source: object  # (n, dim) -> (n, n_components)
    bc_kinds: tuple = ("value",)
    material: dict = field(default_factory=dict)
    exact_stress: object = None  # (n, 2) -> (n, 3) [sxx, syy, sxy]


def _plane_stress_moduli(E, nu):
    mu = E / (2.0 * (1.0 + nu))
    lam_star = E * nu / (1.0 - nu * nu)
    return mu, lam_star


# ---------------------------------------------------------------------------
# 1D cases


def poisson_1d() -> ProblemCase:
    """-u'' = s on (0, 1) manufactured for u(x) = sin(3 pi x)."""
    w = 3.0 * np.pi

    def exact(p):
        return np.sin(w * p[:, :1])

    def grad(p):
        return (w * np.cos(w * p[:, :1]))[:, :, None]

    def source(p):
        return w * w * np.sin(w * p[:, :1])

    return ProblemCase(
        name="poisson1d",
        pde="poisson",
        dim=1,
        n_components=1,
        pde_order=2,
        domain=BoxDomain([0.0], [1.0]),
        exact=exact,
        exact_grad=grad,
        source=source,
        bc_kinds=("value",),
    )


def biharmonic_1d() -> ProblemCase:
    """u'''' = s on (0, 1) for u(x) = sin(3 pi x); u and u' prescribed at
    both ends."""
    w = 3.0 * np.pi

    def exact(p):
        return np.sin(w * p[:, :1])

    def grad(p):
        return (w * np.cos(w * p[:, :1]))[:, :, None]

    def source(p):
        return w**4 * np.sin(w * p[:, :1])

    return ProblemCase(
        name="biharmonic1d",
        pde="biharmonic",
        dim=1,
        n_components=1,
        pde_order=4,
        domain=BoxDomain([0.0], [1.0]),
        exact=exact,
        exact_grad=grad,
        source=source,
        bc_kinds=("value", "normal"),
        material={"D": 1.0},
    )


# ---------------------------------------------------------------------------
# 2D elasticity on the unit square


def elasticity_2d(E: float = 1000.0, nu: float = 0.3) -> ProblemCase:
    """Plane-stress elasticity manufactured for
    u1 = u2 = sin(pi x) sin(pi y), Dirichlet on all edges."""
    mu, lam = _plane_stress_moduli(E, nu)
    pi = np.pi

    def exact(p):
        w = np.sin(pi * p[:, 0]) * np.sin(pi * p[:, 1])
        return np.stack([w, w], axis=1)

    def grad(p):
        wx = pi * np.cos(pi * p[:, 0]) * np.sin(pi * p[:, 1])
        wy = pi * np.sin(pi * p[:, 0]) * np.cos(pi * p[:, 1])
        g = np.stack([wx, wy], axis=1)
        return np.stack([g, g], axis=1)

    def source(p):
        # s = -div sigma(u_exact) for u1 = u2 = w
        w = np.sin(pi * p[:, 0]) * np.sin(pi * p[:, 1])
        cc = np.cos(pi * p[:, 0]) * np.cos(pi * p[:, 1])
        s = 2.0 * mu * pi * pi * w + (lam + mu) * pi * pi * (w - cc)
        return np.stack([s, s], axis=1)

    return ProblemCase(
        name="elasticity2d",
        pde="elasticity",
        dim=2,
        n_components=2,
        pde_order=2,
        domain=BoxDomain([0.0, 0.0], [1.0, 1.0]),
        exact=exact,
        exact_grad=grad,
        source=source,
        bc_kinds=("value",),
        material={"E": E, "nu": nu, "mu": mu, "lambda_star": lam},
    )


# ---------------------------------------------------------------------------
# 2D clamped plate bending


def plate_bending_2d(D: float = 1.0) -> ProblemCase:
    """D lap^2 u = q on the unit square, clamped (u = 0, du/dn = 0),
    manufactured for u = (1 - cos 2 pi x)(1 - cos 2 pi y)."""
    tp = 2.0 * np.pi

    def exact(p):
        return (
            (1.0 - np.cos(tp * p[:, 0])) * (1.0 - np.cos(tp * p[:, 1]))
        )[:, None]

    def grad(p):
        cx, cy = np.cos(tp * p[:, 0]), np.cos(tp * p[:, 1])
        sx, sy = np.sin(tp * p[:, 0]), np.sin(tp * p[:, 1])
        return np.stack([tp * sx * (1 - cy), (1 - cx) * tp * sy], axis=1)[:, None, :]

    def source(p):
        cx, cy = np.cos(tp * p[:, 0]), np.cos(tp * p[:, 1])
        return (-16.0 * np.pi**4 * (cx - 4.0 * cx * cy + cy))[:, None]

    return ProblemCase(
        name="plate_bending",
        pde="biharmonic",
        dim=2,
        n_components=1,
        pde_order=4,
        domain=BoxDomain([0.0, 0.0], [1.0, 1.0]),
        exact=exact,
        exact_grad=grad,
        source=source,
        bc_kinds=("value", "normal"),
        material={"D": D},
    )


# ---------------------------------------------------------------------------
# quarter plate with a circular hole (analytic solution)


def plate_with_hole(
    E: float = 70.0e6, nu: float = 0.3, sigma_inf: float = 1.0e6, a: float = 0.25
) -> ProblemCase:
    """Quarter of an infinite plate with a corner hole under remote
    x-tension. The analytic displacement field is imposed as Dirichlet
    data on the whole boundary (outer edges and hole arc); the body force
    vanishes identically."""
    mu, lam = _plane_stress_moduli(E, nu)
    kappa = (3.0 - nu) / (1.0 + nu)
    A = sigma_inf * a / (8.0 * mu)

    def _polar(p):
        r = np.hypot(p[:, 0], p[:, 1])
        th = np.arctan2(p[:, 1], p[:, 0])
        return r, th

    def exact(p):
        r, th = _polar(p)
        c1, c3 = np.cos(th), np.cos(3 * th)
        s1, s3 = np.sin(th), np.sin(3 * th)
        ux = A * (
            (r / a) * (kappa + 1) * c1
            + (2 * a / r) * ((1 + kappa) * c1 + c3)
            - (2 * a**3 / r**3) * c3
        )
        uy = A * (
            (r / a) * (kappa - 3) * s1
            + (2 * a / r) * ((1 - kappa) * s1 + s3)
            - (2 * a**3 / r**3) * s3
        )
        return np.stack([ux, uy], axis=1)

    def grad(p):
        r, th = _polar(p)
        c1, c3 = np.cos(th), np.cos(3 * th)
        s1, s3 = np.sin(th), np.sin(3 * th)
        dux_dr = A * (
            (kappa + 1) * c1 / a
            - (2 * a / r**2) * ((1 + kappa) * c1 + c3)
            + (6 * a**3 / r**4) * c3
        )
        dux_dth = A * (
            -(r / a) * (kappa + 1) * s1
            + (2 * a / r) * (-(1 + kappa) * s1 - 3 * s3)
            + (6 * a**3 / r**3) * s3
        )
        duy_dr = A * (
            (kappa - 3) * s1 / a
            - (2 * a / r**2) * ((1 - kappa) * s1 + s3)
            + (6 * a**3 / r**4) * s3
        )
        duy_dth = A * (
            (r / a) * (kappa - 3) * c1
            + (2 * a / r) * ((1 - kappa) * c1 + 3 * c3)
            - (6 * a**3 / r**3) * c3
        )
        out = np.empty((len(r), 2, 2))
        out[:, 0, 0] = dux_dr * c1 - dux_dth * s1 / r
        out[:, 0, 1] = dux_dr * s1 + dux_dth * c1 / r
        out[:, 1, 0] = duy_dr * c1 - duy_dth * s1 / r
        out[:, 1, 1] = duy_dr * s1 + duy_dth * c1 / r
        return out

    def source(p):
        return np.zeros((len(p), 2))

    def stress(p):
        r, th = _polar(p)
        ra2 = (a / r) ** 2
        ra4 = (a / r) ** 4
        c2, s2 = np.cos(2 * th), np.sin(2 * th)
        srr = 0.5 * sigma_inf * ((1 - ra2) + (1 - 4 * ra2 + 3 * ra4) * c2)
        stt = 0.5 * sigma_inf * ((1 + ra2) - (1 + 3 * ra4) * c2)
        srt = -0.5 * sigma_inf * (1 + 2 * ra2 - 3 * ra4) * s2
        c, s = np.cos(th), np.sin(th)
        sxx = srr * c * c + stt * s * s - 2 * srt * s * c
        syy = srr * s * s + stt * c * c + 2 * srt * s * c
        sxy = (srr - stt) * s * c + srt * (c * c - s * s)
        return np.stack([sxx, syy, sxy], axis=1)

    box = BoxDomain([0.0, 0.0], [1.0, 1.0])
    return ProblemCase(
        name="plate_hole",
        pde="elasticity",
        dim=2,
        n_components=2,
        pde_order=2,
        domain=BoxMinusDiskDomain(box=box, center=np.zeros(2), radius=a),
        exact=exact,
        exact_grad=grad,
        source=source,
        bc_kinds=("value",),
        material={
            "E": E,
            "nu": nu,
            "mu": mu,
            "lambda_star": lam,
            "sigma_inf": sigma_inf,
            "a": a,
            "kappa": kappa,
        },
        exact_stress=stress,
    )


CASES = {
    "poisson1d": poisson_1d,
    "biharmonic1d": biharmonic_1d,
    "elasticity2d": elasticity_2d,
    "plate_bending": plate_bending_2d,
    "plate_hole": plate_with_hole,
}


def get_case(name: str) -> ProblemCase:
    try:
        return CASES[name]()
    except KeyError:
        raise ValueError(
            f"unknown case '{name}'; choose from {sorted(CASES)}"
        ) from None


# ---------------------------------------------------------------------------
# finite-difference consistency oracle


def _fd_second(f, pts, ax, h):
    e = np.zeros(pts.shape[1])
    e[ax] = h
    return (f(pts + e) - 2.0 * f(pts) + f(pts - e)) / (h * h)


def _fd_mixed(f, pts, h):
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    return (
        f(pts + ex + ey) - f(pts + ex - ey) - f(pts - ex + ey) + f(pts - ex - ey)
    ) / (4.0 * h * h)


def _fd_fourth(f, pts, ax, h):
    """Richardson-extrapolated five-point fourth difference (O(h^4))."""
    e = np.zeros(pts.shape[1])
    e[ax] = 1.0

    def d4(s):
        return (
            f(pts - 2 * s * e) - 4 * f(pts - s * e) + 6 * f(pts)
            - 4 * f(pts + s * e) + f(pts + 2 * s * e)
        ) / s**4

    return (4.0 * d4(h / 2) - d4(h)) / 3.0


def _fd_biharm_mixed(f, pts, h):
    """d4/dx2dy2 by composing second differences along both axes, with
    Richardson extrapolation."""

    def along_y(q):
        return _fd_second(f, q, 1, h)

    def along_y_half(q):
        return _fd_second(f, q, 1, h / 2)

    full = _fd_second(along_y, pts, 0, h)
    half = _fd_second(along_y_half, pts, 0, h / 2)
    return (16.0 * half - full) / 15.0


def fd_apply_operator(case: ProblemCase, pts: np.ndarray):
    """Finite-difference application of the case's strong-form operator to
    its exact solution; should match the source term.

    Returns (applied, scale) where scale is the magnitude of the largest
    constituent operator term, used to normalize deviations when the
    source itself vanishes (e.g. equilibrium fields).
    """
    if case.pde == "poisson":
        h = 1e-4
        out = -sum(_fd_second(case.exact, pts, ax, h) for ax in range(case.dim))
        return out, float(np.abs(out).max())
    if case.pde == "biharmonic":
        h = 6e-3
        D = case.material.get("D", 1.0)
        out = sum(_fd_fourth(case.exact, pts, ax, h) for ax in range(case.dim))
        if case.dim == 2:
            out = out + 2.0 * _fd_biharm_mixed(case.exact, pts, h)
        return D * out, float(np.abs(D * out).max())
    if case.pde == "elasticity":
        h = 1e-5
        mu = case.material["mu"]
        lam = case.material["lambda_star"]
        uxx = _fd_second(case.exact, pts, 0, h)
        uyy = _fd_second(case.exact, pts, 1, h)
        uxy = _fd_mixed(case.exact, pts, h)
        lap = uxx + uyy
        div_grad = np.stack(
            [uxx[:, 0] + uxy[:, 1], uxy[:, 0] + uyy[:, 1]], axis=1
        )
        scale = float(mu * np.abs(lap).max() + (lam + mu) * np.abs(div_grad).max())
        return -(mu * lap + (lam + mu) * div_grad), scale
    raise ValueError(f"unknown pde '{case.pde}'")


def check_consistency(case: ProblemCase, rng=None, n: int = 20, rtol=None) -> float:
    """Max relative deviation between the FD-applied operator and the
    declared source at random interior points; raises if above tolerance."""
    if rng is None:
        rng = np.random.default_rng(0)
    if rtol is None:
        rtol = 1e-4 if case.pde == "biharmonic" else 1e-5
    box = case.domain.box if isinstance(case.domain, BoxMinusDiskDomain) else case.domain
    margin = 0.05
    pts = box.lo + (margin + (1 - 2 * margin) * rng.random((4 * n, case.dim))) * (
        box.hi - box.lo
    )
    sd = case.domain.signed_distance(pts)
    pts = pts[sd > margin][:n]
    applied, op_scale = fd_apply_operator(case, pts)
    target = case.source(pts)
    scale = max(np.abs(target).max(), op_scale, 1e-30)
    err = float(np.abs(applied - target).max() / scale)
    if err > rtol:
        raise AssertionError(
            f"source inconsistent with exact solution for {case.name}: "
            f"relative FD deviation {err:.3e} > {rtol:.1e}"
        )
    return err
