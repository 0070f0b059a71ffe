"""Symmetric, compactly supported, unit-volume polynomial mollifiers.

Every family is stored as a breakpoint/coefficient piecewise polynomial on
the support [-h/2, h/2] so that derivatives are exact polynomial
evaluations rather than numerical approximations. Multivariate kernels are
tensor products of the univariate one, evaluated with a per-axis
derivative multi-index (mixed partials included).

Families
--------
bspline2  C^1  standard uniform quadratic B-spline (3 knot spans)
bspline3  C^2  standard uniform cubic B-spline (4 knot spans)
hexic     C^2  c3/h * (1 - 4 (x/h)^2)^3 with c3 = 35/16
octic     C^3  c4/h * (1 - 4 (x/h)^2)^4 with c4 = 315/128
decic     C^4  c5/h * (1 - 4 (x/h)^2)^5 with c5 = 2772/1024

The width argument of a Mollifier is always its total support width. For
the mesh-driven kernels use kernel_width(family, h_m): the even
single-piece kernels take support h_m directly, while the B-spline
kernels are built on the uniform knot grid of spacing h_m/2 (support
1.5 h_m and 2 h_m). Aligning the B-spline knots with the coarse-cell
lattice this way is what keeps the collocation operator's approximation
power intact on refined meshes; rescaling the whole spline to support
h_m leaves kernel knots incommensurate with the cells and stalls
convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .geometry import gauss_rule_interval

# family name -> (piecewise polynomial degree, smoothness class)
FAMILIES = {
    "bspline2": (2, 1),
    "bspline3": (3, 2),
    "hexic": (6, 2),
    "octic": (8, 3),
    "decic": (10, 4),
}

# support width per unit of the nominal mesh-driven width h_m; B-splines
# sit on the knot grid of spacing h_m/2
_SUPPORT_FACTOR = {"bspline2": 1.5, "bspline3": 2.0}


def kernel_width(family: str, h_m: float) -> float:
    """Support width of the family's kernel for nominal mollifier width h_m."""
    if family not in FAMILIES:
        raise ValueError(f"unknown mollifier family '{family}'")
    return _SUPPORT_FACTOR.get(family, 1.0) * h_m


def _horner(x, coeffs):
    """Polynomial evaluation, ascending coefficients."""
    out = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        out *= x
        out += c
    return out


def _rescaled_bspline_pieces(base_breaks, base_coeffs, width):
    """Map a unit-integral kernel on base_breaks to support [-h/2, h/2].

    With s = (base support width) / h, m(x) = s * base(s * x), which keeps
    the integral at one. Coefficients are in ascending powers.
    """
    s = (base_breaks[-1] - base_breaks[0]) / width
    breaks = np.asarray(base_breaks, dtype=float) / s
    coeffs = []
    for c in base_coeffs:
        c = np.asarray(c, dtype=float)
        powers = s ** (1 + np.arange(len(c)))
        coeffs.append(c * powers)
    return breaks, coeffs


def _even_kernel_pieces(k, lead, width):
    """Single-piece kernel lead/h * (1 - 4 (x/h)^2)^k on [-h/2, h/2]."""
    u2 = np.array([1.0, 0.0, -4.0])  # 1 - 4 u^2 in ascending powers of u
    c = P.polypow(u2, k) * lead
    powers = (1.0 / width) ** (1 + np.arange(len(c)))
    return np.array([-width / 2, width / 2]), [c * powers]


def _build_pieces(family, width):
    if family == "bspline2":
        return _rescaled_bspline_pieces(
            [-1.5, -0.5, 0.5, 1.5],
            [
                [1.125, 1.5, 0.5],  # (u + 3/2)^2 / 2
                [0.75, 0.0, -1.0],  # 3/4 - u^2
                [1.125, -1.5, 0.5],  # (3/2 - u)^2 / 2
            ],
            width,
        )
    if family == "bspline3":
        return _rescaled_bspline_pieces(
            [-2.0, -1.0, 0.0, 1.0, 2.0],
            [
                [4 / 3, 2.0, 1.0, 1 / 6],  # (2 + u)^3 / 6
                [2 / 3, 0.0, -1.0, -0.5],
                [2 / 3, 0.0, -1.0, 0.5],
                [4 / 3, -2.0, 1.0, -1 / 6],  # (2 - u)^3 / 6
            ],
            width,
        )
    if family == "hexic":
        return _even_kernel_pieces(3, 35.0 / 16.0, width)
    if family == "octic":
        return _even_kernel_pieces(4, 315.0 / 128.0, width)
    if family == "decic":
        return _even_kernel_pieces(5, 2772.0 / 1024.0, width)
    raise ValueError(f"unknown mollifier family '{family}'")


@dataclass(frozen=True)
class Mollifier:
    """Compact symmetric kernel with exact piecewise-polynomial derivatives."""

    family: str
    width: float
    dim: int = 1
    breakpoints: np.ndarray = field(init=False, repr=False)
    _coeffs: tuple = field(init=False, repr=False)
    _deriv_cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown mollifier family '{self.family}'")
        if self.width <= 0:
            raise ValueError("mollifier width must be positive")
        if self.dim not in (1, 2):
            raise ValueError("mollifier dimension must be 1 or 2")
        breaks, coeffs = _build_pieces(self.family, self.width)
        object.__setattr__(self, "breakpoints", breaks)
        object.__setattr__(self, "_coeffs", tuple(np.asarray(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return FAMILIES[self.family][0]

    @property
    def smoothness(self) -> int:
        return FAMILIES[self.family][1]

    @property
    def interior_breaks(self) -> np.ndarray:
        """Breakpoints strictly inside the support (empty for the even
        single-piece kernels)."""
        return self.breakpoints[1:-1]

    def _piece_derivs(self, order: int):
        cached = self._deriv_cache.get(order)
        if cached is None:
            if order == 0:
                cached = self._coeffs
            else:
                cached = tuple(P.polyder(c, order) for c in self._coeffs)
            self._deriv_cache[order] = cached
        return cached

    def _check_order(self, order: int):
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if order > self.smoothness + 1:
            raise ValueError(
                f"derivative order {order} exceeds the usable range "
                f"{self.smoothness + 1} of the C^{self.smoothness} "
                f"'{self.family}' mollifier"
            )

    def eval1d(self, offsets, order: int = 0) -> np.ndarray:
        """Evaluate the univariate kernel (or a derivative) at offsets.

        Returns zero for |offset| >= width/2. Evaluation exactly on an
        interior breakpoint uses the piece on the positive side.
        """
        self._check_order(order)
        x = np.atleast_1d(np.asarray(offsets, dtype=float))
        out = np.zeros_like(x)
        half = 0.5 * self.width
        inside = (x > -half) & (x < half)
        if not inside.any():
            return out
        xin = x[inside]
        coeffs = self._piece_derivs(order)
        if len(coeffs) == 1:
            out[inside] = _horner(xin, coeffs[0])
            return out
        idx = np.searchsorted(self.interior_breaks, xin, side="right")
        vals = np.empty_like(xin)
        for k in range(len(coeffs)):
            sel = idx == k
            if sel.any():
                vals[sel] = _horner(xin[sel], coeffs[k])
        out[inside] = vals
        return out

    def eval(self, offsets, deriv=None) -> np.ndarray:
        """Tensor-product evaluation at (n, dim) offsets with a per-axis
        derivative multi-index."""
        pts = np.atleast_2d(np.asarray(offsets, dtype=float))
        if deriv is None:
            deriv = (0,) * self.dim
        if len(deriv) != self.dim:
            raise ValueError("derivative multi-index length must match dim")
        vals = self.eval1d(pts[:, 0], deriv[0])
        for ax in range(1, self.dim):
            vals = vals * self.eval1d(pts[:, ax], deriv[ax])
        return vals

    def moment(self, order: int) -> float:
        """Exact integral of s^order * m(s) over the support (univariate)."""
        if order < 0:
            raise ValueError("moment order must be non-negative")
        total = 0.0
        for a, b, c in zip(self.breakpoints[:-1], self.breakpoints[1:], self._coeffs):
            rule = gauss_rule_interval(a, b, self.degree + order)
            s = rule.points[:, 0]
            total += float(np.dot(rule.weights, s**order * P.polyval(s, c)))
        return total

    def edge_limits(self, order: int):
        """One-sided limits of the order-th derivative at the two support
        edges, approached from inside."""
        coeffs = self._piece_derivs(order)
        left = float(P.polyval(self.breakpoints[0], coeffs[0]))
        right = float(P.polyval(self.breakpoints[-1], coeffs[-1]))
        return left, right


def make_mollifier(family: str, width: float, dim: int = 1) -> Mollifier:
    """Build a mollifier by family name; see module docstring for names."""
    return Mollifier(family=family, width=width, dim=dim)
