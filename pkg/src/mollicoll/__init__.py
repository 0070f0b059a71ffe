"""Point collocation with mollified piecewise-polynomial basis functions.

Smooth basis functions are built by convolving cell-wise monomials on
polytopic meshes with compact spline mollifiers; Poisson, linear
elasticity and biharmonic problems are then solved in strong form through
overdetermined point collocation and least squares.
"""

from .basis import BasisSet, build, eval_at, eval_rows, support_of
from .collocation import (
    CollocationSet,
    boundary_points,
    gauss_points,
    quasirandom_points,
    uniform_points,
)
from .geometry import (
    AxisBox,
    ConvexPolytope,
    QuadratureRule,
    area_centroid,
    clip_to_box,
    convex_hull,
    fan_triangulate,
    gauss_rule,
    minkowski_with_box,
)
from .mesh import (
    BoxDomain,
    BoxMinusDiskDomain,
    Mesh,
    bisect,
    intervals_1d,
    mollifier_width,
    pad_ghost,
    quarter_plate_hole_mesh,
    voronoi_2d,
)
from .mollifier import Mollifier, make_mollifier
from .problems import get_case
from .study import StudyConfig, StudyResult, fit_rate, run_study
from .system import (
    CollocationSystem,
    Solution,
    assemble,
    energy_error,
    evaluate_field,
    relative_error,
    solve,
)

__all__ = [
    "AxisBox",
    "BasisSet",
    "BoxDomain",
    "BoxMinusDiskDomain",
    "CollocationSet",
    "CollocationSystem",
    "ConvexPolytope",
    "Mesh",
    "Mollifier",
    "QuadratureRule",
    "Solution",
    "StudyConfig",
    "StudyResult",
    "area_centroid",
    "assemble",
    "bisect",
    "boundary_points",
    "build",
    "clip_to_box",
    "convex_hull",
    "energy_error",
    "eval_at",
    "eval_rows",
    "evaluate_field",
    "fan_triangulate",
    "fit_rate",
    "gauss_points",
    "gauss_rule",
    "get_case",
    "intervals_1d",
    "make_mollifier",
    "minkowski_with_box",
    "mollifier_width",
    "pad_ghost",
    "quarter_plate_hole_mesh",
    "quasirandom_points",
    "relative_error",
    "run_study",
    "solve",
    "support_of",
    "uniform_points",
    "voronoi_2d",
]

__version__ = "0.1.0"
