"""Convergence-study driver.

Executes a refinement sequence for one benchmark case, optionally
replicated for quasi-random collocation points, and collects relative
errors plus fitted convergence rates (least-squares slope of log error
against log mesh size). Results are written as a CSV table and a
human-readable rate summary; identical configurations produce identical
output bytes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import basis as basis_mod
from . import collocation as coll
from . import mesh as mesh_mod
from . import system as system_mod
from .mollifier import kernel_width, make_mollifier
from .problems import check_consistency, get_case

POISSON_BASE_BREAKS = (0.0, 0.15, 0.35, 0.50, 0.65, 0.85, 1.0)
BIHARMONIC_BASE_CELLS = 8
VORONOI_BASE_CELLS = 16
LLOYD_ITERATIONS = 10

_DEFAULT_SIGMA = {1: 0.10, 2: 0.15}


@dataclass(frozen=True)
class StudyConfig:
    case: str = "poisson1d"
    rp: int = 2
    mollifier: str = "bspline2"
    kappa: float = 1.0
    scheme: str = "uniform"  # uniform | gauss | quasirandom
    beta: int = 6
    gamma: int = 0  # 0 selects the per-case default / counting rule
    sigma: float = -1.0  # negative selects the per-dimension default
    replicates: int = 1
    seed: int = 2024
    levels: int = 4
    out: str | None = None


@dataclass
class StudyResult:
    config: StudyConfig
    rows: list
    rates: dict
    meta: dict = field(default_factory=dict)

    _COLUMNS = (
        "level",
        "n_c",
        "h",
        "n_b",
        "n_z",
        "e_L2",
        "e_H1",
        "e_energy",
        "mean",
        "std",
    )

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self._COLUMNS) + "\n")
        for row in self.rows:
            cells = []
            for key in self._COLUMNS:
                val = row.get(key)
                if val is None:
                    cells.append("")
                elif isinstance(val, float):
                    cells.append(f"{val:.12e}")
                else:
                    cells.append(str(val))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def rates_text(self) -> str:
        cfg = self.config
        lines = [
            f"case={cfg.case} rp={cfg.rp} mollifier={cfg.mollifier} "
            f"kappa={cfg.kappa} scheme={cfg.scheme} beta={cfg.beta} "
            f"gamma={cfg.gamma} sigma={self.meta['sigma']} "
            f"replicates={cfg.replicates} seed={cfg.seed} rng=philox4x64",
            f"levels={cfg.levels} n_g per level: "
            + " ".join(str(r["n_g"]) for r in self.rows),
        ]
        for name, value in sorted(self.rates.items()):
            lines.append(f"{name} rate: {value:.4f}")
        return "\n".join(lines) + "\n"

    def write(self, out_dir):
        import os

        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "study.csv"), "w") as fh:
            fh.write(self.csv_text())
        with open(os.path.join(out_dir, "rates.txt"), "w") as fh:
            fh.write(self.rates_text())


def fit_rate(h_list, e_list) -> float:
    """Least-squares slope of log(e) against log(h)."""
    h = np.asarray(h_list, dtype=float)
    e = np.asarray(e_list, dtype=float)
    if len(h) < 2 or len(h) != len(e):
        raise ValueError("rate fit needs at least two (h, e) pairs")
    if np.any(h <= 0) or np.any(e <= 0):
        raise ValueError("rate fit needs positive sizes and errors")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


# ---------------------------------------------------------------------------
# per-case construction


def _mesh_for(config: StudyConfig, level: int) -> mesh_mod.Mesh:
    case = config.case
    if case == "poisson1d":
        m = mesh_mod.intervals_1d(POISSON_BASE_BREAKS)
        for _ in range(level):
            m = mesh_mod.bisect(m)
        return m
    if case == "biharmonic1d":
        n = BIHARMONIC_BASE_CELLS * 2**level
        return mesh_mod.intervals_1d(np.linspace(0.0, 1.0, n + 1))
    if case in ("elasticity2d", "plate_bending"):
        n = VORONOI_BASE_CELLS * 4**level
        box = mesh_mod.BoxDomain([0.0, 0.0], [1.0, 1.0])
        seeds = mesh_mod.quasi_uniform_seeds(
            n, box, seed=config.seed, lloyd_iters=LLOYD_ITERATIONS
        )
        return mesh_mod.voronoi_2d(seeds, box)
    if case == "plate_hole":
        return mesh_mod.quarter_plate_hole_mesh(level)
    raise ValueError(f"unknown case '{case}'")


def _default_gamma(config: StudyConfig, padded, n_b: int) -> int:
    if config.gamma > 0:
        return config.gamma
    if config.case == "plate_bending":
        return 7
    if config.case == "plate_hole":
        return 3 if config.rp == 1 else 4
    if padded.dim == 1:
        return config.beta
    # smallest order satisfying the counting rule, floored so each cell
    # keeps at least a degree-(rp+1) point set
    return max(coll.choose_gauss_order(padded, n_b), config.rp + 1)


def _interior_points(config, problem, padded, n_b, level, replicate):
    domain = problem.domain
    scheme = config.scheme
    if scheme == "gauss":
        gamma = _default_gamma(config, padded, n_b)
        pts = coll.gauss_points(padded, gamma)
    else:
        box = domain.box if hasattr(domain, "box") else domain
        n_req = config.beta * padded.n_interior
        if scheme == "uniform":
            pts = coll.uniform_points(box, n_req)
        elif scheme == "quasirandom":
            sigma = config.sigma if config.sigma >= 0 else _DEFAULT_SIGMA[padded.dim]
            rng = coll.make_rng(config.seed, level, replicate)
            pts = coll.quasirandom_points(box, n_req, sigma, rng)
        else:
            raise ValueError(f"unknown scheme '{config.scheme}'")
    return coll.filter_signed_distance(pts, domain)


def _collocation_for(config, problem, padded, n_b, level, replicate=0):
    interior = _interior_points(config, problem, padded, n_b, level, replicate)
    if padded.dim == 1:
        bpts, normals = coll.boundary_points(problem.domain, config.scheme, 2)
    else:
        n_edge = int(np.ceil(np.sqrt(len(interior))))
        arc_segments = 2**level
        bpts, normals = coll.boundary_points(
            problem.domain, config.scheme, n_edge, arc_segments=arc_segments
        )
    cset = coll.CollocationSet(
        interior=interior,
        boundary=bpts,
        normals=normals,
        bc_kinds=problem.bc_kinds,
        meta={"scheme": config.scheme, "seed": config.seed, "level": level},
    )
    if cset.n_z < n_b:
        raise ValueError(
            f"underdetermined at level {level}: n_z={cset.n_z} < n_b={n_b}"
        )
    return cset


def _solve_once(problem, bset, cset):
    sys = system_mod.assemble(problem, bset, cset)
    sol = system_mod.solve(sys, basis=bset, n_components=problem.n_components)
    pts = cset.all_points()
    e_l2 = system_mod.relative_error(problem.exact, sol, pts)
    e_h1 = system_mod.relative_error(problem.exact_grad, sol, pts, deriv="grad")
    e_en = None
    if problem.name == "plate_hole":
        e_en = system_mod.energy_error(problem, sol, pts)
    return e_l2, e_h1, e_en


def run_study(config: StudyConfig) -> StudyResult:
    """Run the configured refinement sequence and fit convergence rates."""
    if config.levels < 2:
        raise ValueError("rate fitting needs at least 2 refinement levels")
    problem = get_case(config.case)
    check_consistency(problem)
    sigma = config.sigma if config.sigma >= 0 else _DEFAULT_SIGMA[problem.dim]
    rows = []
    for level in range(config.levels):
        mesh = _mesh_for(config, level)
        h_m = mesh_mod.mollifier_width(mesh, config.kappa)
        padded = mesh_mod.pad_ghost(mesh, h_m)
        mol = make_mollifier(
            config.mollifier, kernel_width(config.mollifier, h_m), dim=mesh.dim
        )
        bset = basis_mod.build(padded, mol, config.rp)
        n_b = bset.n_b

        if config.scheme == "quasirandom" and config.replicates > 1:
            l2s, h1s = [], []
            for rep in range(config.replicates):
                cset = _collocation_for(config, problem, padded, n_b, level, rep)
                e_l2, e_h1, _ = _solve_once(problem, bset, cset)
                l2s.append(e_l2)
                h1s.append(e_h1)
            row = {
                "e_L2": float(np.mean(l2s)),
                "e_H1": float(np.mean(h1s)),
                "e_energy": None,
                "mean": float(np.mean(l2s)),
                "std": float(np.std(l2s)),
            }
            n_z = cset.n_z
        else:
            cset = _collocation_for(config, problem, padded, n_b, level)
            e_l2, e_h1, e_en = _solve_once(problem, bset, cset)
            row = {"e_L2": e_l2, "e_H1": e_h1, "e_energy": e_en,
                   "mean": None, "std": None}
            n_z = cset.n_z

        row.update(
            level=level,
            n_c=mesh.n_interior,
            h=mesh.h_avg,
            n_b=n_b,
            n_z=n_z,
            n_g=padded.n_ghost,
        )
        rows.append(row)

    hs = [r["h"] for r in rows]
    rates = {
        "L2": fit_rate(hs, [r["e_L2"] for r in rows]),
        "H1": fit_rate(hs, [r["e_H1"] for r in rows]),
    }
    if rows[0]["e_energy"] is not None:
        rates["energy"] = fit_rate(hs, [r["e_energy"] for r in rows])
    result = StudyResult(
        config=config, rows=rows, rates=rates, meta={"sigma": sigma}
    )
    if config.out:
        result.write(config.out)
    return result


# ---------------------------------------------------------------------------
# flat key=value config files


def parse_config_file(path) -> StudyConfig:
    """Read a flat key=value study configuration."""
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return config_from_strings(values)


_KEY_ALIASES = {"sigma_fraction": "sigma", "rng_seed": "seed"}


def config_from_strings(values: dict, base: StudyConfig | None = None) -> StudyConfig:
    cfg = base or StudyConfig()
    fields = {
        "case": str,
        "rp": int,
        "mollifier": str,
        "kappa": float,
        "scheme": str,
        "beta": int,
        "gamma": int,
        "sigma": float,
        "replicates": int,
        "seed": int,
        "levels": int,
        "out": str,
    }
    updates = {}
    for key, val in values.items():
        key = _KEY_ALIASES.get(key, key)
        if key not in fields:
            raise ValueError(f"unknown config key '{key}'")
        updates[key] = fields[key](val)
    return replace(cfg, **updates)
