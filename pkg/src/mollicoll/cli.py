"""Command-line convergence-study runner.

Reads an optional key=value config file, applies command-line overrides,
executes the refinement study and writes "study.csv" plus "rates.txt" to
the output directory.
"""

from __future__ import annotations

import argparse
import sys

from .study import StudyConfig, config_from_strings, parse_config_file, run_study


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mollicoll",
        description="Convergence studies for mollified-basis point collocation",
    )
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--case", help="poisson1d | biharmonic1d | elasticity2d | "
                                  "plate_bending | plate_hole")
    p.add_argument("--rp", type=int, help="local polynomial order")
    p.add_argument("--mollifier", help="bspline2 | bspline3 | hexic | octic | decic")
    p.add_argument("--kappa", type=float, help="mollifier width factor")
    p.add_argument("--scheme", help="uniform | gauss | quasirandom")
    p.add_argument("--beta", type=int, help="interior points per cell factor")
    p.add_argument("--gamma", type=int, help="gauss order (0 = per-case default)")
    p.add_argument("--sigma", type=float, help="quasi-random perturbation fraction")
    p.add_argument("--replicates", type=int, help="quasi-random replicate count")
    p.add_argument("--seed", type=int, help="rng seed (counter-based Philox)")
    p.add_argument("--levels", type=int, help="number of refinement levels")
    p.add_argument("--out", help="output directory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config_file(args.config) if args.config else StudyConfig()
        overrides = {
            k: str(v)
            for k, v in vars(args).items()
            if k != "config" and v is not None
        }
        cfg = config_from_strings(overrides, base=cfg)
        if cfg.out is None:
            cfg = config_from_strings({"out": "."}, base=cfg)
        result = run_study(cfg)
    except Exception as exc:  # surface module errors with context
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(result.rates_text())
    print(f"wrote {cfg.out}/study.csv and {cfg.out}/rates.txt")
    return 0


if __name__ == "__main__":
    sys.exit(main())
