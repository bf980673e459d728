"""Write the MEMS bound curves and the saturating-family table as CSV.

Usage: python scripts/sweep_figure.py [--steps 1001] [--outdir results]
"""

import argparse
from pathlib import Path

import numpy as np

from steerport.verify import steerability_threshold, sweep_mems, sweep_saturating_family


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1001)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    p = np.linspace(0.0, 1.0, args.steps)
    for rank in (2, 3):
        table = sweep_mems(rank, p)
        path = args.outdir / f"mems{rank}.csv"
        path.write_text(table.to_csv())
        steer = table.columns["steerable"]
        gap = table.columns["concurrence_upper"][steer] - table.columns["steering_bound"][steer]
        print(
            f"mems rank {rank}: S > 1 for p > {steerability_threshold(rank):.9f}; "
            f"concurrence bound minus steering bound on that range: min {gap.min():.3e}, max {gap.max():.3e} -> {path}"
        )

    q = np.linspace(0.0, np.sqrt(0.5), args.steps)[1:-1]
    path = args.outdir / "saturating.csv"
    path.write_text(sweep_saturating_family(q).to_csv())
    print(f"saturating family, {len(q)} points -> {path}")


if __name__ == "__main__":
    main()
