"""Run every verification campaign and collect the reports.

Usage: python scripts/run_campaigns.py [--samples 100000] [--mc-states 100]
       [--mc-inputs 100000] [--seed 7] [--workers N] [--outdir results]
"""

import argparse
import json
import time
from pathlib import Path

from steerport.verify import THEOREMS, run_campaign


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--mc-states", type=int, default=100)
    ap.add_argument("--mc-inputs", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--only", nargs="*", choices=THEOREMS, default=list(THEOREMS))
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    summary = {}
    for theorem in args.only:
        n = args.mc_states if theorem.startswith("MC_") else args.samples
        t0 = time.perf_counter()
        rep = run_campaign(theorem, n, args.seed, workers=args.workers, mc_inputs=args.mc_inputs)
        elapsed = time.perf_counter() - t0
        (args.outdir / f"campaign_{theorem}.json").write_text(rep.to_json())
        summary[theorem] = {"violations": rep.violations, "samples": rep.samples, "worst_margin": rep.worst_margin}
        print(f"{theorem:9s} {rep.violations:6d} / {rep.samples:<7d} worst {rep.worst_margin:+.3e}  {elapsed:6.1f} s")
    (args.outdir / "campaign_summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
