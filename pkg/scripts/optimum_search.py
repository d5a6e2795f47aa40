"""Lowest antisqueezing reachable at a squeezing target, over the full knob box.

    python3 scripts/optimum_search.py --target 10
    python3 scripts/optimum_search.py --target 10 --halved   # refinement check
"""

import argparse
import json
import time

from ringsqueeze import default_config
from ringsqueeze.sweep import Resolution, constrained_optimum


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--target", type=float, default=10.0, help="squeezing target in dB")
    parser.add_argument("--halved", action="store_true", help="halve every knob resolution")
    parser.add_argument("--json", help="write the result here")
    args = parser.parse_args()
    res = Resolution().halved() if args.halved else Resolution()
    start = time.perf_counter()
    out = constrained_optimum(default_config(), args.target, resolution=res)
    elapsed = time.perf_counter() - start
    report = {
        "target_db": args.target,
        "knobs": out.knobs,
        "coarse_knobs": out.coarse_knobs,
        "squeezing_db": out.summary.squeezing_db,
        "antisqueezing_db": out.summary.antisqueezing_db,
        "signal_photons": out.summary.n_generated_total,
        "evaluations": out.evaluations,
        "seconds": round(elapsed, 1),
    }
    print(json.dumps(report, indent=2))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)


if __name__ == "__main__":
    main()
