"""Regenerate the data behind every figure panel.

    python3 scripts/replicate_figures.py --out-dir results/figures --count 41
"""

import argparse
import time

from ringsqueeze import default_config
from ringsqueeze.figures import FIGURE_IDS, replicate

# fig5, fig7 and fig9 share the sweeps of fig4, fig6 and fig8
UNIQUE = ("fig2", "fig3", "fig4", "fig6", "fig8")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results/figures")
    parser.add_argument("--count", type=int, default=41, help="grid points per contour axis")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=FIGURE_IDS)
    args = parser.parse_args()
    cfg = default_config()
    for fig in args.only or UNIQUE:
        start = time.perf_counter()
        paths = replicate(fig, cfg, args.out_dir, count=args.count, workers=args.threads)
        print(f"{fig}: {len(paths)} files in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
