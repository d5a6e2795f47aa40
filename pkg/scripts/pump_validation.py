"""Deviation of the analytic pump envelope from the exact ring response.

Prints a finesse x pulse-length table of the worst relative deviation, and the
exact/analytic peak ratio in the low-finesse corner.
"""

import argparse
import math

from ringsqueeze import default_config, derive_run
from ringsqueeze.pump import compare_with_oracle


def f_p_for_finesse(cfg, finesse):
    probe = derive_run(cfg, g0=1.0, tau_p=1.0, f_s=0.05, f_p=0.05)
    return 0.05 * finesse * (1 - probe.sigma_l_p) / math.pi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--finesse", type=float, nargs="*", default=[10, 20, 50, 100, 300])
    parser.add_argument("--tau", type=float, nargs="*", default=[1, 3, 6, 10, 16])
    args = parser.parse_args()
    cfg = default_config()
    print("tau_p  " + "  ".join(f"F={F:<6g}" for F in args.finesse))
    for tau in args.tau:
        row = []
        for F in args.finesse:
            cmp = compare_with_oracle(derive_run(cfg, g0=1.0, tau_p=tau, f_s=0.05, f_p=f_p_for_finesse(cfg, F)))
            row.append(f"{100 * cmp.max_rel_dev:7.2f}%")
        print(f"{tau:5g}  " + "  ".join(row))
    low = compare_with_oracle(derive_run(cfg, g0=1.0, tau_p=1.0, f_s=0.05, f_p=0.01))
    print(f"f_p=0.01, tau_p=1: finesse {low.finesse:.1f}, peak ratio exact/analytic {low.peak_ratio:.3f}")


if __name__ == "__main__":
    main()
