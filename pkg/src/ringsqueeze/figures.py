"""Compiled-in parameter sets for the published figure family.

``fig2`` and ``fig3`` are time-domain curve families; ``fig4`` to ``fig9``
are contour grids, paired so that one sweep serves both the squeezing and
the antisqueezing panel.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .dynamics import IntegratorOptions
from .errors import DomainError
from .params import PhysicalConfig, derive_run
from .sweep import Axis, SweepSpec, provenance, run_sweep, simulate

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9")


@dataclass(frozen=True)
class CurveFamily:
    """One knob stepped through a few values, the others held fixed."""

    knob: str
    values: tuple
    fixed: dict


CURVES = {
    "fig2": CurveFamily("tau_p", (1.0, 3.0, 5.0, 7.0, 9.0, 11.0), {"g0": 1.0, "f_s": 0.045, "f_p": 0.03}),
    "fig3": CurveFamily("f_p", (0.01, 0.02, 0.03, 0.04, 0.05, 0.06), {"g0": 1.0, "tau_p": 3.0, "f_s": 0.045}),
}

# axis ranges are chosen to bracket the optimum regions discussed with each panel
_GRIDS = {
    "fig4": (("f_s", 0.01, 0.09), ("tau_p", 1.0, 16.0), {"g0": 0.7, "f_p": 0.03}),
    "fig6": (("f_p", 0.01, 0.06), ("tau_p", 1.0, 12.0), {"g0": 0.7, "f_s": 0.05}),
    "fig8": (("g0", 0.5, 2.5), ("tau_p", 1.0, 8.0), {"f_s": 0.05, "f_p": 0.01}),
}
_GRID_PAIR = {"fig4": "fig4", "fig5": "fig4", "fig6": "fig6", "fig7": "fig6", "fig8": "fig8", "fig9": "fig8"}
_GRID_QUANTITY = {"fig4": "squeezing_db", "fig5": "antisqueezing_db", "fig6": "squeezing_db",
                  "fig7": "antisqueezing_db", "fig8": "squeezing_db", "fig9": "antisqueezing_db"}


def check_figure(figure_id: str) -> None:
    if figure_id not in FIGURE_IDS:
        raise DomainError("figure_id", figure_id, ", ".join(FIGURE_IDS))


def grid_spec(figure_id: str, count: int = 41) -> SweepSpec:
    check_figure(figure_id)
    if figure_id in CURVES:
        raise DomainError("figure_id", figure_id, "a contour figure (fig4 to fig9)")
    (k1, lo1, hi1), (k2, lo2, hi2), fixed = _GRIDS[_GRID_PAIR[figure_id]]
    return SweepSpec(Axis(k1, lo1, hi1, count), Axis(k2, lo2, hi2, count), dict(fixed), target_squeezing_db=10.0)


def headline_quantity(figure_id: str) -> Optional[str]:
    """The summary field plotted by a contour figure; None for curve families."""
    return _GRID_QUANTITY.get(figure_id)


def replicate_curves(figure_id: str, cfg: PhysicalConfig, out_dir, opts: IntegratorOptions = IntegratorOptions(),
                     stride: int = 5) -> list[Path]:
    """Trajectory family as one long-format CSV plus a JSON list of summaries.

    ``stride`` thins the stored trajectory samples.
    """
    family = CURVES[figure_id]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = provenance(cfg, opts, {"figure": figure_id, "family": {"knob": family.knob,
                                                                  "values": list(family.values),
                                                                  "fixed": family.fixed}})
    csv_path = out_dir / f"{figure_id}_curves.csv"
    summaries = []
    with open(csv_path, "w", newline="") as fh:
        fh.write(f"# config_hash={prov['config_hash']}\n# figure={figure_id}\n# curve_knob={family.knob}\n")
        writer = csv.writer(fh)
        writer.writerow((family.knob, "t", "g", "r", "n_th", "dx2", "dy2"))
        for value in family.values:
            run = derive_run(cfg, **{**family.fixed, family.knob: value})
            traj, _, summary = simulate(run, opts)
            summaries.append({family.knob: value, **summary.as_dict(),
                              "r_max": float(traj.r.max()), "n_th_max": float(traj.n_th.max())})
            for i in range(0, traj.t.size, stride):
                writer.writerow([f"{value:.12g}"] + [f"{getattr(traj, c)[i]:.12g}"
                                                     for c in ("t", "g", "r", "n_th", "dx2", "dy2")])
    json_path = out_dir / f"{figure_id}_summary.json"
    json_path.write_text(json.dumps({"figure": figure_id, "provenance": prov, "curves": summaries}, indent=2) + "\n")
    return [csv_path, json_path]


def replicate(figure_id: str, cfg: PhysicalConfig, out_dir, opts: IntegratorOptions = IntegratorOptions(),
              count: int = 41, workers: int = 1) -> list[Path]:
    """Run a figure's parameter set and write its data files."""
    check_figure(figure_id)
    if figure_id in CURVES:
        return replicate_curves(figure_id, cfg, out_dir, opts)
    grid = run_sweep(grid_spec(figure_id, count), cfg, opts, workers)
    return grid.write(out_dir, figure_id)
