"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 infeasible optimisation target.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import figures
from .config import RunConfig, load_config, sweep_spec
from .errors import AliasingError, ConfigError, DomainError, InfeasibleError, IntegrationError, WindowError
from .dynamics import IntegratorOptions
from .params import default_config, derive_run, pump_strength_to_photons, ring_pump_photons
from .pump import PumpEnvelope, compare_with_oracle
from .sweep import constrained_optimum, level_crossings, provenance, run_sweep, simulate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4
SIGN_NOTE = "squeezing_db is positive-good (dB below shot noise); antisqueezing_db is dB above shot noise"


def _hash(cfg: RunConfig, extra: dict | None = None) -> str:
    return provenance(cfg.physical, cfg.integrator, {"run": cfg.provenance(), **(extra or {})})["config_hash"]


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _print_table(rows: list[tuple[str, str]]) -> None:
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")


def _out_dir(args, cfg: RunConfig | None) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    return Path(cfg.output.directory if cfg else "out")


def _formats(args, cfg: RunConfig | None) -> tuple:
    if args.format:
        return tuple(args.format.split(","))
    return cfg.output.formats if cfg else ("csv", "json")


def _summary_payload(cfg: RunConfig, summary, config_hash: str, env=None) -> dict:
    payload = {"convention": SIGN_NOTE, "config_hash": config_hash, "knobs": dict(cfg.knobs)}
    payload.update(summary.as_dict())
    g0 = cfg.knobs["g0"]
    if g0 > 0:
        run = derive_run(cfg.physical, theta=cfg.theta, loss_form=cfg.loss_form, **cfg.knobs)
        _, g_peak = (env or PumpEnvelope.from_run(run)).peak()
        payload["pump_photons_channel"] = pump_strength_to_photons(cfg.physical, g0)
        payload["pump_photons_ring_peak"] = ring_pump_photons(cfg.physical, run, g_peak)
    else:
        payload["pump_photons_channel"] = 0.0
        payload["pump_photons_ring_peak"] = 0.0
    return payload


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    formats = _formats(args, cfg)
    run = derive_run(cfg.physical, theta=cfg.theta, loss_form=cfg.loss_form, **cfg.knobs)
    omega = np.linspace(0.0, cfg.output.omega_max, cfg.output.omega_points)
    traj, _, summary = simulate(run, cfg.integrator, omega)
    h = _hash(cfg)
    header = {"config_hash": h, "g0": run.g0, "tau_p": run.tau_p, "f_s": run.f_s, "f_p": run.f_p}
    if "csv" in formats:
        if traj is not None:
            traj.to_csv(out / "trajectory.csv", header)
        summary.spectrum.to_csv(out / "spectrum.csv", header)
    if "json" in formats:
        _write_json(out / "summary.json", _summary_payload(cfg, summary, h))
    _print_table([
        ("squeezing_db", f"{summary.squeezing_db:.4f}"),
        ("antisqueezing_db", f"{summary.antisqueezing_db:.4f}"),
        ("signal_photons", f"{summary.n_generated_total:.4g}"),
        ("config_hash", h),
    ])
    print(f"# {SIGN_NOTE}")
    return EXIT_OK


def cmd_replicate(args) -> int:
    cfg = load_config(args.config) if args.config else None
    physical = cfg.physical if cfg else default_config()
    opts = cfg.integrator if cfg else IntegratorOptions()
    out = _out_dir(args, cfg)
    paths = figures.replicate(args.figure, physical, out, opts, count=args.count, workers=args.threads)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    spec = sweep_spec(cfg)
    grid = run_sweep(spec, cfg.physical, cfg.integrator, workers=args.threads)
    out = _out_dir(args, cfg)
    paths = grid.write(out, "sweep")
    if spec.target_squeezing_db is not None:
        points = level_crossings(grid, spec.target_squeezing_db)
        contour = out / "sweep_target_contour.json"
        _write_json(contour, {"config_hash": grid.provenance["config_hash"], "level_db": spec.target_squeezing_db,
                              "points": points})
        paths.append(contour)
    for p in paths:
        print(p)
    if grid.failed:
        print(f"{len(grid.failed)} cell(s) failed; see sweep.json", file=sys.stderr)
    best_db, best_knobs = grid.best_squeezing()
    print(f"best squeezing_db {best_db:.4f} at {best_knobs}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    opt = cfg.optimize
    result = constrained_optimum(cfg.physical, opt.target_db, opt.bounds, opt.resolution, cfg.integrator)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    h = _hash(cfg, {"optimize": asdict(opt)})
    found = replace(cfg, knobs=dict(result.knobs))
    payload = {"target_db": opt.target_db, "evaluations": result.evaluations, "coarse_knobs": result.coarse_knobs,
               **_summary_payload(found, result.summary, h)}
    _write_json(out / "optimum.json", payload)
    _print_table([(k, f"{v:g}") for k, v in result.knobs.items()] + [
        ("squeezing_db", f"{result.summary.squeezing_db:.4f}"),
        ("antisqueezing_db", f"{result.summary.antisqueezing_db:.4f}"),
    ])
    print(f"# {SIGN_NOTE}")
    return EXIT_OK


def cmd_validate_pump(args) -> int:
    cfg = load_config(args.config)
    run = derive_run(cfg.physical, theta=cfg.theta, loss_form=cfg.loss_form, **cfg.knobs)
    cmp = compare_with_oracle(run)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    h = _hash(cfg)
    with open(out / "pump_comparison.csv", "w", newline="") as fh:
        fh.write(f"# config_hash={h}\n# finesse={cmp.finesse:.6g}\n# shift={cmp.shift:.6g}\n")
        writer = csv.writer(fh)
        writer.writerow(("t", "g_analytic", "g_exact"))
        for row in zip(cmp.t, cmp.g_analytic, cmp.g_exact):
            writer.writerow([f"{v:.12g}" for v in row])
    verdict = cmp.passes()
    if verdict is None:
        reason = "near-zero fields" if cmp.degenerate else f"finesse {cmp.finesse:.1f} < 20"
        print(f"SKIP  comparison not applicable ({reason})")
    else:
        print(f"{'PASS' if verdict else 'FAIL'}  max deviation {100 * cmp.max_rel_dev:.2f}% (bound 10%), "
              f"finesse {cmp.finesse:.1f}")
    if not cmp.degenerate:
        print(f"peak ratio exact/analytic {cmp.peak_ratio:.3f}; best alignment shift {cmp.shift:.3f} T_R")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringsqueeze", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help="output directory (overrides output.directory)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for grid evaluation")
    common.add_argument("--format", help="comma-separated subset of csv,json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="single run: trajectory, spectrum, summary")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replicate", parents=[common], help="data for one published figure")
    p.add_argument("figure", choices=figures.FIGURE_IDS)
    p.add_argument("--config", help="optional; only physical and integrator are used")
    p.add_argument("--count", type=int, default=41, help="grid points per axis for contour figures")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("sweep", parents=[common], help="2-D grid from the config's sweep section")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="minimum antisqueezing at a squeezing target")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("validate-pump", parents=[common], help="analytic pump envelope vs exact response")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate_pump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format and any(f not in ("csv", "json") for f in args.format.split(",")):
        parser.error("--format must be a comma-separated subset of csv,json")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (IntegrationError, WindowError, AliasingError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
