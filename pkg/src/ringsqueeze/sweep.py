"""Parameter grids and the constrained search for minimal antisqueezing."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import IntegratorOptions, default_start, integrate, locate_events
from .errors import DomainError, InfeasibleError, IntegrationError, WindowError
from .params import KNOBS, DimensionlessRun, PhysicalConfig, derive_run
from .pump import PumpEnvelope
from .spectrum import SqueezeSummary, summarize, vacuum_summary

KNOB_DOMAINS = {
    "g0": (0.0, math.inf),
    "tau_p": (0.0, math.inf),
    "f_s": (0.0, 1.0),
    "f_p": (0.0, 1.0),
}


def simulate(run: DimensionlessRun, opts: IntegratorOptions = IntegratorOptions(), omega=None):
    """Full pipeline for one run: ``(trajectory, events, summary)``.

    An unpumped ring has no squeezing events; the trajectory is then None
    and the summary is exact shot noise.
    """
    if run.g0 == 0:
        return None, None, vacuum_summary(default_start(run), omega)
    env = PumpEnvelope.from_run(run)
    traj = integrate(run, env, opts)
    events = locate_events(traj)
    return traj, events, summarize(run, traj, events, omega)


def evaluate_knobs(cfg: PhysicalConfig, knobs: dict, opts: IntegratorOptions = IntegratorOptions(),
                   theta: float = 0.0, loss_form: str = "linear") -> SqueezeSummary:
    run = derive_run(cfg, theta=theta, loss_form=loss_form, **knobs)
    return simulate(run, opts)[2]


@dataclass(frozen=True)
class CellResult:
    knobs: dict
    summary: Optional[SqueezeSummary]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.summary is not None


def _evaluate_cell(args) -> CellResult:
    cfg, knobs, opts, theta, loss_form = args
    try:
        return CellResult(knobs, evaluate_knobs(cfg, knobs, opts, theta, loss_form))
    except (DomainError, IntegrationError, WindowError, FloatingPointError, OverflowError) as exc:
        return CellResult(knobs, None, f"{type(exc).__name__}: {exc}")


def parallel_map(fn, items, workers: int = 1) -> list:
    """Ordered map; results come back in input order whatever ``workers`` is."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: dict
    target_squeezing_db: Optional[float] = None
    theta: float = 0.0
    loss_form: str = "linear"
    constrained: bool = False

    def __post_init__(self):
        names = (self.axis1.name, self.axis2.name)
        for ax in (self.axis1, self.axis2):
            if ax.name not in KNOBS:
                raise DomainError("axis", ax.name, str(KNOBS))
            if ax.count < 2:
                raise DomainError(f"{ax.name}.count", ax.count, "[2, inf)")
            lo, hi = KNOB_DOMAINS[ax.name]
            if not (lo <= ax.lo <= ax.hi and ax.hi <= hi):
                raise DomainError(ax.name, (ax.lo, ax.hi), f"[{lo}, {hi}]")
        if names[0] == names[1]:
            raise DomainError("axis2", names[1], "a knob distinct from axis1")
        missing = set(KNOBS) - set(names) - set(self.fixed)
        if missing:
            raise DomainError("fixed", sorted(missing), "values for every knob not on an axis")
        if self.constrained:
            knob_lo = {"tau_p": 1.0, "f_p": 0.01}
            for ax in (self.axis1, self.axis2):
                if ax.name in knob_lo and ax.lo < knob_lo[ax.name]:
                    raise DomainError(ax.name, ax.lo, f"[{knob_lo[ax.name]}, inf) in constrained mode")

    def cell_knobs(self) -> list[dict]:
        cells = []
        for v1 in self.axis1.values:
            for v2 in self.axis2.values:
                knobs = {k: float(v) for k, v in self.fixed.items() if k in KNOBS}
                knobs[self.axis1.name] = float(v1)
                knobs[self.axis2.name] = float(v2)
                cells.append(knobs)
        return cells


def provenance(cfg: PhysicalConfig, opts: IntegratorOptions, extra: dict | None = None) -> dict:
    """Canonical description of a computation plus its short sha256 hash."""
    payload = {"physical": asdict(cfg), "integrator": asdict(opts)}
    if extra:
        payload.update(extra)
    text = json.dumps(payload, sort_keys=True, default=repr)
    return {"config_hash": hashlib.sha256(text.encode()).hexdigest()[:16], **payload}


@dataclass(frozen=True)
class SweepGrid:
    """Row-major ``(count1, count2)`` matrix of cell results."""

    spec: SweepSpec
    cells: list
    provenance: dict = field(default_factory=dict)

    def matrix(self, attr: str) -> np.ndarray:
        out = np.full((self.spec.axis1.count, self.spec.axis2.count), np.nan)
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                if cell.ok:
                    out[i, j] = getattr(cell.summary, attr)
        return out

    @property
    def failed(self) -> list[tuple[int, int, str]]:
        return [(i, j, c.error) for i, row in enumerate(self.cells) for j, c in enumerate(row) if not c.ok]

    def best_squeezing(self) -> tuple[float, dict]:
        sq = self.matrix("squeezing_db")
        i, j = np.unravel_index(np.nanargmax(sq), sq.shape)
        return float(sq[i, j]), dict(self.cells[i][j].knobs)

    def write_matrix(self, path, attr: str) -> None:
        values = self.matrix(attr)
        with open(path, "w", newline="") as fh:
            fh.write(f"# config_hash={self.provenance.get('config_hash', '')}\n")
            fh.write(f"# quantity={attr}\n")
            fh.write(f"# rows={self.spec.axis1.name} cols={self.spec.axis2.name}\n")
            writer = csv.writer(fh)
            writer.writerow([f"{self.spec.axis1.name}\\{self.spec.axis2.name}"]
                            + [f"{v:.12g}" for v in self.spec.axis2.values])
            for v1, row in zip(self.spec.axis1.values, values):
                writer.writerow([f"{v1:.12g}"] + [f"{v:.12g}" for v in row])

    def write(self, out_dir, stem: str) -> list[Path]:
        """Contour data: one CSV matrix per quantity and a JSON sidecar."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for attr in ("squeezing_db", "antisqueezing_db", "s_min0", "s_max0"):
            p = out_dir / f"{stem}_{attr}.csv"
            self.write_matrix(p, attr)
            paths.append(p)
        sidecar = {
            "axes": {
                "rows": {"knob": self.spec.axis1.name, "values": list(map(float, self.spec.axis1.values))},
                "cols": {"knob": self.spec.axis2.name, "values": list(map(float, self.spec.axis2.values))},
            },
            "fixed": self.spec.fixed,
            "target_squeezing_db": self.spec.target_squeezing_db,
            "failed_cells": [{"row": i, "col": j, "error": e} for i, j, e in self.failed],
            "provenance": self.provenance,
        }
        p = out_dir / f"{stem}.json"
        p.write_text(json.dumps(sidecar, indent=2, default=repr) + "\n")
        paths.append(p)
        return paths


def run_sweep(spec: SweepSpec, cfg: PhysicalConfig, opts: IntegratorOptions = IntegratorOptions(),
              workers: int = 1) -> SweepGrid:
    """Evaluate every cell; failures are recorded per cell, never raised."""
    knobs = spec.cell_knobs()
    jobs = [(cfg, k, opts, spec.theta, spec.loss_form) for k in knobs]
    flat = parallel_map(_evaluate_cell, jobs, workers)
    n2 = spec.axis2.count
    cells = [flat[i:i + n2] for i in range(0, len(flat), n2)]
    prov = provenance(cfg, opts, {"sweep": {"axis1": asdict(spec.axis1), "axis2": asdict(spec.axis2),
                                            "fixed": spec.fixed, "theta": spec.theta,
                                            "loss_form": spec.loss_form}})
    return SweepGrid(spec, cells, prov)


def level_crossings(grid: SweepGrid, level: float) -> list[dict]:
    """Points where ``squeezing_db`` crosses ``level``, by linear interpolation.

    Crossings are searched along both axes; ``antisqueezing_db`` is
    interpolated at the same fraction.
    """
    sq = grid.matrix("squeezing_db")
    asq = grid.matrix("antisqueezing_db")
    v1, v2 = grid.spec.axis1.values, grid.spec.axis2.values
    points = []
    for i in range(sq.shape[0]):
        for j in range(sq.shape[1]):
            for di, dj in ((1, 0), (0, 1)):
                k, m = i + di, j + dj
                if k >= sq.shape[0] or m >= sq.shape[1]:
                    continue
                a, b = sq[i, j] - level, sq[k, m] - level
                if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0 or a == b:
                    continue
                frac = a / (a - b)
                points.append({
                    grid.spec.axis1.name: float(v1[i] + frac * (v1[k] - v1[i])),
                    grid.spec.axis2.name: float(v2[j] + frac * (v2[m] - v2[j])),
                    "antisqueezing_db": float(asq[i, j] + frac * (asq[k, m] - asq[i, j])),
                })
    return points


def min_g0_for_target(cfg: PhysicalConfig, tau_p: float, f_s: float, f_p: float, target_db: float = 10.0,
                      g_lo: float = 0.1, g_hi: float = 3.0, tol: float = 1e-4,
                      opts: IntegratorOptions = IntegratorOptions()) -> tuple[float, SqueezeSummary]:
    """Smallest pump strength reaching ``target_db`` of squeezing.

    Squeezing grows monotonically with ``g0`` (a larger gain lowers the
    squeezed variance at every instant), so bisection is exact.
    """
    def sq(g0):
        return evaluate_knobs(cfg, {"g0": g0, "tau_p": tau_p, "f_s": f_s, "f_p": f_p}, opts)

    top = sq(g_hi)
    if top.squeezing_db < target_db:
        raise InfeasibleError(target_db, top.squeezing_db, {"g0": g_hi, "tau_p": tau_p, "f_s": f_s, "f_p": f_p})
    lo, hi, hi_summary = g_lo, g_hi, top
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s = sq(mid)
        if s.squeezing_db >= target_db:
            hi, hi_summary = mid, s
        else:
            lo = mid
    return hi, hi_summary


@dataclass(frozen=True)
class SearchBounds:
    g0: tuple = (0.1, 3.0)
    tau_p: tuple = (1.0, 16.0)
    f_s: tuple = (0.01, 0.5)
    f_p: tuple = (0.01, 0.1)


@dataclass(frozen=True)
class Resolution:
    g0: float = 0.01
    tau_p: float = 0.05
    f_s: float = 0.005
    f_p: float = 0.0025

    def halved(self) -> "Resolution":
        return Resolution(self.g0 / 2, self.tau_p / 2, self.f_s / 2, self.f_p / 2)


@dataclass(frozen=True)
class OptimumResult:
    knobs: dict
    summary: SqueezeSummary
    evaluations: int
    coarse_knobs: dict


class _Lattice:
    """Knob values ``lo + k * step`` inside the bounds, indexed by integers."""

    def __init__(self, bounds: SearchBounds, res: Resolution):
        self.lo = {k: getattr(bounds, k)[0] for k in KNOBS}
        self.step = {k: getattr(res, k) for k in KNOBS}
        self.size = {k: int(math.floor((getattr(bounds, k)[1] - self.lo[k]) / self.step[k] + 1e-9)) + 1
                     for k in KNOBS}

    def value(self, knob: str, idx: int) -> float:
        return round(self.lo[knob] + idx * self.step[knob], 12)

    def index(self, knob: str, value: float) -> int:
        idx = int(round((value - self.lo[knob]) / self.step[knob]))
        return min(max(idx, 0), self.size[knob] - 1)


class _Search:
    def __init__(self, cfg, target_db, bounds, res, opts):
        self.cfg = cfg
        self.target = target_db
        self.lat = _Lattice(bounds, res)
        self.opts = opts
        self.cache: dict = {}
        self.best_infeasible = (-math.inf, {})

    def knobs(self, key) -> dict:
        g, t, s, p = key
        return {"g0": self.lat.value("g0", g), "tau_p": self.lat.value("tau_p", t),
                "f_s": self.lat.value("f_s", s), "f_p": self.lat.value("f_p", p)}

    def summary(self, key) -> Optional[SqueezeSummary]:
        if key not in self.cache:
            cell = _evaluate_cell((self.cfg, self.knobs(key), self.opts, 0.0, "linear"))
            self.cache[key] = cell.summary
            if cell.ok and cell.summary.squeezing_db > self.best_infeasible[0]:
                self.best_infeasible = (cell.summary.squeezing_db, cell.knobs)
        return self.cache[key]

    def feasible(self, key) -> bool:
        s = self.summary(key)
        return s is not None and s.squeezing_db >= self.target

    def min_feasible_g0(self, t: int, s: int, p: int, hint: Optional[int] = None) -> Optional[int]:
        """Smallest g0 index meeting the target, or None."""
        top = self.lat.size["g0"] - 1
        # the waveguide can never show more squeezing than -10 log10(f_s)
        if -10 * math.log10(self.lat.value("f_s", s)) <= self.target:
            return None
        if hint is None:
            if not self.feasible((top, t, s, p)):
                return None
            lo, hi = -1, top
        else:
            hint = min(max(hint, 0), top)
            if self.feasible((hint, t, s, p)):
                hi, step = hint, 1
                lo = hint - step
                while lo >= 0 and self.feasible((lo, t, s, p)):
                    hi, step = lo, step * 2
                    lo = hi - step
                lo = max(lo, -1)
            else:
                lo, step = hint, 1
                hi = hint + step
                while hi <= top and not self.feasible((hi, t, s, p)):
                    lo, step = hi, step * 2
                    hi = lo + step
                if hi > top:
                    if not self.feasible((top, t, s, p)):
                        return None
                    hi = top
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.feasible((mid, t, s, p)):
                hi = mid
            else:
                lo = mid
        return hi

    def objective(self, t: int, s: int, p: int, hint: Optional[int] = None):
        g = self.min_feasible_g0(t, s, p, hint)
        if g is None:
            return None
        summary = self.summary((g, t, s, p))
        # lexicographic: antisqueezing, then smaller g0, then smaller tau_p
        return (round(summary.antisqueezing_db, 9), g, t), (g, t, s, p)


def _coarse_indices(lat: _Lattice, knob: str, values) -> list[int]:
    return sorted({lat.index(knob, v) for v in values})


def constrained_optimum(cfg: PhysicalConfig, target_db: float = 10.0, bounds: SearchBounds = SearchBounds(),
                        resolution: Resolution = Resolution(),
                        opts: IntegratorOptions = IntegratorOptions(),
                        coarse: Optional[dict] = None) -> OptimumResult:
    """Minimise antisqueezing subject to ``squeezing_db >= target_db``.

    For every ``(tau_p, f_s, f_p)`` the pump strength is fixed at the
    smallest lattice value meeting the target, since antisqueezing only
    grows with ``g0``. A coarse grid over the remaining three knobs seeds a
    compass pattern search on the resolution lattice.
    """
    search = _Search(cfg, target_db, bounds, resolution, opts)
    lat = search.lat
    coarse = coarse or {
        "tau_p": [1.0, 2.0, 4.0, 8.0],
        "f_s": [0.01, 0.02, 0.03, 0.05, 0.07, 0.09, 0.15, 0.3, 0.5],
        "f_p": [0.01, 0.02, 0.04, 0.08],
    }
    ts = _coarse_indices(lat, "tau_p", [v for v in coarse["tau_p"] if bounds.tau_p[0] <= v <= bounds.tau_p[1]]
                         or [bounds.tau_p[0]])
    ss = _coarse_indices(lat, "f_s", [v for v in coarse["f_s"] if bounds.f_s[0] <= v <= bounds.f_s[1]]
                         or [bounds.f_s[0]])
    ps = _coarse_indices(lat, "f_p", [v for v in coarse["f_p"] if bounds.f_p[0] <= v <= bounds.f_p[1]]
                         or [bounds.f_p[0]])
    best = None
    for t in ts:
        for p in ps:
            hint = None
            for s in ss:
                found = search.objective(t, s, p, hint)
                if found is None:
                    continue
                hint = found[1][0]
                if best is None or found[0] < best[0]:
                    best = found
    if best is None:
        # squeezing grows with g0, so the strongest pump is the best each point can do
        top = lat.size["g0"] - 1
        for t in ts:
            for s in ss:
                for p in ps:
                    search.summary((top, t, s, p))
        best_db, best_knobs = search.best_infeasible
        raise InfeasibleError(target_db, best_db, best_knobs)
    coarse_knobs = search.knobs(best[1])

    # pattern search over (tau_p, f_s, f_p) lattice indices
    steps = [8, 4, 4]
    while True:
        g, t, s, p = best[1]
        improved = None
        for dim in range(3):
            for sign in (-1, 1):
                cand = [t, s, p]
                cand[dim] += sign * steps[dim]
                limit = lat.size[("tau_p", "f_s", "f_p")[dim]]
                if not 0 <= cand[dim] < limit:
                    continue
                found = search.objective(*cand, hint=g)
                if found is not None and found[0] < (improved or best)[0]:
                    improved = found
        if improved is not None:
            best = improved
            continue
        if max(steps) == 1:
            break
        steps = [max(1, st // 2) for st in steps]

    key = best[1]
    return OptimumResult(search.knobs(key), search.summary(key), len(search.cache), coarse_knobs)
