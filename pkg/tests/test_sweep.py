import json

import numpy as np
import pytest

from ringsqueeze import default_config
from ringsqueeze.errors import DomainError, InfeasibleError
from ringsqueeze.sweep import (
    Axis,
    Resolution,
    SearchBounds,
    SweepSpec,
    constrained_optimum,
    evaluate_knobs,
    level_crossings,
    min_g0_for_target,
    run_sweep,
)

FIXED = {"g0": 0.7, "f_p": 0.03}


def small_spec(count=3):
    return SweepSpec(Axis("f_s", 0.03, 0.07, count), Axis("tau_p", 2.0, 6.0, count), dict(FIXED))


def test_spec_rejects_repeated_knob():
    with pytest.raises(DomainError):
        SweepSpec(Axis("f_s", 0.03, 0.07, 3), Axis("f_s", 0.03, 0.07, 3), {"g0": 1.0, "tau_p": 1.0, "f_p": 0.01})


@pytest.mark.parametrize("axis", [Axis("f_s", 0.03, 0.07, 1), Axis("f_s", -0.1, 0.07, 3),
                                  Axis("f_s", 0.5, 1.5, 3), Axis("bogus", 0, 1, 3)])
def test_spec_rejects_bad_axis(axis):
    with pytest.raises(DomainError):
        SweepSpec(axis, Axis("tau_p", 1.0, 2.0, 3), dict(FIXED))


def test_spec_requires_all_fixed_knobs():
    with pytest.raises(DomainError):
        SweepSpec(Axis("f_s", 0.03, 0.07, 3), Axis("tau_p", 1.0, 2.0, 3), {"g0": 0.7})


def test_constrained_spec_enforces_lower_bounds():
    with pytest.raises(DomainError):
        SweepSpec(Axis("f_p", 0.005, 0.05, 3), Axis("tau_p", 1.0, 2.0, 3), {"g0": 0.7, "f_s": 0.05},
                  constrained=True)
    with pytest.raises(DomainError):
        SweepSpec(Axis("f_p", 0.01, 0.05, 3), Axis("tau_p", 0.5, 2.0, 3), {"g0": 0.7, "f_s": 0.05},
                  constrained=True)


def test_degenerate_grid_gives_identical_cells(cfg):
    spec = SweepSpec(Axis("f_s", 0.05, 0.05, 2), Axis("tau_p", 3.0, 3.0, 2), dict(FIXED))
    grid = run_sweep(spec, cfg)
    summaries = [c.summary for row in grid.cells for c in row]
    assert len(summaries) == 4
    assert all(s == summaries[0] for s in summaries)


def test_row_major_layout(cfg):
    spec = small_spec()
    grid = run_sweep(spec, cfg)
    assert grid.matrix("squeezing_db").shape == (3, 3)
    cell = grid.cells[2][1]
    assert cell.knobs == {"g0": 0.7, "f_p": 0.03, "f_s": 0.07, "tau_p": 4.0}
    direct = evaluate_knobs(cfg, cell.knobs)
    assert direct.squeezing_db == cell.summary.squeezing_db


def test_sweep_output_is_deterministic(cfg, tmp_path):
    spec = small_spec()
    serial = run_sweep(spec, cfg, workers=1).write(tmp_path / "a", "grid")
    parallel = run_sweep(spec, cfg, workers=2).write(tmp_path / "b", "grid")
    for pa, pb in zip(serial, parallel):
        assert pa.read_bytes() == pb.read_bytes()


def test_cell_failures_are_recorded(cfg):
    spec = SweepSpec(Axis("f_p", 1e-4, 0.02, 2), Axis("tau_p", 2.0, 3.0, 2), {"g0": 0.7, "f_s": 0.05})
    grid = run_sweep(spec, cfg)
    failed = grid.failed
    assert [(i, j) for i, j, _ in failed] == [(0, 0), (0, 1)]
    assert "DomainError" in failed[0][2]
    assert np.isnan(grid.matrix("squeezing_db")[0]).all()
    assert np.isfinite(grid.matrix("squeezing_db")[1]).all()


def test_contour_files(cfg, tmp_path):
    grid = run_sweep(small_spec(), cfg)
    paths = grid.write(tmp_path, "fig")
    names = sorted(p.name for p in paths)
    assert "fig.json" in names and "fig_squeezing_db.csv" in names
    side = json.loads((tmp_path / "fig.json").read_text())
    assert side["axes"]["rows"]["knob"] == "f_s" and len(side["axes"]["cols"]["values"]) == 3
    assert side["provenance"]["config_hash"] == grid.provenance["config_hash"]
    lines = (tmp_path / "fig_squeezing_db.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[3].split(",")[0] == "f_s\\tau_p"
    assert len(lines) == 3 + 1 + 3


def test_level_crossing_agrees_with_bisection(cfg):
    spec = SweepSpec(Axis("g0", 1.5, 1.9, 9), Axis("f_p", 0.01, 0.011, 2), {"tau_p": 1.0, "f_s": 0.05})
    grid = run_sweep(spec, cfg)
    pts = [p for p in level_crossings(grid, 10.0) if p["f_p"] == 0.01]
    assert len(pts) == 1
    g0, _ = min_g0_for_target(cfg, 1.0, 0.05, 0.01, 10.0, tol=1e-5)
    assert pts[0]["g0"] == pytest.approx(g0, abs=2e-3)


def test_min_g0_is_the_threshold(cfg):
    g0, summary = min_g0_for_target(cfg, 1.0, 0.05, 0.01, 10.0, tol=1e-4)
    assert summary.squeezing_db >= 10.0
    below = evaluate_knobs(cfg, {"g0": g0 - 2e-4, "tau_p": 1.0, "f_s": 0.05, "f_p": 0.01})
    assert below.squeezing_db < 10.0


def test_min_g0_infeasible(cfg):
    with pytest.raises(InfeasibleError) as info:
        min_g0_for_target(cfg, 3.0, 0.5, 0.03, 3.5)
    assert info.value.best_db <= 3.02


def test_optimum_infeasible_reports_best(cfg):
    with pytest.raises(InfeasibleError) as info:
        constrained_optimum(cfg, 3.5, SearchBounds(f_s=(0.5, 0.5)),
                            coarse={"tau_p": [1.0, 4.0], "f_s": [0.5], "f_p": [0.01, 0.04]})
    err = info.value
    assert 2.5 < err.best_db <= 3.02
    assert err.best_knobs["f_s"] == 0.5


def test_optimum_on_small_box_meets_target(cfg):
    bounds = SearchBounds(tau_p=(1.0, 1.5), f_s=(0.03, 0.05), f_p=(0.01, 0.015))
    res = constrained_optimum(cfg, 10.0, bounds, coarse={"tau_p": [1.0, 1.5], "f_s": [0.03, 0.05],
                                                          "f_p": [0.01]})
    assert res.summary.squeezing_db >= 10.0
    k = res.knobs
    assert 1.0 <= k["tau_p"] <= 1.5 and 0.03 <= k["f_s"] <= 0.05 and 0.01 <= k["f_p"] <= 0.015
    # one lattice step less pump misses the target
    lower = evaluate_knobs(cfg, {**k, "g0": round(k["g0"] - 0.01, 10)})
    assert lower.squeezing_db < 10.0


@pytest.fixture(scope="module")
def pulse_grid():
    spec = SweepSpec(Axis("f_p", 0.01, 0.06, 6), Axis("tau_p", 1.0, 12.0, 6), {"g0": 0.7, "f_s": 0.05})
    return run_sweep(spec, default_config())


def test_antisqueezing_grows_with_pulse_length_and_pump_q(pulse_grid):
    asq = pulse_grid.matrix("antisqueezing_db")
    assert np.all(np.diff(asq, axis=0) > 0)
    assert np.all(np.diff(asq, axis=1) > 0)


def test_squeezing_rises_with_pulse_length_and_pump_q_before_saturating(pulse_grid):
    # squeezing peaks at finite pulse length, so the rising region is f_p <= 0.03, tau_p <= 5.4
    sq = pulse_grid.matrix("squeezing_db")[:3, :3]
    asq = pulse_grid.matrix("antisqueezing_db")[:3, :3]
    assert np.all(np.diff(sq, axis=0) > 0) and np.all(np.diff(sq, axis=1) > 0)
    # the antisqueezing moves much more than the squeezing in dB
    assert np.all(np.diff(asq, axis=0) > np.diff(sq, axis=0))
    assert np.all(np.diff(asq, axis=1) > np.diff(sq, axis=1))


@pytest.mark.slow
def test_optimum_stable_under_resolution_halving(cfg):
    bounds = SearchBounds(tau_p=(1.0, 2.0), f_s=(0.02, 0.06), f_p=(0.01, 0.02))
    coarse = {"tau_p": [1.0, 1.5, 2.0], "f_s": [0.02, 0.04, 0.06], "f_p": [0.01, 0.02]}
    res = Resolution()
    a = constrained_optimum(cfg, 10.0, bounds, res, coarse=coarse)
    b = constrained_optimum(cfg, 10.0, bounds, res.halved(), coarse=coarse)
    for knob in ("g0", "tau_p", "f_s", "f_p"):
        assert abs(a.knobs[knob] - b.knobs[knob]) <= getattr(res, knob) + 1e-12, knob
