"""Run configuration files (YAML, or JSON as a YAML subset).

Layout::

    physical:     # every PhysicalConfig field; group_index optional
      ring_radius: 50.0e-6
      ...
    knobs:        {g0: 1.7, tau_p: 1.0, f_s: 0.03, f_p: 0.01, theta: 0.0}
    model:        {loss_form: linear}
    integrator:   {rel_tol: 1e-10, abs_tol: 1e-12, t_start_override: null, t_end_override: null}
    output:       {directory: out, formats: [csv, json], omega_max: 0.3, omega_points: 61}
    sweep:        {axis1: {knob: f_s, min: 0.01, max: 0.09, count: 41}, axis2: {...},
                   target_squeezing_db: 10}
    optimize:     {target_db: 10, bounds: {tau_p: [1, 16], ...}}

Only ``physical`` and ``knobs`` are required. Unknown keys anywhere are
rejected, and every error names the dotted path of the offending field.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional

import yaml

from .dynamics import IntegratorOptions
from .errors import ConfigError, DomainError
from .params import KNOBS, LOSS_FORMS, PhysicalConfig
from .sweep import Axis, Resolution, SearchBounds, SweepSpec

FORMATS = ("csv", "json")
_PHYSICAL_REQUIRED = ("ring_radius", "n_eff", "signal_wavelength", "chi2_eff", "A_eff", "Q_sI", "Q_pI")


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "out"
    formats: tuple = FORMATS
    omega_max: float = 0.3
    omega_points: int = 61


@dataclass(frozen=True)
class OptimizeOptions:
    target_db: float = 10.0
    bounds: SearchBounds = SearchBounds()
    resolution: Resolution = Resolution()


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalConfig
    knobs: dict
    theta: float = 0.0
    loss_form: str = "linear"
    integrator: IntegratorOptions = IntegratorOptions()
    output: OutputOptions = OutputOptions()
    sweep: Optional[dict] = None
    optimize: OptimizeOptions = OptimizeOptions()

    def provenance(self) -> dict:
        return {
            "physical": asdict(self.physical),
            "knobs": dict(self.knobs),
            "theta": self.theta,
            "loss_form": self.loss_form,
            "integrator": asdict(self.integrator),
        }


def _section(data: dict, name: str, required: bool = False) -> dict:
    if name not in data or data[name] is None:
        if required:
            raise ConfigError(name, "required section missing")
        return {}
    value = data[name]
    if not isinstance(value, dict):
        raise ConfigError(name, f"expected a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(block: dict, allowed, prefix: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{prefix}.{key}" if prefix else str(key),
                              f"unknown key (allowed: {', '.join(allowed)})")


def _number(block: dict, key: str, prefix: str, default=None, positive: bool = False) -> float:
    path = f"{prefix}.{key}"
    if key not in block or block[key] is None:
        if default is None:
            raise ConfigError(path, "required field missing")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        # YAML 1.1 reads "1e-10" (no dot) as a string
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(path, f"expected a number, got {value!r}") from None
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return value


def _physical(block: dict) -> PhysicalConfig:
    allowed = _PHYSICAL_REQUIRED + ("group_index",)
    _reject_unknown(block, allowed, "physical")
    values = {k: _number(block, k, "physical", positive=True) for k in _PHYSICAL_REQUIRED}
    if block.get("group_index") is not None:
        values["group_index"] = _number(block, "group_index", "physical", positive=True)
    try:
        return PhysicalConfig(**values)
    except DomainError as exc:
        raise ConfigError(f"physical.{exc.name}", str(exc)) from None


def _knobs(block: dict) -> tuple[dict, float]:
    _reject_unknown(block, KNOBS + ("theta",), "knobs")
    knobs = {k: _number(block, k, "knobs") for k in KNOBS}
    if knobs["g0"] < 0:
        raise ConfigError("knobs.g0", "must be non-negative")
    if knobs["tau_p"] <= 0:
        raise ConfigError("knobs.tau_p", "must be positive")
    for k in ("f_s", "f_p"):
        if not 0 < knobs[k] < 1:
            raise ConfigError(f"knobs.{k}", "must lie in (0, 1)")
    return knobs, _number(block, "theta", "knobs", default=0.0)


def _integrator(block: dict) -> IntegratorOptions:
    allowed = ("rel_tol", "abs_tol", "max_step", "grid_step", "t_start_override", "t_end_override")
    _reject_unknown(block, allowed, "integrator")
    base = IntegratorOptions()
    opts = {
        "rel_tol": _number(block, "rel_tol", "integrator", base.rel_tol, positive=True),
        "abs_tol": _number(block, "abs_tol", "integrator", base.abs_tol, positive=True),
        "max_step": _number(block, "max_step", "integrator", base.max_step, positive=True),
        "grid_step": _number(block, "grid_step", "integrator", base.grid_step, positive=True),
    }
    if block.get("t_start_override") is not None:
        opts["t_start"] = _number(block, "t_start_override", "integrator")
    if block.get("t_end_override") is not None:
        opts["t_end"] = _number(block, "t_end_override", "integrator")
    if "t_start" in opts and "t_end" in opts and not opts["t_end"] > opts["t_start"]:
        raise ConfigError("integrator.t_end_override", "must exceed t_start_override")
    return IntegratorOptions(**opts)


def _output(block: dict) -> OutputOptions:
    _reject_unknown(block, ("directory", "formats", "omega_max", "omega_points"), "output")
    base = OutputOptions()
    directory = block.get("directory", base.directory)
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory", "expected a non-empty string")
    formats = block.get("formats", list(base.formats))
    if isinstance(formats, str):
        formats = [formats]
    if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
        raise ConfigError("output.formats", f"expected a non-empty subset of {list(FORMATS)}")
    points = block.get("omega_points", base.omega_points)
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ConfigError("output.omega_points", "expected a positive integer")
    return OutputOptions(directory, tuple(dict.fromkeys(formats)),
                         _number(block, "omega_max", "output", base.omega_max, positive=True), points)


def _axis(block, path: str) -> Axis:
    if not isinstance(block, dict):
        raise ConfigError(path, "expected a mapping")
    _reject_unknown(block, ("knob", "min", "max", "count"), path)
    knob = block.get("knob")
    if knob not in KNOBS:
        raise ConfigError(f"{path}.knob", f"expected one of {list(KNOBS)}, got {knob!r}")
    count = block.get("count", 41)
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise ConfigError(f"{path}.count", "expected an integer >= 2")
    lo, hi = _number(block, "min", path), _number(block, "max", path)
    if hi < lo:
        raise ConfigError(f"{path}.max", "must not be below min")
    return Axis(knob, lo, hi, count)


def _sweep(block: dict) -> Optional[dict]:
    if not block:
        return None
    _reject_unknown(block, ("axis1", "axis2", "target_squeezing_db"), "sweep")
    for key in ("axis1", "axis2"):
        if key not in block:
            raise ConfigError(f"sweep.{key}", "required field missing")
    out = {"axis1": _axis(block["axis1"], "sweep.axis1"), "axis2": _axis(block["axis2"], "sweep.axis2"),
           "target_squeezing_db": None}
    if block.get("target_squeezing_db") is not None:
        out["target_squeezing_db"] = _number(block, "target_squeezing_db", "sweep")
    if out["axis1"].name == out["axis2"].name:
        raise ConfigError("sweep.axis2.knob", "must differ from sweep.axis1.knob")
    return out


def _optimize(block: dict) -> OptimizeOptions:
    _reject_unknown(block, ("target_db", "bounds", "resolution"), "optimize")
    base = OptimizeOptions()
    bounds = _section(block, "bounds")
    _reject_unknown(bounds, KNOBS, "optimize.bounds")
    b = {}
    for k, v in bounds.items():
        path = f"optimize.bounds.{k}"
        if not isinstance(v, list) or len(v) != 2:
            raise ConfigError(path, "expected [min, max]")
        lo, hi = (_number({"v": x}, "v", path) for x in v)
        if hi < lo:
            raise ConfigError(path, "max below min")
        b[k] = (lo, hi)
    res_block = _section(block, "resolution")
    _reject_unknown(res_block, KNOBS, "optimize.resolution")
    res = {k: _number(res_block, k, "optimize.resolution", positive=True) for k in res_block}
    return OptimizeOptions(_number(block, "target_db", "optimize", base.target_db),
                           replace(base.bounds, **b), replace(base.resolution, **res))


def parse_config(data) -> RunConfig:
    """Validate a parsed mapping and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a mapping at the top level")
    sections = ("physical", "knobs", "model", "integrator", "output", "sweep", "optimize")
    _reject_unknown(data, sections, "")
    model = _section(data, "model")
    _reject_unknown(model, ("loss_form",), "model")
    loss_form = model.get("loss_form", "linear")
    if loss_form not in LOSS_FORMS:
        raise ConfigError("model.loss_form", f"expected one of {list(LOSS_FORMS)}")
    knobs, theta = _knobs(_section(data, "knobs", required=True))
    return RunConfig(
        physical=_physical(_section(data, "physical", required=True)),
        knobs=knobs,
        theta=theta,
        loss_form=loss_form,
        integrator=_integrator(_section(data, "integrator")),
        output=_output(_section(data, "output")),
        sweep=_sweep(_section(data, "sweep")),
        optimize=_optimize(_section(data, "optimize")),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from None
    return parse_config(data)


def sweep_spec(cfg: RunConfig) -> SweepSpec:
    """The sweep described by ``cfg``; knobs not on an axis come from ``knobs``."""
    if cfg.sweep is None:
        raise ConfigError("sweep", "section required for this command")
    a1, a2 = cfg.sweep["axis1"], cfg.sweep["axis2"]
    fixed = {k: v for k, v in cfg.knobs.items() if k not in (a1.name, a2.name)}
    try:
        return SweepSpec(a1, a2, fixed, cfg.sweep["target_squeezing_db"], cfg.theta, cfg.loss_form)
    except DomainError as exc:
        raise ConfigError(f"sweep.{exc.name}", str(exc)) from None
