"""Pulsed squeezed-light generation in a chi(2) ring resonator.

Typical use::

    from ringsqueeze import default_config, derive_run, simulate
    run = derive_run(default_config(), g0=1.7, tau_p=1.0, f_s=0.03, f_p=0.01)
    traj, events, summary = simulate(run)
    summary.squeezing_db, summary.antisqueezing_db
"""

from .dynamics import IntegratorOptions, SqueezeEvents, Trajectory, integrate, locate_events
from .errors import (AliasingError, ConfigError, DomainError, InfeasibleError, IntegrationError,
                     WindowError)
from .params import DimensionlessRun, PhysicalConfig, default_config, derive_run
from .pump import PumpEnvelope, compare_with_oracle, g_exact_oracle, g_of_t
from .spectrum import SqueezeSummary, s_of_omega, summarize
from .sweep import (Axis, SweepGrid, SweepSpec, constrained_optimum, evaluate_knobs, min_g0_for_target,
                    run_sweep, simulate)

__all__ = [
    "AliasingError", "Axis", "ConfigError", "DimensionlessRun", "DomainError", "InfeasibleError",
    "IntegrationError", "IntegratorOptions", "PhysicalConfig", "PumpEnvelope", "SqueezeEvents",
    "SqueezeSummary", "SweepGrid", "SweepSpec", "Trajectory", "WindowError", "compare_with_oracle",
    "constrained_optimum", "default_config", "derive_run", "evaluate_knobs", "g_exact_oracle", "g_of_t",
    "integrate", "locate_events", "min_g0_for_target", "run_sweep", "s_of_omega", "simulate", "summarize",
]
