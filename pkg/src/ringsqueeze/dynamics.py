"""Squeezed-thermal-state evolution of the signal mode inside the ring.

State variables are the squeeze magnitude ``r`` and thermal occupation
``n_th``; in units of the round-trip time they obey

    dr/dt    = G [ g(t)/2 - cosh(r) sinh(r) / (2 n_th + 1) ]
    dn_th/dt = G [ sinh(r)^2 - n_th ]

with ``G`` the loaded signal decay per round trip. The quadrature variances
are carried alongside by their own linear ODEs,

    d(dX^2)/dt = G [ 1 - (1 + g) dX^2 ],   d(dY^2)/dt = G [ 1 - (1 - g) dY^2 ],

so that the closed forms ``(2 n_th + 1) exp(-/+ 2r)`` can be cross-checked.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, WindowError
from .params import DimensionlessRun


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and window controls for :func:`integrate`.

    ``max_step`` keeps the adaptive stepper from striding over the pulse
    while the pump is still negligible. ``pump_cutoff`` forces ``g = 0`` for
    later times.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    method: str = "RK45"
    max_step: float = 0.25
    grid_step: float = 0.02
    t_start: Optional[float] = None
    t_end: Optional[float] = None
    tail_decay_times: float = 8.0
    pump_cutoff: Optional[float] = None


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution on a uniform grid of dimensionless times."""

    t: np.ndarray
    g: np.ndarray
    r: np.ndarray
    n_th: np.ndarray
    dx2: np.ndarray
    dy2: np.ndarray
    dx2_ode: np.ndarray
    dy2_ode: np.ndarray
    n_sig: np.ndarray
    n_generated_total: float
    gamma_sL: float
    solution: Callable = field(repr=False, compare=False)

    def state_at(self, t: float) -> tuple[float, float]:
        """``(r, n_th)`` from the integrator's dense output."""
        r, n_th = self.solution(t)[:2]
        return float(r), float(n_th)

    def to_csv(self, path, provenance: dict | None = None) -> None:
        columns = ("t", "g", "r", "n_th", "dx2", "dy2", "n_sig")
        with open(path, "w", newline="") as fh:
            for key, value in (provenance or {}).items():
                fh.write(f"# {key}={value}\n")
            writer = csv.writer(fh)
            writer.writerow(columns)
            data = np.column_stack([getattr(self, c) for c in columns])
            for row in data:
                writer.writerow([f"{v:.12g}" for v in row])


@dataclass(frozen=True)
class SqueezeEvents:
    """Maximal squeezing (``t_m``) and maximal antisqueezing (``t_A``) in the ring.

    ``r_m`` and ``n_th_m`` are the state at ``t_m``, used by the spectrum.
    """

    t_m: float
    dx2_min: float
    t_A: float
    dy2_max: float
    r_m: float = 0.0
    n_th_m: float = 0.0


def phase_phi(run: DimensionlessRun, t):
    """Squeezing phase ``-2 w_s t + theta + pi/2`` (``w_s`` in units of 1/T_R)."""
    return -2 * run.omega_s_tilde * np.asarray(t) + run.theta + math.pi / 2


def signal_photons(r, n_th):
    """``<a^dag a> = (n_th + 1/2) cosh(2r) - 1/2``."""
    return (np.asarray(n_th) + 0.5) * np.cosh(2 * np.asarray(r)) - 0.5


def pair_amplitude(run: DimensionlessRun, r, n_th, t):
    """``<a a> = -(n_th + 1/2) exp(i phi) sinh(2r)``."""
    return -(np.asarray(n_th) + 0.5) * np.exp(1j * phase_phi(run, t)) * np.sinh(2 * np.asarray(r))


def default_start(run: DimensionlessRun) -> float:
    return -max(5 * run.tau_p, 3 * run.tau_p + 10.0)


def _pump_function(env, cutoff: Optional[float]) -> Callable[[float], float]:
    if cutoff is None:
        return env
    return lambda t: 0.0 if t > cutoff else env(t)


def _pump_peak_time(env) -> float:
    peak = getattr(env, "peak", None)
    return peak()[0] if peak is not None else 0.0


def estimate_antisqueeze_time(run: DimensionlessRun, env, t0: float, opts: IntegratorOptions) -> float:
    """Coarse pre-pass: time at which ``dY^2`` stops growing.

    Integrates only the (linear) variance equation with loose tolerances.
    Falls back to the pump peak time when ``dY^2`` never turns over.
    """
    gamma = run.gamma_sL
    pump = _pump_function(env, opts.pump_cutoff)
    t_peak = _pump_peak_time(env)
    decay = 1 - run.sigma_l_p

    def rhs(t, u):
        g = pump(t)
        if not math.isfinite(g):
            raise IntegrationError(f"non-finite pump value {g} at t={t:.6g}")
        return [gamma * (1 - (1 - g) * u[0])]

    def turnover(t, u):
        return 1 - (1 - pump(t)) * u[0]

    turnover.terminal = True
    turnover.direction = -1

    horizon = max(t_peak, 0.0) + 60.0 / decay + 40.0 / gamma + 4 * run.tau_p
    sol = solve_ivp(rhs, (t0, horizon), [1.0], method="RK45", rtol=1e-6, atol=1e-9,
                    max_step=min(opts.max_step * 4, run.tau_p / 2), events=turnover)
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return t_peak


def window(run: DimensionlessRun, env, opts: IntegratorOptions) -> tuple[float, float]:
    """Integration window ``(t_start, t_end)`` honouring any overrides."""
    t0 = default_start(run) if opts.t_start is None else opts.t_start
    if opts.t_end is not None:
        t1 = opts.t_end
    else:
        t_a = estimate_antisqueeze_time(run, env, t0, opts)
        t1 = t_a + opts.tail_decay_times / run.gamma_sL
    if not t1 > t0:
        raise ValueError(f"empty integration window [{t0}, {t1}]")
    return t0, t1


def integrate(run: DimensionlessRun, env, opts: IntegratorOptions = IntegratorOptions()) -> Trajectory:
    """Evolve the vacuum from ``t_start`` through the pulse and its ringdown.

    ``env`` is any callable ``g(t)``; normally a :class:`PumpEnvelope`.
    """
    gamma = run.gamma_sL
    pump = _pump_function(env, opts.pump_cutoff)
    t0, t1 = window(run, env, opts)

    def rhs(t, u):
        r, n_th, x2, y2, _ = u
        g = pump(t)
        if not math.isfinite(g):
            # RK45 would otherwise shrink its step forever on a NaN error estimate
            raise IntegrationError(f"non-finite pump value {g} at t={t:.6g}")
        ch = math.cosh(r)
        sh = math.sinh(r)
        n_sig = (n_th + 0.5) * math.cosh(2 * r) - 0.5
        return [
            gamma * (0.5 * g - ch * sh / (2 * n_th + 1)),
            gamma * (sh * sh - n_th),
            gamma * (1 - (1 + g) * x2),
            gamma * (1 - (1 - g) * y2),
            gamma * n_sig,
        ]

    try:
        sol = solve_ivp(rhs, (t0, t1), [0.0, 0.0, 1.0, 1.0, 0.0], method=opts.method,
                        rtol=opts.rel_tol, atol=opts.abs_tol, max_step=opts.max_step,
                        dense_output=True)
    except (OverflowError, FloatingPointError) as exc:
        raise IntegrationError(f"state overflow during integration: {exc}") from exc
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else t0
        raise IntegrationError(f"integration stopped at t={t_fail:.6g}: {sol.message}")
    if not np.all(np.isfinite(sol.y[:, -1])):
        raise IntegrationError(f"non-finite state at t={t1:.6g}")

    n_pts = int(math.ceil((t1 - t0) / opts.grid_step)) + 1
    t = np.linspace(t0, t1, n_pts)
    r, n_th, x2, y2, lost = sol.sol(t)
    # pin the initial point exactly; dense output is exact there anyway
    r[0], n_th[0], x2[0], y2[0] = 0.0, 0.0, 1.0, 1.0
    g = np.array([pump(s) for s in t]) if opts.pump_cutoff is not None else np.asarray(env(t), dtype=float)
    width = 2 * n_th + 1
    n_sig = signal_photons(r, n_th)
    return Trajectory(
        t=t,
        g=g,
        r=r,
        n_th=n_th,
        dx2=width * np.exp(-2 * r),
        dy2=width * np.exp(2 * r),
        dx2_ode=x2,
        dy2_ode=y2,
        n_sig=n_sig,
        n_generated_total=float(n_sig[-1] + lost[-1]),
        gamma_sL=gamma,
        solution=sol.sol,
    )


def _parabola_vertex(t: np.ndarray, y: np.ndarray, k: int) -> float:
    t0, t1, t2 = t[k - 1], t[k], t[k + 1]
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
    a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
    b = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom
    if a == 0:
        return float(t1)
    return float(min(max(-b / (2 * a), t0), t2))


def _interior_extremum(t: np.ndarray, y: np.ndarray, find_max: bool, label: str) -> float:
    k = int(np.argmax(y) if find_max else np.argmin(y))
    if k == 0 or k == t.size - 1:
        raise WindowError(f"{label} extremum at window boundary t={t[k]:.6g}; extend the integration window")
    return _parabola_vertex(t, y, k)


def locate_events(traj: Trajectory) -> SqueezeEvents:
    """Times and values of maximal squeezing and antisqueezing.

    The grid argmin/argmax is refined by the vertex of the parabola through
    the three neighbouring samples; the variances there come from the
    dense output.
    """
    t = traj.t
    tail = max(3, t.size // 10)
    if not np.all(np.diff(traj.dy2[-tail:]) < 0):
        raise WindowError("dY^2 still rising at the end of the window; extend the integration window")
    t_m = _interior_extremum(t, traj.dx2, False, "dX^2")
    t_a = _interior_extremum(t, traj.dy2, True, "dY^2")
    r_m, n_m = traj.state_at(t_m)
    r_a, n_a = traj.state_at(t_a)
    return SqueezeEvents(
        t_m=t_m,
        dx2_min=(2 * n_m + 1) * math.exp(-2 * r_m),
        t_A=t_a,
        dy2_max=(2 * n_a + 1) * math.exp(2 * r_a),
        r_m=r_m,
        n_th_m=n_m,
    )
