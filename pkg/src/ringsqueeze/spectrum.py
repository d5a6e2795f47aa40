"""Squeezing spectrum of the light leaving the ring into the channel waveguide.

All values are normalised to shot noise: vacuum gives exactly 1. Frequencies
are dimensionless, ``Omega * T_R``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .dynamics import SqueezeEvents, Trajectory, phase_phi
from .errors import DomainError
from .params import DimensionlessRun

# Omega*T_R must stay well below pi for the delta-commutator approximation
VALIDITY_LIMIT = math.pi / 10


class SpectrumValidityWarning(UserWarning):
    pass


def to_db(s_linear: float) -> float:
    """``10 log10(s)``."""
    if not s_linear > 0:
        raise DomainError("s_linear", s_linear, "(0, inf)")
    return 10 * math.log10(s_linear)


def from_db(level_db: float) -> float:
    return 10 ** (level_db / 10)


def min_noise_floor(f_s: float, dx2_min: float) -> float:
    """Channel noise at zero frequency along the squeezed quadrature."""
    if not 0 < f_s < 1:
        raise DomainError("f_s", f_s, "(0, 1)")
    return 1 + (1 - f_s) * (dx2_min - 1)


def max_noise_ceiling(f_s: float, gamma_sL: float, t_m: float, t_A: float, dy2_max: float) -> float:
    """Conservative zero-frequency antisqueezing in the channel.

    Holds the ring's antisqueezing at its peak from ``t_m`` to ``t_A``, so
    it can only overestimate the measured noise.
    """
    if t_A < t_m:
        raise DomainError("t_A", t_A, f"[t_m={t_m}, inf)")
    if not 0 < f_s < 1:
        raise DomainError("f_s", f_s, "(0, 1)")
    return 1 + (1 - f_s) * (1 + gamma_sL * (t_A - t_m) / 2) * (dy2_max - 1)


def spectrum_value(f_s: float, gamma_sL: float, r: float, n_th: float, quad_phase: float, omega) -> np.ndarray:
    """Lorentzian-weighted quadrature noise for state ``(r, n_th)``.

    ``quad_phase`` is ``phi - 2 beta``: zero picks the squeezed quadrature.
    """
    omega = np.asarray(omega, dtype=float)
    weight = (1 - f_s) * gamma_sL**2 / (2 * (gamma_sL**2 / 4 + omega**2))
    half = n_th + 0.5
    braces = half * math.cosh(2 * r) - 0.5 - half * math.sinh(2 * r) * math.cos(quad_phase)
    return 1 + weight * braces


def s_of_omega(run: DimensionlessRun, traj: Optional[Trajectory], events: SqueezeEvents, omega, beta: float):
    """Instantaneous spectrum for a measurement starting at ``t_m``.

    ``beta`` is the local-oscillator phase; ``beta = phi(t_m)/2`` gives the
    squeezed quadrature. Emits :class:`SpectrumValidityWarning` when
    ``|omega|`` approaches the free spectral range. ``traj`` is accepted for
    symmetry with the rest of the pipeline; the state at ``t_m`` is carried
    by ``events``.
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(np.abs(omega_arr) > VALIDITY_LIMIT):
        warnings.warn(f"|Omega T_R| > {VALIDITY_LIMIT:.3f}: outside the validity range", SpectrumValidityWarning,
                      stacklevel=2)
    quad = float(phase_phi(run, events.t_m)) - 2 * beta
    out = spectrum_value(run.f_s, run.gamma_sL, events.r_m, events.n_th_m, quad, omega_arr)
    return float(out) if np.ndim(omega) == 0 else out


def squeeze_phase(run: DimensionlessRun, events: SqueezeEvents) -> float:
    return float(phase_phi(run, events.t_m)) / 2


@dataclass(frozen=True)
class SpectrumSamples:
    omega: np.ndarray
    squeezed: np.ndarray
    antisqueezed: np.ndarray
    valid: np.ndarray

    def to_csv(self, path, provenance: dict | None = None) -> None:
        with open(path, "w", newline="") as fh:
            for key, value in (provenance or {}).items():
                fh.write(f"# {key}={value}\n")
            writer = csv.writer(fh)
            writer.writerow(("omega", "S_squeeze_phase", "S_antisqueeze_phase", "valid"))
            for w, s, a, v in zip(self.omega, self.squeezed, self.antisqueezed, self.valid):
                writer.writerow((f"{w:.12g}", f"{s:.12g}", f"{a:.12g}", int(v)))


def sample_spectrum(run: DimensionlessRun, events: SqueezeEvents, omega) -> SpectrumSamples:
    """S(Omega) at the squeezing and antisqueezing local-oscillator phases."""
    omega = np.asarray(omega, dtype=float)
    squeezed = spectrum_value(run.f_s, run.gamma_sL, events.r_m, events.n_th_m, 0.0, omega)
    anti = spectrum_value(run.f_s, run.gamma_sL, events.r_m, events.n_th_m, math.pi, omega)
    return SpectrumSamples(omega, squeezed, anti, np.abs(omega) <= VALIDITY_LIMIT)


@dataclass(frozen=True)
class SqueezeSummary:
    """Headline figures of merit for one run.

    ``squeezing_db`` is positive when the noise is below shot noise.
    """

    events: SqueezeEvents
    s_min0: float
    s_max0: float
    squeezing_db: float
    antisqueezing_db: float
    n_generated_total: float = math.nan
    spectrum: Optional[SpectrumSamples] = field(default=None, compare=False)

    def as_dict(self) -> dict:
        out = {
            "squeezing_db": self.squeezing_db,
            "antisqueezing_db": self.antisqueezing_db,
            "s_min0": self.s_min0,
            "s_max0": self.s_max0,
            "n_generated_total": self.n_generated_total,
        }
        out.update(asdict(self.events))
        return out


def summarize(run: DimensionlessRun, traj: Trajectory, events: SqueezeEvents, omega=None) -> SqueezeSummary:
    s_min = min_noise_floor(run.f_s, events.dx2_min)
    s_max = max_noise_ceiling(run.f_s, run.gamma_sL, events.t_m, events.t_A, events.dy2_max)
    return SqueezeSummary(
        events=events,
        s_min0=s_min,
        s_max0=s_max,
        squeezing_db=-to_db(s_min),
        antisqueezing_db=to_db(s_max),
        n_generated_total=traj.n_generated_total,
        spectrum=None if omega is None else sample_spectrum(run, events, omega),
    )


def vacuum_summary(t0: float, omega=None) -> SqueezeSummary:
    """Summary for an unpumped ring: every noise level is exactly shot noise."""
    events = SqueezeEvents(t_m=t0, dx2_min=1.0, t_A=t0, dy2_max=1.0)
    spectrum = None
    if omega is not None:
        omega = np.asarray(omega, dtype=float)
        ones = np.ones_like(omega)
        spectrum = SpectrumSamples(omega, ones, ones.copy(), np.abs(omega) <= VALIDITY_LIMIT)
    return SqueezeSummary(events, 1.0, 1.0, 0.0, 0.0, 0.0, spectrum)
