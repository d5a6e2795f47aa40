"""Device parameters and the dimensionless run description.

Time is measured in units of the pump round-trip time ``T_R`` throughout the
package; with phase matching the signal and pump round-trip times coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy import constants

from .errors import DomainError

C = constants.c
HBAR = constants.hbar
EPS0 = constants.epsilon_0

KNOBS = ("g0", "tau_p", "f_s", "f_p")
LOSS_FORMS = ("linear", "log")


@dataclass(frozen=True)
class PhysicalConfig:
    """Dimensional ring-resonator parameters (SI units).

    Defaults are the thin-film lithium niobate ring used for all results:
    R = 50 um, n_eff = 2.2, 1550 nm signal, chi2_eff = 54 pm/V,
    A_eff = 0.71 um^2, Q_sI = 2e6, Q_pI = 8e5.
    """

    ring_radius: float = 50e-6
    n_eff: float = 2.2
    signal_wavelength: float = 1550e-9
    chi2_eff: float = 54e-12
    A_eff: float = 0.71e-12
    Q_sI: float = 2.0e6
    Q_pI: float = 8.0e5
    group_index: float | None = None

    def __post_init__(self) -> None:
        for name in ("ring_radius", "n_eff", "signal_wavelength", "chi2_eff", "A_eff", "Q_sI", "Q_pI"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(name, value, "(0, inf)")
        for name in ("Q_sI", "Q_pI"):
            if getattr(self, name) < 1:
                raise DomainError(name, getattr(self, name), "[1, inf)")
        if self.group_index is not None and not self.group_index > 0:
            raise DomainError("group_index", self.group_index, "(0, inf)")

    @property
    def n_g(self) -> float:
        return self.n_eff if self.group_index is None else self.group_index

    @property
    def group_velocity(self) -> float:
        return C / self.n_g

    @property
    def omega_s(self) -> float:
        return 2 * math.pi * C / self.signal_wavelength

    @property
    def omega_p(self) -> float:
        return 2 * self.omega_s


def round_trip_time(cfg: PhysicalConfig) -> float:
    """Ring round-trip time ``n_eff * 2 pi R / c`` in seconds."""
    return cfg.n_eff * 2 * math.pi * cfg.ring_radius / C


def nonlinear_coupling(cfg: PhysicalConfig) -> float:
    """Magnitude of the pump-signal coupling coefficient ``|eta|`` in joules."""
    field_scale = math.sqrt(HBAR * cfg.omega_p / (16 * math.pi * EPS0 * cfg.ring_radius * cfg.A_eff))
    return HBAR * cfg.omega_s * cfg.chi2_eff * field_scale


def _loss_product(gamma: float, loss_form: str) -> float:
    # round-trip amplitude factor for a power decay of gamma per round trip
    if loss_form == "linear":
        return 1.0 - gamma / 2
    return math.exp(-gamma / 2)


@dataclass(frozen=True)
class DimensionlessRun:
    """The four optimisation knobs plus every derived dimensionless rate.

    Build instances with :func:`derive_run`; the derived fields are not
    meant to be set by hand.
    """

    g0: float
    tau_p: float
    f_s: float
    f_p: float
    theta: float = 0.0
    loss_form: str = "linear"
    omega_s_tilde: float = field(default=0.0, repr=False)
    gamma_sL: float = field(default=0.0, repr=False)
    gamma_pL: float = field(default=0.0, repr=False)
    gamma_pI: float = field(default=0.0, repr=False)
    sigma_l_p: float = field(default=0.0, repr=False)
    ell_p: float = field(default=0.0, repr=False)
    sigma_p: float = field(default=0.0, repr=False)

    @property
    def escape_s(self) -> float:
        return 1.0 - self.f_s

    @property
    def finesse_p(self) -> float:
        return math.pi / (1.0 - self.sigma_l_p)

    def knobs(self) -> dict:
        return {"g0": self.g0, "tau_p": self.tau_p, "f_s": self.f_s, "f_p": self.f_p}

    def with_knobs(self, cfg: PhysicalConfig, **changes) -> "DimensionlessRun":
        """Re-derive after changing knobs (derived fields are recomputed)."""
        base = dict(self.knobs(), theta=self.theta, loss_form=self.loss_form)
        base.update(changes)
        return derive_run(cfg, **base)


def derive_run(
    cfg: PhysicalConfig,
    g0: float,
    tau_p: float,
    f_s: float,
    f_p: float,
    theta: float = 0.0,
    loss_form: str = "linear",
) -> DimensionlessRun:
    """Populate a :class:`DimensionlessRun` from device parameters and knobs.

    ``loss_form`` selects how the per-round-trip amplitude factor follows
    from a decay rate: ``"linear"`` uses ``1 - sigma*ell = Gamma T_R / 2``,
    ``"log"`` uses ``ln(sigma*ell) = -Gamma T_R / 2``. The intrinsic factor
    ``ell_p`` comes from the same rule with ``sigma = 1``.
    """
    if not 0 < f_s < 1:
        raise DomainError("f_s", f_s, "(0, 1)")
    if not 0 < f_p < 1:
        raise DomainError("f_p", f_p, "(0, 1)")
    if not tau_p > 0:
        raise DomainError("tau_p", tau_p, "(0, inf)")
    if not g0 >= 0:
        raise DomainError("g0", g0, "[0, inf)")
    if loss_form not in LOSS_FORMS:
        raise DomainError("loss_form", loss_form, str(LOSS_FORMS))

    t_r = round_trip_time(cfg)
    ws_tr = cfg.omega_s * t_r
    wp_tr = cfg.omega_p * t_r
    gamma_sL = ws_tr / (f_s * cfg.Q_sI)
    gamma_pL = wp_tr / (f_p * cfg.Q_pI)
    gamma_pI = wp_tr / cfg.Q_pI
    sigma_l = _loss_product(gamma_pL, loss_form)
    ell = _loss_product(gamma_pI, loss_form)
    if not 0 < sigma_l < 1:
        raise DomainError("f_p", f_p, "range giving 0 < sigma_p*ell_p < 1")
    return DimensionlessRun(
        g0=float(g0),
        tau_p=float(tau_p),
        f_s=float(f_s),
        f_p=float(f_p),
        theta=float(theta),
        loss_form=loss_form,
        omega_s_tilde=ws_tr,
        gamma_sL=gamma_sL,
        gamma_pL=gamma_pL,
        gamma_pI=gamma_pI,
        sigma_l_p=sigma_l,
        ell_p=ell,
        sigma_p=sigma_l / ell,
    )


def f_s_from_gamma(cfg: PhysicalConfig, gamma_sL: float) -> float:
    """Invert the signal loss map: ``f_s`` from the loaded decay per round trip."""
    return cfg.omega_s * round_trip_time(cfg) / (gamma_sL * cfg.Q_sI)


def _photon_scale(cfg: PhysicalConfig) -> float:
    # g0 = scale * sqrt(N_c)
    return 4 * nonlinear_coupling(cfg) * round_trip_time(cfg) / HBAR * (math.log(2) / math.pi) ** 0.25


def pump_strength_to_photons(cfg: PhysicalConfig, g0: float) -> float:
    """Number of pump photons ``N_c`` in the incident channel pulse for strength ``g0``."""
    if not g0 > 0:
        raise DomainError("g0", g0, "(0, inf)")
    return (g0 / _photon_scale(cfg)) ** 2


def photons_to_pump_strength(cfg: PhysicalConfig, n_c: float) -> float:
    """Inverse of :func:`pump_strength_to_photons`."""
    if not n_c > 0:
        raise DomainError("N_c", n_c, "(0, inf)")
    return _photon_scale(cfg) * math.sqrt(n_c)


def ring_pump_photons(cfg: PhysicalConfig, run: DimensionlessRun, g: float) -> float:
    """Intracavity pump photon number ``|alpha_p|^2`` at gain envelope value ``g``."""
    alpha = g * HBAR * run.gamma_sL / (4 * nonlinear_coupling(cfg) * round_trip_time(cfg))
    return alpha * alpha


def default_config(**overrides) -> PhysicalConfig:
    return replace(PhysicalConfig(), **overrides)
