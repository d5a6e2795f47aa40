"""Special functions for the pump envelope."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import special as _sp

# exp(x^2) leaves the double range below this argument
ERFCX_OVERFLOW = -26.628


class ErfcxOverflowWarning(RuntimeWarning):
    pass


def erfcx(x):
    """Scaled complementary error function ``exp(x^2) * erfc(x)``.

    Accepts scalars or arrays. Arguments below about -26.6 overflow to
    ``inf`` and raise :class:`ErfcxOverflowWarning`.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < ERFCX_OVERFLOW):
        warnings.warn(
            f"erfcx overflow for x < {ERFCX_OVERFLOW}; returning inf",
            ErfcxOverflowWarning,
            stacklevel=2,
        )
    with np.errstate(over="ignore"):
        out = _sp.erfcx(arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


def gaussian_fwhm(t, tau):
    """Field envelope ``exp(-2 ln2 t^2 / tau^2)`` whose intensity FWHM is ``tau``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if np.ndim(t) == 0:
        return math.exp(-2 * math.log(2) * t * t / (tau * tau))
    t = np.asarray(t, dtype=float)
    return np.exp(-2 * math.log(2) * t * t / (tau * tau))
