"""Log-log power-law fits used for every "O(hbar^k)" claim."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: log-space RMS residual above which a fit is reported inconclusive
RESIDUAL_CAP = 0.2

#: values at or below this are treated as exactly zero
ZERO_FLOOR = 1e-13


@dataclass
class PowerLawFit:
    exponent: float | None
    prefactor: float | None
    residual: float | None
    inconclusive: bool
    vanishing: bool = False

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "residual": self.residual,
            "inconclusive": self.inconclusive,
            "vanishing": self.vanishing,
        }


def fit_power_law(x, y, floor=ZERO_FLOOR) -> PowerLawFit:
    """Least-squares fit of ``y = c x^alpha`` in log space.

    Needs at least three points.  If every ``|y|`` is at or below ``floor`` the
    quantity vanishes identically and no exponent is fitted.
    """
    x = np.asarray(x, float)
    y = np.abs(np.asarray(y, float))
    if x.size < 3:
        raise ValueError("power-law fits need at least three points")
    if np.all(y <= floor):
        return PowerLawFit(None, None, None, False, vanishing=True)
    if np.any(y <= floor):
        return PowerLawFit(None, None, None, True)
    lx, ly = np.log(x), np.log(y)
    alpha, c = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (alpha * lx + c)) ** 2)))
    return PowerLawFit(float(alpha), float(np.exp(c)), resid, resid > RESIDUAL_CAP)
