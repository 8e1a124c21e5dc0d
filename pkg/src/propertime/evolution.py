"""Proper-time evolution of fields and sampled trajectories.

Both engines are diagonal in momentum, so every requested ``s`` is reached
directly from ``s = 0`` with the closed-form propagator; nothing accumulates.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .clifford import DIRAC, EPS_NULL, GammaSet, mass_root, slash_apply
from .errors import IllConditionedError, InvalidParameterError, RepresentationError
from .lattice import MOMENTUM, POSITION, SpinorField, as_rep
from .observables import KAPPA_MAX, axis_means, indefinite_inner, l2_norm, project_positive_mass

#: largest |Im(s mu / hbar)| accepted before cosh/sinh would overflow
MAX_GROWTH_EXPONENT = 700.0

TRAJECTORY_COLUMNS = (
    "s", "norm_re", "norm_im", "l2_norm", "kappa",
    "x0", "x1", "x2", "x3", "p0", "p1", "p2", "p3",
    "H_re", "H_im", "H2_re", "H2_im",
)


def _require_momentum(f):
    if f.rep != MOMENTUM:
        raise RepresentationError("evolution acts on momentum-representation fields", rep=f.rep)


def _mode_data(f: SpinorField):
    p2 = f.lattice.p_squared(f.hbar)
    mu = mass_root(p2)
    null = np.abs(p2) < EPS_NULL
    mu[null] = 1.0
    return mu, null


def evolve(f: SpinorField, s: float, G: GammaSet = DIRAC, _modes=None) -> SpinorField:
    """``exp(i s (gamma.p) / hbar)`` applied to every momentum mode."""
    _require_momentum(f)
    if s == 0:
        return f.with_amps(f.amps.copy())
    lat, hbar = f.lattice, f.hbar
    mu, null = _mode_data(f) if _modes is None else _modes
    theta = (s / hbar) * mu
    worst = float(np.abs(theta.imag).max())
    if worst > MAX_GROWTH_EXPONENT:
        raise InvalidParameterError(
            "tachyonic growth would overflow; reduce s or the momentum range", max_exponent=worst
        )
    theta[null] = 0.0
    sinc = np.sin(theta) / mu
    sinc[null] = s / hbar
    out = slash_apply(f.amps, lat.momentum_grids(hbar), G)
    out *= 1j * sinc
    out += np.cos(theta) * f.amps
    return f.with_amps(out)


def evolve_fock(f: SpinorField, tau: float, M: float) -> SpinorField:
    """Second-order comparator: phase ``exp(i p^2 tau / (2 M hbar))`` per mode."""
    _require_momentum(f)
    if not M > 0:
        raise InvalidParameterError("super-mass M must be positive", M=M)
    phase = np.exp(1j * f.lattice.p_squared(f.hbar) * (tau / (2.0 * M * f.hbar)))
    return f.with_amps(f.amps * phase)


@dataclass
class TrajectoryTable:
    s_values: np.ndarray
    norm: np.ndarray
    l2: np.ndarray
    kappa: np.ndarray
    x: np.ndarray
    p: np.ndarray
    H: np.ndarray
    H2: np.ndarray
    projected: bool
    excluded_weight: float = 0.0
    parameter: str = "s"
    meta: dict = field(default_factory=dict)

    def rows(self):
        for i, s in enumerate(self.s_values):
            yield (
                s, self.norm[i].real, self.norm[i].imag, self.l2[i], self.kappa[i],
                *self.x[i], *self.p[i],
                self.H[i].real, self.H[i].imag, self.H2[i].real, self.H2[i].imag,
            )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for row in self.rows():
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _check_samples(s_samples):
    s = np.asarray(s_samples, dtype=float)
    if s.ndim != 1 or s.size == 0 or s[0] != 0.0 or np.any(np.diff(s) <= 0):
        raise InvalidParameterError("samples must start at 0 and increase strictly", samples=s.tolist())
    return s


def prepare(f0: SpinorField, project: bool, G: GammaSet = DIRAC):
    """Momentum-representation start state, projected if asked, with excluded null weight."""
    f = as_rep(f0, MOMENTUM)
    if not project:
        return f, 0.0
    return project_positive_mass(f, G)


def trajectory(f0: SpinorField, s_samples, project: bool = False, G: GammaSet = DIRAC,
               expectations: bool = True, engine: str = "feynman", M: float = 1.0) -> TrajectoryTable:
    """Sample norms and expectation values along the evolution.

    ``engine="fock"`` swaps in :func:`evolve_fock` with super-mass ``M`` and
    labels the parameter ``tau``.  With ``expectations=False`` only the norms
    are recorded (means are NaN), which is how zero-norm states are followed.
    """
    s = _check_samples(s_samples)
    f, excluded = prepare(f0, project, G)
    n = s.size
    norm = np.empty(n, complex)
    l2 = np.empty(n)
    kappa = np.empty(n)
    x = np.full((n, 4), np.nan)
    p = np.full((n, 4), np.nan)
    H = np.full(n, np.nan, complex)
    H2 = np.full(n, np.nan, complex)
    modes = _mode_data(f) if engine != "fock" else None
    for i, si in enumerate(s):
        g = evolve_fock(f, si, M) if engine == "fock" else evolve(f, si, G, modes)
        norm[i] = indefinite_inner(g, g)
        l2[i] = l2_norm(g)
        kappa[i] = float("inf") if norm[i] == 0 else l2[i] / abs(norm[i])
        if not expectations:
            continue
        if not kappa[i] <= KAPPA_MAX:
            raise IllConditionedError(
                "state ill-conditioned along trajectory", sample=i, s=float(si), kappa=float(kappa[i])
            )
        x[i] = axis_means(as_rep(g, POSITION), norm[i])
        p[i] = axis_means(g, norm[i])
        hg = g.with_amps(slash_apply(g.amps, g.lattice.momentum_grids(g.hbar), G))
        H[i] = indefinite_inner(g, hg) / norm[i]
        # gamma.p is self-adjoint under the indefinite form, so <H^2> = <H g|H g>
        H2[i] = indefinite_inner(hg, hg) / norm[i]
    return TrajectoryTable(
        s, norm, l2, kappa, x, p, H, H2, bool(project), excluded,
        parameter="tau" if engine == "fock" else "s",
    )


def central_slopes(table: TrajectoryTable, index: int = 1) -> np.ndarray:
    """Central difference of ``<x^mu>`` around sample ``index``."""
    s = table.s_values
    return (table.x[index + 1] - table.x[index - 1]) / (s[index + 1] - s[index - 1])
