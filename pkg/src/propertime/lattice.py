"""Periodic four-axis lattice and the position/momentum transform.

Momentum amplitudes are stored over covariant momenta ``p_mu`` in FFT order,
with the synthesis kernel ``exp(-i p_mu x^mu / hbar)``.  Because ``p_mu x^mu``
carries no metric factor, one kernel sign serves all four axes.

Normalization is the unitary one: with the measures ``prod(dx)`` and
``prod(dp)``, ``sum |psi|^2 dV_x == sum |phi|^2 dV_p`` exactly, and both
approximate the continuum integrals.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .errors import (
    InvalidParameterError,
    LatticeMismatchError,
    RepresentationError,
    SizeGuardError,
)

POSITION = "position"
MOMENTUM = "momentum"

#: default cap on the number of sites, about 270 MB per complex spinor field
DEFAULT_MAX_SITES = 2**22

#: dense_oracle_transform refuses lattices larger than 16^4
ORACLE_MAX_SITES = 16**4

_AXES = (1, 2, 3, 4)


@dataclass(frozen=True)
class AxisSpec:
    n: int
    x_min: float
    dx: float

    def __post_init__(self):
        n = int(self.n)
        if n < 8 or n & (n - 1):
            raise InvalidParameterError("axis site count must be a power of two >= 8", n=self.n)
        if not self.dx > 0:
            raise InvalidParameterError("axis spacing must be positive", dx=self.dx)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "dx", float(self.dx))

    @classmethod
    def centered(cls, n, dx, center=0.0):
        return cls(n, center - 0.5 * n * dx, dx)

    @property
    def length(self):
        return self.n * self.dx

    def coords(self):
        return self.x_min + self.dx * np.arange(self.n)

    def dp(self, hbar):
        return 2.0 * np.pi * hbar / (self.n * self.dx)

    def p_nyquist(self, hbar):
        return np.pi * hbar / self.dx

    def momenta(self, hbar):
        """Covariant momenta on this axis, FFT order."""
        return 2.0 * np.pi * hbar * sfft.fftfreq(self.n, d=self.dx)


@dataclass(frozen=True)
class Lattice4:
    axes: tuple
    max_sites: int = DEFAULT_MAX_SITES

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) != 4 or not all(isinstance(a, AxisSpec) for a in axes):
            raise InvalidParameterError("Lattice4 needs exactly four AxisSpec entries")
        object.__setattr__(self, "axes", axes)
        if self.sites > self.max_sites:
            raise SizeGuardError(
                "lattice exceeds the memory budget",
                sites=self.sites,
                max_sites=self.max_sites,
            )

    @classmethod
    def centered(cls, n: int | Sequence[int], dx: float | Sequence[float], center=(0.0,) * 4, **kw):
        ns = [n] * 4 if np.isscalar(n) else list(n)
        dxs = [dx] * 4 if np.isscalar(dx) else list(dx)
        return cls(tuple(AxisSpec.centered(ns[m], dxs[m], center[m]) for m in range(4)), **kw)

    @property
    def shape(self):
        return tuple(a.n for a in self.axes)

    @property
    def sites(self):
        return int(np.prod(self.shape))

    @property
    def cell_volume(self):
        return float(np.prod([a.dx for a in self.axes]))

    def momentum_cell(self, hbar):
        return float(np.prod([a.dp(hbar) for a in self.axes]))

    def measure(self, rep, hbar):
        return self.cell_volume if rep == POSITION else self.momentum_cell(hbar)

    def coord(self, mu):
        """Coordinate ``x^mu`` shaped to broadcast against a ``(n0, n1, n2, n3)`` array."""
        shape = [1, 1, 1, 1]
        shape[mu] = -1
        return self.axes[mu].coords().reshape(shape)

    def momentum(self, mu, hbar):
        """Covariant ``p_mu`` shaped to broadcast against the lattice."""
        shape = [1, 1, 1, 1]
        shape[mu] = -1
        return self.axes[mu].momenta(hbar).reshape(shape)

    def momentum_grids(self, hbar):
        return [self.momentum(mu, hbar) for mu in range(4)]

    def p_squared(self, hbar):
        """``p^mu p_mu`` on the full momentum grid."""
        p = self.momentum_grids(hbar)
        return p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2

    def to_dict(self):
        return {
            "n": [a.n for a in self.axes],
            "dx": [a.dx for a in self.axes],
            "x_min": [a.x_min for a in self.axes],
        }


def _phase(lat: Lattice4, hbar, sign):
    """Product over axes of ``exp(sign * i p_mu x_min^mu / hbar)``."""
    out = None
    for mu, ax in enumerate(lat.axes):
        shape = [1, 1, 1, 1]
        shape[mu] = -1
        f = np.exp(sign * 1j * ax.momenta(hbar) * ax.x_min / hbar).reshape(shape)
        out = f if out is None else out * f
    return out


def forward(arr: np.ndarray, lat: Lattice4, hbar: float) -> np.ndarray:
    """Position samples to momentum amplitudes over the last four axes."""
    scale = lat.cell_volume / (2.0 * np.pi * hbar) ** 2
    out = sfft.ifftn(arr, axes=tuple(range(-4, 0)), norm="forward")
    out *= scale * _phase(lat, hbar, +1)
    return out


def backward(arr: np.ndarray, lat: Lattice4, hbar: float) -> np.ndarray:
    """Momentum amplitudes to position samples over the last four axes."""
    scale = lat.momentum_cell(hbar) / (2.0 * np.pi * hbar) ** 2
    out = sfft.fftn(arr * _phase(lat, hbar, -1), axes=tuple(range(-4, 0)), norm="backward")
    out *= scale
    return out


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Four complex amplitudes per lattice site, shape ``(4, n0, n1, n2, n3)``."""

    lattice: Lattice4
    rep: str
    amps: np.ndarray
    hbar: float

    def __post_init__(self):
        if self.rep not in (POSITION, MOMENTUM):
            raise RepresentationError("unknown representation", rep=self.rep)
        if not self.hbar > 0:
            raise InvalidParameterError("hbar must be positive", hbar=self.hbar)
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (4,) + self.lattice.shape:
            raise InvalidParameterError(
                "amplitude array does not match lattice", shape=amps.shape, lattice=self.lattice.shape
            )
        object.__setattr__(self, "amps", amps)

    def with_amps(self, amps, rep=None):
        return SpinorField(self.lattice, rep or self.rep, amps, self.hbar)

    @property
    def measure(self):
        return self.lattice.measure(self.rep, self.hbar)

    def __add__(self, other):
        require_compatible(self, other)
        return self.with_amps(self.amps + other.amps)

    def __sub__(self, other):
        require_compatible(self, other)
        return self.with_amps(self.amps - other.amps)

    def __mul__(self, c):
        return self.with_amps(self.amps * c)

    __rmul__ = __mul__


def require_compatible(f: SpinorField, g: SpinorField):
    if f.lattice != g.lattice or f.hbar != g.hbar:
        raise LatticeMismatchError("fields live on different lattices or hbar")
    if f.rep != g.rep:
        raise RepresentationError("fields are in different representations", reps=(f.rep, g.rep))


def to_momentum(f: SpinorField) -> SpinorField:
    if f.rep != POSITION:
        raise RepresentationError("to_momentum expects a position-representation field", rep=f.rep)
    return f.with_amps(forward(f.amps, f.lattice, f.hbar), MOMENTUM)


def to_position(f: SpinorField) -> SpinorField:
    if f.rep != MOMENTUM:
        raise RepresentationError("to_position expects a momentum-representation field", rep=f.rep)
    return f.with_amps(backward(f.amps, f.lattice, f.hbar), POSITION)


def as_rep(f: SpinorField, rep: str) -> SpinorField:
    if f.rep == rep:
        return f
    return to_momentum(f) if rep == MOMENTUM else to_position(f)


def dense_oracle_transform(f: SpinorField, block=256) -> SpinorField:
    """Direct O(N^2) evaluation of the transform, for tests only.

    Sums ``exp(+-i p_mu x^mu / hbar)`` over every site pair without any FFT.
    Maps a position field to momentum and a momentum field to position.
    """
    lat = f.lattice
    if lat.sites > ORACLE_MAX_SITES:
        raise SizeGuardError("dense oracle limited to 16^4 sites", sites=lat.sites)
    hbar = f.hbar
    xs = np.stack([g.ravel() for g in np.meshgrid(*[a.coords() for a in lat.axes], indexing="ij")])
    ps = np.stack([g.ravel() for g in np.meshgrid(*[a.momenta(hbar) for a in lat.axes], indexing="ij")])
    src = f.amps.reshape(4, -1)
    if f.rep == POSITION:
        sign, scale, rows, cols, rep = +1, lat.cell_volume, ps, xs, MOMENTUM
    else:
        sign, scale, rows, cols, rep = -1, lat.momentum_cell(hbar), xs, ps, POSITION
    scale /= (2.0 * np.pi * hbar) ** 2
    out = np.empty_like(src)
    for start in range(0, rows.shape[1], block):
        r = rows[:, start : start + block]
        kernel = np.exp(sign * 1j * (r.T @ cols) / hbar)
        out[:, start : start + block] = scale * (src @ kernel.T)
    return f.with_amps(out.reshape(f.amps.shape), rep)
