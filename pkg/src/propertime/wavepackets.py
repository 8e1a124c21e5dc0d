"""Minimum-uncertainty Gaussian packets dressed with a constant spinor."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import erfc

from . import clifford
from .clifford import DIRAC, FourMomentum, GammaSet
from .errors import InvalidParameterError, ResolutionError, SpeciesMismatchError
from .lattice import MOMENTUM, POSITION, Lattice4, SpinorField, to_momentum, to_position

PARTICLE = "particle"
ANTIPARTICLE = "antiparticle"
UNPROJECTED_MIX = "unprojected_mix"
TACHYON = "tachyon"
SPECIES = (PARTICLE, ANTIPARTICLE, UNPROJECTED_MIX, TACHYON)

#: admissibility thresholds
TAIL_LIMIT = 1e-8
MIN_SITES_PER_WIDTH = 1.0


@dataclass(frozen=True)
class PacketSpec:
    x0: tuple
    p0_cov: tuple
    widths: tuple
    hbar: float = 1.0
    species: str = PARTICLE
    mix_weight: float = 0.5

    def __post_init__(self):
        for name in ("x0", "p0_cov", "widths"):
            v = tuple(float(c) for c in getattr(self, name))
            if len(v) != 4:
                raise InvalidParameterError(f"{name} needs four components", value=v)
            object.__setattr__(self, name, v)
        if min(self.widths) <= 0:
            raise InvalidParameterError("widths must be positive", widths=self.widths)
        if not self.hbar > 0:
            raise InvalidParameterError("hbar must be positive", hbar=self.hbar)
        if self.species not in SPECIES:
            raise InvalidParameterError("unknown species", species=self.species)
        if not 0.0 <= self.mix_weight <= 1.0:
            raise InvalidParameterError("mix_weight must lie in [0, 1]", mix_weight=self.mix_weight)

    @property
    def momentum_widths(self):
        return tuple(self.hbar / (2.0 * w) for w in self.widths)

    def at_hbar(self, hbar):
        """Same packet at another hbar, widths rescaled by ``sqrt(hbar'/hbar)``."""
        scale = np.sqrt(hbar / self.hbar)
        return replace(self, hbar=float(hbar), widths=tuple(w * scale for w in self.widths))

    def to_dict(self):
        return {
            "x0": list(self.x0),
            "p0_cov": list(self.p0_cov),
            "widths": list(self.widths),
            "hbar": self.hbar,
            "species": self.species,
            "mix_weight": self.mix_weight,
        }


@dataclass
class ResolutionReport:
    x_tail: list
    p_tail: list
    sites_per_width: list
    centered: list
    admissible: bool
    reasons: list = field(default_factory=list)

    def to_dict(self):
        return {
            "x_tail": self.x_tail,
            "p_tail": self.p_tail,
            "sites_per_width": self.sites_per_width,
            "centered": self.centered,
            "admissible": self.admissible,
            "reasons": self.reasons,
        }


def _gaussian_tail(distance, sigma):
    """Mass of a unit normal density with std ``sigma`` beyond ``distance``."""
    if distance <= 0:
        return 1.0
    return 0.5 * float(erfc(distance / (np.sqrt(2.0) * sigma)))


def validate_resolution(spec: PacketSpec, lat: Lattice4, tail_limit=TAIL_LIMIT,
                        min_sites_per_width=MIN_SITES_PER_WIDTH) -> ResolutionReport:
    """Per-axis leakage of ``|Phi|^2`` out of the lattice in position and momentum.

    The position tail counts mass beyond either periodic boundary; the momentum
    tail counts mass beyond the Nyquist momentum ``pi hbar / dx`` on either side.
    The center must also sit in the middle half of each axis so coordinate
    means are not ambiguous under wrap-around.
    """
    x_tail, p_tail, spw, centered, reasons = [], [], [], [], []
    for mu, ax in enumerate(lat.axes):
        sx = spec.widths[mu]
        sp = spec.hbar / (2.0 * sx)
        lo, hi = ax.x_min, ax.x_min + ax.length
        c = spec.x0[mu]
        xt = _gaussian_tail(c - lo, sx) + _gaussian_tail(hi - c, sx)
        pn = ax.p_nyquist(spec.hbar)
        q = spec.p0_cov[mu]
        pt = _gaussian_tail(pn - q, sp) + _gaussian_tail(pn + q, sp)
        mid = lo + 0.25 * ax.length <= c <= hi - 0.25 * ax.length
        x_tail.append(xt)
        p_tail.append(pt)
        spw.append(sx / ax.dx)
        centered.append(bool(mid))
        if xt >= tail_limit:
            reasons.append(f"axis {mu}: position tail {xt:.3g} >= {tail_limit:g}")
        if pt >= tail_limit:
            reasons.append(f"axis {mu}: momentum tail {pt:.3g} >= {tail_limit:g}")
        if sx / ax.dx < min_sites_per_width:
            reasons.append(f"axis {mu}: {sx / ax.dx:.3g} sites per width < {min_sites_per_width:g}")
        if not mid:
            reasons.append(f"axis {mu}: center {c:g} outside the middle half of the axis")
    return ResolutionReport(x_tail, p_tail, spw, centered, not reasons, reasons)


def _phase_fix(u):
    k = int(np.argmax(np.abs(u) > 1e-12 * np.abs(u).max()))
    return u * (abs(u[k]) / u[k])


def rest_spinor(p0, G: GammaSet = DIRAC, species=PARTICLE):
    """Constant spinor ``u`` with ``(gamma.p0) u = sqrt(p0^2) u``.

    Built as ``(gamma.p0 + mu) e_k`` from the reference spinor that gives the
    largest candidate (``e1`` first on ties).  Tardyonic spinors are scaled
    so ``|u_bar u| = 1``; the sign of ``u_bar u`` equals ``sgn p0_0``.  Tachyonic
    spinors have ``u_bar u = 0`` and are scaled to unit Euclidean length.
    """
    p = p0 if isinstance(p0, FourMomentum) else FourMomentum(p0)
    tardyon = species in (PARTICLE, ANTIPARTICLE, UNPROJECTED_MIX)
    if p.is_null:
        raise SpeciesMismatchError("center momentum is null; no positive-mass spinor", p2=p.p2)
    if tardyon and p.p2 < 0:
        raise SpeciesMismatchError("spacelike center for a tardyonic species", p2=p.p2, species=species)
    if species == TACHYON and p.p2 > 0:
        raise SpeciesMismatchError("timelike center for the tachyon species", p2=p.p2)
    lift = clifford.slash(p, G) + p.mass_root * np.eye(4)
    norms = np.linalg.norm(lift, axis=0)
    k = int(np.argmax(norms >= (1 - 1e-12) * norms.max()))
    if norms[k] < 1e-12 * max(1.0, abs(p.mass_root)):
        raise SpeciesMismatchError("all reference spinors vanish under the lift", p=p.p_cov.tolist())
    u = _phase_fix(lift[:, k])
    if tardyon:
        uu = float(np.real(np.conj(u) @ G.gamma[0] @ u))
        u = u / np.sqrt(abs(uu))
    else:
        u = u / np.linalg.norm(u)
    return u


def gaussian_profile(spec: PacketSpec, lat: Lattice4) -> np.ndarray:
    """Separable Gaussian ``Phi_c`` on the lattice, unit discrete L2 norm."""
    phi = np.ones(lat.shape, dtype=complex)
    for mu in range(4):
        x = lat.coord(mu)
        w = spec.widths[mu]
        phi = phi * np.exp(-1j * spec.p0_cov[mu] * x / spec.hbar - ((x - spec.x0[mu]) / (2.0 * w)) ** 2)
    norm = np.sqrt(np.sum(np.abs(phi) ** 2) * lat.cell_volume)
    return phi / norm


def packet_factors(spec: PacketSpec, lat: Lattice4, G: GammaSet = DIRAC):
    """``(u, Phi)`` such that the Cooke packet is ``u * Phi``."""
    species = PARTICLE if spec.species == UNPROJECTED_MIX else spec.species
    p0 = FourMomentum(spec.p0_cov)
    if species == ANTIPARTICLE and p0.p_cov[0] > 0 or species == PARTICLE and p0.p_cov[0] < 0:
        raise SpeciesMismatchError(
            "sign of p0_cov[0] does not match species", species=spec.species, p0=spec.p0_cov[0]
        )
    return rest_spinor(p0, G, species), gaussian_profile(spec, lat)


def cooke_packet(spec: PacketSpec, lat: Lattice4, G: GammaSet = DIRAC, check=True) -> SpinorField:
    """Position-representation packet ``u * Phi_c``.

    For ``unprojected_mix`` the result is
    ``sqrt(1 - w) * Lambda Psi_c + sqrt(w) * (1 - Lambda) Psi_c`` with the
    projection applied mode by mode; ``w = 0`` is the purely projected packet
    and ``w = 0.5`` reproduces ``Psi_c / sqrt(2)``.
    """
    if check:
        diag = validate_resolution(spec, lat)
        if not diag.admissible:
            raise ResolutionError("packet not resolved by the lattice", **diag.to_dict())
    u, phi = packet_factors(spec, lat, G)
    field_ = SpinorField(lat, POSITION, u[:, None, None, None, None] * phi[None], spec.hbar)
    if spec.species != UNPROJECTED_MIX:
        return field_
    from .observables import project_positive_mass

    fm = to_momentum(field_)
    proj, _ = project_positive_mass(fm, G)
    w = spec.mix_weight
    mixed = np.sqrt(1.0 - w) * proj.amps + np.sqrt(w) * (fm.amps - proj.amps)
    return to_position(fm.with_amps(mixed, MOMENTUM))
