"""Indefinite form, expectation values, positive-mass projection and defects."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import DIRAC, EPS_NULL, GammaSet, mass_root, slash_apply
from .errors import IllConditionedError, InvalidParameterError, NotProductFormError, RepresentationError
from .lattice import MOMENTUM, POSITION, SpinorField, as_rep, forward, require_compatible

#: normalized means are refused above this L2/|indefinite| ratio
KAPPA_MAX = 1e6

X_TAGS = ("x0", "x1", "x2", "x3")
P_TAGS = ("p0", "p1", "p2", "p3")
ORBITAL_TAGS = X_TAGS + P_TAGS + ("psq", "sqrt_psq")
SPIN_TAGS = ("H", "H2")
OPERATOR_TAGS = ORBITAL_TAGS + SPIN_TAGS

#: diagonal of gamma^0 in the Dirac representation, used by the bilinear form
_G0 = np.array([1.0, 1.0, -1.0, -1.0])


@dataclass
class ExpectationReport:
    op: str
    value: complex
    kappa: float
    rep: str


def _signed_dot(a, b, signs):
    total = 0j
    for k in range(a.shape[0]):
        total += signs[k] * np.vdot(a[k], b[k])
    return total


def indefinite_inner(f: SpinorField, g: SpinorField) -> complex:
    """``sum conj(f)^T gamma^0 g`` times the lattice measure of the representation."""
    require_compatible(f, g)
    return complex(_signed_dot(f.amps, g.amps, _G0) * f.measure)


def l2_norm(f: SpinorField) -> float:
    """Positive-definite form ``sum |f|^2`` times the measure (a squared norm)."""
    return float(np.real(_signed_dot(f.amps, f.amps, np.ones(4))) * f.measure)


def conditioning(f: SpinorField) -> float:
    n = abs(indefinite_inner(f, f))
    l2 = l2_norm(f)
    return float("inf") if n == 0 else l2 / n


def op_rep(tag: str) -> str:
    if tag not in OPERATOR_TAGS:
        raise InvalidParameterError("unknown operator tag", tag=tag, known=list(OPERATOR_TAGS))
    return POSITION if tag in X_TAGS else MOMENTUM


def apply_op(f: SpinorField, tag: str, G: GammaSet = DIRAC) -> SpinorField:
    """Apply an operator, returning the field in the operator's natural representation."""
    rep = op_rep(tag)
    f = as_rep(f, rep)
    lat, hbar = f.lattice, f.hbar
    if tag in X_TAGS:
        return f.with_amps(f.amps * lat.coord(int(tag[1])))
    if tag in P_TAGS:
        return f.with_amps(f.amps * lat.momentum(int(tag[1]), hbar))
    if tag == "psq":
        return f.with_amps(f.amps * lat.p_squared(hbar))
    if tag == "sqrt_psq":
        return f.with_amps(f.amps * mass_root(lat.p_squared(hbar)))
    p = lat.momentum_grids(hbar)
    out = slash_apply(f.amps, p, G)
    if tag == "H2":
        out = slash_apply(out, p, G)
    return f.with_amps(out)


def _normalizer(f: SpinorField, guard=True):
    n = indefinite_inner(f, f)
    kappa = float("inf") if n == 0 else l2_norm(f) / abs(n)
    if guard and not kappa <= KAPPA_MAX:
        raise IllConditionedError(
            "indefinite norm too small for normalized means", kappa=kappa, kappa_max=KAPPA_MAX
        )
    return n, kappa


def _matrix_element(f: SpinorField, g: SpinorField) -> complex:
    return indefinite_inner(as_rep(f, g.rep), g)


def _signed_density(amps):
    rho = np.zeros(amps.shape[1:])
    for k in range(amps.shape[0]):
        rho += _G0[k] * (amps[k].real ** 2 + amps[k].imag ** 2)
    return rho


def axis_means(f: SpinorField, n=None):
    """Normalized ``<x^mu>`` (position rep) or ``<p_mu>`` (momentum rep) for all four axes.

    Both are multiplication operators, so only the signed density and its
    one-dimensional marginals are needed.
    """
    if n is None:
        n, _ = _normalizer(f)
    rho = _signed_density(f.amps)
    lat = f.lattice
    out = np.empty(4)
    for mu, ax in enumerate(lat.axes):
        other = tuple(a for a in range(4) if a != mu)
        grid = ax.coords() if f.rep == POSITION else ax.momenta(f.hbar)
        out[mu] = (np.dot(rho.sum(axis=other), grid) * f.measure / n).real
    return out


def expect(f: SpinorField, tag: str, G: GammaSet = DIRAC) -> ExpectationReport:
    """``<f|A f> / <f|f>`` under the indefinite form."""
    n, kappa = _normalizer(f)
    g = apply_op(f, tag, G)
    return ExpectationReport(tag, _matrix_element(f, g) / n, kappa, g.rep)


def project_positive_mass(f: SpinorField, G: GammaSet = DIRAC):
    """Apply ``Lambda(p) = (1 + gamma.p / sqrt(p^2)) / 2`` mode by mode.

    Null modes (``|p^2| < EPS_NULL``) are zeroed; their L2 weight is returned.
    """
    if f.rep != MOMENTUM:
        raise RepresentationError("projection acts on momentum-representation fields", rep=f.rep)
    lat, hbar = f.lattice, f.hbar
    p2 = lat.p_squared(hbar)
    null = np.abs(p2) < EPS_NULL
    mu = mass_root(p2)
    mu[null] = 1.0
    out = slash_apply(f.amps, lat.momentum_grids(hbar), G)
    out /= mu
    out += f.amps
    out *= 0.5
    excluded = 0.0
    if null.any():
        excluded = float(np.sum(np.abs(f.amps[:, null]) ** 2) * f.measure)
        out[:, null] = 0.0
    return f.with_amps(out), excluded


def factorization_defect(f: SpinorField, a: str, b: str, G: GammaSet = DIRAC) -> float:
    """``|<AB> - <A><B>|`` with ``B`` applied first.  Orbital tags only."""
    for tag in (a, b):
        op_rep(tag)
        if tag not in ORBITAL_TAGS:
            raise InvalidParameterError("factorization defect takes orbital operators only", tag=tag)
    n, _ = _normalizer(f)
    fb = apply_op(f, b, G)
    fab = apply_op(fb, a, G)
    ab = _matrix_element(f, fab) / n
    ea = _matrix_element(f, apply_op(f, a, G)) / n
    eb = _matrix_element(f, fb) / n
    return float(abs(ab - ea * eb))


@dataclass
class ReductionCheck:
    op: str
    deviation: float | None
    skipped: bool = False
    reason: str = ""


def _scalar_expect(phi, lat, hbar, tag):
    if tag in X_TAGS:
        w = np.abs(phi) ** 2
        return np.sum(w * lat.coord(int(tag[1]))) / np.sum(w)
    chi = forward(phi, lat, hbar)
    w = np.abs(chi) ** 2
    if tag in P_TAGS:
        mult = lat.momentum(int(tag[1]), hbar)
    elif tag == "psq":
        mult = lat.p_squared(hbar)
    else:
        mult = mass_root(lat.p_squared(hbar))
    return np.sum(w * mult) / np.sum(w)


def spin_orbital_reduction_check(f: SpinorField, spec, tag: str, G: GammaSet = DIRAC) -> ReductionCheck:
    """Compare ``<A>`` on the spinor field with ``<A>`` on its scalar profile alone.

    ``f`` must equal ``u * Phi`` for the factors rebuilt from ``spec``.
    """
    from .wavepackets import TACHYON, UNPROJECTED_MIX, packet_factors

    if tag not in ORBITAL_TAGS:
        raise InvalidParameterError("reduction check takes orbital operators only", tag=tag)
    if spec.species == UNPROJECTED_MIX:
        raise NotProductFormError("unprojected_mix packets are not of the form u * Phi")
    u, phi = packet_factors(spec, f.lattice, G)
    fx = as_rep(f, POSITION)
    ref = u[:, None, None, None, None] * phi[None]
    scale = max(np.abs(ref).max(), 1e-300)
    if np.abs(fx.amps - ref).max() > 1e-10 * scale:
        raise NotProductFormError("field differs from u * Phi built from spec")
    if spec.species == TACHYON:
        uu = np.real(np.conj(u) @ G.gamma[0] @ u)
        return ReductionCheck(tag, None, True, f"zero-norm spinor (u_bar u = {uu:.3g}); normalization undefined")
    spinor_mean = expect(f, tag, G).value
    scalar_mean = _scalar_expect(phi, f.lattice, f.hbar, tag)
    return ReductionCheck(tag, float(abs(spinor_mean - scalar_mean)))
