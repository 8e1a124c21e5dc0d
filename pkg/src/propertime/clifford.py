"""Gamma-matrix algebra and single-mode kernels in the Dirac representation.

Conventions
-----------
* metric signature ``(+1, -1, -1, -1)``
* ``gamma[0] = diag(1, 1, -1, -1)``, ``gamma[k] = [[0, s_k], [-s_k, 0]]``
* momenta are stored with lower (covariant) indices ``p_mu``; ``p^mu = g^{mu mu} p_mu``
* the mass root ``sqrt(p^2)`` is the principal branch (``Re >= 0``); a
  spacelike momentum gets ``+i sqrt(|p^2|)``.

All functions are pure; arrays returned are freshly allocated.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NullModeError

#: Modes with ``|p^2|`` below this value are treated as null (light-like).
EPS_NULL = 1e-9

METRIC = np.array([1.0, -1.0, -1.0, -1.0])

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class GammaSet:
    """The four gamma matrices, the metric diagonal and ``sigma^{mu nu}``."""

    gamma: np.ndarray
    metric: np.ndarray = field(default_factory=lambda: METRIC.copy())
    sigma: np.ndarray = None

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=complex)
        if gamma.shape != (4, 4, 4):
            raise InvalidParameterError("gamma must have shape (4, 4, 4)", shape=gamma.shape)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "metric", np.asarray(self.metric, dtype=float))
        if self.sigma is None:
            sig = np.empty((4, 4, 4, 4), dtype=complex)
            for mu in range(4):
                for nu in range(4):
                    sig[mu, nu] = 0.5j * (gamma[mu] @ gamma[nu] - gamma[nu] @ gamma[mu])
            object.__setattr__(self, "sigma", sig)

    @property
    def gamma5(self):
        g = self.gamma
        return 1j * g[0] @ g[1] @ g[2] @ g[3]


def dirac_gammas() -> GammaSet:
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for k, s in enumerate(_PAULI, start=1):
        g[k, :2, 2:] = s
        g[k, 2:, :2] = -s
    return GammaSet(g)


DIRAC = dirac_gammas()


@dataclass(frozen=True)
class FourMomentum:
    """A real four-momentum given by its covariant components."""

    p_cov: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_cov, dtype=float).reshape(4)
        object.__setattr__(self, "p_cov", p)

    @property
    def p_contra(self):
        return METRIC * self.p_cov

    @property
    def p2(self) -> float:
        return float(np.dot(METRIC, self.p_cov**2))

    @property
    def mass_root(self) -> complex:
        return mass_root(self.p2)

    @property
    def is_null(self) -> bool:
        return abs(self.p2) < EPS_NULL


def mass_root(p2):
    """Principal square root of ``p2``; negative reals map to ``+i sqrt(|p2|)``.

    Works elementwise on arrays.
    """
    # explicit +0j keeps negative reals on the upper side of the branch cut
    return np.sqrt(np.asarray(p2, dtype=float) + 0j)


def _as_momentum(p) -> FourMomentum:
    return p if isinstance(p, FourMomentum) else FourMomentum(p)


def slash(p, G: GammaSet = DIRAC) -> np.ndarray:
    """``gamma^mu p_mu`` as a 4x4 matrix (upper gammas against lower momenta)."""
    p = _as_momentum(p)
    return np.einsum("m,mij->ij", p.p_cov, G.gamma)


def dirac_adjoint(M, G: GammaSet = DIRAC) -> np.ndarray:
    """``gamma^0 M^dagger gamma^0``, the adjoint under the indefinite form."""
    g0 = G.gamma[0]
    return g0 @ np.conj(np.asarray(M)).T @ g0


def mode_propagator(p, s: float, hbar: float, G: GammaSet = DIRAC) -> np.ndarray:
    """Closed form of ``exp(i s (gamma.p) / hbar)`` for one momentum mode.

    Uses ``cos(s mu/hbar) + i (gamma.p/mu) sin(s mu/hbar)``; for null modes the
    series terminates after the linear term because ``(gamma.p)^2 = 0``.
    """
    if not hbar > 0:
        raise InvalidParameterError("hbar must be positive", hbar=hbar)
    p = _as_momentum(p)
    H = slash(p, G)
    I = np.eye(4, dtype=complex)
    if p.is_null:
        return I + 1j * (s / hbar) * H
    mu = p.mass_root
    theta = s * mu / hbar
    return np.cos(theta) * I + 1j * (np.sin(theta) / mu) * H


def mode_projector(p, G: GammaSet = DIRAC) -> np.ndarray:
    """Positive-mass projector ``(1 + gamma.p / sqrt(p^2)) / 2``."""
    p = _as_momentum(p)
    if p.is_null:
        raise NullModeError("projector undefined on a null mode", p2=p.p2)
    return 0.5 * (np.eye(4, dtype=complex) + slash(p, G) / p.mass_root)


def mass_eigenmodes(p, G: GammaSet = DIRAC):
    """Eigenvalues ``(+mu, -mu)`` of ``gamma.p`` and a basis of each eigenspace.

    Returns ``(eigenvalues, bases)`` where ``bases[k]`` is a ``(4, 2)`` array
    whose columns are Euclidean-orthonormal and span the eigenspace of
    ``eigenvalues[k]``.
    """
    p = _as_momentum(p)
    lam = mode_projector(p, G)
    mu = p.mass_root
    bases = []
    for P in (lam, np.eye(4) - lam):
        u, _, _ = np.linalg.svd(P)
        bases.append(u[:, :2])
    return np.array([mu, -mu]), bases


def _check_antisymmetric(eps):
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (4, 4):
        raise InvalidParameterError("eps must be a 4x4 array", shape=eps.shape)
    if not np.allclose(eps, -eps.T, rtol=0.0, atol=1e-14):
        raise InvalidParameterError("eps must be antisymmetric", eps=eps.tolist())
    return eps


def lorentz_generator(eps, G: GammaSet = DIRAC) -> np.ndarray:
    """Spinor generator ``(i/4) eps_{mu nu} sigma^{mu nu}``."""
    eps = _check_antisymmetric(eps)
    return 0.25j * np.einsum("mn,mnij->ij", eps, G.sigma)


def spinor_boost(eps, G: GammaSet = DIRAC) -> np.ndarray:
    """Spinor Lorentz factor ``S = exp((i/4) eps_{mu nu} sigma^{mu nu})``.

    The generator ``X`` squares to ``c0 + c5 gamma5``; on the two chiral
    halves ``X^2`` is a scalar ``lam^2``, so ``exp(X) = cosh(lam) + X sinh(lam)/lam``
    on each half.
    """
    X = lorentz_generator(eps, G)
    g5 = G.gamma5
    X2 = X @ X
    c0 = np.trace(X2) / 4
    c5 = np.trace(g5 @ X2) / 4
    I = np.eye(4, dtype=complex)
    S = np.zeros((4, 4), dtype=complex)
    for sign in (1.0, -1.0):
        lam = np.sqrt(c0 + sign * c5 + 0j)
        shc = 1.0 + lam**2 / 6 if abs(lam) < 1e-8 else np.sinh(lam) / lam
        S += 0.5 * (I + sign * g5) @ (np.cosh(lam) * I + shc * X)
    return S


def vector_generator(eps) -> np.ndarray:
    """Generator ``omega^mu_nu`` of the vector transform matching :func:`spinor_boost`.

    With this sign, ``S_bar gamma^mu S = Lambda^mu_nu gamma^nu`` for
    ``Lambda = exp(omega)``.
    """
    eps = _check_antisymmetric(eps)
    return -METRIC[:, None] * eps


def vector_boost(eps) -> np.ndarray:
    """``Lambda^mu_nu`` acting on contravariant vectors."""
    from scipy.linalg import expm

    return expm(vector_generator(eps))


def _monomial(M):
    """Row permutation and coefficients if ``M`` has one nonzero per row, else None."""
    nz = np.abs(M) > 0
    if not np.all(nz.sum(axis=1) == 1):
        return None
    perm = np.argmax(nz, axis=1)
    return perm, M[np.arange(4), perm]


def apply_matrix(M, psi):
    """Apply a 4x4 spinor matrix to every site of an array shaped ``(4, ...)``."""
    mono = _monomial(M)
    if mono is None:
        return np.tensordot(M, psi, axes=(1, 0))
    perm, coef = mono
    out = psi[perm]
    out *= coef.reshape((4,) + (1,) * (psi.ndim - 1))
    return out


def slash_apply(psi, p_cov, G: GammaSet = DIRAC):
    """``(gamma^mu p_mu) psi`` with ``p_mu`` given as broadcastable arrays.

    Entries are grouped by spinor (row, column) so each pair costs one
    multiply-add with a coefficient grid that is usually much smaller than
    ``psi`` when the momentum arrays are sparse meshgrids.
    """
    out = np.zeros_like(psi, dtype=np.result_type(psi, complex))
    for a in range(4):
        for b in range(4):
            coef = 0
            for mu in range(4):
                c = G.gamma[mu][a, b]
                if c != 0:
                    coef = coef + c * p_cov[mu]
            if np.isscalar(coef) and coef == 0:
                continue
            out[a] += coef * psi[b]
    return out
