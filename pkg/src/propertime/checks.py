"""Standalone invariant suites behind ``propertime check``.

Each suite returns rows ``(name, deviation, tolerance, ok)``.  The identity
suite accepts any :class:`GammaSet`, which is how a corrupted table is shown
to be caught.
"""
from __future__ import annotations

import numpy as np

from .clifford import (
    DIRAC, METRIC, FourMomentum, GammaSet, dirac_adjoint, mode_projector, mode_propagator, slash,
    spinor_boost, vector_boost,
)
from .evolution import evolve
from .lattice import MOMENTUM, POSITION, Lattice4, SpinorField, dense_oracle_transform, to_momentum, to_position

IDENTITY_TOL = 1e-10
ORACLE_TOL = 1e-10

#: one momentum per branch: tardyon, antiparticle-like tardyon, tachyon, null
BRANCH_MOMENTA = {
    "tardyon": (1.3, 0.2, -0.4, 0.5),
    "tardyon_negative_energy": (-1.1, 0.3, 0.1, -0.2),
    "tachyon": (0.2, 1.0, 0.3, -0.4),
    "null": (1.0, 0.6, 0.0, 0.8),
}

BOOSTS = {
    "boost_01": [(0, 1, 0.3)],
    "rotation_12": [(1, 2, 0.4)],
    "mixed": [(0, 1, 0.2), (0, 3, -0.15), (2, 3, 0.25)],
}


def _eps(entries):
    eps = np.zeros((4, 4))
    for mu, nu, v in entries:
        eps[mu, nu], eps[nu, mu] = v, -v
    return eps


def _dev(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def identity_rows(G: GammaSet = DIRAC, s=0.7, hbar=0.5):
    rows = []
    I = np.eye(4)
    g = G.gamma
    anti = max(_dev(g[m] @ g[n] + g[n] @ g[m], 2 * METRIC[m] * (m == n) * I) for m in range(4) for n in range(4))
    rows.append(("anticommutators", anti))
    rows.append(("gamma0_adjointness", max(_dev(dirac_adjoint(g[m], G), g[m]) for m in range(4))))
    for branch, p in BRANCH_MOMENTA.items():
        p = FourMomentum(p)
        H = slash(p, G)
        rows.append((f"slash_square_{branch}", _dev(H @ H, p.p2 * I)))
        U = mode_propagator(p, s, hbar, G)
        rows.append((f"pseudo_unitarity_{branch}", _dev(dirac_adjoint(U, G) @ U, I)))
        if p.is_null:
            continue
        L = mode_projector(p, G)
        rows.append((f"projector_idempotent_{branch}", _dev(L @ L, L)))
        rows.append((f"projector_commutes_{branch}", _dev(L @ U, U @ L)))
    for name, entries in BOOSTS.items():
        eps = _eps(entries)
        S = spinor_boost(eps, G)
        Sb = dirac_adjoint(S, G)
        rows.append((f"spinor_boost_pseudo_unitary_{name}", _dev(Sb @ S, I)))
        Lam = vector_boost(eps)
        cov = max(_dev(Sb @ g[m] @ S, np.einsum("n,nij->ij", Lam[m], g)) for m in range(4))
        rows.append((f"spinor_vector_covariance_{name}", cov))
    return [(name, dev, IDENTITY_TOL, dev <= IDENTITY_TOL) for name, dev in rows]


def _random_field(lat, hbar, rep, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal((4,) + lat.shape) + 1j * rng.standard_normal((4,) + lat.shape)
    return SpinorField(lat, rep, amps, hbar)


def _mode_oracle_evolve(f: SpinorField, s):
    lat, hbar = f.lattice, f.hbar
    grids = np.meshgrid(*[a.momenta(hbar) for a in lat.axes], indexing="ij")
    out = np.empty_like(f.amps)
    for idx in np.ndindex(lat.shape):
        p = [grids[mu][idx] for mu in range(4)]
        out[(slice(None),) + idx] = mode_propagator(p, s, hbar) @ f.amps[(slice(None),) + idx]
    return f.with_amps(out)


def oracle_rows(n=8, hbar=0.7, s=0.9, seed=20240917):
    """FFT transforms and vectorized evolution against direct summation on ``n^4``."""
    lat = Lattice4.centered(n, [0.6, 0.8, 0.7, 0.9], center=(0.3, -0.2, 0.1, 0.4))
    rows = []
    fx = _random_field(lat, hbar, POSITION, seed)
    scale = float(np.max(np.abs(fx.amps)))
    fast = to_momentum(fx)
    dense = dense_oracle_transform(fx)
    pscale = float(np.max(np.abs(dense.amps)))
    rows.append(("forward_transform", _dev(fast.amps, dense.amps) / pscale))
    fp = _random_field(lat, hbar, MOMENTUM, seed + 1)
    dense_x = dense_oracle_transform(fp)
    rows.append(("backward_transform", _dev(to_position(fp).amps, dense_x.amps) / float(np.max(np.abs(dense_x.amps)))))
    rows.append(("round_trip", _dev(to_position(fast).amps, fx.amps) / scale))
    ev = evolve(fast, s)
    ref = _mode_oracle_evolve(dense, s)
    rows.append(("mode_evolution", _dev(ev.amps, ref.amps) / float(np.max(np.abs(ref.amps)))))
    back_fast = to_position(ev)
    back_dense = dense_oracle_transform(ref)
    rows.append(("evolved_position_field", _dev(back_fast.amps, back_dense.amps) / float(np.max(np.abs(back_dense.amps)))))
    return [(name, dev, ORACLE_TOL, dev <= ORACLE_TOL) for name, dev in rows]


def format_table(rows) -> str:
    width = max(len(r[0]) for r in rows)
    lines = [f"{'check':<{width}}  {'deviation':>10}  {'tolerance':>9}  result"]
    for name, dev, tol, ok in rows:
        lines.append(f"{name:<{width}}  {dev:10.3e}  {tol:9.1e}  {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines)
