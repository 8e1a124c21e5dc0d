"""Proper-time evolution of Dirac wave packets on a four-dimensional lattice."""
from .clifford import DIRAC, FourMomentum, GammaSet, slash, spinor_boost
from .errors import PropertimeError
from .evolution import evolve, evolve_fock, trajectory
from .lattice import Lattice4, SpinorField, to_momentum, to_position
from .lorentz import BoostSpec, boost_field
from .observables import expect, factorization_defect, indefinite_inner, l2_norm, project_positive_mass
from .wavepackets import PacketSpec, cooke_packet

__all__ = [
    "DIRAC", "FourMomentum", "GammaSet", "slash", "spinor_boost",
    "PropertimeError",
    "evolve", "evolve_fock", "trajectory",
    "Lattice4", "SpinorField", "to_momentum", "to_position",
    "BoostSpec", "boost_field",
    "expect", "factorization_defect", "indefinite_inner", "l2_norm", "project_positive_mass",
    "PacketSpec", "cooke_packet",
]
