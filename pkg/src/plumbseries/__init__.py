"""Two-variable (q,t) series of plumbed 3-manifolds with root-lattice coefficients."""

from .lattice import RootLattice, WeylElement, build_lattice
from .laurent import Series, Window, canonical_text
from .plumbing import NeumannMove, PlumbingTree, chain, star
from .series import Tau, Truncation, make_tau, y_closed, y_knot

__all__ = [
    "NeumannMove",
    "PlumbingTree",
    "RootLattice",
    "Series",
    "Tau",
    "Truncation",
    "WeylElement",
    "Window",
    "build_lattice",
    "canonical_text",
    "chain",
    "make_tau",
    "star",
    "y_closed",
    "y_knot",
]
