"""Orthogonal graphs over Galois rings of odd characteristic."""

from .galois_ring import GaloisRing, RingElem, make_ring, nonsquare_z, padic_digits, sqrt_unit, teichmuller
from .orthograph import OrthoGraph, ProjPoint, build_graph, canonicalize, enumerate_vertices
from .parameters import ParamReport, empirical_params, formula_n_k, formula_qsrg, formula_srg
from .ring_linalg import FormSpace, make_space
from .suborbits import OrbitLabel, Witness, classify, move_to_e1, orbit_census, reduce_in_stabilizer

__all__ = [
    "GaloisRing",
    "RingElem",
    "make_ring",
    "nonsquare_z",
    "padic_digits",
    "sqrt_unit",
    "teichmuller",
    "FormSpace",
    "make_space",
    "OrthoGraph",
    "ProjPoint",
    "build_graph",
    "canonicalize",
    "enumerate_vertices",
    "ParamReport",
    "empirical_params",
    "formula_n_k",
    "formula_srg",
    "formula_qsrg",
    "OrbitLabel",
    "Witness",
    "classify",
    "move_to_e1",
    "orbit_census",
    "reduce_in_stabilizer",
]
