"""Reeb graphs of Morse functions on closed surfaces and their cobordism group."""
from .cobordism import (
    CobordismClass,
    are_cobordant,
    class_of_graph,
    class_of_morse,
    realize,
    realize_surface,
)
from .moves import MoveSite, MoveTrace, apply, enumerate_sites
from .normal_form import canonical, normalize
from .reeb import ReebGraph, Sigma, VertexModel, is_isomorphic, sigma, validate
from .surface import TriangulatedSurface, VertexFunction, extract_reeb, load_off, load_values

__all__ = [
    "CobordismClass", "MoveSite", "MoveTrace", "ReebGraph", "Sigma", "TriangulatedSurface",
    "VertexFunction", "VertexModel", "apply", "are_cobordant", "canonical", "class_of_graph",
    "class_of_morse", "enumerate_sites", "extract_reeb", "is_isomorphic", "load_off",
    "load_values", "normalize", "realize", "realize_surface", "sigma", "validate",
]
