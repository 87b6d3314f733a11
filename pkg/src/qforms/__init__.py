"""Exact computations with Z-graded supercommutative algebras, their
derivations, algebroid differentials, equivariant models and groupoid
cochains."""
from .gca import Element, GeneratorTable, basis, substitute
from .derivations import Derivation, bracket, conjugate, is_homological
from .algebroids import Section, StructureData, build_differential, check_jacobi, extract_structure
from .cohomology import ComplexSpec, basic_betti, betti, representatives

__all__ = [
    "ComplexSpec",
    "Derivation",
    "Element",
    "GeneratorTable",
    "Section",
    "StructureData",
    "basic_betti",
    "basis",
    "betti",
    "bracket",
    "build_differential",
    "check_jacobi",
    "conjugate",
    "extract_structure",
    "is_homological",
    "representatives",
    "substitute",
]
