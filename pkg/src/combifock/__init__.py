"""Combinatorial Fock spaces: species of structures, symmetric Hilbert
spaces on orbit bases, weighted ladder operators, and numerical checks of
the commutation relations and vacuum statistics they generate."""

__version__ = "0.1.0"

from .dsl import parse, species_from_string, to_string
from .fock import FockSpace, OrbitCanonicalizer, inner_product
from .species import ATOMS, OrbitInfo, colored_orbit, stabilizer_order, structure_orbit
from .weights import kernel_lower, kernel_upper, weight_from_name

__all__ = [
    "ATOMS",
    "FockSpace",
    "OrbitCanonicalizer",
    "OrbitInfo",
    "colored_orbit",
    "inner_product",
    "kernel_lower",
    "kernel_upper",
    "parse",
    "species_from_string",
    "stabilizer_order",
    "structure_orbit",
    "to_string",
    "weight_from_name",
]
