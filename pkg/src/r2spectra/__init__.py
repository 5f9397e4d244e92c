"""R_II orthogonal polynomial sequences, their perturbations, unit-circle images and zeros."""
from .poly import Poly
from .recurrence import (
    RecurrenceFamily,
    PolySequence,
    builtin,
    generate_first,
    generate_second,
    generate_associated,
    build_pencil,
    pencil_charpoly,
    parse_family,
    family_from_config,
)
from .perturbation import PerturbationSpec, perturb_direct
from .zeros import all_roots, zeros_of

__all__ = [
    "Poly",
    "RecurrenceFamily",
    "PolySequence",
    "builtin",
    "generate_first",
    "generate_second",
    "generate_associated",
    "build_pencil",
    "pencil_charpoly",
    "parse_family",
    "family_from_config",
    "PerturbationSpec",
    "perturb_direct",
    "all_roots",
    "zeros_of",
]
