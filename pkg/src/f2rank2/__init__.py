"""Spaces of matrices with bounded rank over F2: canonical forms, predicates and exhaustive classification."""

from .catalog import CatalogEntry, CatalogError, r11_family, r_space
from .classify import ClassificationReport, counting_check_n2, enumerate_classes, run_suite
from .genmatrix import GenericSyntaxError, format_generic, parse_generic, parse_space
from .gf2 import Gf2Matrix, Gf2Poly, Gf2Vector, QuadForm, ShapeError
from .orbits import (
    CanonicalKey,
    Witness,
    affine_equivalent,
    are_equivalent,
    are_similar,
    canonical_affine,
    canonical_equiv,
    canonical_sim,
    embedding_witness,
)
from .spaces import AffineMatrixSpace, MatrixSpace, VectorSpaceF2, dual_space

__version__ = "0.1.0"
