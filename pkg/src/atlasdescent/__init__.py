"""Atlases, hypercovers and descent over finite frames of opens."""
from .descent import SetSheaf, check_descent, is_sheaf, limit_over_diagram, sections_sheaf
from .hypercover import LabeledSSet, cech_nerve, check_hypercover, check_hypercover_dhi, labeled_to_families
from .lifting import LiftingProblem, OpenDiagram, Verdict, check_atlas, equivalence_report, local_lifting_check
from .nerve import counit_eval, homology, nerve_truncated, refine_diagram, slice_refinement_check
from .order import (
    FiniteFrame,
    FinitePoset,
    FinitePreorder,
    MonotoneMap,
    alexandrov_frame,
    covers,
    is_zero_coinitial,
    left_cone,
    meet_over,
    poset_pushout,
    preorder_to_poset,
)
from .semirep import FamilyMorphism, IndexedFamily, SetPresheaf, factor_local_iso, hom_families, totalize
from .simplicial import TruncatedSemiSSet, TruncatedSSet, boundary_tuples, ez_decompose, simplicial_envelope

__all__ = [
    "FamilyMorphism",
    "FiniteFrame",
    "FinitePoset",
    "FinitePreorder",
    "IndexedFamily",
    "LabeledSSet",
    "LiftingProblem",
    "MonotoneMap",
    "OpenDiagram",
    "SetPresheaf",
    "SetSheaf",
    "TruncatedSSet",
    "TruncatedSemiSSet",
    "Verdict",
    "alexandrov_frame",
    "boundary_tuples",
    "cech_nerve",
    "check_atlas",
    "check_descent",
    "check_hypercover",
    "check_hypercover_dhi",
    "counit_eval",
    "covers",
    "equivalence_report",
    "ez_decompose",
    "factor_local_iso",
    "hom_families",
    "homology",
    "is_sheaf",
    "is_zero_coinitial",
    "labeled_to_families",
    "left_cone",
    "limit_over_diagram",
    "local_lifting_check",
    "meet_over",
    "nerve_truncated",
    "poset_pushout",
    "preorder_to_poset",
    "refine_diagram",
    "sections_sheaf",
    "simplicial_envelope",
    "slice_refinement_check",
    "totalize",
]
