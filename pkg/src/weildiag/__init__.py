"""Exact-arithmetic engine for graded Weil/Jacobi diagram calculus."""

from .diagram_core import (
    Diagram,
    DiagramError,
    Grading,
    LegKind,
    LinComb,
    SpaceTag,
    canonical_form,
    disjoint_union,
    grading,
    is_connected,
    juxtapose,
    parse,
    serialize,
)

__all__ = [
    "Diagram",
    "DiagramError",
    "Grading",
    "LegKind",
    "LinComb",
    "SpaceTag",
    "canonical_form",
    "disjoint_union",
    "grading",
    "is_connected",
    "juxtapose",
    "parse",
    "serialize",
]

__version__ = "0.1.0"
