"""Independent geometric oracle for the two sign conventions.

Both the pairing sign and the gluing sign are Koszul signs of a wiring
picture.  This module rebuilds each picture literally: strands are
polylines with exact Fraction coordinates, crossings are found by exact
segment-intersection tests, and each transversal crossing of strand
pieces with grades g1, g2 contributes g1 * g2 to the sign exponent.
The parity of the total is independent of the drawing heights (any
perturbation changes crossing counts by even amounts), which is what
makes this an oracle rather than a transcription of the engine's
bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
Segment = Tuple[Point, Point]


def _orient(a: Point, b: Point, c: Point) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def segments_cross(s: Segment, t: Segment) -> bool:
    """Proper (interior) intersection of two closed segments."""
    a, b = s
    c, d = t
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


class Strand:
    """A polyline with a grade; crossings count mod 2 weighted by grades."""

    def __init__(self, grade: int, points: Sequence[Point]):
        self.grade = grade
        self.segments: List[Segment] = [
            (points[i], points[i + 1]) for i in range(len(points) - 1)
        ]

    def crossings_with(self, other: "Strand") -> int:
        n = 0
        for s in self.segments:
            for t in other.segments:
                if segments_cross(s, t):
                    n += 1
        return n


def sign_of_strands(strands: Sequence[Strand]) -> int:
    x = 0
    for i in range(len(strands)):
        for j in range(i + 1, len(strands)):
            x += (
                strands[i].grade
                * strands[j].grade
                * strands[i].crossings_with(strands[j])
            )
    return -1 if x % 2 else 1


def _fr(x) -> Fraction:
    return Fraction(x)


def pairing_sign_drawn(grades: Sequence[int], pairing,
                       levels: Sequence[int] = None) -> int:
    """The pairing sign, from an actual drawing.

    Legs sit at integer x positions on the baseline.  Each arc (i, j) is
    drawn as a three-segment hook through its own height level; every
    unpaired leg is a vertical ray rising above all arcs.  Grade-2
    strands still get drawn; their crossings weigh zero.  ``levels``
    reorders the arc heights; the resulting parity never depends on it,
    which a test exploits as a drawing-invariance control.
    """
    arcs = [tuple(sorted(p)) for p in pairing]
    arcs.sort()
    if levels is None:
        levels = range(len(arcs))
    paired = {q for arc in arcs for q in arc}
    strands: List[Strand] = []
    top = _fr(len(arcs) + 2)
    for t, (i, j) in enumerate(arcs):
        h = _fr(levels[t] + 1) + Fraction(1, 2)
        strands.append(
            Strand(
                grades[i],
                [
                    (_fr(i), _fr(0)),
                    (_fr(i), h),
                    (_fr(j), h),
                    (_fr(j), _fr(0)),
                ],
            )
        )
    for q, g in enumerate(grades):
        if q not in paired:
            strands.append(Strand(g, [(_fr(q), _fr(0)), (_fr(q), top)]))
    return sign_of_strands(strands)


def gluing_sign_drawn(v_grades: Sequence[int], v_is_op: Sequence[bool],
                      w_grades: Sequence[int], w_is_op: Sequence[bool],
                      sigma) -> int:
    """The gluing sign, from an actual drawing.

    The right factor's legs stand on the baseline.  Each non-operator
    leg is a vertical strand; it ends where a gluing wire consumes it,
    or at the top if none does.  The left factor's operator legs enter
    from the left margin, lowest wire first in right-to-left leg order:
    a matched wire runs to the top of its target's cut strand and stops
    there (the pair annihilates), an unmatched one runs past the whole
    row.  Operator legs of the right factor take no part.
    """
    sigma = dict(sigma)
    v_ops = [p for p, op in enumerate(v_is_op) if op]
    heights = {}
    for step, op_pos in enumerate(reversed(v_ops)):
        heights[op_pos] = _fr(step + 1)
    top = _fr(len(v_ops) + 2)
    consumed_at = {}
    for op_pos, target in sigma.items():
        consumed_at[target] = heights[op_pos]
    strands: List[Strand] = []
    for q, g in enumerate(w_grades):
        if w_is_op[q]:
            continue
        end = consumed_at.get(q, top)
        strands.append(Strand(g, [(_fr(q), _fr(0)), (_fr(q), end)]))
    far_right = _fr(len(w_grades) + 1)
    for op_pos in v_ops:
        h = heights[op_pos]
        g = v_grades[op_pos]
        if op_pos in sigma:
            strands.append(Strand(g, [(_fr(-1), h), (_fr(sigma[op_pos]), h)]))
        else:
            strands.append(Strand(g, [(_fr(-1), h), (far_right, h)]))
    return sign_of_strands(strands)
