"""Core diagram model: uni-trivalent graphs with typed ordered legs.

A diagram is a graph with trivalent internal vertices (each carrying a
cyclic orientation of its three half-edges), univalent legs arranged on an
orienting line, a multiset of edges pairing half-edges, and a count of
closed circles (edge loops with no vertices on them, which arise from
gluing operations).  Reversing the cyclic order at a vertex negates the
diagram (the AS rule); canonical_form normalizes labels and orientations
and tracks the resulting sign.

All coefficients anywhere in the package are exact `fractions.Fraction`s.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence


class DiagramError(ValueError):
    """Raised for structurally malformed diagrams or parse failures."""


class LegKind(enum.Enum):
    PLAIN = "p1"     # grade 1, the bottom-vertex / wedge generator leg
    FAT = "f2"       # grade 2 "fat dot" leg
    CURV = "F"       # grade 2 curvature leg
    PARAM_A = "a"    # grade 2 parameter leg
    PARAM_B = "b"    # grade 1 parameter leg
    OP_DA = "da"     # grade 2 operator leg
    OP_DB = "db"     # grade 1 operator leg

    @property
    def code(self) -> str:
        return self.value

    @property
    def grade(self) -> int:
        return _GRADE[self]

    @property
    def is_op(self) -> bool:
        return self in (LegKind.OP_DA, LegKind.OP_DB)

    @property
    def is_param(self) -> bool:
        return self in (LegKind.PARAM_A, LegKind.PARAM_B)

    @property
    def is_base(self) -> bool:
        return not (self.is_op or self.is_param)


_GRADE = {
    LegKind.PLAIN: 1,
    LegKind.FAT: 2,
    LegKind.CURV: 2,
    LegKind.PARAM_A: 2,
    LegKind.PARAM_B: 1,
    LegKind.OP_DA: 2,
    LegKind.OP_DB: 1,
}

_KIND_BY_CODE = {k.value: k for k in LegKind}


class SpaceTag(enum.Enum):
    B = "B"
    A = "A"
    W = "W"
    WTILDE = "Wtilde"
    WHAT = "What"
    WHAT_F = "WhatF"
    WHAT_WEDGE = "WhatWedge"
    WHAT_AB = "What_ab"
    WHAT_F_AB = "WhatF_ab"
    WHAT_WEDGE_AB = "WhatWedge_ab"

    @property
    def ordered(self) -> bool:
        return self is not SpaceTag.B

    @property
    def allows_params(self) -> bool:
        return self in (SpaceTag.WHAT_AB, SpaceTag.WHAT_F_AB, SpaceTag.WHAT_WEDGE_AB)

    @property
    def base_kinds(self) -> frozenset:
        return _BASE_KINDS[self]

    @property
    def legal_kinds(self) -> frozenset:
        if self.allows_params:
            return self.base_kinds | frozenset(
                {LegKind.PARAM_A, LegKind.PARAM_B, LegKind.OP_DA, LegKind.OP_DB}
            )
        return self.base_kinds

    @property
    def base_space(self) -> "SpaceTag":
        """The parameter-free space whose leg relations govern base legs."""
        return _BASE_SPACE.get(self, self)


_BASE_KINDS = {
    SpaceTag.B: frozenset({LegKind.PLAIN}),
    SpaceTag.A: frozenset({LegKind.PLAIN}),
    SpaceTag.W: frozenset({LegKind.PLAIN, LegKind.FAT}),
    SpaceTag.WTILDE: frozenset({LegKind.PLAIN, LegKind.FAT}),
    SpaceTag.WHAT: frozenset({LegKind.PLAIN, LegKind.FAT}),
    SpaceTag.WHAT_F: frozenset({LegKind.PLAIN, LegKind.CURV}),
    SpaceTag.WHAT_WEDGE: frozenset({LegKind.PLAIN, LegKind.CURV}),
    SpaceTag.WHAT_AB: frozenset({LegKind.PLAIN, LegKind.FAT}),
    SpaceTag.WHAT_F_AB: frozenset({LegKind.PLAIN, LegKind.CURV}),
    SpaceTag.WHAT_WEDGE_AB: frozenset({LegKind.PLAIN, LegKind.CURV}),
}

_BASE_SPACE = {
    SpaceTag.WHAT_AB: SpaceTag.WHAT,
    SpaceTag.WHAT_F_AB: SpaceTag.WHAT_F,
    SpaceTag.WHAT_WEDGE_AB: SpaceTag.WHAT_WEDGE,
}


def _norm_vertex(t: Sequence[int]) -> tuple:
    """Rotate a cyclic triple so the smallest half-edge comes first.

    A rotation is orientation-preserving, so this never costs a sign.
    """
    a, b, c = t
    m = min(a, b, c)
    if a == m:
        return (a, b, c)
    if b == m:
        return (b, c, a)
    return (c, a, b)


@dataclass(frozen=True)
class Diagram:
    space: SpaceTag
    verts: tuple = ()
    edges: tuple = ()
    legs: tuple = ()
    circles: int = 0

    def __post_init__(self):
        object.__setattr__(self, "verts", tuple(_norm_vertex(v) for v in self.verts))
        object.__setattr__(
            self,
            "edges",
            tuple(sorted(tuple(sorted(e)) for e in self.edges)),
        )
        object.__setattr__(self, "legs", tuple((h, k) for h, k in self.legs))
        self._validate()

    def _validate(self) -> None:
        seen: set = set()
        for v in self.verts:
            if len(v) != 3:
                raise DiagramError("vertex is not trivalent: %r" % (v,))
            for h in v:
                if h in seen:
                    raise DiagramError("half-edge %r used twice" % h)
                seen.add(h)
        for h, kind in self.legs:
            if not isinstance(kind, LegKind):
                raise DiagramError("bad leg kind %r" % (kind,))
            if kind not in self.space.legal_kinds:
                raise DiagramError(
                    "leg kind %s not allowed in space %s" % (kind.code, self.space.value)
                )
            if h in seen:
                raise DiagramError("half-edge %r used twice" % h)
            seen.add(h)
        in_edges: set = set()
        for e in self.edges:
            if len(e) != 2 or e[0] == e[1]:
                raise DiagramError("bad edge %r" % (e,))
            for h in e:
                if h not in seen:
                    raise DiagramError("edge endpoint %r is dangling" % h)
                if h in in_edges:
                    raise DiagramError("half-edge %r on two edges" % h)
                in_edges.add(h)
        if in_edges != seen:
            missing = sorted(seen - in_edges)
            raise DiagramError("half-edges without an edge: %r" % (missing,))
        if self.circles < 0:
            raise DiagramError("negative circle count")
        # operator legs must sit in a contiguous suffix of the leg sequence
        kinds = [k for _, k in self.legs]
        ops_started = False
        for k in kinds:
            if k.is_op:
                ops_started = True
            elif ops_started:
                raise DiagramError("operator legs must form a suffix of the leg list")

    # -- elementary queries -------------------------------------------------

    @property
    def ordered(self) -> bool:
        return self.space.ordered

    def partner_map(self) -> dict:
        p = {}
        for a, b in self.edges:
            p[a] = b
            p[b] = a
        return p

    def leg_kinds(self) -> tuple:
        return tuple(k for _, k in self.legs)

    def n_internal(self) -> int:
        return len(self.verts)

    def max_halfedge(self) -> int:
        m = -1
        for v in self.verts:
            m = max(m, *v)
        for h, _ in self.legs:
            m = max(m, h)
        return m

    def relabel(self, offset: int) -> "Diagram":
        return Diagram(
            self.space,
            tuple(tuple(h + offset for h in v) for v in self.verts),
            tuple(tuple(h + offset for h in e) for e in self.edges),
            tuple((h + offset, k) for h, k in self.legs),
            self.circles,
        )

    def retag(self, space: SpaceTag, kind_map: Optional[Mapping] = None) -> "Diagram":
        legs = self.legs
        if kind_map:
            legs = tuple((h, kind_map.get(k, k)) for h, k in legs)
        return Diagram(space, self.verts, self.edges, legs, self.circles)


@dataclass(frozen=True)
class Grading:
    n_internal: int
    legs_by_kind: tuple
    leg_grade: int
    type_ij: tuple

    def kind_count(self, kind: LegKind) -> int:
        return dict(self.legs_by_kind).get(kind, 0)


def grading(d: Diagram) -> Grading:
    counts: dict = {}
    for _, k in d.legs:
        counts[k] = counts.get(k, 0) + 1
    leg_grade = sum(k.grade * c for k, c in counts.items() if k.is_base)
    i = 2 * counts.get(LegKind.PARAM_A, 0) + counts.get(LegKind.PARAM_B, 0)
    j = 2 * counts.get(LegKind.OP_DA, 0) + counts.get(LegKind.OP_DB, 0)
    return Grading(
        n_internal=len(d.verts),
        legs_by_kind=tuple(sorted(counts.items(), key=lambda kv: kv[0].value)),
        leg_grade=leg_grade,
        type_ij=(i, j),
    )


def is_connected(d: Diagram) -> bool:
    """Connectivity of the underlying graph, ignoring the orienting line.

    Each closed circle is its own component.  The empty diagram has zero
    components and counts as not connected.
    """
    nodes = list(range(len(d.verts))) + [("leg", i) for i in range(len(d.legs))]
    if not nodes and d.circles == 0:
        return False
    owner = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            owner[h] = vi
    for li, (h, _) in enumerate(d.legs):
        owner[h] = ("leg", li)
    parent: dict = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in d.edges:
        ra, rb = find(owner[a]), find(owner[b])
        if ra != rb:
            parent[ra] = rb
    comps = len({find(n) for n in nodes}) + d.circles
    return comps == 1


def component_split(d: Diagram) -> list:
    """Split into connected components (circles become 1-circle diagrams)."""
    owner = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            owner[h] = ("v", vi)
    for li, (h, _) in enumerate(d.legs):
        owner[h] = ("l", li)
    nodes = [("v", vi) for vi in range(len(d.verts))] + [
        ("l", li) for li in range(len(d.legs))
    ]
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in d.edges:
        ra, rb = find(owner[a]), find(owner[b])
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    out = []
    for members in groups.values():
        vs = sorted(vi for t, vi in members if t == "v")
        ls = sorted(li for t, li in members if t == "l")
        vset = set(vs)
        lset = set(ls)
        hset = set()
        for vi in vs:
            hset.update(d.verts[vi])
        for li in ls:
            hset.add(d.legs[li][0])
        out.append(
            Diagram(
                d.space,
                tuple(d.verts[vi] for vi in vs),
                tuple(e for e in d.edges if e[0] in hset),
                tuple(d.legs[li] for li in ls),
                0,
            )
        )
    for _ in range(d.circles):
        out.append(Diagram(d.space, (), (), (), 1))
    return out


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

_CANON_CACHE: dict = {}


def canonical_form(d: Diagram) -> tuple:
    """Return (canonical_diagram, sign) with sign in {-1, 0, +1}.

    The canonical diagram is the lexicographically least slot encoding over
    all internal-vertex orderings and per-vertex cyclic presentations.  For
    ordered spaces the leg sequence is never permuted; for the unordered
    space B the search also seats legs (sign-free).  sign is the
    accumulated orientation-reversal parity; sign 0 means the minimum is
    reachable with both parities (the diagram is its own negative and is
    the zero element).
    """
    hit = _CANON_CACHE.get(d)
    if hit is not None:
        return hit
    result = _canonicalize(d)
    _CANON_CACHE[d] = result
    _CANON_CACHE[result[0]] = (result[0], 1 if result[1] != 0 else 0)
    return result


def _presentations(v: tuple) -> list:
    a, b, c = v
    return [
        ((a, b, c), 1),
        ((b, c, a), 1),
        ((c, a, b), 1),
        ((c, b, a), -1),
        ((b, a, c), -1),
        ((a, c, b), -1),
    ]


def _presentations_starting(v: tuple, h: int) -> list:
    return [(p, s) for p, s in _presentations(v) if p[0] == h]


def _canonicalize(d: Diagram) -> tuple:
    n = len(d.verts)
    partner = d.partner_map()
    if d.space.ordered:
        return _canon_ordered(d, n, partner)
    return _canon_unordered(d, n, partner)


def _canon_ordered(d: Diagram, n: int, partner: dict) -> tuple:
    k = len(d.legs)
    nslots = k + 3 * n
    pos = {h: i for i, (h, _) in enumerate(d.legs)}
    occupant: list = [None] * nslots
    for i, (h, _) in enumerate(d.legs):
        occupant[i] = h
    P: list = [None] * nslots
    for i, (h, _) in enumerate(d.legs):
        q = partner[h]
        if q in pos:
            P[i] = pos[q]
            P[pos[q]] = i
    vertex_of = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            vertex_of[h] = vi

    best: list = [None]
    best_signs: set = set()
    placed = [False] * n

    def place(vi, pres, base_slot):
        newly = []
        for off, h in enumerate(pres):
            s = base_slot + off
            occupant[s] = h
            pos[h] = s
        for off, h in enumerate(pres):
            s = base_slot + off
            q = partner[h]
            if q in pos and P[s] is None:
                P[s] = pos[q]
                P[pos[q]] = s
                newly.append((s, pos[q]))
        placed[vi] = True
        return newly

    def unplace(vi, pres, base_slot, newly):
        placed[vi] = False
        for s, t in newly:
            P[s] = None
            P[t] = None
        for off, h in enumerate(pres):
            occupant[base_slot + off] = None
            del pos[h]

    def dfs(prefix, lt, nplaced, sign):
        while prefix < nslots and P[prefix] is not None:
            if not lt and best[0] is not None:
                bv = best[0][prefix]
                if P[prefix] > bv:
                    return
                if P[prefix] < bv:
                    lt = True
            prefix += 1
        if prefix == nslots:
            enc = tuple(P)
            if best[0] is None or enc < tuple(best[0]):
                best[0] = list(enc)
                best_signs.clear()
                best_signs.add(sign)
            elif enc == tuple(best[0]):
                best_signs.add(sign)
            return
        base_slot = k + 3 * nplaced
        if occupant[prefix] is not None:
            h = occupant[prefix]
            q = partner[h]
            vi = vertex_of[q]
            for pres, psign in _presentations_starting(d.verts[vi], q):
                newly = place(vi, pres, base_slot)
                dfs(prefix, lt, nplaced + 1, sign * psign)
                unplace(vi, pres, base_slot, newly)
        else:
            for vi in range(n):
                if placed[vi]:
                    continue
                for pres, psign in _presentations(d.verts[vi]):
                    newly = place(vi, pres, base_slot)
                    dfs(prefix, lt, nplaced + 1, sign * psign)
                    unplace(vi, pres, base_slot, newly)

    dfs(0, False, 0, 1)
    P_final = best[0]
    sign = 0 if len(best_signs) == 2 else best_signs.pop()
    verts = tuple((k + 3 * t, k + 3 * t + 1, k + 3 * t + 2) for t in range(n))
    edges = tuple((s, P_final[s]) for s in range(nslots) if s < P_final[s])
    legs = tuple((i, kind) for i, (_, kind) in enumerate(d.legs))
    canon = Diagram(d.space, verts, edges, legs, d.circles)
    return canon, sign


def _canon_unordered(d: Diagram, n: int, partner: dict) -> tuple:
    leg_of = {h: i for i, (h, _) in enumerate(d.legs)}
    # leg-leg edges are struts: interchangeable, counted separately
    struts = 0
    strutted: set = set()
    for a, b in d.edges:
        if a in leg_of and b in leg_of:
            struts += 1
            strutted.add(a)
            strutted.add(b)
    k_dyn = len(d.legs) - 2 * struts
    nslots = 3 * n + k_dyn
    vertex_of = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            vertex_of[h] = vi

    pos: dict = {}
    occupant: list = [None] * (3 * n)
    P: list = [None] * nslots
    best: list = [None]
    best_signs: set = set()
    placed = [False] * n
    state = {"next_leg": 3 * n}

    def place(vi, pres, base_slot):
        newly = []
        for off, h in enumerate(pres):
            occupant[base_slot + off] = h
            pos[h] = base_slot + off
        legs_assigned = []
        for off, h in enumerate(pres):
            s = base_slot + off
            q = partner[h]
            if q in leg_of and q not in pos:
                t = state["next_leg"]
                pos[q] = t
                state["next_leg"] += 1
                legs_assigned.append(q)
                P[s] = t
                P[t] = s
                newly.append((s, t))
            elif q in pos and P[s] is None:
                P[s] = pos[q]
                P[pos[q]] = s
                newly.append((s, pos[q]))
        placed[vi] = True
        return newly, legs_assigned

    def unplace(vi, pres, base_slot, newly, legs_assigned):
        placed[vi] = False
        for s, t in newly:
            P[s] = None
            P[t] = None
        for q in legs_assigned:
            del pos[q]
            state["next_leg"] -= 1
        for off, h in enumerate(pres):
            occupant[base_slot + off] = None
            del pos[h]

    def dfs(prefix, lt, nplaced, sign):
        while prefix < nslots and P[prefix] is not None:
            if not lt and best[0] is not None:
                bv = best[0][prefix]
                if P[prefix] > bv:
                    return
                if P[prefix] < bv:
                    lt = True
            prefix += 1
        if prefix == nslots:
            enc = tuple(P)
            if best[0] is None or enc < tuple(best[0]):
                best[0] = list(enc)
                best_signs.clear()
                best_signs.add(sign)
            elif enc == tuple(best[0]):
                best_signs.add(sign)
            return
        base_slot = 3 * nplaced
        if prefix < 3 * n and occupant[prefix] is not None:
            h = occupant[prefix]
            q = partner[h]
            vi = vertex_of[q]
            for pres, psign in _presentations_starting(d.verts[vi], q):
                newly, la = place(vi, pres, base_slot)
                dfs(prefix, lt, nplaced + 1, sign * psign)
                unplace(vi, pres, base_slot, newly, la)
        else:
            for vi in range(n):
                if placed[vi]:
                    continue
                for pres, psign in _presentations(d.verts[vi]):
                    newly, la = place(vi, pres, base_slot)
                    dfs(prefix, lt, nplaced + 1, sign * psign)
                    unplace(vi, pres, base_slot, newly, la)

    if n == 0:
        best[0] = []
        best_signs.add(1)
    else:
        dfs(0, False, 0, 1)
    P_final = best[0]
    sign = 0 if len(best_signs) == 2 else best_signs.pop()
    verts = tuple((3 * t, 3 * t + 1, 3 * t + 2) for t in range(n))
    edges = [(s, P_final[s]) for s in range(nslots) if s < P_final[s]]
    legs = [(s, LegKind.PLAIN) for s in range(3 * n, nslots)]
    h = nslots
    for _ in range(struts):
        edges.append((h, h + 1))
        legs.append((h, LegKind.PLAIN))
        legs.append((h + 1, LegKind.PLAIN))
        h += 2
    canon = Diagram(d.space, verts, tuple(edges), tuple(legs), d.circles)
    return canon, sign


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------


class LinComb:
    """Finite Q-linear combination of canonical diagrams in one space."""

    __slots__ = ("space", "terms")

    def __init__(self, space: SpaceTag, terms: Optional[Mapping] = None):
        self.space = space
        self.terms: dict = {}
        if terms:
            for d, c in terms.items():
                self.add_term(d, c)

    @staticmethod
    def zero(space: SpaceTag) -> "LinComb":
        return LinComb(space)

    @staticmethod
    def of(d: Diagram, coeff=1) -> "LinComb":
        x = LinComb(d.space)
        x.add_term(d, coeff)
        return x

    def add_term(self, d: Diagram, coeff) -> None:
        if d.space is not self.space:
            raise DiagramError(
                "space mismatch: %s vs %s" % (d.space.value, self.space.value)
            )
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        canon, sign = canonical_form(d)
        if sign == 0:
            return
        c = self.terms.get(canon, Fraction(0)) + sign * coeff
        if c == 0:
            self.terms.pop(canon, None)
        else:
            self.terms[canon] = c

    def copy(self) -> "LinComb":
        out = LinComb(self.space)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: "LinComb") -> "LinComb":
        if other.space is not self.space:
            raise DiagramError("space mismatch in +")
        out = self.copy()
        for d, c in other.terms.items():
            nc = out.terms.get(d, Fraction(0)) + c
            if nc == 0:
                out.terms.pop(d, None)
            else:
                out.terms[d] = nc
        return out

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (other * -1)

    def __mul__(self, scalar) -> "LinComb":
        scalar = Fraction(scalar)
        out = LinComb(self.space)
        if scalar != 0:
            out.terms = {d: c * scalar for d, c in self.terms.items()}
        return out

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinComb)
            and self.space is other.space
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.space, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator:
        return iter(sorted(self.terms.items(), key=lambda dc: serialize(dc[0])))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "LinComb(%s, 0)" % self.space.value
        bits = ["%s*%s" % (c, serialize(d)) for d, c in self]
        return "LinComb(%s, %s)" % (self.space.value, " + ".join(bits))

    def map_terms(self, f: Callable) -> "LinComb":
        """Linear extension: f maps a diagram to a LinComb."""
        out = None
        for d, c in self.terms.items():
            y = f(d)
            if out is None:
                out = LinComb(y.space)
            for dd, cc in y.terms.items():
                nc = out.terms.get(dd, Fraction(0)) + c * cc
                if nc == 0:
                    out.terms.pop(dd, None)
                else:
                    out.terms[dd] = nc
        if out is None:
            raise DiagramError("map_terms on empty LinComb needs a target space")
        return out

    def retag(self, space: SpaceTag, kind_map: Optional[Mapping] = None) -> "LinComb":
        out = LinComb(space)
        for d, c in self.terms.items():
            out.add_term(d.retag(space, kind_map), c)
        return out


def linear(f: Callable, x: LinComb, out_space: SpaceTag) -> LinComb:
    """Linear extension of a diagram-level map f: Diagram -> LinComb."""
    out = LinComb(out_space)
    for d, c in x.terms.items():
        y = f(d)
        for dd, cc in y.terms.items():
            out.add_term(dd, c * cc)
    return out


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


def _juxtapose_diagrams(u: Diagram, v: Diagram) -> tuple:
    """Juxtaposition u # v at the diagram level; returns (diagram, sign).

    Non-operator legs concatenate; operator suffixes merge at the far right
    (u's then v's).  Moving u's operator suffix past v's non-operator legs
    costs the Koszul sign.
    """
    off = u.max_halfedge() + 1
    v2 = v.relabel(off)
    u_non = [lg for lg in u.legs if not lg[1].is_op]
    u_ops = [lg for lg in u.legs if lg[1].is_op]
    v_non = [lg for lg in v2.legs if not lg[1].is_op]
    v_ops = [lg for lg in v2.legs if lg[1].is_op]
    g_ops = sum(k.grade for _, k in u_ops)
    g_non = sum(k.grade for _, k in v_non)
    sign = -1 if (g_ops * g_non) % 2 else 1
    legs = tuple(u_non + v_non + u_ops + v_ops)
    return (
        Diagram(u.space, u.verts + v2.verts, u.edges + v2.edges, legs,
                u.circles + v.circles),
        sign,
    )


def juxtapose(u: LinComb, v: LinComb) -> LinComb:
    if u.space is not v.space:
        raise DiagramError("juxtapose: space mismatch")
    if not u.space.ordered:
        raise DiagramError("juxtapose needs an ordered-leg space; use disjoint_union")
    out = LinComb(u.space)
    for du, cu in u.terms.items():
        for dv, cv in v.terms.items():
            d, s = _juxtapose_diagrams(du, dv)
            out.add_term(d, cu * cv * s)
    return out


def disjoint_union(u: LinComb, v: LinComb) -> LinComb:
    if u.space is not SpaceTag.B or v.space is not SpaceTag.B:
        raise DiagramError("disjoint_union is the product on B")
    out = LinComb(SpaceTag.B)
    for du, cu in u.terms.items():
        for dv, cv in v.terms.items():
            off = du.max_halfedge() + 1
            dv2 = dv.relabel(off)
            out.add_term(
                Diagram(
                    SpaceTag.B,
                    du.verts + dv2.verts,
                    du.edges + dv2.edges,
                    du.legs + dv2.legs,
                    du.circles + dv.circles,
                ),
                cu * cv,
            )
    return out


def union_diagrams(u: Diagram, v: Diagram) -> Diagram:
    """Diagram-level disjoint union; keeps u's legs then v's, in order."""
    if u.space is not v.space:
        raise DiagramError("union_diagrams: space mismatch")
    v2 = v.relabel(u.max_halfedge() + 1)
    return Diagram(
        u.space,
        u.verts + v2.verts,
        u.edges + v2.edges,
        u.legs + v2.legs,
        u.circles + v2.circles,
    )


def empty_diagram(space: SpaceTag) -> Diagram:
    return Diagram(space)


def unit(space: SpaceTag) -> LinComb:
    return LinComb.of(empty_diagram(space))


# ---------------------------------------------------------------------------
# Leg surgeries shared by the relation schemas and the maps
# ---------------------------------------------------------------------------


def fuse_adjacent_legs(d: Diagram, p: int, new_kind: LegKind) -> Diagram:
    """STU-style correction: legs p, p+1 merge through a new vertex.

    The new vertex's cyclic order is (stem-to-new-leg, left-partner,
    right-partner).
    """
    hL, hR = d.legs[p][0], d.legs[p + 1][0]
    partner = d.partner_map()
    alpha, beta = partner[hL], partner[hR]
    base = d.max_halfedge() + 1
    s, x, y, newleg = base, base + 1, base + 2, base + 3
    edges = [e for e in d.edges if hL not in e and hR not in e]
    edges.append((s, newleg))
    circles = d.circles
    if alpha == hR:  # the two legs were each other's partners (a strut)
        edges.append((x, y))
    else:
        edges.append((x, alpha))
        edges.append((y, beta))
    legs = list(d.legs)
    legs[p : p + 2] = [(newleg, new_kind)]
    return Diagram(d.space, d.verts + ((s, x, y),), tuple(edges), tuple(legs), circles)


def join_adjacent_legs(d: Diagram, p: int) -> Diagram:
    """Clifford-style correction: legs p, p+1 removed, stems joined."""
    hL, hR = d.legs[p][0], d.legs[p + 1][0]
    partner = d.partner_map()
    alpha, beta = partner[hL], partner[hR]
    edges = [e for e in d.edges if hL not in e and hR not in e]
    circles = d.circles
    if alpha == hR:  # joining both ends of one strut closes a circle
        circles += 1
    else:
        edges.append((alpha, beta))
    legs = list(d.legs)
    del legs[p : p + 2]
    return Diagram(d.space, d.verts, tuple(edges), tuple(legs), circles)


def join_legs_at(d: Diagram, i: int, j: int) -> Diagram:
    """Remove legs at positions i < j and join their stems with an edge."""
    hI, hJ = d.legs[i][0], d.legs[j][0]
    partner = d.partner_map()
    alpha, beta = partner[hI], partner[hJ]
    edges = [e for e in d.edges if hI not in e and hJ not in e]
    circles = d.circles
    if alpha == hJ:
        circles += 1
    else:
        edges.append((alpha, beta))
    legs = [lg for t, lg in enumerate(d.legs) if t not in (i, j)]
    return Diagram(d.space, d.verts, tuple(edges), tuple(legs), circles)


def fork_leg(d: Diagram, p: int, kinds=(LegKind.PLAIN, LegKind.PLAIN)) -> Diagram:
    """Replace the leg at p by two new legs meeting at a new vertex.

    The vertex's cyclic order is (stem, prong-to-right-leg,
    prong-to-left-leg).
    """
    h = d.legs[p][0]
    partner = d.partner_map()
    alpha = partner[h]
    base = d.max_halfedge() + 1
    s, u, w, l1, l2 = base, base + 1, base + 2, base + 3, base + 4
    edges = [e for e in d.edges if h not in e]
    edges += [(s, alpha), (u, l2), (w, l1)]
    legs = list(d.legs)
    legs[p : p + 1] = [(l1, kinds[0]), (l2, kinds[1])]
    return Diagram(d.space, d.verts + ((s, u, w),), tuple(edges), tuple(legs),
                   d.circles)


def swap_adjacent_legs(d: Diagram, p: int) -> Diagram:
    legs = list(d.legs)
    legs[p], legs[p + 1] = legs[p + 1], legs[p]
    return Diagram(d.space, d.verts, d.edges, tuple(legs), d.circles)


def permute_legs(d: Diagram, perm: Sequence[int]) -> Diagram:
    """Reorder legs so new position t holds old leg perm[t]."""
    legs = tuple(d.legs[i] for i in perm)
    return Diagram(d.space, d.verts, d.edges, legs, d.circles)


def set_leg_kind(d: Diagram, p: int, kind: LegKind) -> Diagram:
    legs = list(d.legs)
    legs[p] = (legs[p][0], kind)
    return Diagram(d.space, d.verts, d.edges, tuple(legs), d.circles)


def koszul_sign(kinds: Sequence[LegKind], perm: Sequence[int]) -> int:
    """Sign for reordering legs of the given kinds by perm (new <- old).

    Counts inversions among grade-1 legs; grade-2 legs commute with
    everything.
    """
    odd = [i for i in perm if kinds[i].grade % 2 == 1]
    inv = 0
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            if odd[a] > odd[b]:
                inv += 1
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def serialize(d: Diagram) -> str:
    vs = "".join("(%d %d %d)" % v for v in d.verts)
    es = "".join("(%d-%d)" % e for e in d.edges)
    ls = ",".join("%s@%d" % (k.code, h) for h, k in d.legs)
    s = "D[v:%s;e:%s;l:%s" % (vs, es, ls)
    if d.circles:
        s += ";c:%d" % d.circles
    return s + "]"


_VERT_RE = re.compile(r"\((\d+) (\d+) (\d+)\)")
_EDGE_RE = re.compile(r"\((\d+)-(\d+)\)")
_LEG_RE = re.compile(r"^([A-Za-z0-9]+)@(\d+)$")


def parse(text: str, space: Optional[SpaceTag] = None) -> Diagram:
    """Parse the text format.  If space is omitted, infer a default:
    fat legs -> What (or What_ab with params), curvature legs -> WhatF
    (or WhatF_ab), parameter/operator legs alone -> WhatF_ab, otherwise A.
    """
    t = text.strip()
    if not (t.startswith("D[") and t.endswith("]")):
        raise DiagramError("parse error at 0: expected D[...]")
    body = t[2:-1]
    parts = body.split(";")
    if len(parts) not in (3, 4):
        raise DiagramError("parse error: expected 3 or 4 ;-separated sections")
    sec = {}
    for p in parts:
        if ":" not in p:
            raise DiagramError("parse error in section %r" % p)
        name, _, rest = p.partition(":")
        sec[name] = rest
    for need in ("v", "e", "l"):
        if need not in sec:
            raise DiagramError("parse error: missing section %r" % need)
    vtxt = sec["v"]
    if vtxt and not re.fullmatch(r"(\(\d+ \d+ \d+\))*", vtxt):
        raise DiagramError("parse error in vertex list %r" % vtxt)
    verts = tuple(
        (int(a), int(b), int(c)) for a, b, c in _VERT_RE.findall(vtxt)
    )
    etxt = sec["e"]
    if etxt and not re.fullmatch(r"(\(\d+-\d+\))*", etxt):
        raise DiagramError("parse error in edge list %r" % etxt)
    edges = tuple((int(a), int(b)) for a, b in _EDGE_RE.findall(etxt))
    legs = []
    if sec["l"]:
        for item in sec["l"].split(","):
            m = _LEG_RE.match(item.strip())
            if not m:
                raise DiagramError("parse error in leg %r" % item)
            code, h = m.group(1), int(m.group(2))
            if code not in _KIND_BY_CODE:
                raise DiagramError("unknown leg kind %r" % code)
            legs.append((h, _KIND_BY_CODE[code]))
    circles = 0
    if "c" in sec:
        try:
            circles = int(sec["c"])
        except ValueError:
            raise DiagramError("parse error in circle count %r" % sec["c"])
    if space is None:
        kinds = {k for _, k in legs}
        has_po = any(k.is_param or k.is_op for k in kinds)
        if LegKind.FAT in kinds:
            space = SpaceTag.WHAT_AB if has_po else SpaceTag.WHAT
        elif LegKind.CURV in kinds:
            space = SpaceTag.WHAT_F_AB if has_po else SpaceTag.WHAT_F
        elif has_po:
            space = SpaceTag.WHAT_F_AB
        else:
            space = SpaceTag.A
    return Diagram(space, verts, edges, tuple(legs), circles)


def to_json_obj(d: Diagram) -> dict:
    return {
        "space": d.space.value,
        "ordered": d.ordered,
        "vertices": [list(v) for v in d.verts],
        "edges": [list(e) for e in d.edges],
        "legs": [[k.code, h] for h, k in d.legs],
        "circles": d.circles,
    }


def from_json_obj(obj: Mapping) -> Diagram:
    try:
        space = SpaceTag(obj["space"])
        verts = tuple(tuple(v) for v in obj.get("vertices", []))
        edges = tuple(tuple(e) for e in obj.get("edges", []))
        legs = tuple((h, _KIND_BY_CODE[c]) for c, h in obj.get("legs", []))
        return Diagram(space, verts, edges, legs, int(obj.get("circles", 0)))
    except (KeyError, TypeError) as exc:
        raise DiagramError("bad JSON diagram: %s" % exc)


def lincomb_to_json_obj(x: LinComb) -> dict:
    return {
        "space": x.space.value,
        "terms": [
            {"coeff": str(c), "diagram": serialize(d)} for d, c in x
        ],
    }


def lincomb_from_json_obj(obj: Mapping) -> LinComb:
    space = SpaceTag(obj["space"])
    out = LinComb(space)
    for t in obj.get("terms", []):
        out.add_term(parse(t["diagram"], space), Fraction(t["coeff"]))
    return out
