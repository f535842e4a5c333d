"""Quotient-space machinery: relation schemas, slice enumeration, reduction.

Every space is a quotient of the free span of diagrams by local relations:

===========  ================================================================
space        relations (besides AS, which canonical_form absorbs)
===========  ================================================================
B            IHX
A            IHX, STU_A   (adjacent legs: d - d_swap - fused(plain) = 0)
W            IHX, LEGSWAP (adjacent legs: d = (-1)^{g1 g2} d_swap)
Wtilde       IHX
What         IHX, STU_HAT_1  (fat,fat):     d - d_swap - fused(fat)    = 0
                  STU_HAT_2  (fat,plain):   d - d_swap - fused(plain)  = 0
                  STU_HAT_3  (plain,plain): d + d_swap - joined        = 0
WhatF        IHX, STU_F_1   (F,F):          d - d_swap - fused(F)      = 0
                  STU_F_2    (F,plain):     d - d_swap                 = 0
                  STU_F_3    (plain,plain): d + d_swap - joined        = 0
WhatWedge    IHX, WEDGE_1   (F,F):          d - d_swap - fused(F)      = 0
                  WEDGE_2    (F,plain):     d - d_swap                 = 0
                  WEDGE_3    (plain,plain): d + d_swap                 = 0
*_ab         base-space schemas on adjacent base legs, plus PARAM_MOVE:
             a parameter leg transposes with any non-operator neighbor and
             operator legs transpose among themselves, all with the Koszul
             sign and no correction term.
===========  ================================================================

The textual transcription of each local relation lives in
docs/RELATIONS.md.

reduce() computes a canonical coset representative by exact linear algebra
on the *reachability closure* of a vector's support: every schema instance
at every site of every reachable diagram, grown to a fixpoint under a
budget, then reduced row echelon form over Fraction with columns ordered
by the canonical serialization (lexicographic).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .diagram_core import (
    Diagram,
    DiagramError,
    LegKind,
    LinComb,
    SpaceTag,
    canonical_form,
    fuse_adjacent_legs,
    join_adjacent_legs,
    serialize,
    swap_adjacent_legs,
)


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Budget:
    max_closure_diagrams: int = 60000
    max_rows: int = 400000
    max_slice_halfedges: int = 14
    max_slice_matchings: int = 4000000


DEFAULT_BUDGET = Budget()


# ---------------------------------------------------------------------------
# Relation schemas
# ---------------------------------------------------------------------------

SCHEMA_TABLE_VERSION = "weildiag-schemas-1"


def schema_table_descriptor() -> str:
    """Stable text describing the schema table; hashed into cache keys."""
    return SCHEMA_TABLE_VERSION + ":" + ",".join(
        [
            "AS:absorbed",
            "IHX:e=(u,v);rho=(alpha->gamma,beta->alpha,gamma->beta);D1+D2+D3",
            "STU_A:d-swap-fused(p1)",
            "LEGSWAP:d-(-1)^(g1g2)swap",
            "STU_HAT:1 d-swap-fused(f2);2 d-swap-fused(p1);3 d+swap-joined",
            "STU_F:1 d-swap-fused(F);2 d-swap;3 d+swap-joined",
            "WEDGE:1 d-swap-fused(F);2 d-swap;3 d+swap",
            "PARAM_MOVE:d-(-1)^(g1g2)swap",
        ]
    )


def _koszul(k1: LegKind, k2: LegKind) -> int:
    return -1 if (k1.grade * k2.grade) % 2 else 1


def _pair_instances(d: Diagram, p: int):
    """Relation instances at the adjacent leg pair (p, p+1)."""
    k1 = d.legs[p][1]
    k2 = d.legs[p + 1][1]
    base = d.space.base_space
    out = []

    def mk(*terms):
        v = LinComb(d.space)
        for dd, c in terms:
            v.add_term(dd, c)
        return v

    if k1.is_op and k2.is_op:
        out.append(("PARAM_MOVE", mk((d, 1), (swap_adjacent_legs(d, p), -_koszul(k1, k2)))))
        return out
    if k1.is_op or k2.is_op:
        return out  # operator legs stay in the suffix: no legal transposition
    if k1.is_param or k2.is_param:
        out.append(("PARAM_MOVE", mk((d, 1), (swap_adjacent_legs(d, p), -_koszul(k1, k2)))))
        return out

    # both legs are base legs from here on
    if base is SpaceTag.A:
        out.append(
            ("STU_A", mk((d, 1), (swap_adjacent_legs(d, p), -1),
                         (fuse_adjacent_legs(d, p, LegKind.PLAIN), -1)))
        )
    elif base is SpaceTag.W:
        out.append(("LEGSWAP", mk((d, 1), (swap_adjacent_legs(d, p), -_koszul(k1, k2)))))
    elif base is SpaceTag.WHAT:
        if k1 is LegKind.FAT and k2 is LegKind.FAT:
            out.append(("STU_HAT_1", mk((d, 1), (swap_adjacent_legs(d, p), -1),
                                        (fuse_adjacent_legs(d, p, LegKind.FAT), -1))))
        elif k1 is LegKind.FAT and k2 is LegKind.PLAIN:
            out.append(("STU_HAT_2", mk((d, 1), (swap_adjacent_legs(d, p), -1),
                                        (fuse_adjacent_legs(d, p, LegKind.PLAIN), -1))))
        elif k1 is LegKind.PLAIN and k2 is LegKind.FAT:
            ds = swap_adjacent_legs(d, p)
            out.append(("STU_HAT_2", mk((ds, 1), (d, -1),
                                        (fuse_adjacent_legs(ds, p, LegKind.PLAIN), -1))))
        else:
            out.append(("STU_HAT_3", mk((d, 1), (swap_adjacent_legs(d, p), 1),
                                        (join_adjacent_legs(d, p), -1))))
    elif base in (SpaceTag.WHAT_F, SpaceTag.WHAT_WEDGE):
        wedge = base is SpaceTag.WHAT_WEDGE
        tag = "WEDGE" if wedge else "STU_F"
        if k1 is LegKind.CURV and k2 is LegKind.CURV:
            out.append((tag + "_1", mk((d, 1), (swap_adjacent_legs(d, p), -1),
                                       (fuse_adjacent_legs(d, p, LegKind.CURV), -1))))
        elif {k1, k2} == {LegKind.CURV, LegKind.PLAIN}:
            out.append((tag + "_2", mk((d, 1), (swap_adjacent_legs(d, p), -1))))
        else:  # plain, plain
            if wedge:
                out.append((tag + "_3", mk((d, 1), (swap_adjacent_legs(d, p), 1))))
            else:
                out.append((tag + "_3", mk((d, 1), (swap_adjacent_legs(d, p), 1),
                                           (join_adjacent_legs(d, p), -1))))
    # base W / Wtilde / B have no leg-pair relations beyond the above
    return out


def _ihx_instances(d: Diagram):
    """One 3-term IHX instance per internal edge per role assignment."""
    vert_of = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            vert_of[h] = vi
    out = []
    for e in d.edges:
        a, b = e
        if a not in vert_of or b not in vert_of:
            continue
        if vert_of[a] == vert_of[b]:
            continue  # self-loop vertex: the diagram is AS-zero anyway
        for eu, ev in ((a, b), (b, a)):
            u = d.verts[vert_of[eu]]
            v = d.verts[vert_of[ev]]
            while u[0] != eu:
                u = (u[1], u[2], u[0])
            while v[0] != ev:
                v = (v[1], v[2], v[0])
            alpha, beta = u[1], u[2]
            gamma, delta = v[1], v[2]
            rho = {alpha: gamma, beta: alpha, gamma: beta}
            vec = LinComb(d.space)
            cur = d
            vec.add_term(cur, 1)
            for _ in range(2):
                cur = Diagram(
                    cur.space,
                    cur.verts,
                    tuple(tuple(rho.get(h, h) for h in edge) for edge in cur.edges),
                    cur.legs,
                    cur.circles,
                )
                vec.add_term(cur, 1)
            out.append(("IHX", vec))
    return out


def schema_instances(d: Diagram):
    """All relation instances at all sites of d (AS is absorbed upstream)."""
    out = _ihx_instances(d)
    for p in range(len(d.legs) - 1):
        out.extend(_pair_instances(d, p))
    return [(sid, v) for sid, v in out if not v.is_zero()]


# ---------------------------------------------------------------------------
# Slices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedSlice:
    space: SpaceTag
    n_internal: int
    legs: tuple  # sorted tuple of (LegKind, count)
    circles: int = 0

    @staticmethod
    def make(space: SpaceTag, n_internal: int, legs, circles: int = 0) -> "GradedSlice":
        if isinstance(legs, dict):
            items = legs.items()
        else:
            items = {}
            for k in legs:
                items[k] = items.get(k, 0) + 1
            items = items.items()
        norm = tuple(sorted(((k, c) for k, c in items if c), key=lambda kc: kc[0].value))
        return GradedSlice(space, n_internal, norm, circles)

    def leg_count(self) -> int:
        return sum(c for _, c in self.legs)

    def descriptor(self) -> str:
        legs = ",".join("%s:%d" % (k.code, c) for k, c in self.legs)
        return "%s|n=%d|legs=%s|c=%d" % (
            self.space.value, self.n_internal, legs, self.circles
        )


def _distinct_permutations(items: Sequence) -> Iterable:
    items = sorted(items, key=lambda k: k.value)
    n = len(items)
    if n == 0:
        yield ()
        return

    def rec(remaining):
        if not remaining:
            yield ()
            return
        seen = set()
        for i, it in enumerate(remaining):
            if it in seen:
                continue
            seen.add(it)
            for rest in rec(remaining[:i] + remaining[i + 1:]):
                yield (it,) + rest

    yield from rec(list(items))


def _matchings(items: list) -> Iterable:
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        b = items[i]
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield [(a, b)] + m


def enumerate_slice(slc: GradedSlice, budget: Budget = DEFAULT_BUDGET,
                    include_zero: bool = False):
    """Complete duplicate-free list of canonical diagrams with the slice's
    counts.  AS-degenerate diagrams are dropped unless include_zero.
    """
    n = slc.n_internal
    k = slc.leg_count()
    total = 3 * n + k
    if total % 2:
        return []
    if total > budget.max_slice_halfedges:
        raise BudgetExceeded(
            "slice with %d half-edges exceeds budget %d"
            % (total, budget.max_slice_halfedges)
        )
    est = 1
    for m in range(total - 1, 0, -2):
        est *= m
    if est > budget.max_slice_matchings:
        raise BudgetExceeded("slice matchings %d exceed budget" % est)
    verts = tuple((3 * t, 3 * t + 1, 3 * t + 2) for t in range(n))
    kind_list = []
    for kind, c in slc.legs:
        kind_list.extend([kind] * c)
    if slc.space.ordered:
        kind_seqs = list(_distinct_permutations(kind_list))
    else:
        kind_seqs = [tuple(kind_list)]
    seen = {}
    ops_suffix_ok = lambda seq: all(
        not (seq[i].is_op and not seq[j].is_op)
        for i in range(len(seq)) for j in range(i + 1, len(seq))
    )
    for seq in kind_seqs:
        if not ops_suffix_ok(seq):
            continue
        legs = tuple((3 * n + i, kind) for i, kind in enumerate(seq))
        for m in _matchings(list(range(total))):
            try:
                d = Diagram(slc.space, verts, tuple(m), legs, slc.circles)
            except DiagramError:
                continue
            canon, sign = canonical_form(d)
            if sign == 0 and not include_zero:
                continue
            seen.setdefault(canon, sign)
    return sorted(seen, key=serialize)


def relation_vectors(space: SpaceTag, slc: GradedSlice,
                     budget: Budget = DEFAULT_BUDGET):
    """Every schema instance at every site of every diagram of the slice."""
    if slc.space is not space:
        slc = GradedSlice(space, slc.n_internal, slc.legs, slc.circles)
    out = []
    for d in enumerate_slice(slc, budget):
        out.extend(v for _, v in schema_instances(d))
    return out


# ---------------------------------------------------------------------------
# Reduction engine
# ---------------------------------------------------------------------------


class _Echelon:
    """Reduced row echelon form over Fraction, dict-sparse rows."""

    def __init__(self):
        self.pivots: dict = {}  # pivot column -> row (dict col -> Fraction)

    def _reduce_row(self, row: dict) -> dict:
        row = dict(row)
        changed = True
        while changed:
            changed = False
            for col in sorted(row):
                piv = self.pivots.get(col)
                if piv is not None:
                    coeff = row[col]
                    for c2, v2 in piv.items():
                        nv = row.get(c2, Fraction(0)) - coeff * v2
                        if nv == 0:
                            row.pop(c2, None)
                        else:
                            row[c2] = nv
                    changed = True
                    break
        return row

    def insert(self, row: dict) -> bool:
        row = self._reduce_row(row)
        if not row:
            return False
        lead = min(row)
        inv = Fraction(1) / row[lead]
        row = {c: v * inv for c, v in row.items()}
        for pc, prow in self.pivots.items():
            if lead in prow:
                coeff = prow[lead]
                for c2, v2 in row.items():
                    nv = prow.get(c2, Fraction(0)) - coeff * v2
                    if nv == 0:
                        prow.pop(c2, None)
                    else:
                        prow[c2] = nv
        self.pivots[lead] = row
        return True

    def residue(self, row: dict) -> dict:
        return self._reduce_row(row)

    @property
    def rank(self) -> int:
        return len(self.pivots)


class Reducer:
    """reduce / equal_mod / dim engine with memo and optional disk cache."""

    def __init__(self, budget: Budget = None, cache_dir: Optional[str] = None):
        self.budget = budget or DEFAULT_BUDGET
        self.cache_dir = cache_dir
        self._memo: dict = {}
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    # -- closure ------------------------------------------------------------

    def closure(self, space: SpaceTag, support: Iterable):
        todo = sorted({d for d in support}, key=serialize)
        seen = {d: None for d in todo}
        rows: list = []
        idx = 0
        while idx < len(todo):
            d = todo[idx]
            idx += 1
            for _, vec in schema_instances(d):
                rows.append(vec)
                if len(rows) > self.budget.max_rows:
                    raise BudgetExceeded("relation rows exceed budget")
                for dd in vec.terms:
                    if dd not in seen:
                        seen[dd] = None
                        todo.append(dd)
                        if len(seen) > self.budget.max_closure_diagrams:
                            raise BudgetExceeded("closure diagrams exceed budget")
        diagrams = sorted(seen, key=serialize)
        return diagrams, rows

    # -- cache keys ----------------------------------------------------------

    def _cache_key(self, space: SpaceTag, support_serials) -> str:
        payload = "\n".join(
            [schema_table_descriptor(), space.value] + list(support_serials)
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def _load_echelon(self, key: str):
        if not self.cache_dir:
            return None
        path = os.path.join(self.cache_dir, key + ".json")
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            data = json.load(fh)
        diagrams = data["diagrams"]
        ech = _Echelon()
        for row in data["rows"]:
            ech.pivots[min(int(c) for c, _ in row)] = {
                int(c): Fraction(v) for c, v in row
            }
        return diagrams, ech

    def _store_echelon(self, key: str, diagrams, ech: _Echelon) -> None:
        if not self.cache_dir:
            return
        path = os.path.join(self.cache_dir, key + ".json")
        rows = [
            sorted(((c, str(v)) for c, v in row.items()))
            for _, row in sorted(ech.pivots.items())
        ]
        tmp = path + ".tmp.%d" % os.getpid()
        with open(tmp, "w") as fh:
            json.dump({"diagrams": diagrams, "rows": rows}, fh)
        os.replace(tmp, path)

    def _echelon_for(self, space: SpaceTag, support):
        serials = tuple(sorted(serialize(d) for d in support))
        memo_key = (space, serials)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        key = self._cache_key(space, serials)
        loaded = self._load_echelon(key)
        if loaded is not None:
            serial_list, ech = loaded
            from .diagram_core import parse

            diagrams = [parse(s, space) for s in serial_list]
            col = {d: i for i, d in enumerate(diagrams)}
            self._memo[memo_key] = (diagrams, col, ech)
            return diagrams, col, ech
        diagrams, rows = self.closure(space, support)
        col = {d: i for i, d in enumerate(diagrams)}
        ech = _Echelon()
        for vec in rows:
            ech.insert({col[d]: c for d, c in vec.terms.items()})
        self._store_echelon(key, [serialize(d) for d in diagrams], ech)
        self._memo[memo_key] = (diagrams, col, ech)
        return diagrams, col, ech

    # -- public API ----------------------------------------------------------

    def reduce(self, x: LinComb) -> LinComb:
        if x.is_zero():
            return x.copy()
        diagrams, col, ech = self._echelon_for(x.space, x.terms.keys())
        row = {col[d]: c for d, c in x.terms.items()}
        res = ech.residue(row)
        out = LinComb(x.space)
        for c, v in res.items():
            out.add_term(diagrams[c], v)
        return out

    def equal_mod(self, x: LinComb, y: LinComb) -> bool:
        if x.space is not y.space:
            raise DiagramError("equal_mod: space mismatch")
        return self.reduce(x - y).is_zero()

    def is_zero_mod(self, x: LinComb) -> bool:
        return self.reduce(x).is_zero()

    def dim(self, slc: GradedSlice) -> int:
        """Dimension of the slice's image in the quotient space."""
        basis = enumerate_slice(slc, self.budget)
        if not basis:
            return 0
        diagrams, rows = self.closure(slc.space, basis)
        col = {d: i for i, d in enumerate(diagrams)}
        ech = _Echelon()
        for vec in rows:
            ech.insert({col[d]: c for d, c in vec.terms.items()})
        base_rank = ech.rank
        for d in basis:
            ech.insert({col[d]: Fraction(1)})
        return ech.rank - base_rank


_DEFAULT_REDUCER = None


def default_reducer() -> Reducer:
    global _DEFAULT_REDUCER
    if _DEFAULT_REDUCER is None:
        _DEFAULT_REDUCER = Reducer()
    return _DEFAULT_REDUCER


def reduce(x: LinComb) -> LinComb:
    return default_reducer().reduce(x)


def equal_mod(x: LinComb, y: LinComb) -> bool:
    return default_reducer().equal_mod(x, y)


def dim(slc: GradedSlice) -> int:
    return default_reducer().dim(slc)
