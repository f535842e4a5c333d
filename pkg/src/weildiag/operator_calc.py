"""Operator diagrams, the product |- and truncated operator power series.

An operator diagram is a Diagram in one of the parameter-aware spaces
(What_ab, WhatF_ab, WhatWedge_ab): parameter legs a (grade 2) and b
(grade 1) mix freely with base legs, operator legs da, db sit in a
contiguous suffix.  Type (i, j) = (2#a + #b, 2#da + #db).

The product v |- w has two equivalent constructions:

  * vdash_rewrite: juxtapose the leg words and push every operator leg to
    the far right.  An operator leg of grade g1 moves past a non-operator
    leg of grade g2 at the cost (-1)^{g1 g2}; additionally da annihilates
    a matching a (and db a matching b) producing a contraction term with
    coefficient +1 in which the two legs are removed and their stems are
    joined.

  * vdash_gluing: one term per label-respecting injection of a subset of
    v's operator legs into w's parameter legs (da -> a, db -> b), with a
    closed-form sign; unmatched operator legs pay the push-past sign for
    every surviving non-operator leg of w.

Power series are graded by type and truncated by (i + j <= t1) together
with (internal vertices <= t2).  Products certify, per requested output
component, that no contribution can arrive from outside the truncation
window; otherwise ConvergenceError is raised.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .diagram_core import (
    Diagram,
    DiagramError,
    LegKind,
    LinComb,
    SpaceTag,
    empty_diagram,
    fork_leg,
    grading,
    juxtapose,
    parse,
)
from . import maps as _maps


class ConvergenceError(RuntimeError):
    """A truncated component would depend on data beyond the truncation."""

    def __init__(self, message: str, component: Optional[tuple] = None):
        super().__init__(message)
        self.component = component


_OP_SPACES = (SpaceTag.WHAT_AB, SpaceTag.WHAT_F_AB, SpaceTag.WHAT_WEDGE_AB)


def _require_op_space(space: SpaceTag) -> None:
    if space not in _OP_SPACES:
        raise DiagramError("operator calculus needs a parameter-aware space")


def op_type(d: Diagram) -> Tuple[int, int]:
    return grading(d).type_ij


# ---------------------------------------------------------------------------
# Raw scratch representation (intermediate rewrite states may violate the
# operator-suffix invariant, so they cannot be Diagram values)
# ---------------------------------------------------------------------------


def _raw_union(v: Diagram, w: Diagram):
    off = v.max_halfedge() + 1
    w2 = w.relabel(off)
    return (
        v.verts + w2.verts,
        list(v.edges) + list(w2.edges),
        list(v.legs) + list(w2.legs),
        v.circles + w2.circles,
    )


def _raw_join_ids(edges, legs, circles, hI: int, hJ: int):
    """Remove the legs with half-edges hI, hJ and join their stems."""
    partner = {}
    for a, b in edges:
        partner[a] = b
        partner[b] = a
    alpha, beta = partner[hI], partner[hJ]
    edges = [e for e in edges if hI not in e and hJ not in e]
    if alpha == hJ:
        circles += 1
    else:
        edges.append((alpha, beta))
    legs = [(h, k) for h, k in legs if h not in (hI, hJ)]
    return edges, legs, circles


def _matches(op: LegKind, par: LegKind) -> bool:
    return (op is LegKind.OP_DA and par is LegKind.PARAM_A) or (
        op is LegKind.OP_DB and par is LegKind.PARAM_B
    )


# ---------------------------------------------------------------------------
# Definition 1: rewrite to normal form
# ---------------------------------------------------------------------------


def vdash_rewrite(v: Diagram, w: Diagram) -> LinComb:
    """The product v |- w by exhaustive rewriting."""
    if v.space is not w.space:
        raise DiagramError("vdash: space mismatch")
    _require_op_space(v.space)
    verts, edges, legs, circles = _raw_union(v, w)
    out = LinComb(v.space)
    work = [(edges, legs, circles, Fraction(1))]
    while work:
        edges, legs, circles, coeff = work.pop()
        p = _leftmost_violation(legs)
        if p is None:
            out.add_term(
                Diagram(v.space, verts, tuple(edges), tuple(legs), circles), coeff
            )
            continue
        k1, k2 = legs[p][1], legs[p + 1][1]
        swapped = list(legs)
        swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
        push = -1 if (k1.grade * k2.grade) % 2 else 1
        work.append((list(edges), swapped, circles, coeff * push))
        if _matches(k1, k2):
            e2, l2, c2 = _raw_join_ids(
                list(edges), list(legs), circles, legs[p][0], legs[p + 1][0]
            )
            work.append((e2, l2, c2, coeff))
    return out


def _leftmost_violation(legs) -> Optional[int]:
    for p in range(len(legs) - 1):
        if legs[p][1].is_op and not legs[p + 1][1].is_op:
            return p
    return None


# ---------------------------------------------------------------------------
# Definition 2: signed sum over gluings
# ---------------------------------------------------------------------------


def gluings(v: Diagram, w: Diagram) -> Iterable[tuple]:
    """All label-respecting injections from a subset of v's operator legs
    into w's parameter legs, as sorted tuples of (op_pos, param_pos)."""
    ops_a = [p for p, (_, k) in enumerate(v.legs) if k is LegKind.OP_DA]
    ops_b = [p for p, (_, k) in enumerate(v.legs) if k is LegKind.OP_DB]
    par_a = [p for p, (_, k) in enumerate(w.legs) if k is LegKind.PARAM_A]
    par_b = [p for p, (_, k) in enumerate(w.legs) if k is LegKind.PARAM_B]
    for ra in range(min(len(ops_a), len(par_a)) + 1):
        for sub_a in itertools.combinations(ops_a, ra):
            for inj_a in itertools.permutations(par_a, ra):
                for rb in range(min(len(ops_b), len(par_b)) + 1):
                    for sub_b in itertools.combinations(ops_b, rb):
                        for inj_b in itertools.permutations(par_b, rb):
                            yield tuple(sorted(
                                list(zip(sub_a, inj_a)) + list(zip(sub_b, inj_b))
                            ))


def term_of_gluing(v: Diagram, w: Diagram, sigma) -> Tuple[Diagram, int]:
    """t(v, w, sigma): the glued diagram and its sign.

    Sign rule: process v's operator legs from right to left.  A matched
    leg of grade g pays (-1)^{g * (sum of grades of surviving non-operator
    legs of w strictly left of its target)}; an unmatched one pays
    (-1)^{g * (sum of grades of all surviving non-operator legs of w)}.
    "Surviving" excludes targets of operator legs already processed.
    """
    if v.space is not w.space:
        raise DiagramError("vdash: space mismatch")
    _require_op_space(v.space)
    sigma = dict(sigma)
    if len(set(sigma.values())) != len(sigma):
        raise DiagramError("gluing must be injective")
    for op_pos, par_pos in sigma.items():
        if not _matches(v.legs[op_pos][1], w.legs[par_pos][1]):
            raise DiagramError("gluing does not respect labels")

    kv = len(v.legs)
    verts, edges, legs, circles = _raw_union(v, w)
    # half-edge ids in the union, before any surgery
    v_leg_ids = [h for h, _ in legs[:kv]]
    w_leg_ids = [h for h, _ in legs[kv:]]

    v_ops = [p for p, (_, k) in enumerate(v.legs) if k.is_op]
    surviving = {p for p, (_, k) in enumerate(w.legs) if not k.is_op}
    sign_exp = 0
    for op_pos in reversed(v_ops):
        g = v.legs[op_pos][1].grade
        if op_pos in sigma:
            target = sigma[op_pos]
            sign_exp += g * sum(w.legs[q][1].grade for q in surviving if q < target)
            surviving.discard(target)
        else:
            sign_exp += g * sum(w.legs[q][1].grade for q in surviving)

    for op_pos, par_pos in sorted(sigma.items()):
        edges, legs, circles = _raw_join_ids(
            edges, legs, circles, v_leg_ids[op_pos], w_leg_ids[par_pos]
        )

    # assemble: v non-ops, surviving w non-ops, unmatched v ops, w ops
    kept = {h for h, _ in legs}
    by_id = {h: k for h, k in legs}
    order = []
    for p, (_, k) in enumerate(v.legs):
        if not k.is_op and v_leg_ids[p] in kept:
            order.append(v_leg_ids[p])
    for p, (_, k) in enumerate(w.legs):
        if not k.is_op and w_leg_ids[p] in kept:
            order.append(w_leg_ids[p])
    for p, (_, k) in enumerate(v.legs):
        if k.is_op and v_leg_ids[p] in kept:
            order.append(v_leg_ids[p])
    for p, (_, k) in enumerate(w.legs):
        if k.is_op and w_leg_ids[p] in kept:
            order.append(w_leg_ids[p])
    new_legs = tuple((h, by_id[h]) for h in order)
    d = Diagram(v.space, verts, tuple(edges), new_legs, circles)
    return d, (-1 if sign_exp % 2 else 1)


def vdash_gluing(v: Diagram, w: Diagram) -> LinComb:
    """The product v |- w as the signed sum over gluings."""
    out = LinComb(v.space)
    for sigma in gluings(v, w):
        d, s = term_of_gluing(v, w, sigma)
        out.add_term(d, s)
    return out


def vdash(x: LinComb, y: LinComb) -> LinComb:
    """Linear extension of the product; the gluing-sum construction."""
    if x.space is not y.space:
        raise DiagramError("vdash: space mismatch")
    _require_op_space(x.space)
    out = LinComb(x.space)
    for dv, cv in x.terms.items():
        for dw, cw in y.terms.items():
            t = vdash_gluing(dv, dw)
            for d, c in t.terms.items():
                out.add_term(d, cv * cw * c)
    return out


# ---------------------------------------------------------------------------
# Truncated operator power series
# ---------------------------------------------------------------------------

_KINDS4 = (LegKind.PARAM_A, LegKind.PARAM_B, LegKind.OP_DA, LegKind.OP_DB)


def _count_kind(d: Diagram, kind: LegKind) -> int:
    return sum(1 for _, k in d.legs if k is kind)


def _bound_add(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None or y is None:
        return None
    return x + y


def _bound_max(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None or y is None:
        return None
    return max(x, y)


def _bound_min_finite(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


class OpPowerSeries:
    """Type-graded truncated power series of operator diagrams.

    components maps (i, j) with i + j <= t1 to LinComb values whose
    diagrams all have <= t2 internal vertices.  bounds is a 4-tuple of
    optional maxima for the leg counts (#a, #b, #da, #db) over the WHOLE
    (untruncated) series; None means unbounded.  Exact (finitely
    supported) series carry their true maxima, so products can certify
    that truncation loses nothing.
    """

    __slots__ = ("space", "t1", "t2", "components", "bounds")

    def __init__(self, space: SpaceTag, t1: int, t2: int,
                 components: Optional[Dict] = None,
                 bounds: tuple = (None, None, None, None)):
        _require_op_space(space)
        self.space = space
        self.t1 = t1
        self.t2 = t2
        self.components: Dict[tuple, LinComb] = {}
        self.bounds = tuple(bounds)
        if components:
            for ij, vec in components.items():
                self._set(ij, vec)

    # -- construction -------------------------------------------------------

    @staticmethod
    def from_lincomb(x: LinComb, t1: int, t2: int) -> "OpPowerSeries":
        s = OpPowerSeries(x.space, t1, t2)
        maxima = [0, 0, 0, 0]
        for d, c in x.terms.items():
            i, j = op_type(d)
            if i + j > t1 or len(d.verts) > t2:
                raise DiagramError(
                    "from_lincomb: term outside truncation window (%d,%d)" % (i, j)
                )
            for t, kind in enumerate(_KINDS4):
                maxima[t] = max(maxima[t], _count_kind(d, kind))
            s._add_diagram(d, c)
        s.bounds = tuple(maxima)
        return s

    @staticmethod
    def unit(space: SpaceTag, t1: int, t2: int) -> "OpPowerSeries":
        s = OpPowerSeries(space, t1, t2)
        s._add_diagram(empty_diagram(space), 1)
        s.bounds = (0, 0, 0, 0)
        return s

    def _set(self, ij: tuple, vec: LinComb) -> None:
        filtered = LinComb(self.space)
        for d, c in vec.terms.items():
            if len(d.verts) <= self.t2:
                filtered.add_term(d, c)
        if not filtered.is_zero():
            self.components[ij] = filtered

    def _add_diagram(self, d: Diagram, coeff) -> None:
        i, j = op_type(d)
        if i + j > self.t1 or len(d.verts) > self.t2:
            return
        vec = self.components.setdefault((i, j), LinComb(self.space))
        vec.add_term(d, coeff)
        if vec.is_zero():
            del self.components[(i, j)]

    def copy(self) -> "OpPowerSeries":
        s = OpPowerSeries(self.space, self.t1, self.t2, bounds=self.bounds)
        s.components = {ij: v.copy() for ij, v in self.components.items()}
        return s

    # -- simple algebra -----------------------------------------------------

    def __add__(self, other: "OpPowerSeries") -> "OpPowerSeries":
        self._compat(other)
        s = self.copy()
        for ij, vec in other.components.items():
            cur = s.components.get(ij)
            merged = vec.copy() if cur is None else cur + vec
            if merged.is_zero():
                s.components.pop(ij, None)
            else:
                s.components[ij] = merged
        s.bounds = tuple(
            _bound_max(a, b) for a, b in zip(self.bounds, other.bounds)
        )
        return s

    def __sub__(self, other: "OpPowerSeries") -> "OpPowerSeries":
        return self + (other * -1)

    def __mul__(self, scalar) -> "OpPowerSeries":
        s = OpPowerSeries(self.space, self.t1, self.t2, bounds=self.bounds)
        scalar = Fraction(scalar)
        if scalar != 0:
            s.components = {ij: v * scalar for ij, v in self.components.items()}
        return s

    __rmul__ = __mul__

    def _compat(self, other: "OpPowerSeries") -> None:
        if self.space is not other.space:
            raise DiagramError("series space mismatch")
        if self.t1 != other.t1 or self.t2 != other.t2:
            raise DiagramError("series truncation mismatch")

    def component(self, i: int, j: int) -> LinComb:
        return self.components.get((i, j), LinComb(self.space)).copy()

    def is_zero(self) -> bool:
        return not self.components

    def retag(self, space: SpaceTag) -> "OpPowerSeries":
        _require_op_space(space)
        s = OpPowerSeries(space, self.t1, self.t2, bounds=self.bounds)
        for ij, vec in self.components.items():
            s.components[ij] = vec.retag(space)
        return s

    def support_types(self) -> list:
        return sorted(self.components)

    def __repr__(self):
        keys = ", ".join(
            "(%d,%d):%d" % (i, j, len(self.components[(i, j)]))
            for i, j in self.support_types()
        )
        return "OpPowerSeries(%s, t1=%d, t2=%d, {%s})" % (
            self.space.value, self.t1, self.t2, keys
        )

    # -- the # product ------------------------------------------------------

    def sharp(self, other: "OpPowerSeries") -> "OpPowerSeries":
        """Juxtaposition product: types add, so truncation is always faithful."""
        self._compat(other)
        s = OpPowerSeries(self.space, self.t1, self.t2)
        for (k, l), u in self.components.items():
            for (m, n), v in other.components.items():
                if k + m + l + n > self.t1:
                    continue
                prod = juxtapose(u, v)
                ij = (k + m, l + n)
                cur = s.components.get(ij)
                merged = prod if cur is None else cur + prod
                s._set(ij, merged)
        s.bounds = tuple(
            _bound_add(a, b) for a, b in zip(self.bounds, other.bounds)
        )
        return s

    # -- the |- product -----------------------------------------------------

    def _param_grade_cap(self) -> Optional[int]:
        a, b = self.bounds[0], self.bounds[1]
        return _bound_add(_bound_add(a, a), b)

    def _op_grade_cap(self) -> Optional[int]:
        da, db = self.bounds[2], self.bounds[3]
        return _bound_add(_bound_add(da, da), db)

    def _certify_vdash(self, other: "OpPowerSeries", i: int, j: int) -> None:
        """Raise unless component (i, j) of self |- other is fully
        determined by in-window components of both factors."""
        pa = _bound_min_finite(self.bounds[2], other.bounds[0])
        qb = _bound_min_finite(self.bounds[3], other.bounds[1])
        if pa is None or qb is None:
            raise ConvergenceError(
                "unbounded operator legs against unbounded parameter legs",
                (i, j),
            )
        g_cap = 2 * pa + qb
        u_par = self._param_grade_cap()
        u_op = self._op_grade_cap()
        v_par = other._param_grade_cap()
        v_op = other._op_grade_cap()
        u_reach = _min_with(i, u_par) + _min_with(j + g_cap, u_op)
        v_reach = _min_with(i + g_cap, v_par) + _min_with(j, v_op)
        if u_reach > self.t1:
            raise ConvergenceError(
                "left factor may contribute from beyond the window", (i, j)
            )
        if v_reach > self.t1:
            raise ConvergenceError(
                "right factor may contribute from beyond the window", (i, j)
            )

    def vdash(self, other: "OpPowerSeries",
              window: Optional[Iterable] = None) -> "OpPowerSeries":
        """The |- product.  window restricts which output components are
        materialized (default: everything with i + j <= t1); each requested
        component is certified before use."""
        self._compat(other)
        if window is None:
            window = [(i, j) for i in range(self.t1 + 1)
                      for j in range(self.t1 + 1 - i)]
        window = sorted(set(window))
        for i, j in window:
            self._certify_vdash(other, i, j)
        wanted = set(window)
        s = OpPowerSeries(self.space, self.t1, self.t2)
        acc: Dict[tuple, LinComb] = {}
        for (k, l), u in self.components.items():
            for (m, n), v in other.components.items():
                if not any(
                    _glue_feasible(k, l, m, n, i, j) for i, j in wanted
                ):
                    continue
                prod = vdash(u, v)
                for d, c in prod.terms.items():
                    ij = op_type(d)
                    if ij not in wanted:
                        continue
                    vec = acc.setdefault(ij, LinComb(self.space))
                    vec.add_term(d, c)
        for ij, vec in acc.items():
            s._set(ij, vec)
        s.bounds = tuple(
            _bound_add(a, b) for a, b in zip(self.bounds, other.bounds)
        )
        return s

    # -- projections --------------------------------------------------------

    def project_00(self) -> LinComb:
        return self.component(0, 0)

    def set_b_zero(self) -> "OpPowerSeries":
        """Drop every diagram containing a param_b or op_db leg."""
        s = OpPowerSeries(self.space, self.t1, self.t2)
        for ij, vec in self.components.items():
            kept = LinComb(self.space)
            for d, c in vec.terms.items():
                if _count_kind(d, LegKind.PARAM_B) == 0 and \
                        _count_kind(d, LegKind.OP_DB) == 0:
                    kept.add_term(d, c)
            if not kept.is_zero():
                s.components[ij] = kept
        s.bounds = (self.bounds[0], 0, self.bounds[2], 0)
        return s


def _min_with(x: int, cap: Optional[int]) -> int:
    return x if cap is None else min(x, cap)


def _glue_feasible(k: int, l: int, m: int, n: int, i: int, j: int) -> bool:
    """Could factor types (k,l), (m,n) contribute to output type (i,j)?"""
    g2 = (k + l + m + n) - (i + j)
    if g2 < 0 or g2 % 2:
        return False
    g = g2 // 2
    return g <= min(l, m) and i >= k and j >= n


# ---------------------------------------------------------------------------
# Exponentials
# ---------------------------------------------------------------------------


def exp_sharp(x: OpPowerSeries) -> OpPowerSeries:
    """exp under #; x must have no (0, 0) component."""
    if (0, 0) in x.components:
        raise DiagramError("exp_sharp needs a series with zero constant term")
    acc = OpPowerSeries.unit(x.space, x.t1, x.t2)
    power = OpPowerSeries.unit(x.space, x.t1, x.t2)
    r = 0
    while True:
        r += 1
        power = power.sharp(x)
        if power.is_zero():
            break
        acc = acc + power * Fraction(1, _maps._factorial(r))
        if r > x.t1 + x.t2 + 2:
            raise ConvergenceError("exp_sharp did not stabilize")
    bounds = []
    for t in range(4):
        xb = x.bounds[t]
        bounds.append(0 if xb == 0 else None)
    acc.bounds = tuple(bounds)
    return acc


def exp_vdash(x: OpPowerSeries) -> OpPowerSeries:
    """exp under |- with left bracketing; x must have no (0,0) component."""
    if (0, 0) in x.components:
        raise DiagramError("exp_vdash needs a series with zero constant term")
    acc = OpPowerSeries.unit(x.space, x.t1, x.t2)
    power = OpPowerSeries.unit(x.space, x.t1, x.t2)
    bounds = tuple(0 if xb == 0 else None for xb in x.bounds)
    r = 0
    while True:
        r += 1
        power = power.vdash(x)
        power.bounds = bounds
        if power.is_zero():
            break
        acc = acc + power * Fraction(1, _maps._factorial(r))
        if r > x.t1 + x.t2 + 2:
            raise ConvergenceError("exp_vdash did not stabilize")
    acc.bounds = bounds
    return acc


def check_condition_S(u: OpPowerSeries, v: OpPowerSeries,
                      w: OpPowerSeries) -> bool:
    """True when every in-window output of both bracketings is certified."""
    try:
        uv = u.vdash(v)
        uv.vdash(w)
        vw = v.vdash(w)
        u.vdash(vw)
        return True
    except ConvergenceError:
        return False


# ---------------------------------------------------------------------------
# lambda on operator series
# ---------------------------------------------------------------------------


def lambda_op(s: OpPowerSeries) -> OpPowerSeries:
    """Extend lambda componentwise; plain legs pair up, parameter and
    operator legs stay (enclosed grade-1 ones still count for the sign)."""
    if s.space is not SpaceTag.WHAT_F_AB:
        raise DiagramError("lambda_op expects a WhatF_ab series")
    out = OpPowerSeries(SpaceTag.WHAT_WEDGE_AB, s.t1, s.t2, bounds=s.bounds)
    for ij, vec in s.components.items():
        out._set(ij, _maps.lambda_map(vec))
    return out


def lambda_lincomb(x: LinComb) -> LinComb:
    """lambda on a raw operator LinComb (used at the diagram level)."""
    return _maps.lambda_map(x)


# ---------------------------------------------------------------------------
# intoop, B_{l -> da} and the parameter blocks
# ---------------------------------------------------------------------------


def intoop(v: LinComb, space: SpaceTag = SpaceTag.WHAT_AB,
           t1: int = 8, t2: int = 4) -> OpPowerSeries:
    """Turn a W vector into a pure operator series: fat -> da, plain -> db,
    leg order preserved."""
    if v.space is not SpaceTag.W:
        raise DiagramError("intoop expects a W vector")
    _require_op_space(space)
    x = v.retag(space, {LegKind.FAT: LegKind.OP_DA, LegKind.PLAIN: LegKind.OP_DB})
    return OpPowerSeries.from_lincomb(x, t1, t2)


def legs_to_partial_a(v: LinComb, space: SpaceTag = SpaceTag.WHAT_F_AB,
                      t1: int = 8, t2: int = 4) -> OpPowerSeries:
    """Order the legs canonically and relabel every leg da; type (0, 2k)."""
    if v.space is not SpaceTag.B:
        raise DiagramError("legs_to_partial_a expects a B vector")
    _require_op_space(space)
    out = LinComb(space)
    for d, c in v.terms.items():
        nd = Diagram(
            space,
            d.verts,
            d.edges,
            tuple((h, LegKind.OP_DA) for h, _ in d.legs),
            d.circles,
        )
        out.add_term(nd, c)
    return OpPowerSeries.from_lincomb(out, t1, t2)


def param_a_block() -> Diagram:
    """a--fat strut (space What_ab), parameter leg first."""
    return parse("D[v:;e:(0-1);l:a@0,f2@1]", SpaceTag.WHAT_AB)


def param_b_block() -> Diagram:
    """b--plain strut (space What_ab), parameter leg first."""
    return parse("D[v:;e:(0-1);l:b@0,p1@1]", SpaceTag.WHAT_AB)


def param_j_block() -> Diagram:
    """a--curvature strut (space WhatF_ab)."""
    return parse("D[v:;e:(0-1);l:a@0,F@1]", SpaceTag.WHAT_F_AB)


def param_k_block() -> Diagram:
    """a leg forking into two plain legs (space WhatF_ab)."""
    seed = parse("D[v:;e:(0-1);l:a@0,p1@1]", SpaceTag.WHAT_F_AB)
    return fork_leg(seed, 1, (LegKind.PLAIN, LegKind.PLAIN))


def param_l_block() -> Diagram:
    """b--plain strut (space WhatF_ab)."""
    return parse("D[v:;e:(0-1);l:b@0,p1@1]", SpaceTag.WHAT_F_AB)


def param_z_block() -> Diagram:
    """a leg forking into two db operator legs (space WhatF_ab)."""
    seed = parse("D[v:;e:(0-1);l:a@0,p1@1]", SpaceTag.WHAT_F_AB)
    return fork_leg(seed, 1, (LegKind.OP_DB, LegKind.OP_DB))


def block_series(d: Diagram, coeff=1, t1: int = 8, t2: int = 4) -> OpPowerSeries:
    x = LinComb.of(d, coeff)
    return OpPowerSeries.from_lincomb(x, t1, t2)
