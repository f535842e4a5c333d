"""The maps between diagram spaces, plus the leg-gluing operation.

The two compositions whose agreement is the flagship check:

    main_lhs = lambda_map . fat_to_F . pi_hat . chi_W . upsilon   (B -> WhatWedge)
    main_rhs = phi_A . chi_B . d_omega                            (B -> WhatWedge)

All maps are linear; generator-level work is memoized where it pays
(chi_W averages k! orderings).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .diagram_core import (
    Diagram,
    DiagramError,
    LegKind,
    LinComb,
    SpaceTag,
    empty_diagram,
    fork_leg,
    join_legs_at,
    koszul_sign,
    permute_legs,
    union_diagrams,
)


# ---------------------------------------------------------------------------
# chi_B : B -> A, the average over leg orderings
# ---------------------------------------------------------------------------


def chi_B(v: LinComb) -> LinComb:
    if v.space is not SpaceTag.B:
        raise DiagramError("chi_B expects a B vector")
    out = LinComb(SpaceTag.A)
    for d, c in v.terms.items():
        k = len(d.legs)
        w = c * Fraction(1, _factorial(k))
        for perm in itertools.permutations(range(k)):
            legs = tuple(d.legs[i] for i in perm)
            out.add_term(Diagram(SpaceTag.A, d.verts, d.edges, legs, d.circles), w)
    return out


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# Leg gluing and the operation d_X(Y)
# ---------------------------------------------------------------------------


def glue_leg_pairs(d: Diagram, pairs: Iterable) -> Diagram:
    """Join the stems of each (i, j) leg-position pair and drop those legs.

    Pairs must be disjoint.  Chains through struts and fully closed chains
    (which become circles) are handled by joining one pair at a time.
    """
    ids = [(d.legs[i][0], d.legs[j][0]) for i, j in pairs]
    cur = d
    for hI, hJ in ids:
        pos = {h: t for t, (h, _) in enumerate(cur.legs)}
        i, j = pos[hI], pos[hJ]
        if i > j:
            i, j = j, i
        cur = join_legs_at(cur, i, j)
    return cur


def glue_partial(x: LinComb, y: LinComb) -> LinComb:
    """The operation d_x(y): glue all legs of x onto legs of y, all ways.

    Sum over injections of x's legs into y's legs; zero whenever a
    generator of x has more legs than one of y.  No signs arise: all legs
    are unordered grade-1 legs of B.
    """
    if x.space is not SpaceTag.B or y.space is not SpaceTag.B:
        raise DiagramError("glue_partial expects B vectors")
    out = LinComb(SpaceTag.B)
    for dx, cx in x.terms.items():
        k = len(dx.legs)
        for dy, cy in y.terms.items():
            m = len(dy.legs)
            if k > m:
                continue
            u = union_diagrams(dx, dy)
            for phi in itertools.permutations(range(m), k):
                pairs = [(i, k + phi[i]) for i in range(k)]
                out.add_term(glue_leg_pairs(u, pairs), cx * cy)
    return out


# ---------------------------------------------------------------------------
# The Wheels element
# ---------------------------------------------------------------------------


def wheel(n: int) -> Diagram:
    """The n-wheel: an n-cycle of internal vertices, one leg each.

    Odd wheels are AS-degenerate in B and vanish on canonicalization.
    """
    if n < 1:
        raise DiagramError("wheel size must be >= 1")
    verts = tuple((3 * t, 3 * t + 1, 3 * t + 2) for t in range(n))
    edges = tuple((3 * t + 2, 3 * ((t + 1) % n)) for t in range(n))
    edges += tuple((3 * t + 1, 3 * n + t) for t in range(n))
    legs = tuple((3 * n + t, LegKind.PLAIN) for t in range(n))
    return Diagram(SpaceTag.B, verts, edges, legs, 0)


def wheel_coefficients(max_order: int) -> dict:
    """Coefficients b_{2n} of the wheel series, from the exact expansion of

        (1/2) log( sinh(x/2) / (x/2) )  =  sum_n  b_{2n} x^{2n}.

    Returned as {2n: Fraction}.  This is the default table; omega() accepts
    a replacement table so the value stays configurable.
    """
    order = max_order
    # sinh(u)/u = sum u^{2i} / (2i+1)!  as a series in t = u^2
    nt = order // 2 + 1
    f = [Fraction(1, _factorial(2 * i + 1)) for i in range(nt)]
    # log(1 + a) where a = f - 1
    a = [Fraction(0)] + f[1:]
    log = [Fraction(0)] * nt
    power = a[:]
    sign = 1
    for m in range(1, nt):
        for i in range(nt):
            log[i] += Fraction(sign, m) * power[i]
        nxt = [Fraction(0)] * nt
        for i in range(nt):
            if power[i] == 0:
                continue
            for j in range(nt - i):
                nxt[i + j] += power[i] * a[j]
        power = nxt
        sign = -sign
    # substitute u = x/2 (so t = x^2/4) and halve
    out = {}
    for i in range(1, nt):
        c = log[i] * Fraction(1, 2) * Fraction(1, 4 ** i)
        if 2 * i <= max_order:
            out[2 * i] = c
    return out


def omega(leg_budget: int, coeffs: Optional[Mapping] = None) -> LinComb:
    """The Wheels element truncated to terms with at most leg_budget legs.

    exp under disjoint union of sum_n b_{2n} (2n-wheel); only even wheels
    survive canonicalization so odd sizes are never generated.
    """
    if coeffs is None:
        coeffs = wheel_coefficients(leg_budget)
    sizes = sorted(s for s in coeffs if s <= leg_budget)
    out = LinComb(SpaceTag.B)
    out.add_term(empty_diagram(SpaceTag.B), 1)

    def rec(idx: int, legs_used: int, diag: Diagram, coeff: Fraction):
        if idx == len(sizes):
            return
        s = sizes[idx]
        rec(idx + 1, legs_used, diag, coeff)
        mult = 0
        cur = diag
        cc = coeff
        while legs_used + (mult + 1) * s <= leg_budget:
            mult += 1
            cur = union_diagrams(cur, wheel(s))
            cc = cc * Fraction(coeffs[s]) / mult
            out.add_term(cur, cc)
            rec(idx + 1, legs_used + mult * s, cur, cc)

    rec(0, 0, empty_diagram(SpaceTag.B), Fraction(1))
    return out


def d_omega(v: LinComb, coeffs: Optional[Mapping] = None) -> LinComb:
    """Glue the Wheels element onto v: sum over Omega terms of d_term(v)."""
    if v.space is not SpaceTag.B:
        raise DiagramError("d_omega expects a B vector")
    if v.is_zero():
        return LinComb(SpaceTag.B)
    budget = max(len(d.legs) for d in v.terms)
    return glue_partial(omega(budget, coeffs), v)


# ---------------------------------------------------------------------------
# upsilon : B -> W  (leg |-> fat - 1/2 fork)
# ---------------------------------------------------------------------------


def upsilon(v: LinComb) -> LinComb:
    if v.space is not SpaceTag.B:
        raise DiagramError("upsilon expects a B vector")
    out = LinComb(SpaceTag.W)
    for d, c in v.terms.items():
        base = Diagram(
            SpaceTag.W,
            d.verts,
            d.edges,
            tuple((h, LegKind.FAT) for h, _ in d.legs),
            d.circles,
        )
        out += _expand_leg_substitution(base, LegKind.FAT, Fraction(-1, 2)) * c
    return out


def _expand_leg_substitution(d: Diagram, target: LegKind, fork_coeff: Fraction) -> LinComb:
    """Each target-kind leg stays (coeff 1) or becomes a plain-plain fork
    (coeff fork_coeff), expanded over all subsets."""
    positions = [p for p, (_, k) in enumerate(d.legs) if k is target]
    out = LinComb(d.space)
    for r in range(len(positions) + 1):
        for subset in itertools.combinations(positions, r):
            cur = d
            for p in sorted(subset, reverse=True):
                cur = fork_leg(cur, p)
            out.add_term(cur, fork_coeff ** r)
    return out


# ---------------------------------------------------------------------------
# chi_W : W -> Wtilde  (graded average over leg orderings)
# ---------------------------------------------------------------------------

_CHI_W_CACHE: dict = {}


def chi_W(v: LinComb) -> LinComb:
    if v.space is not SpaceTag.W:
        raise DiagramError("chi_W expects a W vector")
    out = LinComb(SpaceTag.WTILDE)
    for d, c in v.terms.items():
        hit = _CHI_W_CACHE.get(d)
        if hit is None:
            hit = _chi_W_diagram(d)
            _CHI_W_CACHE[d] = hit
        for dd, cc in hit.terms.items():
            out.add_term(dd, c * cc)
    return out


def _chi_W_diagram(d: Diagram) -> LinComb:
    k = len(d.legs)
    kinds = [kind for _, kind in d.legs]
    out = LinComb(SpaceTag.WTILDE)
    w = Fraction(1, _factorial(k))
    for perm in itertools.permutations(range(k)):
        sgn = koszul_sign(kinds, perm)
        nd = Diagram(
            SpaceTag.WTILDE,
            d.verts,
            d.edges,
            tuple(d.legs[i] for i in perm),
            d.circles,
        )
        out.add_term(nd, sgn * w)
    return out


# ---------------------------------------------------------------------------
# pi_hat, fat_to_F, phi_A
# ---------------------------------------------------------------------------


def pi_hat(v: LinComb) -> LinComb:
    if v.space is not SpaceTag.WTILDE:
        raise DiagramError("pi_hat expects a Wtilde vector")
    return v.retag(SpaceTag.WHAT)


def fat_to_F(v: LinComb) -> LinComb:
    """Substitute fat |-> curvature + 1/2 fork, landing in WhatF."""
    if v.space not in (SpaceTag.WHAT, SpaceTag.WHAT_AB):
        raise DiagramError("fat_to_F expects a What or What_ab vector")
    target = SpaceTag.WHAT_F if v.space is SpaceTag.WHAT else SpaceTag.WHAT_F_AB
    out = LinComb(target)
    for d, c in v.terms.items():
        ex = _expand_leg_substitution(d, LegKind.FAT, Fraction(1, 2))
        for dd, cc in ex.terms.items():
            out.add_term(dd.retag(target, {LegKind.FAT: LegKind.CURV}), c * cc)
    return out


def phi_A(v: LinComb) -> LinComb:
    if v.space is not SpaceTag.A:
        raise DiagramError("phi_A expects an A vector")
    return v.retag(SpaceTag.WHAT_WEDGE, {LegKind.PLAIN: LegKind.CURV})


# ---------------------------------------------------------------------------
# Pairings, pairing_sign, lambda_map, chi_wedge
# ---------------------------------------------------------------------------


def validate_pairing(kinds: Sequence[LegKind], pairing) -> tuple:
    """Normalize a pairing to a sorted tuple of (i, j) with i < j."""
    seen = set()
    norm = []
    for pair in pairing:
        pair = tuple(sorted(pair))
        if len(pair) != 2 or pair[0] == pair[1]:
            raise DiagramError("pairing members must be 2-element subsets")
        for p in pair:
            if not 0 <= p < len(kinds):
                raise DiagramError("pairing position %d out of range" % p)
            if kinds[p].grade != 1:
                raise DiagramError("pairing position %d is not grade 1" % p)
            if p in seen:
                raise DiagramError("pairing positions must be disjoint")
            seen.add(p)
        norm.append(pair)
    return tuple(sorted(norm))


def pairing_sign(kinds: Sequence[LegKind], pairing) -> int:
    """(-1)^x where x counts arc crossings in the standard drawing:
    interleaved arc pairs, plus (arc, enclosed unpaired grade-1 leg)
    incidences.  Grade-2 legs drop out of the drawing and never count.
    """
    arcs = validate_pairing(kinds, pairing)
    paired = {p for arc in arcs for p in arc}
    x = 0
    for (i, j), (k, l) in itertools.combinations(arcs, 2):
        if i < k < j < l or k < i < l < j:
            x += 1
    for i, j in arcs:
        for q in range(i + 1, j):
            if q not in paired and kinds[q].grade == 1:
                x += 1
    return -1 if x % 2 else 1


def enumerate_pairings(positions: Sequence[int]) -> Iterable:
    """All partial matchings on the given positions (the empty one first)."""
    positions = sorted(positions)

    def rec(rest):
        if not rest:
            yield ()
            return
        p = rest[0]
        # p unpaired
        for rem in rec(rest[1:]):
            yield rem
        # p paired with each later q
        for t in range(1, len(rest)):
            q = rest[t]
            for rem in rec(rest[1:t] + rest[t + 1:]):
                yield ((p, q),) + rem

    yield from rec(list(positions))


_LAMBDA_TARGET = {
    SpaceTag.WHAT_F: SpaceTag.WHAT_WEDGE,
    SpaceTag.WHAT_F_AB: SpaceTag.WHAT_WEDGE_AB,
}


def lambda_map(v: LinComb) -> LinComb:
    """Glue the plain (grade-1, bottom) legs to each other in all ways.

    Each pairing contributes sign * (1/2)^|pairing| times the glued
    diagram; parameter and operator legs are never paired but enclosed
    grade-1 ones count toward the sign.
    """
    target = _LAMBDA_TARGET.get(v.space)
    if target is None:
        raise DiagramError("lambda_map expects a WhatF or WhatF_ab vector")
    out = LinComb(target)
    for d, c in v.terms.items():
        for pairing, sgn, glued in lambda_terms(d):
            out.add_term(glued.retag(target), c * sgn * Fraction(1, 2 ** len(pairing)))
    return out


def lambda_terms(d: Diagram):
    """Yield (pairing, sign, glued diagram in the source space) triples."""
    kinds = [k for _, k in d.legs]
    plain_positions = [p for p, k in enumerate(kinds) if k is LegKind.PLAIN]
    for pairing in enumerate_pairings(plain_positions):
        sgn = pairing_sign(kinds, pairing)
        yield pairing, sgn, glue_leg_pairs(d, pairing)


def chi_wedge(v: LinComb) -> LinComb:
    """Graded-average the plain legs among their own positions."""
    if v.space is not SpaceTag.WHAT_WEDGE:
        raise DiagramError("chi_wedge expects a WhatWedge vector")
    out = LinComb(SpaceTag.WHAT_F)
    for d, c in v.terms.items():
        kinds = [k for _, k in d.legs]
        plains = [p for p, k in enumerate(kinds) if k is LegKind.PLAIN]
        w = c * Fraction(1, _factorial(len(plains)))
        for sigma in itertools.permutations(plains):
            perm = list(range(len(kinds)))
            for slot, old in zip(plains, sigma):
                perm[slot] = old
            nd = permute_legs(d, perm).retag(SpaceTag.WHAT_F)
            out.add_term(nd, koszul_sign(kinds, perm) * w)
    return out


# ---------------------------------------------------------------------------
# The two flagship compositions
# ---------------------------------------------------------------------------


def main_lhs(v: LinComb) -> LinComb:
    return lambda_map(fat_to_F(pi_hat(chi_W(upsilon(v)))))


def main_rhs(v: LinComb) -> LinComb:
    return phi_A(chi_B(d_omega(v)))
