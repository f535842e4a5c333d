"""Independent algebraic oracle for the relation schemas.

Evaluates diagrams in concrete modules built from gl_2 with the trace
form: internal vertices contract against the bracket tensor, internal
edges against the inverse trace form, and legs act in a kind-dependent
target algebra.  Every relation schema instance must evaluate to zero;
a handful of named diagrams must evaluate to nonzero values.  Nothing
here imports the engine's relation code paths beyond the Diagram data
type itself, so agreement is meaningful.

Targets by space:

=========== ==============================================================
B           polynomial algebra (legs commute)
A           2x2 matrices, legs multiply in order via the defining rep
W           graded-commutative algebra (fat legs commute, plain anticommute)
Wtilde      free tensor slots (no leg relations)
What        M_2 (x) Cl(gl_2): fat -> rho(x)(x)1 + 1(x)spin(ad x),
            plain -> 1(x)gamma(x)
WhatF       M_2 (x) Cl(gl_2): F -> rho(x)(x)1, plain -> 1(x)gamma(x)
WhatWedge   M_2 (x) Lambda(gl_2): F -> rho(x)(x)1, plain -> 1(x)xi(x)
=========== ==============================================================

The Clifford algebra is taken with gamma_i gamma_j + gamma_j gamma_i =
t_ij (coefficient one, matching the join normalization of the
plain-plain schemas).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Tuple

from weildiag.diagram_core import Diagram, LegKind, SpaceTag

# gl_2 basis: elementary matrices e_ab, flattened
BASIS = [(0, 0), (0, 1), (1, 0), (1, 1)]
DIM = len(BASIS)
# trace form t(e_ab, e_cd) = delta_ad delta_bc: partner swaps the indices
PARTNER = [BASIS.index((b, a)) for a, b in BASIS]


def _mat(i: int):
    a, b = BASIS[i]
    m = [[Fraction(0)] * 2 for _ in range(2)]
    m[a][b] = Fraction(1)
    return m


def _mmul(x, y):
    return [
        [sum(x[r][k] * y[k][c] for k in range(2)) for c in range(2)]
        for r in range(2)
    ]


def _tr(x) -> Fraction:
    return x[0][0] + x[1][1]


MATS = [_mat(i) for i in range(DIM)]


def t_form(i: int, j: int) -> Fraction:
    return _tr(_mmul(MATS[i], MATS[j]))


def f_tensor(i: int, j: int, k: int) -> Fraction:
    """tr([e_i, e_j] e_k); totally antisymmetric under the trace form."""
    com = [
        [
            _mmul(MATS[i], MATS[j])[r][c] - _mmul(MATS[j], MATS[i])[r][c]
            for c in range(2)
        ]
        for r in range(2)
    ]
    return _tr(_mmul(com, MATS[k]))


_F = {
    (i, j, k): f_tensor(i, j, k)
    for i in range(DIM)
    for j in range(DIM)
    for k in range(DIM)
}

# ad_i as a DIM x DIM matrix: [e_i, e_j] = sum_k AD[i][k][j] e_k
AD = [[[Fraction(0)] * DIM for _ in range(DIM)] for _ in range(DIM)]
for i in range(DIM):
    for j in range(DIM):
        com = [
            [
                _mmul(MATS[i], MATS[j])[r][c] - _mmul(MATS[j], MATS[i])[r][c]
                for c in range(2)
            ]
            for r in range(2)
        ]
        for k in range(DIM):
            a, b = BASIS[k]
            AD[i][k][j] = com[a][b]


# ---------------------------------------------------------------------------
# Exact Clifford algebra on gl_2 with gamma_i gamma_j + gamma_j gamma_i = t_ij
# ---------------------------------------------------------------------------

ClElem = Dict[Tuple[int, ...], Fraction]


def cl_scalar(c) -> ClElem:
    return {(): Fraction(c)} if c else {}


def _cl_add(dst: ClElem, mono: Tuple[int, ...], c: Fraction) -> None:
    v = dst.get(mono, Fraction(0)) + c
    if v:
        dst[mono] = v
    else:
        dst.pop(mono, None)


def cl_gen_mul(i: int, x: ClElem) -> ClElem:
    """gamma_i times x, x in the sorted-monomial basis."""
    out: ClElem = {}
    for mono, c in x.items():
        _cl_gen_mono(i, mono, c, out)
    return out


def _cl_gen_mono(i: int, mono: Tuple[int, ...], c: Fraction, out: ClElem) -> None:
    if not mono or i < mono[0]:
        _cl_add(out, (i,) + mono, c)
        return
    j, rest = mono[0], mono[1:]
    if i == j:
        # gamma_i^2 = t_ii / 2
        half = t_form(i, i) / 2
        if half:
            _cl_add(out, rest, c * half)
        return
    # i > j: gamma_i gamma_j = t_ij - gamma_j gamma_i
    tij = t_form(i, j)
    if tij:
        _cl_add(out, rest, c * tij)
    inner: ClElem = {}
    _cl_gen_mono(i, rest, -c, inner)
    for m2, c2 in inner.items():
        _cl_gen_mono(j, m2, c2, out)


def cl_mul(x: ClElem, y: ClElem) -> ClElem:
    out: ClElem = {}
    for mono, c in x.items():
        cur = {m: cv * c for m, cv in y.items()}
        for g in reversed(mono):
            cur = cl_gen_mul(g, cur)
        for m2, c2 in cur.items():
            _cl_add(out, m2, c2)
    return out


def spin_ad(i: int) -> ClElem:
    """(1/2) sum_k gamma(ad_i e_k) gamma(e^k), scalar part included.

    The scalar produced by normal ordering is what makes the bracket
    exact: [spin_ad(i), spin_ad(j)] equals spin_ad of [e_i, e_j] on the
    nose, and it drops out of commutators with gamma generators.
    """
    out: ClElem = {}
    for k in range(DIM):
        dual = PARTNER[k]
        for l in range(DIM):
            c = AD[i][l][k]
            if not c:
                continue
            prod = cl_gen_mul(l, cl_gen_mul(dual, cl_scalar(1)))
            for m2, c2 in prod.items():
                _cl_add(out, m2, c2 * c / 2)
    return out


# ---------------------------------------------------------------------------
# Leg target algebras
# ---------------------------------------------------------------------------
# A generic element is dict[state -> Fraction]; `unit` and `act(kind, i, elem)`
# define each target.  States are hashable tuples.


def _merge(dst, state, c) -> None:
    v = dst.get(state, Fraction(0)) + c
    if v:
        dst[state] = v
    else:
        dst.pop(state, None)


class _Target:
    def unit(self):
        raise NotImplementedError

    def act(self, kind: LegKind, i: int, elem):
        raise NotImplementedError


class _PolyTarget(_Target):
    """Commuting leg variables (space B)."""

    def unit(self):
        return {(): Fraction(1)}

    def act(self, kind, i, elem):
        out = {}
        for mono, c in elem.items():
            _merge(out, tuple(sorted(mono + (i,))), c)
        return out


class _TensorTarget(_Target):
    """Free ordered tensor slots (space Wtilde)."""

    def unit(self):
        return {(): Fraction(1)}

    def act(self, kind, i, elem):
        out = {}
        for mono, c in elem.items():
            _merge(out, mono + (i,), c)
        return out


class _SuperTarget(_Target):
    """Graded-commutative: fat legs commute, plain legs anticommute (W)."""

    def unit(self):
        return {((), ()): Fraction(1)}

    def act(self, kind, i, elem):
        out = {}
        for (ev, od), c in elem.items():
            if kind.grade % 2 == 0:
                _merge(out, (tuple(sorted(ev + (i,))), od), c)
            else:
                if i in od:
                    continue
                pos = sum(1 for q in od if q < i)
                sgn = -1 if (len(od) - pos) % 2 else 1
                new = tuple(sorted(od + (i,)))
                _merge(out, (ev, new), c * sgn)
        return out


class _MatrixTarget(_Target):
    """Ordered product in the defining rep (space A)."""

    def unit(self):
        return {(r, c): Fraction(1) if r == c else Fraction(0)
                for r in range(2) for c in range(2)}

    def act(self, kind, i, elem):
        m = [[elem.get((r, c), Fraction(0)) for c in range(2)] for r in range(2)]
        prod = _mmul(m, MATS[i])
        return {(r, c): prod[r][c] for r in range(2) for c in range(2)}


class _HatTarget(_Target):
    """M_2 (x) Cl: fat -> rho + spin(ad), plain -> gamma (space What)."""

    def unit(self):
        return {(r, r, ()): Fraction(1) for r in range(2)}

    def act(self, kind, i, elem):
        out = {}
        if kind is LegKind.PLAIN:
            for (r, c, mono), cv in elem.items():
                right = cl_mul({mono: cv}, {(i,): Fraction(1)})
                for m2, c2 in right.items():
                    _merge(out, (r, c, m2), c2)
            return out
        if kind is not LegKind.FAT:
            raise ValueError(f"unexpected kind {kind} in What")
        spin = spin_ad(i)
        for (r, c, mono), cv in elem.items():
            for c2 in range(2):
                mv = MATS[i][c][c2]
                if mv:
                    _merge(out, (r, c2, mono), cv * mv)
            right = cl_mul({mono: cv}, spin)
            for m2, cv2 in right.items():
                _merge(out, (r, c, m2), cv2)
        return out


class _CurvTarget(_Target):
    """M_2 (x) Cl: F -> rho(x)1, plain -> gamma (space WhatF)."""

    def unit(self):
        return {(r, r, ()): Fraction(1) for r in range(2)}

    def act(self, kind, i, elem):
        out = {}
        if kind is LegKind.PLAIN:
            for (r, c, mono), cv in elem.items():
                right = cl_mul({mono: cv}, {(i,): Fraction(1)})
                for m2, c2 in right.items():
                    _merge(out, (r, c, m2), c2)
            return out
        if kind is not LegKind.CURV:
            raise ValueError(f"unexpected kind {kind} in WhatF")
        for (r, c, mono), cv in elem.items():
            for c2 in range(2):
                mv = MATS[i][c][c2]
                if mv:
                    _merge(out, (r, c2, mono), cv * mv)
        return out


class _WedgeTarget(_Target):
    """M_2 (x) Lambda: F -> rho(x)1, plain -> exterior (space WhatWedge)."""

    def unit(self):
        return {(r, r, ()): Fraction(1) for r in range(2)}

    def act(self, kind, i, elem):
        out = {}
        if kind is LegKind.PLAIN:
            for (r, c, od), cv in elem.items():
                if i in od:
                    continue
                pos = sum(1 for q in od if q < i)
                sgn = -1 if (len(od) - pos) % 2 else 1
                _merge(out, (r, c, tuple(sorted(od + (i,)))), cv * sgn)
            return out
        if kind is not LegKind.CURV:
            raise ValueError(f"unexpected kind {kind} in WhatWedge")
        for (r, c, od), cv in elem.items():
            for c2 in range(2):
                mv = MATS[i][c][c2]
                if mv:
                    _merge(out, (r, c2, od), cv * mv)
        return out


TARGETS = {
    SpaceTag.B: _PolyTarget(),
    SpaceTag.A: _MatrixTarget(),
    SpaceTag.W: _SuperTarget(),
    SpaceTag.WTILDE: _TensorTarget(),
    SpaceTag.WHAT: _HatTarget(),
    SpaceTag.WHAT_F: _CurvTarget(),
    SpaceTag.WHAT_WEDGE: _WedgeTarget(),
}


# ---------------------------------------------------------------------------
# Diagram evaluation
# ---------------------------------------------------------------------------


def evaluate(d: Diagram) -> dict:
    """Evaluate a diagram in its target algebra, as dict[state] -> coeff.

    Internal edges are summed against the inverse trace form, vertices
    against the bracket tensor, legs act in the space's target algebra
    in leg order, and each circle contributes a factor dim gl_2.  The
    output is keyed by target-algebra state only: leg relations hold in
    the algebra, not slotwise, so keeping per-leg indices would refine
    the invariant past the quotient.
    """
    target = TARGETS[d.space]
    vert_of = {}
    for vi, v in enumerate(d.verts):
        for h in v:
            vert_of[h] = vi
    leg_pos = {h: p for p, (h, _) in enumerate(d.legs)}
    edges = list(d.edges)
    out: dict = {}
    circ = Fraction(DIM) ** d.circles
    for assignment in itertools.product(range(DIM), repeat=len(edges)):
        # each edge end sees the index (first end) or its partner (second)
        idx = {}
        for e, m in zip(edges, assignment):
            idx[e[0]] = m
            idx[e[1]] = PARTNER[m]
        weight = circ
        for v in d.verts:
            weight *= _F[(idx[v[0]], idx[v[1]], idx[v[2]])]
            if not weight:
                break
        if not weight:
            continue
        elem = target.unit()
        for h, kind in d.legs:
            elem = target.act(kind, idx[h], elem)
            if not elem:
                break
        for state, c in elem.items():
            _merge(out, state, c * weight)
    return out


def is_zero_vector(vec) -> bool:
    """Evaluate a LinComb of diagrams; True when the total tensor vanishes."""
    total: dict = {}
    for d, c in vec.terms.items():
        for k, v in evaluate(d).items():
            _merge(total, k, v * Fraction(c))
    return not total
