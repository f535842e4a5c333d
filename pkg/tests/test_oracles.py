"""Cross-checks of the engine against two independent oracles.

oracle_liealg evaluates diagrams in concrete gl_2-based algebras; every
relation schema instance the engine generates must evaluate to zero
there, while a list of named diagrams must stay nonzero.  The oracle
never calls the engine's relation or sign code, so agreement means the
schemas are relations of an actual algebraic structure rather than
self-consistent bookkeeping.

oracle_geometry recomputes the two combinatorial sign rules (pairing
signs and gluing signs) by drawing strands with exact rational
coordinates and counting transversal crossings weighted by grades.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

import oracle_geometry as og
import oracle_liealg as ol
from weildiag import maps
from weildiag import operator_calc as oc
from weildiag import quotient as qt
from weildiag.checks import _op_pool, space_generators
from weildiag.diagram_core import LegKind, SpaceTag, parse


class TestSpinElement:
    """The Clifford-algebra ingredients of the hat-space targets."""

    def test_anticommutators(self):
        # [TRIVIAL] gamma_i gamma_j + gamma_j gamma_i = t_ij by construction
        one = ol.cl_scalar(1)
        for i, j in itertools.product(range(ol.DIM), repeat=2):
            x = ol.cl_gen_mul(i, ol.cl_gen_mul(j, one))
            y = ol.cl_gen_mul(j, ol.cl_gen_mul(i, one))
            s = dict(x)
            for m, c in y.items():
                ol._cl_add(s, m, c)
            assert s == ol.cl_scalar(ol.t_form(i, j)), (i, j)

    def test_spin_acts_as_ad(self):
        # [DERIVED] [spin_ad(i), gamma_j] = gamma(ad_i e_j), checked on all pairs
        one = ol.cl_scalar(1)
        for i, j in itertools.product(range(ol.DIM), repeat=2):
            sp = ol.spin_ad(i)
            gj = ol.cl_gen_mul(j, one)
            lhs = ol.cl_mul(sp, gj)
            for m, c in ol.cl_mul(gj, sp).items():
                ol._cl_add(lhs, m, -c)
            rhs: dict = {}
            for l in range(ol.DIM):
                c = ol.AD[i][l][j]
                if c:
                    for m, c2 in ol.cl_gen_mul(l, one).items():
                        ol._cl_add(rhs, m, c2 * c)
            assert lhs == rhs, (i, j)

    def test_spin_bracket_exact(self):
        # [DERIVED] [spin_ad(i), spin_ad(j)] = spin_ad of [e_i, e_j].
        # Exactness needs the normal-ordering scalar kept: for example
        # spin_ad(e00) = g1 g2 - 1/2 and the -1/2 is load-bearing.
        for i, j in itertools.product(range(ol.DIM), repeat=2):
            si, sj = ol.spin_ad(i), ol.spin_ad(j)
            lhs = ol.cl_mul(si, sj)
            for m, c in ol.cl_mul(sj, si).items():
                ol._cl_add(lhs, m, -c)
            rhs: dict = {}
            for l in range(ol.DIM):
                c = ol.AD[i][l][j]
                if c:
                    for m, c2 in ol.spin_ad(l).items():
                        ol._cl_add(rhs, m, c2 * c)
            assert lhs == rhs, (i, j)


RELATION_WINDOWS = [
    # (space, leg kinds, max internal vertices, max legs)
    (SpaceTag.A, [LegKind.PLAIN], 2, 4),
    (SpaceTag.W, [LegKind.FAT, LegKind.PLAIN], 2, 4),
    (SpaceTag.WTILDE, [LegKind.FAT, LegKind.PLAIN], 2, 4),
    (SpaceTag.WHAT, [LegKind.FAT, LegKind.PLAIN], 1, 3),
    (SpaceTag.WHAT_F, [LegKind.CURV, LegKind.PLAIN], 1, 3),
    (SpaceTag.WHAT_WEDGE, [LegKind.CURV, LegKind.PLAIN], 1, 3),
]


class TestRelationInstancesVanish:
    @pytest.mark.parametrize(
        "space,kinds,mi,ml",
        RELATION_WINDOWS,
        ids=[row[0].value for row in RELATION_WINDOWS],
    )
    def test_all_instances_zero(self, space, kinds, mi, ml):
        seen = 0
        for d in space_generators(space, kinds, mi, ml):
            for sid, inst in qt.schema_instances(d):
                assert ol.is_zero_vector(inst), (space, sid, inst)
                seen += 1
        assert seen > 0, "window produced no relation instances"

    def test_b_ihx_instances_zero(self):
        # The smallest B diagrams whose IHX combinations do not cancel
        # syntactically are closed 4-vertex graphs.  [DERIVED]
        graphs = [
            "D[v:(0 1 2)(3 4 5)(6 7 8)(9 10 11);"
            "e:(0-3)(1-4)(2-6)(5-9)(7-10)(8-11);l:]",
            "D[v:(0 1 2)(3 4 5)(6 7 8)(9 10 11);"
            "e:(0-3)(1-6)(2-9)(4-7)(5-10)(8-11);l:]",
        ]
        seen = 0
        for lit in graphs:
            d = parse(lit, SpaceTag.B)
            for sid, inst in qt.schema_instances(d):
                assert ol.is_zero_vector(inst), (sid, inst)
                seen += 1
        assert seen == 16


class TestNonzeroControls:
    """The oracle must not be trivially zero on the quotient spaces."""

    def test_theta_graph(self):
        # [DERIVED] theta evaluates to -12 in (gl_2, trace form)
        d = parse("D[v:(0 1 2)(3 4 5);e:(0-3)(1-4)(2-5);l:]", SpaceTag.B)
        assert ol.evaluate(d) == {(): Fraction(-12)}

    def test_circle(self):
        # [DERIVED] one circle contributes dim gl_2 = 4 times the identity
        d = parse("D[v:;e:;l:;c:1]", SpaceTag.WHAT)
        vec = ol.evaluate(d)
        assert vec[(0, 0, ())] == 4 and vec[(1, 1, ())] == 4

    def test_plain_strut_hat(self):
        # [DERIVED] sum_m gamma_m gamma_m* = (1/2) sum_m t(m, m*) = 2
        d = parse("D[v:;e:(0-1);l:p1@0,p1@1]", SpaceTag.WHAT)
        vec = ol.evaluate(d)
        assert vec == {(0, 0, ()): Fraction(2), (1, 1, ()): Fraction(2)}

    def test_curvature_strut(self):
        # [DERIVED] sum_m rho(e_m) rho(e_m*) is the Casimir 2.Id on C^2
        d = parse("D[v:;e:(0-1);l:F@0,F@1]", SpaceTag.WHAT_F)
        vec = ol.evaluate(d)
        assert vec[(0, 0, ())] == 2 and vec[(1, 1, ())] == 2

    def test_fat_strut(self):
        d = parse("D[v:;e:(0-1);l:f2@0,f2@1]", SpaceTag.W)
        assert ol.evaluate(d)

    def test_y_vanishes_both_ways(self):
        # One vertex with three plain legs: AS-zero for the engine and
        # zero in the commutative polynomial target (f is antisymmetric).
        d = parse("D[v:(0 1 2);e:(0-3)(1-4)(2-5);l:p1@3,p1@4,p1@5]", SpaceTag.B)
        assert not ol.evaluate(d)


class TestGeometricSigns:
    def test_pairing_sign_matches_drawing(self):
        # exhaustive over grade words of length <= 6
        cases = 0
        for L in range(7):
            for kinds in itertools.product((LegKind.FAT, LegKind.PLAIN), repeat=L):
                g1 = [i for i, k in enumerate(kinds) if k.grade == 1]
                for pairing in maps.enumerate_pairings(g1):
                    if not pairing:
                        continue
                    want = maps.pairing_sign(list(kinds), pairing)
                    got = og.pairing_sign_drawn([k.grade for k in kinds], pairing)
                    assert want == got, (kinds, pairing)
                    cases += 1
        assert cases == 579

    def test_pairing_sign_drawing_invariance(self):
        # the crossing count must not depend on arc nesting heights
        kinds = [LegKind.PLAIN] * 6
        g1 = list(range(6))
        for pairing in maps.enumerate_pairings(g1):
            if len(pairing) < 2:
                continue
            base = og.pairing_sign_drawn([1] * 6, pairing)
            for perm in itertools.permutations(range(len(pairing))):
                assert og.pairing_sign_drawn([1] * 6, pairing, levels=perm) == base

    def test_gluing_sign_matches_drawing(self):
        ops = (LegKind.OP_DA, LegKind.OP_DB)
        grade2 = (LegKind.OP_DA, LegKind.PARAM_A, LegKind.FAT, LegKind.CURV)
        pool = _op_pool(1, 3)
        cases = 0
        for v in pool:
            for w in pool:
                for sigma in oc.gluings(v, w):
                    if not sigma:
                        continue
                    _, sgn = oc.term_of_gluing(v, w, sigma)
                    got = og.gluing_sign_drawn(
                        [2 if k in grade2 else 1 for _, k in v.legs],
                        [k in ops for _, k in v.legs],
                        [2 if k in grade2 else 1 for _, k in w.legs],
                        [k in ops for _, k in w.legs],
                        sigma,
                    )
                    assert got == sgn, (v, w, sigma)
                    cases += 1
        assert cases == 5088
