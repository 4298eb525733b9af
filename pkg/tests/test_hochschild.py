import random
from fractions import Fraction
from itertools import product

import pytest

from hochform.polyalg import Poly, Polyvector, parse_poly, apply_derivation, schouten, monomials_of_degree
from hochform.hochschild import (Cochain, parse_cochain, evaluate, hochschild_d, cup, brace,
                                 gerst_bracket, hkr, hh_dims, polyvector_weight_dim,
                                 basis_cochain)


def P(s, n):
    return parse_poly(s, n)


def C1(n, coef, *slots):
    return Cochain.single(n, coef if isinstance(coef, Poly) else P(coef, n), slots)


def test_evaluate_single_derivative():
    n = 1
    op = C1(n, "1", (1,))
    assert evaluate(op, [P("x1^2", n)]) == P("2*x1", n)


def test_evaluate_kills_unit():
    n = 2
    op = C1(n, "x2", (1, 0), (0, 1))
    assert evaluate(op, [Poly.const(n, 1), P("x1*x2", n)]).is_zero()
    assert evaluate(op, [P("x1*x2", n), Poly.const(n, 1)]).is_zero()


def test_evaluate_two_slots():
    n = 2
    op = C1(n, "x2", (1, 0), (1, 0))
    assert evaluate(op, [P("x1", n), P("x1*x2", n)]) == P("x2^2", n)


def test_evaluate_arity_mismatch():
    n = 1
    with pytest.raises(ValueError):
        evaluate(C1(n, "1", (1,)), [])


def test_d_on_functions_vanishes():
    n = 2
    assert hochschild_d(Cochain.from_poly(P("x1^2*x2 + 3", n))).is_zero()


def test_d_on_derivations_vanishes():
    n = 2
    v = C1(n, "x2", (1, 0)) + C1(n, "x1", (0, 1))
    assert hochschild_d(v).is_zero()


def test_d_second_order_example():
    # d of (a -> a'') is -2 a'b' as a bi-operator
    n = 1
    op = C1(n, "1", (2,))
    assert hochschild_d(op) == C1(n, "-2", (1,), (1,))


def test_d_matches_simplicial_formula_on_random_args():
    rng = random.Random(3)
    n = 2
    mons = [Poly.monomial(n, e) for d in range(0, 3) for e in monomials_of_degree(n, d)]
    ops = [C1(n, "x1", (1, 0)), C1(n, "x2", (2, 0), (0, 1)), C1(n, "1", (1, 1))]
    for op in ops:
        dop = hochschild_d(op)
        k = op.arity
        for _ in range(12):
            args = [rng.choice(mons) for _ in range(k + 1)]
            lhs = evaluate(dop, args)
            rhs = args[0] * evaluate(op, args[1:])
            for i in range(k):
                merged = args[:i] + [args[i] * args[i + 1]] + args[i + 2:]
                rhs = rhs + evaluate(op, merged) * ((-1) ** (i + 1))
            rhs = rhs + evaluate(op, args[:-1]) * args[-1] * ((-1) ** (k + 1))
            assert lhs == rhs


def test_d_squares_to_zero_exhaustive_grid():
    # every basis cochain with n<=2, arity<=3, slot order<=2, coef degree<=2
    for n in (1, 2):
        for arity in range(0, 4):
            for elem in _grid_elems(n, arity, max_order=2, max_coef=2):
                ddP = hochschild_d(hochschild_d(basis_cochain(n, elem)))
                assert ddP.is_zero(), elem


def _grid_elems(n, arity, max_order, max_coef):
    singles = [e for o in range(1, max_order + 1) for e in monomials_of_degree(n, o)]
    slot_tuples = [()]
    for _ in range(arity):
        slot_tuples = [s + (m,) for s in slot_tuples for m in singles]
    return [(e, slots) for d in range(0, max_coef + 1)
            for e in monomials_of_degree(n, d) for slots in slot_tuples]


def test_cup_arity_zero():
    n = 1
    f, g = Cochain.from_poly(P("x1", n)), Cochain.from_poly(P("x1 + 1", n))
    assert cup(f, g) == Cochain.from_poly(P("x1^2 + x1", n))


def test_cup_definition_unfolding():
    n = 1
    d1 = C1(n, "1", (1,))
    assert cup(d1, d1) == C1(n, "1", (1,), (1,))


def test_cup_associative_on_random_grid():
    rng = random.Random(9)
    n = 2
    pool = _op_pool(n)
    for _ in range(20):
        Pp, Q, R = rng.choice(pool), rng.choice(pool), rng.choice(pool)
        assert cup(cup(Pp, Q), R) == cup(Pp, cup(Q, R))


def _op_pool(n):
    return [
        Cochain.from_poly(P("x1", n)),
        Cochain.from_poly(P("x2^2", n)),
        C1(n, "1", (1, 0)),
        C1(n, "x2", (0, 1)),
        C1(n, "x1", (1, 1)),
        C1(n, "1", (1, 0), (0, 1)),
        C1(n, "x2", (0, 1), (1, 0)),
        C1(n, "1", (2, 0), (0, 1)),
    ]


def test_brace_substitution_is_action():
    n = 2
    v = C1(n, "x2", (1, 0)) + C1(n, "x1", (0, 1))
    f = P("x1*x2", n)
    vp = Polyvector(n, 1, {(0,): P("x2", n), (1,): P("x1", n)})
    got = brace(v, [Cochain.from_poly(f)])
    assert got == Cochain.from_poly(apply_derivation(vp, f))


def test_brace_no_slots_gives_zero():
    n = 1
    f = Cochain.from_poly(P("x1", n))
    assert brace(f, [C1(n, "1", (1,))]).is_zero()


def test_brace_composition_second_order():
    # E{F}(a) = E(F(a)) = a'' when E = F = first derivative
    n = 1
    E = C1(n, "1", (1,))
    assert brace(E, [E]) == C1(n, "1", (2,))


def test_brace_evaluation_oracle():
    # P{Q}(a,b,c) sums insertions of Q into P's slots (arity 2 into arity 2)
    rng = random.Random(17)
    n = 2
    mons = [Poly.monomial(n, e) for d in range(1, 3) for e in monomials_of_degree(n, d)]
    Pp = C1(n, "x2", (1, 0), (0, 1))
    Q = C1(n, "1", (1, 0), (1, 1))
    comp = brace(Pp, [Q])
    # insertion signs under the frozen convention: prefactor |P||Q| = -1,
    # then slot j contributes (-1)^(|Q| (j-1))
    for _ in range(10):
        a, b, c = (rng.choice(mons) for _ in range(3))
        lhs = evaluate(comp, [a, b, c])
        rhs = -evaluate(Pp, [evaluate(Q, [a, b]), c]) + evaluate(Pp, [a, evaluate(Q, [b, c])])
        assert lhs == rhs


def test_bracket_functions_vanish():
    n = 2
    f, g = Cochain.from_poly(P("x1", n)), Cochain.from_poly(P("x2", n))
    assert gerst_bracket(f, g).is_zero()


def test_bracket_action_example():
    n = 1
    v = C1(n, "1", (1,))
    f = Cochain.from_poly(P("x1^2", n))
    assert gerst_bracket(v, f) == Cochain.from_poly(P("2*x1", n))


def test_bracket_matches_schouten_on_vector_fields():
    n = 1
    v = C1(n, "1", (1,))
    w = C1(n, "x1", (1,))
    assert gerst_bracket(v, w) == C1(n, "1", (1,))
    # cross-module oracle
    vv = Polyvector.basis_der(n, 0)
    ww = Polyvector.basis_der(n, 0, P("x1", n))
    assert gerst_bracket(v, w) == hkr(schouten(vv, ww))


def test_bracket_jacobi_exhaustive_small():
    # graded Jacobi in shifted degrees, exhaustive on the n=1 subgrid
    n = 1
    pool = [Cochain.from_poly(P("x1", n)), Cochain.from_poly(P("x1^2", n)),
            C1(n, "1", (1,)), C1(n, "x1", (2,)),
            C1(n, "1", (1,), (1,)), C1(n, "x1", (1,), (2,))]
    for A, B, Cc in product(pool, repeat=3):
        sa, sb = A.arity - 1, B.arity - 1
        lhs = gerst_bracket(A, gerst_bracket(B, Cc))
        rhs = (gerst_bracket(gerst_bracket(A, B), Cc)
               + gerst_bracket(B, gerst_bracket(A, Cc)).scale((-1) ** (sa * sb)))
        assert lhs == rhs


def test_bracket_jacobi_random_n2():
    rng = random.Random(23)
    n = 2
    pool = _op_pool(n)
    for _ in range(20):
        A, B, Cc = (rng.choice(pool) for _ in range(3))
        sa, sb = A.arity - 1, B.arity - 1
        lhs = gerst_bracket(A, gerst_bracket(B, Cc))
        rhs = (gerst_bracket(gerst_bracket(A, B), Cc)
               + gerst_bracket(B, gerst_bracket(A, Cc)).scale((-1) ** (sa * sb)))
        assert lhs == rhs


def test_d_is_bracket_derivation_grid():
    # d[P,Q] = [dP,Q] + (-1)^{|P|}[P,dQ] in shifted degrees
    n = 2
    pool = _op_pool(n)
    for A in pool:
        for B in pool:
            lhs = hochschild_d(gerst_bracket(A, B))
            rhs = (gerst_bracket(hochschild_d(A), B)
                   + gerst_bracket(A, hochschild_d(B)).scale((-1) ** (A.arity - 1)))
            assert lhs == rhs, (A, B)


def test_gv_brace_relation_random():
    # P{Q}{R} = P{Q{R}} + P{Q,R} + (-1)^{|Q||R|} P{R,Q}
    rng = random.Random(31)
    n = 2
    pool = _op_pool(n)
    for _ in range(20):
        Pp, Q, R = (rng.choice(pool) for _ in range(3))
        sq, sr = Q.arity - 1, R.arity - 1
        lhs = brace(brace(Pp, [Q]), [R])
        rhs = (brace(Pp, [brace(Q, [R])]) + brace(Pp, [Q, R])
               + brace(Pp, [R, Q]).scale((-1) ** (sq * sr)))
        assert lhs == rhs


def test_homotopy_commutativity_random():
    # cup commutator is a coboundary of the composition P{Q}; the frozen
    # identity (audited in test_sign_audit) reads
    #   P cup Q - (-1)^(k1 k2) Q cup P
    #     = (-1)^k1 [ d(P{Q}) - (dP){Q} + (-1)^k1 P{dQ} ].
    rng = random.Random(37)
    n = 2
    pool = _op_pool(n)
    for _ in range(20):
        Pp, Q = rng.choice(pool), rng.choice(pool)
        assert _homotopy_defect(Pp, Q, ("k1", 1, -1, 1)).is_zero()


def _homotopy_defect(Pp, Q, table):
    outer, s0, s1, s2 = table
    k1, k2 = Pp.arity, Q.arity
    osign = {"+": 1, "-": -1, "k1": (-1) ** k1, "-k1": -(-1) ** k1}[outer]
    comm = cup(Pp, Q) - cup(Q, Pp).scale((-1) ** (k1 * k2))
    homotopy = (hochschild_d(brace(Pp, [Q])).scale(s0)
                + brace(hochschild_d(Pp), [Q]).scale(s1)
                + brace(Pp, [hochschild_d(Q)]).scale(s2 * (-1) ** k1))
    return comm - homotopy.scale(osign)


def test_sign_audit_unique():
    # exactly one of the 16 candidate sign tables makes the homotopy
    # commutativity identity hold across the whole pool (the s0 = 1
    # normalization removes the redundant global flip of both sides)
    n = 2
    pool = _op_pool(n)
    winners = []
    for outer in ("+", "-", "k1", "-k1"):
        for s1 in (1, -1):
            for s2 in (1, -1):
                ok = all(_homotopy_defect(A, B, (outer, 1, s1, s2)).is_zero()
                         for A in pool for B in pool)
                if ok:
                    winners.append((outer, 1, s1, s2))
    assert winners == [("k1", 1, -1, 1)]


def test_weight_preservation():
    n = 2
    A = C1(n, "x1*x2", (1, 0))          # weight 1
    B = C1(n, "x2", (0, 1), (1, 0))     # weight -1
    assert set(hochschild_d(A).weight_parts()) <= {1}
    assert set(cup(A, B).weight_parts()) <= {0}
    assert set(brace(A, [B]).weight_parts()) <= {0}
    assert set(gerst_bracket(A, B).weight_parts()) <= {0}


def test_hkr_degree_zero_one():
    n = 2
    f = P("x1^2", n)
    assert hkr(Polyvector.from_poly(f)) == Cochain.from_poly(f)
    v = Polyvector.basis_der(n, 0)
    assert hkr(v) == C1(n, "1", (1, 0))


def test_hkr_antisymmetrization():
    n = 2
    u = Polyvector(n, 2, {(0, 1): 1})
    got = hkr(u)
    want = (C1(n, Poly.const(n, Fraction(1, 2)), (1, 0), (0, 1))
            + C1(n, Poly.const(n, Fraction(-1, 2)), (0, 1), (1, 0)))
    assert got == want


def test_hkr_lands_in_cocycles():
    n = 2
    for k in range(0, 3):
        for cd in range(0, 3):
            from hochform.polyalg import polyvector_basis
            for u in polyvector_basis(n, k, cd):
                assert hochschild_d(hkr(u)).is_zero()


def test_hh_dims_examples():
    # no degree-2 polyvectors in one variable
    assert hh_dims(1, 2, 0, 4)[2] == 0
    assert hh_dims(1, 2, 1, 4)[2] == 0
    # the constant-coefficient 2-field class in two variables at weight -2
    assert hh_dims(2, 2, -2, 2)[2] == 1
    # arity 0: the algebra itself, one class per monomial
    assert hh_dims(1, 0, 3, 4)[2] == 1


def test_hh_dims_budget_guard():
    with pytest.raises(ValueError):
        hh_dims(1, 1, 2, 1)


def test_hh_matches_polyvectors_small():
    for n in (1, 2):
        for k in range(0, n + 2):
            for w in range(-k, 2):
                got = hh_dims(n, k, w, w + k + 1)[2]
                assert got == polyvector_weight_dim(n, k, w), (n, k, w)


def test_cochain_str_parse_roundtrip():
    n = 2
    op = C1(n, "x2", (1, 0), (0, 2)) + C1(n, "1 + x1", (0, 1), (1, 0)) + Cochain(n, 2)
    assert parse_cochain(str(op), n, 2) == op
    f = Cochain.from_poly(P("x1", n))
    assert parse_cochain(str(f), n, 0) == f
    assert parse_cochain("0", n, 3).is_zero()
