"""The jet construction f -> f^(E) and the maps derived from it."""

import random

import pytest

from jetcalc.scalars import ExpScalar, ZERO, ONE, EXP_ZERO, sc
from jetcalc.poly import (Polynomial, ExpPoly, Vector, Covector, DiffOp,
                          parse_poly, diff, translate, pairing,
                          monomials_upto, monomials_of_degree)
from jetcalc import localmod as lm
from jetcalc import jetfun as jf
from jetcalc import linalg
from jetcalc.gen import rand_poly, rand_exp_poly, rand_point


def act_germ_oracle(E, g):
    """Module action of a germ, computed summand by summand from the
    definition: exp part through exp_action, polynomial part through
    act_poly, tags carried along untouched."""
    out = [[EXP_ZERO] * E.dim for _ in range(E.dim)]
    for (freq, unit), p in g.summands.items():
        mat = linalg.mmul(E.exp_action(Covector(freq)), E.act_poly(p))
        tag = ExpScalar.unit(unit)
        for r in range(E.dim):
            for c in range(E.dim):
                if mat[r][c]:
                    out[r][c] = out[r][c] + tag * mat[r][c]
    return tuple(tuple(row) for row in out)


def test_jet_over_the_scalar_module_is_the_function_itself():
    triv = lm.cyclic_quotient(lm.maximal_ideal(1)).module
    f = parse_poly("(3)*x1^2 + (1)*x1", 1)
    J = jf.jet(f, triv)
    assert J.rows == 1 and J.entries[0][0] == ExpPoly.from_poly(f)


def test_jet_over_dual_numbers_stacks_value_and_derivative():
    E1 = lm.dual_number_module(Vector((1,)))
    J = jf.jet(parse_poly("(1)*x1^2", 1), E1)
    lam2 = ExpPoly.from_poly(parse_poly("(1)*x1^2", 1))
    twol = ExpPoly.from_poly(parse_poly("(2)*x1", 1))
    zz = ExpPoly.zero(1)
    assert J == jf.MatPolyFamily(1, [[lam2, twol], [zz, lam2]])


def _test_modules():
    lam = Vector((1, 2))
    E = lm.dual_number_module(lam)
    T2 = lm.tensor(E, lm.dual_number_module(Vector((0, 1))))
    Q3 = lm.cyclic_quotient(lm.power_ideal(2, 1)).module
    return E, T2, Q3


def test_jet_is_an_algebra_homomorphism():
    rng = random.Random(7)
    for Emod in _test_modules():
        for _ in range(5):
            f = rand_exp_poly(rng, 2, 2)
            g = rand_exp_poly(rng, 2, 2)
            assert jf.jet(f * g, Emod) == jf.jet(f, Emod) * jf.jet(g, Emod)


def test_jet_evaluation_matches_the_germ_action_oracle():
    rng = random.Random(8)
    for Emod in _test_modules():
        for _ in range(5):
            f = rand_exp_poly(rng, 2, 2)
            mu = rand_point(rng, 2)
            ev = jf.jet(f, Emod).evaluate(tuple(mu.coords))
            assert ev == act_germ_oracle(Emod, translate(f, mu))


def test_jet_commutes_with_translation():
    rng = random.Random(9)
    for Emod in _test_modules():
        f = rand_exp_poly(rng, 2, 2)
        mu = rand_point(rng, 2)
        Jt = jf.jet(translate(f, mu), Emod)
        Jf = jf.jet(f, Emod)
        assert Jt == jf.MatPolyFamily(
            2, [[translate(e, mu) for e in row] for row in Jf.entries])


def test_jet_ideal_collects_taylor_data():
    I1 = lm.power_ideal(1, 1)
    coords = jf.jet_ideal(parse_poly("(1)*x1^2", 1), I1, Vector((3,)))
    # class of (x+3)^2 = 9 + 6x mod x^2
    assert coords == (ExpScalar.from_scalar(sc(9)), ExpScalar.from_scalar(sc(6)))


def test_jet_ideal_pairs_with_the_dual_as_derivatives_at_the_point():
    rng = random.Random(10)
    I = lm.dual_number_ideal(Vector((1, 2)))
    ops = lm.annihilator_dual(I)
    for _ in range(4):
        f = rand_exp_poly(rng, 2, 2)
        mu = rand_point(rng, 2)
        cls = jf.jet_ideal(f, I, mu)
        for u in ops:
            lhs = EXP_ZERO
            for t, m in enumerate(I.standard_monomials):
                lhs = lhs + cls[t] * pairing(Polynomial.monomial(2, m), u).scalar()
            assert lhs == diff(u, f).evaluate(tuple(mu.coords))


def test_jet_ideal_is_the_cyclic_column_of_the_quotient_jet():
    rng = random.Random(11)
    I = lm.dual_number_ideal(Vector((1, 2)))
    cq = lm.cyclic_quotient(I)
    for _ in range(3):
        f = rand_exp_poly(rng, 2, 2)
        mu = rand_point(rng, 2)
        ev = jf.jet(f, cq.module).evaluate(tuple(mu.coords))
        col = tuple(sum((ev[r][c] * cq.cyclic[c] for c in range(cq.module.dim)),
                        EXP_ZERO) for r in range(cq.module.dim))
        assert col == jf.jet_ideal(f, I, mu)


def test_block_derivative_equals_dual_number_jet():
    rng = random.Random(12)
    eta = Vector((2, -1))
    F = jf.MatPolyFamily.from_polys([[rand_poly(rng, 2, 2), rand_poly(rng, 2, 1)],
                                     [rand_poly(rng, 2, 2), rand_poly(rng, 2, 2)]])
    assert jf.block_derivative(F, eta) == jf.jet_family(F, lm.dual_number_module(eta))


def test_block_derivative_of_constants_has_zero_offdiagonal():
    eta = Vector((2, -1))
    C = jf.MatPolyFamily.from_scalars(2, [[sc(1), sc(2)], [sc(3), sc(4)]])
    DC = jf.block_derivative(C, eta)
    assert DC.block(0, 2, 2, 2).is_zero()
    assert DC.block(0, 0, 2, 2) == C


def test_iterated_block_derivative_is_the_tensor_module_jet():
    rng = random.Random(13)
    F = jf.MatPolyFamily.from_polys([[rand_poly(rng, 2, 2), rand_poly(rng, 2, 1)],
                                     [rand_poly(rng, 2, 2), rand_poly(rng, 2, 2)]])
    etas = [Vector((1, 0)), Vector((1, 1))]
    lhs = jf.iterated_block_derivative(F, etas)
    rhs = jf.jet_family(F, lm.tensor(*[lm.dual_number_module(e) for e in etas]))
    assert lhs == rhs


def test_jets_compose_through_the_tensor_module():
    rng = random.Random(14)
    E1 = lm.dual_number_module(Vector((1,)))
    pairs = ((E1, E1),
             (E1, lm.cyclic_quotient(lm.power_ideal(1, 2)).module))
    for Ea, Eb in pairs:
        f = rand_poly(rng, 1, 3)
        assert jf.jet_family(jf.jet(f, Eb), Ea) == jf.jet(f, lm.tensor(Ea, Eb))
    E, T2, _ = _test_modules()
    for _ in range(3):
        f = rand_exp_poly(rng, 2, 2)
        assert jf.jet_family(jf.jet(f, E), T2) == jf.jet(f, lm.tensor(T2, E))


def test_jet_is_natural_in_module_maps():
    rng = random.Random(15)
    lam = Vector((1, 2))
    E = lm.dual_number_module(lam)
    Q = lm.cyclic_quotient(lm.dual_number_ideal(lam)).module
    T = ((ZERO, sc(2)), (ONE, ZERO))
    lm.ModuleMap(Q, E, T)  # raises if T is not a module map
    Psi = jf.MatPolyFamily.from_scalars(2, T)
    for _ in range(3):
        f = rand_exp_poly(rng, 2, 2)
        assert Psi * jf.jet(f, Q) == jf.jet(f, E) * Psi


def test_matrix_functionals_translate_to_differential_operators():
    E = lm.dual_number_module(Vector((1, 2)))
    top_right = ((ZERO, ONE), (ZERO, ZERO))
    assert jf.functional_to_diffop(E, top_right) == Vector((1, 2)).as_diffop()
    trace = ((ONE, ZERO), (ZERO, ONE))
    assert jf.functional_to_diffop(E, trace) == DiffOp.one(2) * sc(2)
    assert jf.functional_to_diffop(E, ((ZERO,) * 2,) * 2) == DiffOp(2, {})


def test_functional_pairing_agrees_with_the_operator_on_low_degrees():
    rng = random.Random(16)
    E, _, Q3 = _test_modules()
    for Emod in (E, Q3):
        H = tuple(tuple(sc(rng.randint(-3, 3)) for _ in range(Emod.dim))
                  for _ in range(Emod.dim))
        u = jf.functional_to_diffop(Emod, H)
        for m in monomials_upto(2, Emod.k + 1):
            f = Polynomial.monomial(2, m)
            lhs = jf.frobenius(H, jf.jet(f, Emod).entries)
            assert lhs == ExpPoly.from_poly(diff(u, f))


def test_diffop_to_module_round_trips_the_operators():
    u1 = DiffOp(1, {(0,): sc(2), (1,): sc(3)})
    u2 = DiffOp(1, {(2,): ONE})
    Emod, funcs = jf.diffop_to_module([u1, u2])
    assert Emod.dim == 2 + 3  # one power-quotient block per operator order
    for u, H in zip([u1, u2], funcs):
        assert jf.functional_to_diffop(Emod, H) == u


def test_single_direction_kernel_is_the_dual_number_ideal():
    lam = Vector((1, 2))
    kr = jf.kernel_alpha_bar([lam], 2)
    sp = lm.PolySpace(2, 2)
    ispan = lm.dual_number_ideal(lam).image_span(2)
    ksb = linalg.SpanBasis(sp.dim)
    for p in kr.basis:
        ksb.add(sp.to_vec(p))
    assert ksb.same_span(ispan)
    assert not kr.partial


def test_repeated_direction_kernel_needs_cubic_terms():
    kr = jf.kernel_alpha_bar([Vector((1,)), Vector((1,))], 3)
    assert len(kr.basis) == 1 and kr.basis[0] == parse_poly("(1)*x1^3", 1)
    low = jf.kernel_alpha_bar([Vector((1,)), Vector((1,))], 2)
    assert low.partial and len(low.basis) == 0


def test_kernel_contains_everything_above_the_direction_count():
    kr = jf.kernel_alpha_bar([Vector((1, 0)), Vector((1, 2))], 4)
    sp4 = lm.PolySpace(2, 4)
    ksb = linalg.SpanBasis(sp4.dim)
    for p in kr.basis:
        ksb.add(sp4.to_vec(p))
    for deg in (3, 4):
        for m in monomials_of_degree(2, deg):
            assert ksb.contains(sp4.to_vec(Polynomial.monomial(2, m)))


def test_kernel_rejects_zero_directions():
    with pytest.raises(ValueError):
        jf.kernel_alpha_bar([Vector((0, 0))], 2)


def test_subquotient_directions_come_with_a_containment_certificate():
    res = jf.subquotient_lambdas(lm.maximal_ideal(2))
    assert res.lams == () and res.certified

    res = jf.subquotient_lambdas(lm.power_ideal(1, 2))
    assert len(res.lams) == 2 and res.certified
    kr = jf.kernel_alpha_bar(res.lams, 3)
    assert len(kr.basis) == 1 and kr.basis[0] == parse_poly("(1)*x1^3", 1)

    for ideal in (lm.dual_number_ideal(Vector((1, 2))), lm.power_ideal(2, 1)):
        res = jf.subquotient_lambdas(ideal)
        assert len(res.lams) == 2 and res.certified
