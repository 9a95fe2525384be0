"""Cofinite ideals, quotient modules, duals, sums, tensors, annihilators."""

import pytest

from jetcalc.scalars import Scalar, ZERO, ONE, sc
from jetcalc.poly import (Polynomial, Vector, Covector, DiffOp, diff, pairing,
                          parse_poly, monomials_upto)
from jetcalc import linalg
from jetcalc.localmod import (PolySpace, CofiniteIdeal, power_ideal,
                              maximal_ideal, dual_number_ideal, FinMod,
                              ModuleMap, cyclic_quotient, dual_number_module,
                              annihilator_dual, direct_sum, tensor,
                              submodule_generated, quotient_module,
                              annihilator)


def test_power_ideal_codimension_counts_low_monomials():
    assert power_ideal(2, 1).codim == 3
    assert power_ideal(2, 2).codim == 6
    assert power_ideal(1, 3).codim == 4
    assert maximal_ideal(2).codim == 1


def test_standard_monomials_ascend_through_the_quotient_basis():
    I = power_ideal(2, 1)
    assert list(I.standard_monomials) == [(0, 0), (0, 1), (1, 0)]


def test_normal_form_is_idempotent_and_detects_membership():
    I = power_ideal(2, 1)
    p = parse_poly("(2) + (1)*x1 + (5)*x1*x2 + (1)*x2^2", 2)
    nf = I.normal_form(p)
    assert I.normal_form(nf) == nf
    assert nf == parse_poly("(2) + (1)*x1", 2)
    assert I.contains(p - nf)
    assert not I.contains(p)


def test_membership_respects_ideal_structure():
    I = dual_number_ideal(Vector((1, 2)))
    # x2 - 2 x1 generates the linear part: any multiple stays inside
    gen = parse_poly("(1)*x2 + (-2)*x1", 2)
    assert I.contains(gen)
    assert I.contains(gen * parse_poly("(3)*x1 + (1)", 2))
    assert not I.contains(parse_poly("(1)*x1", 2))


def test_declared_power_bound_is_verified():
    x2 = parse_poly("(1)*x1^2", 1)
    with pytest.raises(ValueError):
        CofiniteIdeal(1, 0, [x2])  # x^2 does not kill degree 1
    CofiniteIdeal(1, 1, [x2])


def test_non_cofinite_generators_are_rejected():
    with pytest.raises(ValueError):
        CofiniteIdeal(2, 2, [parse_poly("(1)*x1", 2)])  # misses x2 powers


def test_unit_ideal_has_codimension_zero():
    I = CofiniteIdeal(1, 0, [parse_poly("(1) + (1)*x1", 1)])
    assert I.codim == 0
    assert annihilator_dual(I) == []
    assert cyclic_quotient(I).module.dim == 0


def test_dual_number_module_matches_its_ideal_quotient():
    lam = Vector((1, 2))
    E = dual_number_module(lam)
    assert E.dim == 2 and E.k == 1
    # action of x_j: derivative in the top-right corner
    assert E.mats[0] == ((ZERO, ONE), (ZERO, ZERO))
    assert E.mats[1] == ((ZERO, sc(2)), (ZERO, ZERO))
    Q = cyclic_quotient(dual_number_ideal(lam))
    T = ((ZERO, sc(2)), (ONE, ZERO))
    psi = ModuleMap(Q.module, E, T)
    assert psi.is_invertible()


def test_module_map_must_intertwine():
    lam = Vector((1, 2))
    E = dual_number_module(lam)
    Q = cyclic_quotient(dual_number_ideal(lam))
    with pytest.raises(ValueError):
        ModuleMap(Q.module, E, ((ZERO, ONE), (ONE, ZERO)))


def test_cyclic_quotient_projects_polynomials_correctly():
    I = power_ideal(1, 2)
    cq = cyclic_quotient(I)
    p = parse_poly("(1) + (3)*x1 + (5)*x1^2 + (7)*x1^3", 1)
    coords = cq.project_poly(p)
    assert coords == (ONE, sc(3), sc(5))


def test_validation_rejects_noncommuting_or_unbounded_actions():
    a = ((ZERO, ONE), (ZERO, ZERO))
    b = ((ZERO, ZERO), (ONE, ZERO))
    with pytest.raises(ValueError):
        FinMod(2, 1, [a, b])  # do not commute
    with pytest.raises(ValueError):
        FinMod(1, 0, [a])  # nilpotency order too low for k=0


def test_exp_action_is_truncated_exponential():
    E = dual_number_module(Vector((1, 2)))
    xi = Covector((sc(3), sc(1)))
    assert E.exp_action(xi) == ((ONE, sc(5)), (ZERO, ONE))


def test_direct_sum_and_tensor_shapes():
    E = dual_number_module(Vector((1,)))
    S = direct_sum(E, E)
    assert S.dim == 4 and S.k == 1
    T = tensor(E, E)
    assert T.dim == 4 and T.k == 3
    # x acts on 1 tensor 1 as a true degree-3 nilpotent would allow
    m = T.mats[0]
    sq = linalg.mmul(m, m)
    assert not linalg.mat_is_zero(sq)
    assert linalg.mat_is_zero(linalg.mmul(sq, m))


def test_tensor_exponential_factors_through_the_pieces():
    # Leibniz action means exp on the tensor is the kron of the factor exps.
    E = dual_number_module(Vector((2,)))
    F = cyclic_quotient(power_ideal(1, 1)).module
    T = tensor(E, F)
    xi = Covector((sc(3),))
    a = E.exp_action(xi)
    b = F.exp_action(xi)
    kron = tuple(tuple(a[i1][j1] * b[i2][j2] for j1 in range(2) for j2 in range(2))
                 for i1 in range(2) for i2 in range(2))
    assert T.exp_action(xi) == kron


def test_annihilator_recovers_the_defining_ideal():
    for I in (power_ideal(2, 1), dual_number_ideal(Vector((1, 2))),
              power_ideal(1, 2)):
        E = cyclic_quotient(I).module
        J = annihilator(E)
        assert J.same(I)


def test_annihilator_dual_pairs_like_derivatives():
    I = dual_number_ideal(Vector((1, 2)))
    ops = annihilator_dual(I)
    assert len(ops) == I.codim == 2
    for u in ops:
        for g in I.reduced_basis():
            assert not pairing(g, u)
    # and they separate the standard monomials: the pairing Gram is invertible
    gram = [[pairing(Polynomial.monomial(2, m), u).scalar() for u in ops]
            for m in I.standard_monomials]
    linalg.mat_inverse(gram)  # raises if singular


def test_submodule_and_quotient_split_dimensions():
    E = direct_sum(dual_number_module(Vector((1,))),
                   cyclic_quotient(power_ideal(1, 0)).module)
    # the class of X generates both dual-number coordinates; the third is cut off
    sub = submodule_generated(E, [(ZERO, ONE, ZERO)])
    assert len(sub.span.rows) == 2
    assert sub.module.dim == 2
    quot, proj = quotient_module(E, sub)
    assert quot.dim == 1
    assert list(proj((ZERO, ZERO, sc(7)))) == [sc(7)]
    # a non-invariant subspace is refused
    with pytest.raises(ValueError):
        quotient_module(E, [(ZERO, ONE, ZERO)])


def test_module_json_round_trip():
    E = tensor(dual_number_module(Vector((1, 2))),
               cyclic_quotient(power_ideal(2, 1)).module)
    E2 = FinMod.from_json(E.to_json())
    assert E2.nvars == E.nvars and E2.k == E.k and E2.mats == E.mats
