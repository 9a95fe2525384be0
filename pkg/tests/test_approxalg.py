"""Approximately unital algebras, their modules, and the double commutant."""

import pytest

from jetcalc.scalars import ZERO, ONE, sc
from jetcalc import approxalg as aa
from jetcalc.linalg import mid


def test_full_matrix_block_has_commutant_scalars():
    alg, M = aa.block_module([2])
    alg.validate(check_assoc=True)
    M.validate()
    rep = aa.double_commutant_check(M)
    assert rep.ok
    assert rep.dims == {"dim_V": 2, "dim_image": 4, "dim_sharp": 4,
                        "dim_end_zero": 4}


def test_scalar_algebra_on_a_big_space_stays_one_dimensional():
    A1 = aa.ApproxAlgebra(1, {(0, 0): {0: ONE}}, [(ONE,)])
    M1 = aa.ApproxModule(A1, 3, [mid(3)])
    rep = aa.double_commutant_check(M1)
    assert rep.ok and rep.dims["dim_image"] == 1 and rep.dims["dim_sharp"] == 1


def test_membership_separates_diagonal_from_offdiagonal():
    _, M2 = aa.block_module([1, 1])
    E12 = ((ZERO, ONE), (ZERO, ZERO))
    res = aa.end_sharp_membership(M2, E12)
    assert not res.member and res.escaped is not None
    for coords in [(ONE, ZERO), (ZERO, ONE), (sc(2), sc(-3))]:
        phi = M2.act(coords)
        res = aa.end_sharp_membership(M2, phi)
        assert res.member
        assert M2.act(res.witness) == phi
    rep = aa.double_commutant_check(M2)
    assert rep.ok and rep.dims["dim_image"] == 2 and rep.dims["dim_sharp"] == 2


def test_upper_triangular_algebra_from_a_matrix_basis():
    mats = [mid(2),
            ((ONE, ZERO), (ZERO, ZERO)),
            ((ZERO, ONE), (ZERO, ZERO)),
            ((ZERO, ZERO), (ZERO, ONE))]
    _, MU = aa.ApproxAlgebra.from_matrix_basis(mats)
    rep = aa.double_commutant_check(MU)
    assert rep.ok and rep.dims["dim_image"] == 3 and rep.dims["dim_sharp"] == 3
    E21 = ((ZERO, ZERO), (ONE, ZERO))
    assert not aa.end_sharp_membership(MU, E21).member


def test_corner_identities_hold_blockwise():
    _, M3 = aa.block_module([1, 2])
    for j1 in range(2):
        for j2 in range(2):
            rep = aa.corner_identity_check(M3, j1, j2)
            assert rep.ok, (j1, j2)
    assert aa.corner_identity_check(M3, 0, 1).dims["dim_left"] == 1


def test_end_zero_of_a_direct_sum_counts_blockwise_maps():
    _, M3 = aa.block_module([1, 2])
    mats3, span3 = aa.end_zero_basis(M3)
    assert len(mats3) == 9  # 1x1 + 2x2 blocks commute freely: 1 + 4 + 2*2


def test_non_unital_actions_are_rejected_unless_asked_for():
    algJ = aa.ApproxAlgebra.from_blocks([1])
    actJ = [((ONE, ZERO), (ZERO, ZERO))]
    with pytest.raises(ValueError):
        aa.ApproxModule(algJ, 2, actJ)
    MJ = aa.ApproxModule(algJ, 2, actJ, check=False)
    MJ.validate(require_unital=False)
    assert not MJ.is_approx_unital()
    # the dead coordinate forces strict smallness of everything in sight
    matsJ, _ = aa.end_zero_basis(MJ)
    assert len(matsJ) == 1
    repJ = aa.double_commutant_check(MJ)
    assert repJ.ok and repJ.dims["dim_image"] == 1 and repJ.dims["dim_sharp"] == 1


def test_membership_needs_an_absorbing_corner():
    algJ = aa.ApproxAlgebra.from_blocks([1])
    actJ = [((ONE, ZERO), (ZERO, ZERO))]
    MJ = aa.ApproxModule(algJ, 2, actJ, check=False)
    with pytest.raises(ValueError):
        aa.end_sharp_membership(MJ, mid(2))


def test_cyclic_tuple_grids_accept_true_members():
    _, M2 = aa.block_module([1, 1])
    assert aa.submodule_grid_check(M2, M2.act((sc(4), sc(9))), 2) is None
    mats = [mid(2),
            ((ONE, ZERO), (ZERO, ZERO)),
            ((ZERO, ONE), (ZERO, ZERO)),
            ((ZERO, ZERO), (ZERO, ONE))]
    _, MU = aa.ApproxAlgebra.from_matrix_basis(mats)
    assert aa.submodule_grid_check(MU, MU.mats[1], 2) is None
    A1 = aa.ApproxAlgebra(1, {(0, 0): {0: ONE}}, [(ONE,)])
    M1 = aa.ApproxModule(A1, 3, [mid(3)])
    assert aa.submodule_grid_check(M1, mid(3), 3) is None


def test_rejection_comes_with_an_escape_certificate():
    _, M2 = aa.block_module([1, 1])
    E12 = ((ZERO, ONE), (ZERO, ZERO))
    res = aa.end_sharp_membership(M2, E12)
    assert not res.member
    row, moved = res.escaped
    # the cyclic tuple module contains the row but loses its image under E12
    W = aa.generated_tuple_module(M2, res.tuple_vec, len(res.tuple_vec) // 2)
    assert W.contains(list(row))
    assert not W.contains(list(moved))


def test_module_json_round_trip():
    _, M3 = aa.block_module([1, 2])
    M3b = aa.ApproxModule.from_json(M3.to_json())
    assert M3b.mats == M3.mats
    assert M3b.algebra.sc == M3.algebra.sc
    assert M3b.algebra.chain == M3.algebra.chain


def test_algebra_axioms_are_enforced():
    with pytest.raises(ValueError):
        aa.ApproxAlgebra(1, {(0, 0): {0: ONE}}, [(sc(2),)])  # not idempotent
    bad_sc = {(0, 0): {0: ONE}, (1, 1): {1: ONE}}  # two orthogonal idempotents
    with pytest.raises(ValueError):
        aa.ApproxAlgebra(2, bad_sc, [(ONE, ZERO)])  # chain misses the second
