import itertools

import numpy as np
import pytest

from xmodrep.groups import (FiniteGroup, GroupAction, GroupError, GroupHom, direct_product,
                            find_isomorphism, parse_perm, semidirect2, semidirect3)

S3 = FiniteGroup.from_perm_gens(["(1 2)", "(1 2 3)"], 3, label="S3")
Z2 = FiniteGroup.cyclic(2)
Z3 = FiniteGroup.cyclic(3)


def test_cyclic_square():
    g = Z2.index_of("1")
    assert Z2.multiply(g, g) == Z2.identity


def test_identity_is_neutral():
    for G in (Z2, Z3, S3):
        for a in range(G.order):
            assert G.multiply(G.identity, a) == a == G.multiply(a, G.identity)


def test_s3_permutation_product():
    # right-to-left composition: (1 2)(1 3) sends 1→3→3, 3→1→2, 2→2→1
    a, b = S3.index_of("(1 2)"), S3.index_of("(1 3)")
    assert S3.name(S3.multiply(a, b)) == "(1 3 2)"


def test_perm_closure_expands_to_full_table():
    assert S3.order == 6
    assert S3.check() is None
    assert not S3.is_abelian()
    A4 = FiniteGroup.from_perm_gens(["(1 2 3)", "(1 2)(3 4)"], 4)
    assert A4.order == 12


def test_table_rejects_non_group():
    with pytest.raises(GroupError):
        FiniteGroup.from_table([[0, 1], [1, 1]])
    with pytest.raises(GroupError):
        FiniteGroup.from_table([[0, 1, 2], [1, 0, 2], [2, 2, 0]])


def test_parse_perm_rejects_bad_points():
    with pytest.raises(GroupError):
        parse_perm("(1 5)", 3)


def test_hom_extension_and_check():
    r = S3.index_of("(1 2 3)")
    inc = GroupHom.from_images(Z3, S3, {1: r})
    assert inc.check() is None and sorted(inc.map) == sorted({0, r, S3.multiply(r, r)})
    with pytest.raises(GroupError):
        GroupHom.from_images(Z2, S3, {1: r})


def test_action_checks():
    triv = GroupAction.trivial(Z2, S3)
    assert triv.check() is None and triv.is_trivial()
    bad = np.tile(np.arange(6), (2, 1))
    bad[1] = [0, 2, 1, 3, 4, 5]
    assert GroupAction(Z2, S3, bad).check() is not None


def test_semidirect_trivial_action_is_direct():
    P = semidirect2(Z2, Z2, GroupAction.trivial(Z2, Z2))
    D = direct_product(Z2, Z2)
    assert np.array_equal(P.mul, D.mul)
    for a, b in itertools.product(range(4), repeat=2):
        (m, n), (m1, n1) = divmod(a, 2), divmod(b, 2)
        assert P.multiply(a, b) == ((m + m1) % 2) * 2 + (n + n1) % 2


def test_z3_by_inversion_is_s3():
    inv = GroupAction(Z2, Z3, np.array([[0, 1, 2], [0, 2, 1]]))
    P = semidirect2(Z3, Z2, inv)
    assert find_isomorphism(P, S3) is not None
    assert find_isomorphism(direct_product(Z3, Z2), S3) is None


def _trivial_triple(L, M, N):
    lift = np.full((M.order, M.order), L.identity)
    return semidirect3(L, M, N, GroupAction.trivial(N, M), GroupAction.trivial(N, L), lift,
                       GroupHom.trivial(L, M))


def test_semidirect3_degenerate_cases():
    T = FiniteGroup.trivial()
    assert _trivial_triple(T, T, T).order == 1
    C = _trivial_triple(Z2, Z2, Z2)
    assert C.order == 8 and C.is_abelian()
    assert all(C.element_order(g) <= 2 for g in range(8))


def test_semidirect3_inverse_formula(built):
    # (l,m,n)⁻¹ = (^{n⁻¹}(^{m⁻¹}l⁻¹), ^{n⁻¹}m⁻¹, n⁻¹)
    for name in ("s3-s3-z2", "peiffer-v4", "z3-s3-z2"):
        X, G = built.module(name), built.gray(name).C3
        L, M, N = X.L, X.M, X.N
        for j in range(G.order):
            l, m, n = G._index.decode(j)
            ni, mi = N.inv[n], M.inv[m]
            want = (X.act_nl.map[ni, X.act_ml[mi, L.inv[l]]], X.act_nm.map[ni, mi], ni)
            assert G._index.decode(G.inverse(j)) == tuple(int(x) for x in want)
