import numpy as np
import pytest
from conftest import L_TRIVIAL, POSITIVE

from xmodrep.exactla import QQ, PrimeField
from xmodrep.grpalg import quotient_cat2
from xmodrep.regrep import (ablation, ablation_checks, cat1_regular_rep, build_representation,
                            degeneration_checks, verify_representation)

F2 = PrimeField(2, allow_modular=True)
F3 = PrimeField(3, allow_modular=True)


def failing(checks):
    return [c.id for c in checks if not c.ok]


@pytest.mark.parametrize("name", POSITIVE)
def test_representation_own_field(built, name):
    assert failing(verify_representation(built.rep(name))) == []


@pytest.mark.parametrize("name", POSITIVE)
def test_representation_over_f2(built, name):
    assert failing(verify_representation(built.rep(name, "prime:2"))) == []


def test_every_check_family_is_exercised(built):
    ids = {c.id for c in verify_representation(built.rep("s3-s3-z2"))}
    for want in ("lambda-identity", "homotopy-1", "2-homotopy-2", "hcomp-lower-lambda2",
                 "vcomp1", "vcomp3", "group-operation-3", "aut-level3"):
        assert want in ids


def test_lambda_of_identity_is_identity(built):
    rho = built.rep("peiffer-v4", "prime:2")
    X = rho.gray.base
    assert rho.lam(X.N.identity) == rho.delta.identity()


def test_lambda_1cell_is_right_multiplication(built):
    rho = built.rep("s3-z3")
    N = rho.gray.base.N
    f0 = rho.lam(1).f0
    for p in range(N.order):
        col = f0[:, p]
        assert col[N.mul[p, 1]] == 1 and sum(x != 0 for x in col) == 1


def test_lambda_prime_on_z2_triv(built):
    # with trivial structure v̄¹¹_{m,n} = e_{m,n} − e_{1,n} − e_{m,1} + e_{1,1} vanishes over Q,
    # so K₂ = 0 and every λ′ is the empty map
    rho = built.rep("z2-triv", "rational")
    assert rho.delta.dims == (0, 0, 2)
    assert all(h.h1.shape == (0, 2) for h in rho.maps2)


def test_lambda_prime_formula_on_identity_module(built):
    # λ′_{(m,n)}(e_p) = v̄¹¹ at (ᵖm, pn)
    rho = built.rep("zn-id-3")
    X = rho.gray.base
    B = rho.bundle
    from xmodrep.grpalg import _Cells
    c = _Cells(rho.gray, B.field)
    for g in range(rho.gray.C2.order):
        m, n = int(rho.gray.m2[g]), int(rho.gray.n2[g])
        h1 = rho.lam2(g).h1
        for p in range(X.N.order):
            v = B.Q2.reduce(c.v2(c.xm(int(X.act_nm.map[p, m]), int(X.N.mul[p, n]))))
            assert list(h1[:, p]) == list(B.K2.coordinates(v))


def test_positive_sign_fails_on_z3_s3_z2():
    from conftest import _gray
    G = _gray("z3-s3-z2")
    B = quotient_cat2(G, F3)
    good = failing(verify_representation(build_representation(G, B, sign=-1)))
    bad = failing(verify_representation(build_representation(G, B, sign=1)))
    assert good == []
    assert {"homotopy-2", "vcomp1", "group-operation-3"} <= set(bad)


def test_sign_is_invisible_in_characteristic_two(built):
    from conftest import _gray
    G = _gray("peiffer-v4")
    B = built.bundle("peiffer-v4", "prime:2")
    a = build_representation(G, B, sign=1)
    b = build_representation(G, B, sign=-1)
    assert all(x.h2.tolist() == y.h2.tolist() for x, y in zip(a.maps2, b.maps2))


@pytest.mark.parametrize("name", L_TRIVIAL)
def test_degeneration(built, name):
    rho = built.rep(name)
    checks = degeneration_checks(rho.gray.base.truncation(), rho)
    assert failing(checks) == [] and len(checks) == 4


def test_cat1_construction_on_its_own():
    from xmodrep.groups import FiniteGroup, GroupAction, GroupHom
    from xmodrep.xmod2 import CrossedModule
    Z3 = FiniteGroup.cyclic(3)
    X = CrossedModule(Z3, Z3, GroupHom(Z3, Z3, np.arange(3)), GroupAction.trivial(Z3, Z3))
    rep = cat1_regular_rep(X, QQ)
    # K(Z/3 ⋊ Z/3) has dimension 9, the ideal has dimension 4
    assert rep.Q.dim == 5 and rep.K.rank == 2
    assert np.array_equal(rep.lam0[0], QQ.eye(3))


def test_ablation_harness(built):
    from conftest import _gray
    r = ablation(_gray("z2-triv"), ("alpha-face", "lambda-face"), F2)
    assert r.status == "same-ideal"
    r = ablation(_gray("z2-triv"), ("v1",), F2)
    assert r.status == "failures" and {"vcomp1", "group-operation-3"} <= set(r.failures)
    r = ablation(_gray("bilinear"), ("v1",), F2)
    assert r.status == "build-error" and "λ″" in r.detail
    checks = ablation_checks(_gray("z2-lift"), F2)
    assert all(c.result == "info" for c in checks)
    assert {c.id for c in checks} >= {"ablation-alpha-face+lambda-face", "ablation-v1"}
