import numpy as np
import pytest

from xmodrep.ch2 import (AutDelta, ChainComplex2, ChainMap, CompositionError, Homotopy1, Homotopy2,
                         InvertibilityError, compose_maps, hcomp_h1_defect, hcomp_h1_lower,
                         hcomp_h1_upper, hcomp_h2_lower, hcomp_h2_upper, homotopy2_violation,
                         homotopy_violation, identity_homotopy, identity_homotopy2, vcomp1_h2,
                         vcomp_h1, vcomp_h2)
from xmodrep.exactla import QQ, PrimeField

F5 = PrimeField(5)


def mat(F, rows):
    return F.reduce(np.array(rows, dtype=object)) if F is QQ else F.reduce(np.array(rows, dtype=np.int64))


def small_complex(F=QQ):
    # Q → Q² → Q, δ₂ = (1, 1)ᵀ, δ₁ = (1, −1)
    return ChainComplex2(mat(F, [[1], [1]]), mat(F, [[1, -1]]), F)


def random_complex(rng, F, dims=(2, 3, 2)):
    c2, c1, c0 = dims
    # δ₁ = A·P, δ₂ = Q·B with P·Q = 0 gives δ₁δ₂ = 0
    P = np.zeros((1, c1), dtype=np.int64)
    P[0, 0] = 1
    Q = np.zeros((c1, c1 - 1), dtype=np.int64)
    Q[1:, :] = np.eye(c1 - 1, dtype=np.int64)
    d1 = F.matmul(mat(F, rng.integers(-2, 3, (c0, 1))), mat(F, P))
    d2 = F.matmul(mat(F, Q), mat(F, rng.integers(-2, 3, (c1 - 1, c2))))
    return ChainComplex2(d2, d1, F)


def rand(F, rng, r, c):
    return mat(F, rng.integers(-3, 4, (r, c)))


def flat_alpha(rng, C):
    """A random α′ : C₀ → C₂ with α′δ₁ = 0, so a 2-homotopy keeps the target chain map."""
    a = rand(QQ, rng, C.dims[0], C.dims[2])
    col = C.d1[:, :1]                           # δ₁ = col·P with P the first coordinate
    norm = QQ.matmul(col.T, col)[0, 0]
    if norm != 0:
        a = QQ.reduce(a - QQ.matmul(QQ.matmul(a, col), col.T) / norm)
    assert not np.any(QQ.matmul(a, C.d1) != 0)
    return a


def test_complex_and_identity():
    C = small_complex()
    assert C.dims == (1, 2, 1) and C.is_complex()
    I = C.identity()
    assert I.violation() is None and I.is_invertible()
    assert compose_maps(I, I) == I


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        ChainComplex2(mat(QQ, [[1], [1]]), mat(QQ, [[1, 0, 0]]))


def test_violation_names_failing_square():
    C = small_complex()
    bad = ChainMap(C, C, mat(QQ, [[2]]), QQ.eye(2), QQ.eye(1))
    assert bad.violation() == "f₁δ₂ = δ₂f₂"


@pytest.mark.parametrize("F", [QQ, F5], ids=["QQ", "F5"])
def test_homotopy_target_satisfies_conditions(F):
    rng = np.random.default_rng(3)
    for _ in range(20):
        C = random_complex(rng, F)
        assert C.is_complex()
        I = C.identity()
        H = Homotopy1(I, rand(F, rng, 3, 2), rand(F, rng, 2, 3))
        G = H.target
        assert G.violation() is None
        assert homotopy_violation(I, G, H.h1, H.h2) is None


def test_perturbed_homotopy_is_rejected():
    rng = np.random.default_rng(11)
    C = random_complex(rng, QQ)
    I = C.identity()
    H = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    G = H.target
    h1 = H.h1.copy()
    h1[0, 0] += 1
    assert homotopy_violation(I, G, h1, H.h2) is not None


def test_vertical_composition_and_inverse():
    rng = np.random.default_rng(5)
    C = random_complex(rng, QQ)
    I = C.identity()
    H = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    inv = Homotopy1(H.target, QQ.reduce(-H.h1), QQ.reduce(-H.h2))
    back = vcomp_h1(inv, H)
    assert back == identity_homotopy(I)
    assert back.target == I
    with pytest.raises(CompositionError):
        vcomp_h1(H, H)


def test_horizontal_defect_formula():
    rng = np.random.default_rng(7)
    for _ in range(20):
        C = random_complex(rng, QQ)
        I = C.identity()
        H = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
        K = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
        low, up = hcomp_h1_lower(K, H), hcomp_h1_upper(K, H)
        assert low.source == up.source and low.target == up.target
        a, b = hcomp_h1_defect(K, H)
        k2h1 = QQ.matmul(K.h2, H.h1)
        assert np.array_equal(a, QQ.matmul(C.d2, k2h1))
        assert np.array_equal(b, QQ.reduce(-QQ.matmul(k2h1, C.d1)))


def test_homotopy2_target_and_composition():
    rng = np.random.default_rng(13)
    C = random_complex(rng, QQ)
    I = C.identity()
    H = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    al = Homotopy2(H, rand(QQ, rng, 2, 2))
    K = al.target
    assert homotopy2_violation(H, K, al.a) is None
    # the two conditions shift the end chain map by 2δ₂α′δ₁
    shift = QQ.reduce(2 * QQ.matmul(QQ.matmul(C.d2, al.a), C.d1))
    assert np.array_equal(K.target.f1, QQ.reduce(H.target.f1 + shift))
    assert Homotopy2(H, flat_alpha(rng, C)).target.target == H.target
    be = Homotopy2(K, rand(QQ, rng, 2, 2))
    assert np.array_equal(vcomp_h2(be, al).a, QQ.reduce(al.a + be.a))
    assert vcomp_h2(identity_homotopy2(K), al) == al
    with pytest.raises(CompositionError):
        vcomp_h2(al, al)
    bad = al.a.copy()
    bad[0, 0] += 1
    assert homotopy2_violation(H, K, bad) is not None


def test_vcomp1_and_horizontal_2cells():
    rng = np.random.default_rng(17)
    C = random_complex(rng, QQ)
    I = C.identity()
    H = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    K = Homotopy1(H.target, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    al, be = Homotopy2(H, flat_alpha(rng, C)), Homotopy2(K, flat_alpha(rng, C))
    c = vcomp1_h2(be, al)
    assert c.source == vcomp_h1(K, H)
    assert c.target == vcomp_h1(be.target, al.target)
    with pytest.raises(CompositionError):
        vcomp1_h2(Homotopy2(identity_homotopy(I), al.a), be)
    # both horizontal 2-cell composites go between the matching 1-cell composites
    K2 = Homotopy1(I, rand(QQ, rng, 3, 2), rand(QQ, rng, 2, 3))
    be2 = Homotopy2(K2, rand(QQ, rng, 2, 2))
    lo, hi = hcomp_h2_lower(be2, al), hcomp_h2_upper(be2, al)
    assert lo.source == hcomp_h1_lower(K2, H)
    assert hi.source == hcomp_h1_upper(K2, H)
    assert homotopy2_violation(lo.source, lo.target, lo.a) is None


def test_aut_delta_membership():
    C = small_complex()
    A = AutDelta(C)
    I = C.identity()
    assert A.is_level1(I) and A.is_level2(identity_homotopy(I))
    sing = ChainMap(C, C, QQ.zeros(1, 1), QQ.zeros(2, 2), QQ.zeros(1, 1))
    assert not A.is_level1(sing)
    with pytest.raises(InvertibilityError):
        A.require_level1(sing)
    assert A.product1(I, I) == I
