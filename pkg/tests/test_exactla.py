from fractions import Fraction

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
from la_cases import F5, oracle_rank, run_cases

from xmodrep.exactla import (QQ, DimensionError, FieldError, InconsistentMap, PrimeField, SparseVector,
                             Subspace, kernel, parse_field, quotient_basis, rank_of, rref,
                             solve_on_spanning_set)


def vec(dim, **kw):
    return SparseVector(QQ, dim, {int(k[1:]): v for k, v in kw.items()})


def test_rref_examples():
    assert rref([], 3, QQ).rank == 0
    v = vec(3, e0=1, e2=2)
    assert rref([v, v]).rank == 1
    S = rref([vec(3, e0=1, e1=1), vec(3, e1=1, e2=1), vec(3, e0=1, e2=-1)])
    assert S.rank == 2 and S.pivots == [0, 1]


def test_rref_dimension_mismatch():
    with pytest.raises(DimensionError):
        rref([vec(2, e0=1), vec(3, e0=1)])


def test_membership_examples():
    S = rref([vec(2, e0=1, e1=1)])
    ok, r = S.member(vec(2))
    assert ok and r.is_zero()
    assert S.member(S.basis()[0])[0]
    ok, r = S.member(vec(2, e0=1))
    assert not ok and r == vec(2, e1=-1)


def test_kernel_examples():
    n = 3
    eye = [SparseVector.basis(QQ, n, i) for i in range(n)]
    assert kernel(eye, n, QQ).rank == 0
    zero = [SparseVector(QQ, n) for _ in range(n)]
    assert kernel(zero, n, QQ).rank == n
    # augmentation e_g ↦ e₁ on K(Z/2)
    aug = [SparseVector.basis(QQ, 1, 0)] * 2
    K = kernel(aug, 1, QQ)
    assert K.rank == 1 and K.basis()[0] == vec(2, e0=1, e1=-1)


def test_quotient_examples():
    Q = quotient_basis(3, Subspace(QQ, 3))
    assert Q.dim == 3 and Q.reduce(vec(3, e1=2)) == vec(3, e1=2)
    full = rref([SparseVector.basis(QQ, 3, i) for i in range(3)])
    assert quotient_basis(3, full).dim == 0
    Q = quotient_basis(3, rref([vec(3, e0=1, e1=-1)]))
    assert Q.dim == 2
    # e₀ and e₁ land on the same coset
    assert Q.reduce(vec(3, e0=1)) == Q.reduce(vec(3, e1=1))


def test_prime_field_guards():
    with pytest.raises(FieldError):
        PrimeField(6)
    with pytest.raises(FieldError):
        PrimeField(3).check_orders((2, 3))
    assert PrimeField(3, allow_modular=True).check_orders((2, 3)) == [3]
    assert parse_field("rational") is QQ and parse_field("prime:5") == F5
    with pytest.raises(FieldError):
        parse_field("real")


def test_rationals_stay_exact():
    S = rref([vec(2, e0=3, e1=1)])
    assert S.basis()[0][1] == Fraction(1, 3)


def test_solve_on_spanning_set():
    dom = rref([vec(2, e0=1), vec(2, e1=1)])
    pairs = [(vec(2, e0=1), vec(1, e0=2)), (vec(2, e1=1), vec(1, e0=3)),
             (vec(2, e0=1, e1=1), vec(1, e0=5))]
    M = solve_on_spanning_set(dom, pairs, 1, QQ)
    assert M.tolist() == [[2, 3]]
    with pytest.raises(InconsistentMap):
        solve_on_spanning_set(dom, pairs[:2] + [(vec(2, e0=1, e1=1), vec(1, e0=4))], 1, QQ)


@pytest.mark.parametrize("field", [QQ, F5])
def test_matmul_matches_naive(field):
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.integers(-4, 5, size=(3, 4))
        b = rng.integers(-4, 5, size=(4, 2))
        if field is QQ:
            A = np.array([[Fraction(int(x), int(rng.integers(1, 4))) for x in r] for r in a], dtype=object)
            B = np.array([[Fraction(int(x)) for x in r] for r in b], dtype=object)
            assert (field.matmul(A, B) == A.dot(B)).all()
        else:
            assert (field.matmul(a % 5, b % 5) == (a.dot(b)) % 5).all()


def test_matmul_large_entries_fall_back_to_python_ints():
    big = Fraction(2**40)
    A = np.array([[big, big]], dtype=object)
    B = np.array([[big], [big]], dtype=object)
    assert QQ.matmul(A, B)[0, 0] == 2 * big * big


small_rows = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=0, max_size=5)


@settings(max_examples=300, deadline=None, derandomize=True)
@given(small_rows)
def test_rank_matches_oracle(rows):
    vs = [SparseVector(QQ, 4, dict(enumerate(r))) for r in rows]
    S = rref(vs, 4, QQ)
    assert S.rank == oracle_rank(rows)
    assert rref(S.basis(), 4, QQ) == S


@settings(max_examples=300, deadline=None, derandomize=True)
@given(small_rows.filter(bool))
def test_rank_nullity(rows):
    for field in (QQ, F5):
        vs = [SparseVector(field, 4, dict(enumerate(r))) for r in rows]
        assert kernel(vs, 4, field).rank + rref(vs, 4, field).rank == len(vs)


@settings(max_examples=300, deadline=None, derandomize=True)
@given(small_rows, st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_reduce_contract(rows, v):
    S = rref([SparseVector(F5, 4, dict(enumerate(r))) for r in rows], 4, F5)
    v = SparseVector(F5, 4, dict(enumerate(v)))
    r = S.reduce(v)
    assert (v - r) in S and S.reduce(r) == r


def test_seeded_random_contracts():
    assert run_cases(1500, seed=1) == []


def test_rank_of_dense():
    M = QQ.array([[1, 2], [2, 4]])
    assert rank_of(M, QQ) == 1
