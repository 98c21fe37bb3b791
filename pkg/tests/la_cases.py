"""Random small linear-algebra instances checked against an independent elimination."""

from fractions import Fraction

import numpy as np

from xmodrep.exactla import (QQ, PrimeField, SparseVector, kernel, matrix_from_columns, quotient_basis,
                             rank_of, rref)

F5 = PrimeField(5)
F7 = PrimeField(7)


def oracle_rank(rows, p=None):
    """Plain Gaussian elimination on lists; Fractions over Q, residues mod p."""
    a = [[Fraction(x) if p is None else x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(a[0]) if a else 0
    while rank < len(a) and col < ncols:
        k = next((i for i in range(rank, len(a)) if a[i][col] != 0), None)
        if k is None:
            col += 1
            continue
        a[rank], a[k] = a[k], a[rank]
        inv = 1 / a[rank][col] if p is None else pow(int(a[rank][col]), p - 2, p)
        for i in range(rank + 1, len(a)):
            f = a[i][col] * inv
            a[i] = [x - f * y if p is None else (x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        col += 1
    return rank


def random_rows(rng, field):
    k = int(rng.integers(0, 6))
    dim = int(rng.integers(1, 7))
    density = rng.uniform(0.2, 1.0)
    vals = rng.integers(-3, 4, size=(k, dim)) * (rng.random((k, dim)) < density)
    if k >= 2 and rng.random() < 0.3:          # force a dependent row
        vals[-1] = vals[0] * int(rng.integers(-2, 3)) + vals[1 % k]
    return [SparseVector(field, dim, {i: int(v) for i, v in enumerate(r) if v}) for r in vals], dim, vals


def check_case(rng, field):
    """Return a list of violated contract names (empty on success)."""
    bad = []
    rows, dim, vals = random_rows(rng, field)
    p = None if field is QQ else field.p
    S = rref(rows, dim, field)
    if S.rank != oracle_rank(vals.tolist(), p):
        bad.append("rank")
    # echelon shape: pivots increasing, pivot entries 1, zero at other pivots
    for q in S.pivots:
        r = S.rows[q]
        if r[q] != 1 or min(r.data) != q or any(r[o] != 0 for o in S.pivots if o != q):
            bad.append("echelon")
            break
    if rref(S.basis(), dim, field) != S:
        bad.append("idempotence")
    # every input row is a member with zero residue
    if not all(S.member(r)[0] for r in rows):
        bad.append("membership")
    # reduction: v − reduce(v) ∈ S, reduce is idempotent and linear
    v = SparseVector(field, dim, {i: int(x) for i, x in enumerate(rng.integers(-3, 4, size=dim)) if x})
    w = SparseVector(field, dim, {i: int(x) for i, x in enumerate(rng.integers(-3, 4, size=dim)) if x})
    rv, rw = S.reduce(v), S.reduce(w)
    if not (v - rv) in S or S.reduce(rv) != rv or S.reduce(v + w.scale(2)) != rv + rw.scale(2):
        bad.append("reduction")
    if any(rv[q] != 0 for q in S.pivots):
        bad.append("residue-pivots")
    # rank–nullity for the map whose columns are the rows
    if rows:
        K = kernel(rows, dim, field)
        if K.rank + S.rank != len(rows):
            bad.append("rank-nullity")
        M = matrix_from_columns(rows, dim, field)
        for b in K.basis():
            x = field.matmul(M, np.array([[b[i]] for i in range(len(rows))], dtype=M.dtype))
            if np.any(field.reduce(x) != 0):
                bad.append("kernel")
                break
        if rank_of(M, field) != S.rank:
            bad.append("rank-of")
    # quotient coordinates
    Q = quotient_basis(dim, S)
    if Q.dim != dim - S.rank or (Q.lift(Q.reduce(v)) - v) not in S:
        bad.append("quotient")
    return bad


def run_cases(n, seed=20261015):
    rng = np.random.default_rng(seed)
    fields = (QQ, F5, F7)
    failures = []
    for k in range(n):
        field = fields[k % 3]
        bad = check_case(rng, field)
        if bad:
            failures.append((k, field, bad))
    return failures
