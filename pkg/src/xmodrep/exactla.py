"""Exact linear algebra over Q or F_p.

Vectors are sparse (index → nonzero scalar).  Subspaces keep a fully reduced
row echelon basis, so membership, coset reduction and coordinates are cheap
lookups.  Dense matrices are numpy arrays: ``object`` dtype holding
``Fraction`` over Q, ``int64`` residues over F_p.
"""

from fractions import Fraction
import math

import numpy as np

from . import _accel

DENSE_FILL = 0.5
_MAX_INT64_PRIME = 2**25


class FieldError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class InconsistentMap(ValueError):
    """A linear map prescribed on a spanning set violates a linear relation."""

    def __init__(self, msg, relation=None):
        super().__init__(msg)
        self.relation = relation


# ---------------------------------------------------------------------------
# fields

class RationalField:
    name = "Q"
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)
    dtype = object

    def __call__(self, x):
        return Fraction(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def normal(self, x):
        return Fraction(x)

    def array(self, rows):
        a = np.array(rows, dtype=object)
        if a.size:
            a = np.vectorize(Fraction, otypes=[object])(a)
        return a

    def zeros(self, r, c):
        a = np.empty((r, c), dtype=object)
        a.fill(Fraction(0))
        return a

    def eye(self, n):
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = Fraction(1)
        return a

    def matmul(self, a, b):
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        # clear denominators and multiply integers; int64 when it cannot overflow
        ia, da = _integer_form(a)
        ib, db = _integer_form(b)
        bound = a.shape[1] * max(_absmax(ia), 1) * max(_absmax(ib), 1)
        if bound < 2**62:
            prod = ia.astype(np.int64).dot(ib.astype(np.int64)).astype(object)
        else:
            prod = ia.dot(ib)
        den = da * db
        out = np.empty(prod.shape, dtype=object)
        flat, src = out.reshape(-1), prod.reshape(-1)
        if den == 1:
            for i in range(src.size):
                flat[i] = _whole(int(src[i]))
        else:
            for i in range(src.size):
                flat[i] = Fraction(int(src[i]), den)
        return out

    def reduce(self, a):
        return a

    def check_orders(self, orders):
        return None

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    def __init__(self, p, allow_modular=False):
        p = int(p)
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise FieldError(f"{p} is not prime")
        if p > _MAX_INT64_PRIME:
            raise FieldError(f"prime {p} too large for int64 arithmetic (limit {_MAX_INT64_PRIME})")
        self.p = p
        self.allow_modular = allow_modular
        self.name = f"F{p}"
        self.characteristic = p
        self.zero = 0
        self.one = 1
        self.dtype = np.int64

    def __call__(self, x):
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.p - 2, self.p)

    def normal(self, x):
        return int(x) % self.p

    def array(self, rows):
        return np.array(rows, dtype=np.int64) % self.p

    def zeros(self, r, c):
        return np.zeros((r, c), dtype=np.int64)

    def eye(self, n):
        return np.eye(n, dtype=np.int64)

    def matmul(self, a, b):
        # entries < 2^25, so each product < 2^50 and partial sums stay in range
        # for inner dimensions up to 2^13; reduce in chunks beyond that
        k = a.shape[1]
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        step = 1 << 12
        for s in range(0, k, step):
            out = (out + (a[:, s:s + step] @ b[s:s + step]) % self.p) % self.p
        return out

    def reduce(self, a):
        return a % self.p

    def check_orders(self, orders):
        """Reject characteristics dividing a group order unless explicitly allowed."""
        bad = [n for n in orders if n % self.p == 0]
        if bad and not self.allow_modular:
            raise FieldError(f"characteristic {self.p} divides group order {bad[0]}; "
                             "pass allow_modular to run anyway")
        return bad or None

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return self.name


try:
    Fraction(1, 1, _normalize=False)

    def _whole(n):
        return Fraction(n, 1, _normalize=False)
except TypeError:                           # keyword dropped in newer Pythons
    _whole = Fraction


def _integer_form(a):
    """(integer object array, common denominator) with a = ints / den."""
    den = 1
    for x in a.flat:
        d = x.denominator if isinstance(x, Fraction) else 1
        if d != 1:
            den = den * d // math.gcd(den, d)
    out = np.empty(a.shape, dtype=object)
    flat = out.reshape(-1)
    for i, x in enumerate(a.flat):
        if isinstance(x, Fraction):
            flat[i] = x.numerator * (den // x.denominator)
        else:
            flat[i] = int(x) * den
    return out, den


def _absmax(a):
    return max((abs(int(x)) for x in a.flat), default=0)


QQ = RationalField()


def parse_field(text, allow_modular=False):
    text = text.strip().lower()
    if text in ("q", "rational", "rationals"):
        return QQ
    if text.startswith("prime:"):
        return PrimeField(int(text.split(":", 1)[1]), allow_modular=allow_modular)
    raise FieldError(f"unknown field {text!r}; use 'rational' or 'prime:<p>'")


# ---------------------------------------------------------------------------
# sparse vectors

class SparseVector:
    __slots__ = ("field", "dim", "data")

    def __init__(self, field, dim, data=None):
        self.field = field
        self.dim = dim
        d = {}
        if data:
            for i, v in data.items():
                v = field.normal(v)
                if v != 0:
                    i = int(i)
                    if not 0 <= i < dim:
                        raise DimensionError(f"index {i} out of range for dimension {dim}")
                    d[i] = v
        self.data = d

    @classmethod
    def _raw(cls, field, dim, data):
        v = cls.__new__(cls)
        v.field, v.dim, v.data = field, dim, data
        return v

    @classmethod
    def basis(cls, field, dim, i):
        return cls(field, dim, {i: 1})

    @classmethod
    def from_terms(cls, field, dim, terms):
        """Sum of (coefficient, index) terms, cancelling as it goes."""
        d = {}
        for c, i in terms:
            d[i] = d.get(i, 0) + c
        return cls(field, dim, d)

    @classmethod
    def from_dense(cls, field, row):
        return cls(field, len(row), {i: v for i, v in enumerate(row) if v != 0})

    def to_dense(self):
        a = self.field.zeros(1, self.dim)[0]
        for i, v in self.data.items():
            a[i] = v
        return a

    def copy(self):
        return SparseVector._raw(self.field, self.dim, dict(self.data))

    def is_zero(self):
        return not self.data

    def nnz(self):
        return len(self.data)

    def __len__(self):
        return self.dim

    def __getitem__(self, i):
        return self.data.get(i, self.field.zero)

    def __eq__(self, other):
        return isinstance(other, SparseVector) and self.dim == other.dim and self.data == other.data

    def __hash__(self):
        return hash((self.dim, frozenset(self.data.items())))

    def __repr__(self):
        terms = " + ".join(f"{v}·e{i}" for i, v in sorted(self.data.items()))
        return f"SparseVector({terms or '0'})"

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch {self.dim} vs {other.dim}")

    def axpy(self, c, other):
        """self + c·other (new vector)."""
        self._check(other)
        F = self.field
        d = dict(self.data)
        for i, v in other.data.items():
            x = F.normal(d.get(i, 0) + c * v)
            if x == 0:
                d.pop(i, None)
            else:
                d[i] = x
        return SparseVector._raw(F, self.dim, d)

    def __add__(self, other):
        return self.axpy(1, other)

    def __sub__(self, other):
        return self.axpy(-1, other)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        F = self.field
        c = F.normal(c)
        if c == 0:
            return SparseVector._raw(F, self.dim, {})
        return SparseVector._raw(F, self.dim, {i: F.normal(v * c) for i, v in self.data.items()})

    def permute(self, perm, dim=None):
        """Relabel coordinates i ↦ perm[i]; colliding coordinates are summed."""
        d = {}
        for i, v in self.data.items():
            j = int(perm[i])
            d[j] = d.get(j, 0) + v
        return SparseVector(self.field, self.dim if dim is None else dim, d)


# ---------------------------------------------------------------------------
# subspaces

class Subspace:
    """Span of vectors kept in fully reduced row echelon form."""

    def __init__(self, field, dim):
        self.field = field
        self.dim = dim
        self.rows = {}          # pivot column → row with 1 at pivot, 0 at other pivots

    @property
    def rank(self):
        return len(self.rows)

    @property
    def pivots(self):
        return sorted(self.rows)

    def basis(self):
        return [self.rows[p] for p in self.pivots]

    def copy(self):
        S = Subspace(self.field, self.dim)
        S.rows = dict(self.rows)
        return S

    def reduce(self, v):
        """Residue of v modulo the subspace (zero at every pivot column)."""
        if v.dim != self.dim:
            raise DimensionError(f"dimension mismatch {v.dim} vs {self.dim}")
        F = self.field
        d = dict(v.data)
        for p in [p for p in v.data if p in self.rows]:
            c = d.get(p)
            if c is None:
                continue
            for i, x in self.rows[p].data.items():
                y = F.normal(d.get(i, 0) - c * x)
                if y == 0:
                    d.pop(i, None)
                else:
                    d[i] = y
        # entries introduced at other pivots cannot appear: rows vanish there
        return SparseVector._raw(F, self.dim, d)

    def member(self, v):
        r = self.reduce(v)
        return r.is_zero(), r

    def __contains__(self, v):
        return self.reduce(v).is_zero()

    def add(self, v):
        """Insert v; returns True when the rank grew."""
        r = self.reduce(v)
        if r.is_zero():
            return False
        F = self.field
        p = min(r.data)
        r = r.scale(F.inv(r.data[p]))
        for q, row in list(self.rows.items()):
            c = row.data.get(p)
            if c is not None:
                self.rows[q] = row.axpy(-c, r)
        self.rows[p] = r
        return True

    def extend(self, vs):
        grew = 0
        for v in vs:
            grew += self.add(v)
        return grew

    def coordinates(self, v):
        """Coefficients of v in basis() order; raises if v is not in the subspace."""
        ok, r = self.member(v)
        if not ok:
            raise DimensionError("vector not in subspace")
        return [v[p] for p in self.pivots]

    def contains_subspace(self, other):
        return all(r in self for r in other.basis())

    def __eq__(self, other):
        if not isinstance(other, Subspace) or other.dim != self.dim or other.rank != self.rank:
            return False
        return all(self.rows[p] == other.rows.get(p) for p in self.rows)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rank={self.rank}, field={self.field!r})"


def rref(rows, dim=None, field=None):
    """Reduced echelon basis of the span of ``rows`` (SparseVectors)."""
    rows = list(rows)
    if dim is None:
        if not rows:
            raise DimensionError("dimension required for an empty row list")
        dim = rows[0].dim
    if field is None:
        field = rows[0].field if rows else QQ
    for r in rows:
        if r.dim != dim:
            raise DimensionError(f"dimension mismatch {r.dim} vs {dim}")
    S = Subspace(field, dim)
    if not rows:
        return S
    fill = sum(r.nnz() for r in rows) / (len(rows) * max(dim, 1))
    if fill > DENSE_FILL and len(rows) > 1:
        return _rref_dense(rows, dim, field)
    S.extend(rows)
    return S


def _rref_dense(rows, dim, field):
    if isinstance(field, PrimeField):
        a = np.zeros((len(rows), dim), dtype=np.int64)
        for k, r in enumerate(rows):
            for i, v in r.data.items():
                a[k, i] = v
        rank, piv = _accel.rref_modp(a, field.p)
        S = Subspace(field, dim)
        for k in range(rank):
            S.rows[int(piv[k])] = SparseVector.from_dense(field, a[k].tolist())
        return S
    a = [r.to_dense().tolist() for r in rows]
    rank, piv = rref_dense_rational(a)
    S = Subspace(field, dim)
    for k in range(rank):
        S.rows[piv[k]] = SparseVector.from_dense(field, a[k])
    return S


def rref_dense_rational(a):
    """In-place RREF of a list of Fraction rows; returns (rank, pivots)."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    piv = []
    for c in range(cols):
        if r == rows:
            break
        k = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = 1 / Fraction(a[r][c])
        row = [x * inv for x in a[r]]
        a[r] = row
        nz = [j for j in range(c, cols) if row[j] != 0]
        for i in range(rows):
            if i != r:
                f = a[i][c]
                if f != 0:
                    ai = a[i]
                    for j in nz:
                        ai[j] = ai[j] - f * row[j]
        piv.append(c)
        r += 1
    return r, piv


# ---------------------------------------------------------------------------
# linear maps

def image(columns, dim, field):
    """Span of the column images of a linear map."""
    return rref(columns, dim, field)


def kernel(columns, dim_target, field):
    """Kernel of the map sending basis vector i of the domain to ``columns[i]``."""
    n = len(columns)
    rows = []
    for i, c in enumerate(columns):
        if c.dim != dim_target:
            raise DimensionError("column dimension mismatch")
        d = dict(c.data)
        d[dim_target + i] = field.one
        rows.append(SparseVector._raw(field, dim_target + n, d))
    S = Subspace(field, dim_target + n)
    S.extend(rows)
    K = Subspace(field, n)
    for p, r in S.rows.items():
        if p >= dim_target:
            K.add(SparseVector(field, n, {i - dim_target: v for i, v in r.data.items()}))
    return K


class QuotientMap:
    """Coordinates on V/J using the non-pivot standard basis vectors as coset representatives."""

    def __init__(self, J):
        self.J = J
        self.field = J.field
        self.ambient = J.dim
        piv = set(J.rows)
        self.reps = [i for i in range(J.dim) if i not in piv]
        self.pos = {i: k for k, i in enumerate(self.reps)}

    @property
    def dim(self):
        return len(self.reps)

    def reduce(self, v):
        """Representative coordinates of v + J, as a SparseVector of length dim."""
        r = self.J.reduce(v)
        return SparseVector._raw(self.field, self.dim, {self.pos[i]: x for i, x in r.data.items()})

    def lift(self, q):
        return SparseVector._raw(self.field, self.ambient, {self.reps[i]: x for i, x in q.data.items()})

    def basis_image(self, i):
        """Quotient coordinates of the standard basis vector e_i."""
        return self.reduce(SparseVector._raw(self.field, self.ambient, {i: self.field.one}))


def quotient_basis(dim, J):
    if J.dim != dim:
        raise DimensionError("ideal lives in a different ambient space")
    return QuotientMap(J)


def matrix_from_columns(columns, rows, field):
    M = field.zeros(rows, len(columns))
    for j, c in enumerate(columns):
        for i, v in c.data.items():
            M[i, j] = v
    return M


def columns_of(M, field):
    return [SparseVector.from_dense(field, M[:, j].tolist()) for j in range(M.shape[1])]


def apply(M, v, field):
    """Matrix times sparse vector."""
    out = {}
    for j, x in v.data.items():
        col = M[:, j]
        for i in np.nonzero(col != 0)[0]:
            out[int(i)] = out.get(int(i), 0) + col[i] * x
    return SparseVector(field, M.shape[0], out)


def is_zero_matrix(M):
    return not np.any(M != 0)


def rank_of(M, field):
    return rref(columns_of(M.T.copy(), field) if M.size else [], M.shape[1], field).rank


def solve_on_spanning_set(domain, pairs, dim_target, field, labels=None):
    """Matrix (w.r.t. domain.basis()) of the map with f(s) = t for (s, t) in pairs.

    Every s must lie in ``domain`` and the s must span it; every linear
    relation among the s must hold among the t.  Violations raise
    InconsistentMap with the offending relation.
    """
    k = domain.rank
    piv = domain.pivots
    S = Subspace(field, k + dim_target)
    for idx, (s, t) in enumerate(pairs):
        ok, res = domain.member(s)
        if not ok:
            name = labels[idx] if labels else idx
            raise InconsistentMap(f"spanning vector {name} lies outside the domain")
        d = {j: s[p] for j, p in enumerate(piv) if s[p] != 0}
        for i, v in t.data.items():
            d[k + i] = v
        S.add(SparseVector(field, k + dim_target, d))
    bad = [p for p in S.rows if p >= k]
    if bad:
        row = S.rows[min(bad)]
        raise InconsistentMap("prescribed values violate a linear relation among the spanning vectors",
                              relation=row)
    if len([p for p in S.rows if p < k]) != k:
        raise InconsistentMap("prescribed vectors do not span the domain")
    M = field.zeros(dim_target, k)
    for j in range(k):
        row = S.rows[j]
        for i, v in row.data.items():
            if i >= k:
                M[i - k, j] = v
    return M
