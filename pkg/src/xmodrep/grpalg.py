"""Group algebras of the cell groups, the cocycle ideals and the quotient cat²-algebra.

Vectors are SparseVectors indexed by group elements; the three cell
levels use the Gray groupoid's encodings (3-cells ``(l·|M|+m)·|N|+n``,
2-cells ``m·|N|+n``, 1-cells ``n``).
"""

from dataclasses import dataclass, field as dc_field
import itertools

import numpy as np

from .exactla import (QQ, DimensionError, QuotientMap, SparseVector, Subspace, kernel,
                      matrix_from_columns)
from .groups import GroupError, extend_hom
from .report import INFO, PASS, Check, check


class WellDefinednessError(ValueError):
    """An ideal is not mapped into the target ideal by a structure map."""


class MorphismError(ValueError):
    """A level map triple does not preserve the 2-crossed module structure."""


# ---------------------------------------------------------------------------
# group algebras

class GroupAlgebra:
    def __init__(self, group, field=QQ):
        self.group = group
        self.field = field
        self.dim = group.order

    def e(self, g):
        return SparseVector._raw(self.field, self.dim, {int(g): self.field.one})

    def one(self):
        return self.e(self.group.identity)

    def vec(self, terms):
        return SparseVector.from_terms(self.field, self.dim, terms)

    def mul(self, u, v):
        F, tab = self.field, self.group.mul
        out = {}
        for g, a in u.data.items():
            row = tab[g]
            for h, b in v.data.items():
                k = int(row[h])
                out[k] = out.get(k, 0) + a * b
        return SparseVector(F, self.dim, out)

    def left(self, g, v):
        """e_g·v"""
        return v.permute(self.group.mul[g], self.dim)

    def right(self, v, g):
        """v·e_g"""
        return v.permute(self.group.mul[:, g], self.dim)

    def augmentation(self, v):
        return self.field.normal(sum(v.data.values(), self.field.zero))


def group_algebra(G, field=QQ):
    return GroupAlgebra(G, field)


class AlgebraMorphism:
    """Linear map induced by a function between group elements."""

    def __init__(self, source, target, images, name=""):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int64)
        self.name = name

    def __call__(self, v):
        return v.permute(self.images, self.target.dim)

    def is_multiplicative(self):
        S, T = self.source.group, self.target.group
        f = self.images
        return bool(np.array_equal(f[S.mul], T.mul[f[:, None], f[None, :]])) and \
            int(f[S.identity]) == T.identity

    def matrix(self):
        M = self.source.field.zeros(self.target.dim, self.source.dim)
        for j, i in enumerate(self.images):
            M[i, j] += 1
        return M


# ---------------------------------------------------------------------------
# ideals

@dataclass
class TwoSidedIdeal:
    ambient: GroupAlgebra
    space: Subspace
    generators: int = 0

    @property
    def dim(self):
        return self.space.rank

    def __contains__(self, v):
        return v in self.space

    def closure_witness(self):
        """First (g, side, basis row) with e_g·J or J·e_g leaving J, else None."""
        A = self.ambient
        for r in self.space.basis():
            for g in range(A.dim):
                if A.left(g, r) not in self.space:
                    return (g, "left", r)
                if A.right(r, g) not in self.space:
                    return (g, "right", r)
        return None


def ideal_closure(A, gens):
    """Smallest two-sided ideal containing ``gens``.

    Translating by group generators on both sides is enough because every
    group element is a product of generators.
    """
    S = Subspace(A.field, A.dim)
    count = _close_into(A, S, gens)
    return TwoSidedIdeal(A, S, count)


def _close_into(A, S, gens):
    """Grow the subspace S to the ideal generated by S and ``gens``; S must already be an ideal."""
    gset = A.group.generators()
    seen = set()
    todo = []
    for v in gens:
        if v.dim != A.dim:
            raise DimensionError("generator lives in a different algebra")
        if not v.is_zero() and v not in seen:
            seen.add(v)
            todo.append(v)
    count = len(todo)
    while todo:
        v = todo.pop()
        if S.add(v):
            for g in gset:
                todo.append(A.left(g, v))
                todo.append(A.right(v, g))
    return count


# ---------------------------------------------------------------------------
# the pre-cat²-algebra and its relation families

class PreCat2Algebra:
    """K(L⋊M⋊N) ⇄ K(1⋊M⋊N) ⇄ K(N) with the face and degeneracy maps."""

    def __init__(self, G, field=QQ):
        self.gray = G
        self.field = field
        self.A3 = GroupAlgebra(G.C3, field)
        self.A2 = GroupAlgebra(G.C2, field)
        self.A1 = GroupAlgebra(G.C1, field)
        self.sigma3 = AlgebraMorphism(self.A3, self.A2, G.s3, "σ₃")
        self.tau3 = AlgebraMorphism(self.A3, self.A2, G.t3, "τ₃")
        self.i3 = AlgebraMorphism(self.A2, self.A3, G.e3, "i₃")
        self.sigma2 = AlgebraMorphism(self.A2, self.A1, G.s2, "σ₂")
        self.tau2 = AlgebraMorphism(self.A2, self.A1, G.t2, "τ₂")
        self.i2 = AlgebraMorphism(self.A1, self.A2, G.e2, "i₂")

    def morphisms(self):
        return (self.sigma3, self.tau3, self.i3, self.sigma2, self.tau2, self.i2)

    def checks(self):
        out = []
        for f in self.morphisms():
            out.append(check(f"{f.name}-multiplicative", "algebra morphism on basis products",
                             f.is_multiplicative(), witness={"map": f.name}))
        G = self.gray
        n2, n1 = G.C2.order, G.C1.order
        ok3 = np.array_equal(G.s3[G.e3], np.arange(n2)) and np.array_equal(G.t3[G.e3], np.arange(n2))
        ok2 = np.array_equal(G.s2[G.e2], np.arange(n1)) and np.array_equal(G.t2[G.e2], np.arange(n1))
        out.append(check("sections-3", "σ₃i₃ = τ₃i₃ = id", ok3))
        out.append(check("sections-2", "σ₂i₂ = τ₂i₂ = id", ok2))
        return out


def precat2_algebra(G, field=QQ):
    return PreCat2Algebra(G, field)


class _Cells:
    """Index arithmetic shared by the relation families."""

    def __init__(self, G, field):
        X = G.base
        self.X = X
        self.field = field
        self.L, self.M, self.N = X.L, X.M, X.N
        self.nL, self.nM, self.nN = X.L.order, X.M.order, X.N.order
        self.d2, self.d1 = X.d2.map, X.d1.map
        self.anm, self.anl, self.aml = X.act_nm.map, X.act_nl.map, X.act_ml
        self.lift = X.lifting
        self.Lm, self.Mm, self.Nm = X.L.mul, X.M.mul, X.N.mul
        self.l1, self.m1, self.n1 = X.L.identity, X.M.identity, X.N.identity
        self.dim3 = self.nL * self.nM * self.nN
        self.dim2 = self.nM * self.nN

    def E(self, l, m, n):
        return (int(l) * self.nM + int(m)) * self.nN + int(n)

    def E2(self, m, n):
        return int(m) * self.nN + int(n)

    def v3(self, terms):
        return SparseVector.from_terms(self.field, self.dim3, [(c, self.E(*t)) for c, t in terms])

    def v2(self, terms):
        return SparseVector.from_terms(self.field, self.dim2, [(c, self.E2(*t)) for c, t in terms])

    def vv(self, l, m, n):
        """Terms of v²²_{l,m,n} = e_{l,m,n} − e_{1,m,n}."""
        return [(1, (l, m, n)), (-1, (self.l1, m, n))]

    def xm(self, m, n):
        """Terms of v¹¹_{1,m,n} = e_{m,n} − e_{1,n} at level two."""
        return [(1, (m, n)), (-1, (self.m1, n))]


def _u1(c):
    Lm, d2, Mm = c.Lm, c.d2, c.Mm
    for l, l2, m, n in itertools.product(range(c.nL), range(c.nL), range(c.nM), range(c.nN)):
        b = Mm[d2[l], m]
        yield c.v3([(1, (Lm[l2, l], m, n)), (-1, (l, m, n)), (-1, (l2, b, n)), (1, (c.l1, b, n))])


def _v1(c):
    Lm, Mm, Nm, d1, aml = c.Lm, c.Mm, c.Nm, c.d1, c.aml
    for l, m, n, l2, m2 in itertools.product(range(c.nL), range(c.nM), range(c.nN),
                                             range(c.nL), range(c.nM)):
        p = Nm[d1[m], n]
        yield c.v3([(1, (Lm[l2, aml[m2, l]], Mm[m2, m], n)), (-1, (l, m, n)),
                    (-1, (l2, m2, p)), (1, (c.l1, c.m1, p))])


def _v2_pairs(c):
    Mm, Nm, d1 = c.Mm, c.Nm, c.d1
    for m, m2, n in itertools.product(range(c.nM), range(c.nM), range(c.nN)):
        p = Nm[d1[m], n]
        yield [(1, (Mm[m2, m], n)), (-1, (m, n)), (-1, (m2, p)), (1, (c.m1, p))]


def _v2(c):
    for t in _v2_pairs(c):
        yield c.v3([(a, (c.l1, m, n)) for a, (m, n) in t])


def _v2_level2(c):
    for t in _v2_pairs(c):
        yield c.v2(t)


def _cocycle(c):
    """v²²_{{a,bc},abc,n} = v²²_{{a,b},ab,∂₁c·n} + v²²_{{a,c},ac,n}."""
    Mm, Nm, d1, lf = c.Mm, c.Nm, c.d1, c.lift
    for a, b, k, n in itertools.product(range(c.nM), range(c.nM), range(c.nM), range(c.nN)):
        bk = Mm[b, k]
        yield c.v3(c.vv(lf[a, bk], Mm[a, bk], n)
                   + [(-x, t) for x, t in c.vv(lf[a, b], Mm[a, b], Nm[d1[k], n])]
                   + [(-x, t) for x, t in c.vv(lf[a, k], Mm[a, k], n)])


def _alpha_face(c):
    """Relation making α′τ̄₂ the difference of the λ″ components."""
    Mm, Nm, d1, d2, anm, anl, lf = c.Mm, c.Nm, c.d1, c.d2, c.anm, c.anl, c.lift
    for l, m, n, m2, n2 in itertools.product(range(c.nL), range(c.nM), range(c.nN),
                                             range(c.nM), range(c.nN)):
        q = Nm[d1[m2], n2]
        x = anm[n2, Mm[d2[l], m]]
        y = anm[n2, m]
        yield c.v3(c.vv(anl[q, l], anm[q, m], Nm[q, n])
                   + [(-a, t) for a, t in c.vv(anl[n2, l], y, Nm[n2, n])]
                   + c.vv(lf[m2, x], Mm[m2, x], Nm[n2, n])
                   + [(-a, t) for a, t in c.vv(lf[m2, y], Mm[m2, y], Nm[n2, n])])


def _lambda_face(c):
    """Relation making λ″τ̄₃ the difference of the λ² components."""
    Mm, Nm, d1, d2, anm, lf = c.Mm, c.Nm, c.d1, c.d2, c.anm, c.lift
    for m, n, l2, m2, n2 in itertools.product(range(c.nM), range(c.nN), range(c.nL),
                                              range(c.nM), range(c.nN)):
        x = anm[n2, m]
        b = Mm[d2[l2], m2]
        p = Nm[n2, n]
        yield c.v3([(-a, t) for a, t in c.vv(lf[b, x], Mm[b, x], p)]
                   + c.vv(lf[m2, x], Mm[m2, x], p)
                   + [(-a, t) for a, t in c.vv(l2, m2, Nm[n2, Nm[d1[m], n]])]
                   + c.vv(l2, m2, p))


# an alternative J₂ generating set built from u₃, u₄, u₅, kept for comparison

def _u3(c):
    Mm, Nm, d1, anm, anl, aml = c.Mm, c.Nm, c.d1, c.anm, c.anl, c.aml
    for l, m, n, m2, n2 in itertools.product(range(c.nL), range(c.nM), range(c.nN),
                                             range(c.nM), range(c.nN)):
        q = Nm[d1[m2], n2]
        r = Nm[d1[m], n]
        mm = Mm[m, anm[n, m2]]
        nn = Nm[n, n2]
        yield c.v3(c.vv(anl[n2, l], anm[n2, m], Nm[n2, n])
                   + [(-a, t) for a, t in c.vv(anl[q, l], anm[q, m], Nm[q, n])]
                   + c.vv(l, mm, nn)
                   + [(-a, t) for a, t in c.vv(anl[r, aml[m2, l]], anm[r, m2], nn)])


def _u4(c):
    Lm, Mm, Nm, d1, d2, anm, anl, aml, lf = (c.Lm, c.Mm, c.Nm, c.d1, c.d2, c.anm, c.anl,
                                             c.aml, c.lift)
    for l, m, n, l2, m2, n2 in itertools.product(range(c.nL), range(c.nM), range(c.nN),
                                                 range(c.nL), range(c.nM), range(c.nN)):
        nn = Nm[n, n2]
        mm = Mm[m, anm[n, m2]]
        a = Mm[d2[l], m]
        b = anm[n, Mm[d2[l2], m2]]
        r = Nm[d1[m], n]
        yield c.v3(c.vv(Lm[l, aml[m, anl[n, l2]]], mm, nn)
                   + c.vv(lf[a, b], Mm[a, b], nn)
                   + [(-x, t) for x, t in c.vv(lf[m, anm[n, m2]], mm, nn)]
                   + [(-x, t) for x, t in c.vv(anl[r, Lm[l2, aml[m2, l]]],
                                               Mm[anm[r, m2], m], nn)])


def _u5(c):
    Mm, Nm, d1, anm, anl, aml = c.Mm, c.Nm, c.d1, c.anm, c.anl, c.aml
    for m, n, l2, m2, n2 in itertools.product(range(c.nM), range(c.nN), range(c.nL),
                                              range(c.nM), range(c.nN)):
        r = Nm[d1[m], n]
        nn = Nm[n, n2]
        yield c.v3(c.vv(anl[r, l2], anm[r, m2], nn)
                   + [(-x, t) for x, t in c.vv(aml[m, anl[n, l2]], Mm[m, anm[n, m2]], nn)]
                   + [(-x, t) for x, t in c.vv(l2, m2, Nm[n2, r])]
                   + c.vv(l2, m2, Nm[n2, n]))


J2_FAMILIES = {"u1": _u1, "v1": _v1, "v2": _v2, "cocycle": _cocycle, "alpha-face": _alpha_face, "lambda-face": _lambda_face}
ALT_J2_FAMILIES = {"u1": _u1, "v1": _v1, "v2": _v2, "cocycle": _cocycle,
                       "u3": _u3, "u4": _u4, "u5": _u5}
DEFAULT_FAMILIES = tuple(J2_FAMILIES)


def family_generators(G, name, field=QQ):
    fams = {**J2_FAMILIES, **ALT_J2_FAMILIES}
    return list(fams[name](_Cells(G, field)))


def ideal_generators(G, field=QQ, families=DEFAULT_FAMILIES, alternate=False):
    """Generators of J₂ (level three) and J₁ (level two).

    J₁ gets the v₂-type relations among 2-cells together with the σ₃ and τ₃
    images of every J₂ generator, so σ̄₃ and τ̄₃ are well defined by
    construction.
    """
    c = _Cells(G, field)
    table = {**J2_FAMILIES, **ALT_J2_FAMILIES}
    names = tuple(ALT_J2_FAMILIES) if alternate else families
    g2 = {}
    for name in names:
        g2[name] = _dedupe(table[name](c))
    s3, t3 = G.s3, G.t3
    g1 = {"v2": _dedupe(_v2_level2(c))}
    faces = []
    for vs in g2.values():
        for v in vs:
            faces.append(v.permute(s3, c.dim2))
            faces.append(v.permute(t3, c.dim2))
    g1["faces"] = _dedupe(faces)
    return g2, g1


def family_contributions(G, field=QQ, families=DEFAULT_FAMILIES):
    """Dimension each J₂ family adds to the ideal generated by the families before it."""
    c = _Cells(G, field)
    A = GroupAlgebra(G.C3, field)
    S = Subspace(field, A.dim)
    out = {}
    for name in families:
        before = S.rank
        _close_into(A, S, _dedupe(J2_FAMILIES[name](c)))
        out[name] = S.rank - before
    return out


def family_contribution_check(G, field=QQ, families=DEFAULT_FAMILIES):
    added = family_contributions(G, field, families)
    idle = [k for k, v in added.items() if v == 0]
    return Check("family-contributions", "rank added to J₂ by each family in order", INFO, witness=added,
                 detail=f"no new rank from {', '.join(idle)}" if idle else "every family adds rank")


def _dedupe(vs):
    out, seen = [], set()
    for v in vs:
        if v.is_zero():
            continue
        key = v if next(iter(v.data.values())) > 0 else -v
        if key not in seen:
            seen.add(key)
            out.append(v)
    return out


def _flatten(groups):
    return [v for vs in groups.values() for v in vs]


# ---------------------------------------------------------------------------
# quotient bundle

@dataclass
class Cat2AlgebraBundle:
    pre: PreCat2Algebra
    J2: TwoSidedIdeal
    J1: TwoSidedIdeal
    Q3: QuotientMap
    Q2: QuotientMap
    sigma3: np.ndarray          # matrices on quotient coordinates
    tau3: np.ndarray
    i3: np.ndarray
    sigma2: np.ndarray
    tau2: np.ndarray
    i2: np.ndarray
    K3: Subspace                # inside quotient level three
    K2: Subspace                # inside quotient level two
    families: tuple = DEFAULT_FAMILIES
    saturation_rounds: int = 0
    checks: list = dc_field(default_factory=list)

    @property
    def field(self):
        return self.pre.field

    @property
    def gray(self):
        return self.pre.gray

    def dims(self):
        return {"C3": self.pre.A3.dim, "C2": self.pre.A2.dim, "C1": self.pre.A1.dim,
                "J2": self.J2.dim, "J1": self.J1.dim, "Kbar3": self.Q3.dim, "Kbar2": self.Q2.dim,
                "K3": self.K3.rank, "K2": self.K2.rank, "K1": self.pre.A1.dim}

    # quotient helpers
    def bar3(self, v):
        return self.Q3.reduce(v)

    def bar2(self, v):
        return self.Q2.reduce(v)

    def mul3(self, a, b):
        A = self.pre.A3
        return self.Q3.reduce(A.mul(self.Q3.lift(a), self.Q3.lift(b)))

    def mul2(self, a, b):
        A = self.pre.A2
        return self.Q2.reduce(A.mul(self.Q2.lift(a), self.Q2.lift(b)))


def _quotient_matrix(f, Qs, Qt, field):
    """Matrix of the induced map on quotient coordinates (source reps → target)."""
    cols = [Qt.reduce(f(Qs.lift(SparseVector._raw(field, Qs.dim, {i: field.one}))))
            for i in range(Qs.dim)]
    return matrix_from_columns(cols, Qt.dim, field)


class _Ident:
    """Quotient map by the zero ideal."""

    def __init__(self, dim, field):
        self.dim = dim
        self.ambient = dim
        self.field = field
        self.reps = list(range(dim))

    def reduce(self, v):
        return v

    def lift(self, v):
        return v


def _ideal_into(f, J, target_ideal):
    """First basis vector of J whose image leaves ``target_ideal``."""
    for r in J.space.basis():
        if f(r) not in target_ideal.space:
            return r
    return None


def quotient_cat2(G, field=QQ, families=DEFAULT_FAMILIES, alternate=False, saturate=True):
    """Build the quotient cat²-algebra and record every structural check.

    With ``saturate`` the two ideals are enlarged alternately until
    σ₃(J₂), τ₃(J₂) ⊆ J₁ and i₃(J₁) ⊆ J₂; the number of extra rounds is
    recorded (zero means the generator sets were already closed).
    """
    field.check_orders([G.C3.order])
    pre = PreCat2Algebra(G, field)
    g2, g1 = ideal_generators(G, field, families, alternate)
    J2 = ideal_closure(pre.A3, _flatten(g2))
    J1 = ideal_closure(pre.A2, _flatten(g1))
    rounds = 0
    while saturate:
        extra1 = [pre.sigma3(r) for r in J2.space.basis()] + [pre.tau3(r) for r in J2.space.basis()]
        extra1 = [v for v in extra1 if v not in J1.space]
        extra2 = [pre.i3(r) for r in J1.space.basis() if pre.i3(r) not in J2.space]
        if not extra1 and not extra2:
            break
        rounds += 1
        if extra1:
            J1 = ideal_closure(pre.A2, J1.space.basis() + extra1)
        if extra2:
            J2 = ideal_closure(pre.A3, J2.space.basis() + extra2)
    out = list(pre.checks())
    zero1 = TwoSidedIdeal(pre.A1, Subspace(field, pre.A1.dim))
    wd = {}
    for name, f, src, tgt in (("σ̄₃", pre.sigma3, J2, J1), ("τ̄₃", pre.tau3, J2, J1),
                              ("ī₃", pre.i3, J1, J2), ("σ̄₂", pre.sigma2, J1, zero1),
                              ("τ̄₂", pre.tau2, J1, zero1)):
        bad = _ideal_into(f, src, tgt)
        wd[name] = bad is None
        out.append(check(f"well-defined-{name}", f"{name} maps the ideal into the target ideal",
                         bad is None, witness=None if bad is None else str(bad),
                         visited=src.dim))
    for name, J in (("J2", J2), ("J1", J1)):
        w = J.closure_witness()
        out.append(check(f"two-sided-{name}", "e_g·J ⊆ J and J·e_g ⊆ J", w is None,
                         witness=w and {"g": int(w[0]), "side": w[1]}, visited=J.dim))
    if not all(wd.values()):
        bad = [k for k, v in wd.items() if not v]
        raise WellDefinednessError(f"induced map {bad[0]} is not well defined")
    Q3, Q2 = QuotientMap(J2.space), QuotientMap(J1.space)
    Q1 = _Ident(pre.A1.dim, field)
    s3 = _quotient_matrix(pre.sigma3, Q3, Q2, field)
    t3 = _quotient_matrix(pre.tau3, Q3, Q2, field)
    i3 = _quotient_matrix(pre.i3, Q2, Q3, field)
    s2 = _quotient_matrix(pre.sigma2, Q2, Q1, field)
    t2 = _quotient_matrix(pre.tau2, Q2, Q1, field)
    i2 = _quotient_matrix(pre.i2, Q1, Q2, field)
    K3 = kernel(_columns(s3, field), Q2.dim, field)
    K2 = kernel(_columns(s2, field), Q1.dim, field)
    B = Cat2AlgebraBundle(pre, J2, J1, Q3, Q2, s3, t3, i3, s2, t2, i2, K3, K2,
                          families=tuple(families), saturation_rounds=rounds)
    out.append(Check("ideal-saturation", "σ₃(J₂), τ₃(J₂) ⊆ J₁ and i₃(J₁) ⊆ J₂ from the generators",
                     PASS if rounds == 0 else INFO, detail=f"extra rounds: {rounds}"))
    out += _bundle_checks(B)
    B.checks = out
    return B


def _columns(M, field):
    return [SparseVector.from_dense(field, M[:, j].tolist()) for j in range(M.shape[1])]


def _eq(a, b):
    return a.shape == b.shape and not np.any(a != b)


def _bundle_checks(B):
    F = B.field
    out = []
    q3, q2, q1 = B.Q3.dim, B.Q2.dim, B.pre.A1.dim
    out.append(check("quotient-sections-3", "σ̄₃ī₃ = τ̄₃ī₃ = id",
                     _eq(F.matmul(B.sigma3, B.i3), F.eye(q2)) and _eq(F.matmul(B.tau3, B.i3), F.eye(q2))))
    out.append(check("quotient-sections-2", "σ̄₂ī₂ = τ̄₂ī₂ = id",
                     _eq(F.matmul(B.sigma2, B.i2), F.eye(q1)) and _eq(F.matmul(B.tau2, B.i2), F.eye(q1))))
    out.append(check("rank-sanity", "dim K̄ = dim K − dim J at each level",
                     q3 == B.pre.A3.dim - B.J2.dim and q2 == B.pre.A2.dim - B.J1.dim))
    out.append(check("faces-commute", "σ̄₂σ̄₃ = σ̄₂τ̄₃ and τ̄₂σ̄₃ = τ̄₂τ̄₃",
                     _eq(F.matmul(B.sigma2, B.sigma3), F.matmul(B.sigma2, B.tau3))
                     and _eq(F.matmul(B.tau2, B.sigma3), F.matmul(B.tau2, B.tau3))))
    out += kernel_condition_checks(B)
    return out


def kernel_condition_checks(B):
    """Products of kernel bases vanish in the quotient, both orders."""
    F = B.field
    ks = B.K3.basis()
    kt = kernel(_columns(B.tau3, F), B.Q2.dim, F).basis()
    out = []
    for cid, first, second, anchor, finding in (
            ("kernel-condition", ks, kt, "ker σ̄₃·ker τ̄₃ = 0", False),
            ("kernel-condition-reverse", kt, ks, "ker τ̄₃·ker σ̄₃ = 0", True)):
        bad = None
        for a, b in itertools.product(first, second):
            if not B.mul3(a, b).is_zero():
                bad = (str(a), str(b))
                break
        c = check(cid, anchor, bad is None, witness=bad, visited=len(first) * len(second))
        if finding and bad is not None:
            c.result = INFO
            c.detail = "reverse product does not vanish on this fixture"
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# lemmas about the pre-quotient kernels

def kernel_basis_lemma_check(pre):
    """Kernel bases of σ₃ and τ₃ before the quotient, the ∗₂ identity and the failing product."""
    G = pre.gray
    c = _Cells(G, pre.field)
    F = pre.field
    L1 = c.l1
    out = []
    expected = (c.nL - 1) * c.nM * c.nN
    ks = kernel([pre.sigma3(pre.A3.e(j)) for j in range(c.dim3)], c.dim2, F)
    kt = kernel([pre.tau3(pre.A3.e(j)) for j in range(c.dim3)], c.dim2, F)
    out.append(check("dim-ker-sigma3", "dim ker σ₃ = (|L|−1)|M||N|", ks.rank == expected,
                     witness={"dim": ks.rank, "expected": expected}))
    out.append(check("dim-ker-tau3", "dim ker τ₃ = (|L|−1)|M||N|", kt.rank == expected,
                     witness={"dim": kt.rank, "expected": expected}))
    cells = [(l, m, n) for l in range(c.nL) if l != L1 for m in range(c.nM) for n in range(c.nN)]
    v22 = [c.v3(c.vv(*t)) for t in cells]
    w22 = [c.v3([(1, (l, m, n)), (-1, (L1, c.Mm[c.d2[l], m], n))]) for l, m, n in cells]
    for cid, vs, K, anchor in (("basis-v22", v22, ks, "{v²²_{l,m,n} : l ≠ 1} is a basis of ker σ₃"),
                               ("basis-w22", w22, kt, "{w²²_{l,m,n} : l ≠ 1} is a basis of ker τ₃")):
        S = Subspace(F, c.dim3)
        indep = S.extend(vs) == len(vs)
        inside = all(v in K for v in vs)
        out.append(check(cid, anchor, indep and inside and S.rank == K.rank,
                         witness={"independent": indep, "inside": inside, "rank": S.rank}))

    def star2(v):
        a = pre.i3(pre.sigma3(v))
        b = pre.i3(pre.tau3(v))
        return a - v + b

    bad = next((t for t, v, w in zip(cells, v22, w22) if star2(v) != -w), None)
    out.append(check("star2-identity", "(v²²)^{∗₂} = −w²²", bad is None,
                     witness=bad and {"l": G.base.L.name(bad[0]), "m": G.base.M.name(bad[1]),
                                      "n": G.base.N.name(bad[2])}, visited=len(cells)))
    nonzero = None
    for (t, v), (t2, w) in itertools.product(zip(cells, v22), zip(cells, w22)):
        if not pre.A3.mul(v, w).is_zero():
            nonzero = (t, t2)
            break
    # an example, not an invariant: over small fields every product can vanish
    c_ = Check("prequotient-product", "some v²²·w²² ≠ 0 before the quotient",
               PASS if nonzero is not None or c.nL == 1 else INFO,
               witness=None if nonzero is None else [list(map(int, nonzero[0])), list(map(int, nonzero[1]))],
               visited=len(cells) ** 2,
               detail="" if nonzero is not None or c.nL == 1 else "every product vanishes over this field")
    out.append(c_)
    return out


def relation_instance_checks(B):
    """The three defining relations and v̄²² additivity hold in the quotients for every parameter tuple."""
    c = _Cells(B.gray, B.field)
    out = []
    for cid, anchor, gen, Q in (
            ("relation-1", "ē_{l′l,m,n} = ē_{l,m,n} + ē_{l′,∂₂lm,n} − ē_{1,∂₂lm,n}", _u1, B.Q3),
            ("relation-2", "ē_{l′·ᵐ′l,m′m,n} = ē_{l,m,n} + ē_{l′,m′,∂₁mn} − ē_{1,1,∂₁mn}", _v1, B.Q3),
            ("relation-3", "ē_{1,m′m,n} = ē_{1,m,n} + ē_{1,m′,∂₁mn} − ē_{1,1,∂₁mn}", _v2, B.Q3),
            ("relation-3-level2", "ē_{m′m,n} = ē_{m,n} + ē_{m′,∂₁mn} − ē_{1,∂₁mn}", _v2_level2, B.Q2)):
        bad, count = None, 0
        for v in gen(c):
            count += 1
            if not Q.reduce(v).is_zero():
                bad = str(v)
                break
        out.append(check(cid, anchor, bad is None, witness=bad, visited=count))
    # v̄²² additivity, read directly off the quotient
    bad, count = None, 0
    for l, l2, m, n in itertools.product(range(c.nL), range(c.nL), range(c.nM), range(c.nN)):
        count += 1
        lhs = B.Q3.reduce(c.v3(c.vv(c.Lm[l2, l], m, n)))
        rhs = B.Q3.reduce(c.v3(c.vv(l, m, n))) + B.Q3.reduce(c.v3(c.vv(l2, c.Mm[c.d2[l], m], n)))
        if lhs != rhs:
            bad = [l, l2, m, n]
            break
    out.append(check("v22-additivity", "v̄²²_{l′l,m,n} = v̄²²_{l,m,n} + v̄²²_{l′,∂₂lm,n}",
                     bad is None, witness=bad, visited=count))
    return out


# ---------------------------------------------------------------------------
# the chain complex δ̄

def extract_chain_complex(B):
    """δ̄ : K₃ → K₂ → K₁ with boundaries τ̄₃, τ̄₂ on the kernel bases."""
    from .ch2 import ChainComplex2
    F = B.field
    k3 = B.K3.basis()
    d2_cols, bad = [], None
    for b in k3:
        img = _apply_dense(B.tau3, b, F)
        ok, _ = B.K2.member(img)
        if not ok:
            bad = str(b)
            break
        d2_cols.append(SparseVector(F, B.K2.rank, dict(enumerate(B.K2.coordinates(img)))))
    if bad is not None:
        raise DimensionError(f"τ̄₃ leaves K₂ on {bad}")
    d1_cols = [_apply_dense(B.tau2, b, F) for b in B.K2.basis()]
    D2 = matrix_from_columns(d2_cols, B.K2.rank, F)
    D1 = matrix_from_columns(d1_cols, B.pre.A1.dim, F)
    return ChainComplex2(D2, D1, F)


def _apply_dense(M, v, field):
    out = {}
    for j, x in v.data.items():
        col = M[:, j]
        for i in np.nonzero(col != 0)[0]:
            out[int(i)] = out.get(int(i), 0) + col[i] * x
    return SparseVector(field, M.shape[0], out)


# ---------------------------------------------------------------------------
# functoriality

@dataclass
class GrayMorphism:
    """Levelwise homomorphisms (φ_L, φ_M, φ_N) of 2-crossed modules."""
    source: object
    target: object
    fL: np.ndarray
    fM: np.ndarray
    fN: np.ndarray
    name: str = ""

    def compose(self, other):
        """self ∘ other"""
        return GrayMorphism(other.source, self.target, self.fL[other.fL], self.fM[other.fM],
                            self.fN[other.fN], f"{self.name}∘{other.name}")

    def violations(self):
        X, Y = self.source.base, self.target.base
        fL, fM, fN = self.fL, self.fM, self.fN
        tests = {
            "hom-L": np.array_equal(fL[X.L.mul], Y.L.mul[fL[:, None], fL[None, :]]),
            "hom-M": np.array_equal(fM[X.M.mul], Y.M.mul[fM[:, None], fM[None, :]]),
            "hom-N": np.array_equal(fN[X.N.mul], Y.N.mul[fN[:, None], fN[None, :]]),
            "d2": np.array_equal(fM[X.d2.map], Y.d2.map[fL]),
            "d1": np.array_equal(fN[X.d1.map], Y.d1.map[fM]),
            "act-nm": np.array_equal(fM[X.act_nm.map], Y.act_nm.map[fN[:, None], fM[None, :]]),
            "act-nl": np.array_equal(fL[X.act_nl.map], Y.act_nl.map[fN[:, None], fL[None, :]]),
            "lifting": np.array_equal(fL[X.lifting], Y.lifting[fM[:, None], fM[None, :]]),
        }
        return [k for k, ok in tests.items() if not ok]

    def cell_maps(self):
        G, H = self.source, self.target
        Y = H.base
        nM, nN = Y.M.order, Y.N.order
        f3 = (self.fL[G.l3] * nM + self.fM[G.m3]) * nN + self.fN[G.n3]
        f2 = self.fM[G.m2] * nN + self.fN[G.n2]
        return f3, f2, self.fN


def identity_morphism(G):
    X = G.base
    return GrayMorphism(G, G, np.arange(X.L.order), np.arange(X.M.order), np.arange(X.N.order), "id")


def collapse_morphism(G):
    """Everything to the identity cell."""
    X = G.base
    return GrayMorphism(G, G, np.full(X.L.order, X.L.identity), np.full(X.M.order, X.M.identity),
                        np.full(X.N.order, X.N.identity), "collapse")


def inner_morphism(G, n0):
    """Action by a fixed n₀ on every level (conjugation on N)."""
    X = G.base
    N = X.N
    fN = N.mul[N.mul[n0, np.arange(N.order)], N.inv[n0]]
    return GrayMorphism(G, G, X.act_nl.map[n0].copy(), X.act_nm.map[n0].copy(), fN,
                        f"inner({N.name(n0)})")


def partial_collapses(G):
    """Valid morphisms that are the identity on some levels and trivial on the rest."""
    X = G.base
    out = []
    for keep in itertools.product((True, False), repeat=3):
        if all(keep) or not any(keep):
            continue
        maps = [np.arange(H.order) if k else np.full(H.order, H.identity)
                for k, H in zip(keep, (X.L, X.M, X.N))]
        f = GrayMorphism(G, G, *maps, "keep(" + "".join(a for a, k in zip("LMN", keep) if k) + ")")
        if not f.violations():
            out.append(f)
    return out


def _endomorphisms(H):
    gens = H.generators()
    out = []
    for imgs in itertools.product(range(H.order), repeat=len(gens)):
        try:
            out.append(extend_hom(H, H, dict(zip(gens, imgs))))
        except GroupError:
            pass
    return out


def searched_endofunctors(G, limit=3):
    """Up to ``limit`` levelwise endomorphism triples that are morphisms, skipping id and collapse."""
    X = G.base
    L, M, N = X.L, X.M, X.N
    out = []
    endL = _endomorphisms(L)
    for fN in _endomorphisms(N):
        for fM in _endomorphisms(M):
            if not (np.array_equal(fN[X.d1.map], X.d1.map[fM])
                    and np.array_equal(fM[X.act_nm.map], X.act_nm.map[fN[:, None], fM[None, :]])):
                continue
            for fL in endL:
                f = GrayMorphism(G, G, fL, fM, fN, f"endo{len(out)}")
                trivial = all((a == a[0]).all() for a in (fL, fM, fN))
                ident = all((a == np.arange(len(a))).all() for a in (fL, fM, fN))
                if trivial or ident or f.violations():
                    continue
                out.append(f)
                if len(out) >= limit:
                    return out
    return out


def endofunctors(G, search=3):
    """Identity, collapse, partial collapses, inner endofunctors and a few searched ones."""
    out = []
    seen = set()
    N = G.base.N

    def add(fs):
        for f in fs:
            key = (tuple(f.fL), tuple(f.fM), tuple(f.fN))
            if key not in seen:
                seen.add(key)
                out.append(f)

    add([identity_morphism(G), collapse_morphism(G), *partial_collapses(G),
         *(inner_morphism(G, n0) for n0 in range(N.order))])
    if search and len(out) < 2 + search:
        add(searched_endofunctors(G, search))
    return out


@dataclass
class BundleMorphism:
    phi: GrayMorphism
    level3: np.ndarray
    level2: np.ndarray
    level1: np.ndarray


def kbar_on_morphism(phi, B_src, B_tgt):
    """Matrices of K̄(φ) on the quotient levels, after checking it is well defined."""
    bad = phi.violations()
    if bad:
        raise MorphismError(f"{phi.name} does not preserve {bad[0]}")
    f3, f2, f1 = phi.cell_maps()
    pre_s, pre_t = B_src.pre, B_tgt.pre
    F3 = AlgebraMorphism(pre_s.A3, pre_t.A3, f3)
    F2 = AlgebraMorphism(pre_s.A2, pre_t.A2, f2)
    F1 = AlgebraMorphism(pre_s.A1, pre_t.A1, f1)
    for name, f, J, T in (("level 3", F3, B_src.J2, B_tgt.J2), ("level 2", F2, B_src.J1, B_tgt.J1)):
        r = _ideal_into(f, J, T)
        if r is not None:
            raise WellDefinednessError(f"K̄({phi.name}) is not well defined at {name}")
    F = B_src.field
    m3 = _quotient_matrix(F3, B_src.Q3, B_tgt.Q3, F)
    m2 = _quotient_matrix(F2, B_src.Q2, B_tgt.Q2, F)
    m1 = _quotient_matrix(F1, _Ident(pre_s.A1.dim, F), _Ident(pre_t.A1.dim, F), F)
    return BundleMorphism(phi, m3, m2, m1)


def functoriality_checks(B, morphisms=None):
    """K̄(φ) commutes with the face maps and K̄(ψφ) = K̄(ψ)K̄(φ) for all listed pairs."""
    F = B.field
    morphisms = endofunctors(B.gray) if morphisms is None else morphisms
    images = {f.name: kbar_on_morphism(f, B, B) for f in morphisms}
    out = []
    bad = None
    for f in morphisms:
        K = images[f.name]
        for name, a, b, src, tgt in (("σ̄₃", B.sigma3, None, K.level3, K.level2),
                                     ("τ̄₃", B.tau3, None, K.level3, K.level2),
                                     ("σ̄₂", B.sigma2, None, K.level2, K.level1),
                                     ("τ̄₂", B.tau2, None, K.level2, K.level1)):
            if not _eq(F.matmul(a, src), F.matmul(tgt, a)):
                bad = {"functor": f.name, "map": name}
                break
        if bad:
            break
    out.append(check("kbar-commutes", "K̄(φ) commutes with σ̄ and τ̄", bad is None, witness=bad,
                     visited=len(morphisms)))
    idk = images["id"]
    ident_ok = all(_eq(m, F.eye(m.shape[0])) for m in (idk.level3, idk.level2, idk.level1))
    out.append(check("kbar-identity", "K̄(id) = id", ident_ok))
    bad, count = None, 0
    for psi, phi in itertools.product(morphisms, repeat=2):
        comp = kbar_on_morphism(psi.compose(phi), B, B)
        a, b = images[psi.name], images[phi.name]
        count += 1
        for lvl in ("level3", "level2", "level1"):
            if not _eq(getattr(comp, lvl), F.matmul(getattr(a, lvl), getattr(b, lvl))):
                bad = {"ψ": psi.name, "φ": phi.name, "level": lvl}
                break
        if bad:
            break
    out.append(check("kbar-composition", "K̄(ψφ) = K̄(ψ)K̄(φ)", bad is None, witness=bad,
                     visited=count, detail=", ".join(f.name for f in morphisms)))
    return out
