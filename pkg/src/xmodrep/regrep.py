"""The right regular representation of a cat²-group on δ̄ and its verification.

λ sends a 1-cell n to the chain automorphism given by right multiplication
by n, a 2-cell to a 1-homotopy λₙ ⇒ λ_{∂₁mn} and a 3-cell to a 2-homotopy.
Maps defined on the redundant spanning vectors v̄¹¹, v̄²² are solved on the
kernel bases; every linear relation among the spanning vectors is checked
along the way.
"""

from dataclasses import dataclass, field as dc_field
import itertools

import numpy as np

from . import ch2
from .exactla import QQ, InconsistentMap, QuotientMap, SparseVector, Subspace, kernel, matrix_from_columns, solve_on_spanning_set
from .grpalg import (DEFAULT_FAMILIES, WellDefinednessError, _Cells, _columns, _v2_level2,
                     extract_chain_complex, ideal_closure, quotient_cat2)
from .report import FAIL, INFO, PASS, SKIP, Check, check
from .xmod2 import from_crossed_module


class RepresentationError(ValueError):
    pass


@dataclass
class RegularRepresentation:
    gray: object
    bundle: object
    delta: ch2.ChainComplex2
    maps1: list                     # n ↦ ChainMap
    maps2: list                     # 2-cell index ↦ Homotopy1
    maps3: list                     # 3-cell index ↦ Homotopy2
    build_checks: list = dc_field(default_factory=list)

    def lam(self, n):
        return self.maps1[n]

    def lam2(self, g):
        return self.maps2[g]

    def lam3(self, j):
        return self.maps3[j]


class _Spaces:
    """Kernel bases and spanning vectors of K₃ and K₂."""

    def __init__(self, B, sign=-1):
        self.B = B
        self.F = B.field
        self.c = _Cells(B.gray, B.field)
        self.sign = sign
        self.k3, self.k2, self.k1 = B.K3.rank, B.K2.rank, B.pre.A1.dim

    def v11(self, m, n):
        """v̄¹¹ as a vector of the quotient at level two."""
        return self.B.Q2.reduce(self.c.v2(self.c.xm(m, n)))

    def v22(self, l, m, n):
        return self.B.Q3.reduce(self.c.v3(self.c.vv(l, m, n)))

    def coords3(self, v):
        return SparseVector(self.F, self.k3, dict(enumerate(self.B.K3.coordinates(v))))

    def coords2(self, v):
        return SparseVector(self.F, self.k2, dict(enumerate(self.B.K2.coordinates(v))))

    def e1(self, n):
        return SparseVector._raw(self.F, self.k1, {int(n): self.F.one})

    def cells2(self):
        return itertools.product(range(self.c.nM), range(self.c.nN))

    def cells3(self):
        return itertools.product(range(self.c.nL), range(self.c.nM), range(self.c.nN))

    def on_k2(self, image, what):
        """Solve a map out of K₂ given on every v̄¹¹_{1,m′,n′}."""
        pairs, labels = [], []
        for m2, n2 in self.cells2():
            pairs.append((self.v11(m2, n2), image(m2, n2)))
            labels.append((m2, n2))
        return self._solve(self.B.K2, pairs, labels, what)

    def on_k3(self, image, what):
        pairs, labels = [], []
        for l2, m2, n2 in self.cells3():
            pairs.append((self.v22(l2, m2, n2), image(l2, m2, n2)))
            labels.append((l2, m2, n2))
        return self._solve(self.B.K3, pairs, labels, what)

    def _solve(self, domain, pairs, labels, what):
        dim_t = pairs[0][1].dim if pairs else 0
        try:
            return solve_on_spanning_set(domain, pairs, dim_t, self.F, labels)
        except InconsistentMap as exc:
            raise RepresentationError(f"{what}: {exc}") from exc


def lambda_1cell(S, delta, n):
    """λₙ = (λ²ₙ, λ¹ₙ, λ⁰ₙ), right multiplication by n."""
    c, F = S.c, S.F
    Nm = c.Nm
    f0 = matrix_from_columns([S.e1(Nm[p, n]) for p in range(c.nN)], S.k1, F)
    f1 = S.on_k2(lambda m2, n2: S.coords2(S.v11(m2, Nm[n2, n])), f"λ¹ at n={c.N.name(n)}")
    f2 = S.on_k3(lambda l2, m2, n2: S.coords3(S.v22(l2, m2, Nm[n2, n])), f"λ² at n={c.N.name(n)}")
    return ch2.ChainMap(delta, delta, f2, f1, f0)


def lambda_2cell(S, maps1, m, n):
    """λ_{m,n} = (λ′_{m,n}, λ″_{m,n}) with source λₙ."""
    c, F = S.c, S.F
    Mm, Nm, anm, lf = c.Mm, c.Nm, c.anm, c.lift
    h1 = matrix_from_columns([S.coords2(S.v11(anm[p, m], Nm[p, n])) for p in range(c.nN)], S.k2, F)

    def image(m2, n2):
        x = anm[n2, m]
        return S.coords3(S.v22(lf[m2, x], Mm[m2, x], Nm[n2, n])).scale(S.sign)

    h2 = S.on_k2(image, f"λ″ at (m,n)=({c.M.name(m)},{c.N.name(n)})")
    return ch2.Homotopy1(maps1[n], h1, h2)


def lambda_3cell(S, maps2, gray, l, m, n):
    """λ_{l,m,n} with α′(e_p) = v̄²²_{ᵖl, ᵖm, pn} and source λ_{m,n}."""
    c, F = S.c, S.F
    a = matrix_from_columns([S.coords3(S.v22(c.anl[p, l], c.anm[p, m], c.Nm[p, n]))
                             for p in range(c.nN)], S.k3, F)
    return ch2.Homotopy2(maps2[gray.idx2.encode(m, n)], a)


def build_representation(G, bundle=None, field=QQ, sign=-1):
    """λ on every cell; raises RepresentationError on any inconsistent definition."""
    B = bundle if bundle is not None else quotient_cat2(G, field)
    delta = extract_chain_complex(B)
    S = _Spaces(B, sign)
    X = G.base
    maps1 = [lambda_1cell(S, delta, n) for n in range(X.N.order)]
    maps2 = [lambda_2cell(S, maps1, int(G.m2[g]), int(G.n2[g])) for g in range(G.C2.order)]
    maps3 = [lambda_3cell(S, maps2, G, int(G.l3[j]), int(G.m3[j]), int(G.n3[j]))
             for j in range(G.C3.order)]
    rho = RegularRepresentation(G, B, delta, maps1, maps2, maps3)
    A = ch2.aut_delta(delta)
    bad1 = next((n for n, f in enumerate(maps1) if not A.is_level1(f)), None)
    rho.build_checks.append(check("complex", "τ̄₂τ̄₃ = 0 on K₃", delta.is_complex()))
    rho.build_checks.append(check("aut-level1", "every λₙ is an invertible chain map", bad1 is None,
                                  witness=bad1 is not None and {"n": X.N.name(bad1)},
                                  visited=len(maps1)))
    return rho


# ---------------------------------------------------------------------------
# verification

def _eq(a, b):
    return a.shape == b.shape and not np.any(a != b)


class _Collector:
    def __init__(self):
        self.checks = []

    def run(self, id, anchor, items, test):
        """``test(item)`` returns None on success or a witness dict."""
        bad, count = None, 0
        for it in items:
            count += 1
            try:
                w = test(it)
            except ch2.CompositionError as exc:
                w = {"item": str(it), "error": str(exc)}
            if w is not None:
                bad = w
                break
        self.checks.append(check(id, anchor, bad is None, witness=bad, visited=count))


def verify_representation(rho):
    """Every equality λ has to satisfy, exhaustively over cells and composable tuples."""
    G, X = rho.gray, rho.gray.base
    F = rho.bundle.field
    L, M, N = X.L, X.M, X.N
    n1, n2, n3 = N.order, G.C2.order, G.C3.order
    maps1, maps2, maps3 = rho.maps1, rho.maps2, rho.maps3
    out = _Collector()
    out.checks += rho.build_checks
    d1map = X.d1.map

    out.run("lambda-identity", "λ₁ is the identity chain map", [N.identity],
            lambda n: None if maps1[n] == rho.delta.identity() else {"n": N.name(n)})
    out.run("contravariance", "λ_{nn′} = λ_{n′}∘λₙ", itertools.product(range(n1), repeat=2),
            lambda p: None if maps1[N.mul[p[0], p[1]]] == ch2.compose_maps(maps1[p[1]], maps1[p[0]])
            else {"n": N.name(p[0]), "n′": N.name(p[1])})

    def cond(k):
        def test(g):
            H = maps2[g]
            tgt = maps1[G.t2[g]]
            if H.source is not maps1[G.s2[g]]:
                return {"Γ": G.name2(g), "problem": "source"}
            ok = ch2.homotopy_conditions(H.source, tgt, H.h1, H.h2)[k]
            return None if ok else {"Γ": G.name2(g)}
        return test

    out.run("homotopy-1", "τ̄₂λ′_{m,n} = λ⁰_{∂₁mn} − λ⁰ₙ", range(n2), cond(0))
    out.run("homotopy-2", "λ′τ̄₂ + τ̄₃λ″ = λ¹_{∂₁mn} − λ¹ₙ", range(n2), cond(1))
    out.run("homotopy-3", "λ″τ̄₃ = λ²_{∂₁mn} − λ²ₙ", range(n2), cond(2))
    out.run("aut-level2", "every λ_{m,n} is a homotopy λₙ ⇒ λ_{∂₁mn}", range(n2),
            lambda g: None if maps2[g].target == maps1[G.t2[g]] else {"Γ": G.name2(g)})

    def cond3(k):
        def test(j):
            al = maps3[j]
            K = maps2[G.t3[j]]
            if al.source is not maps2[G.s3[j]]:
                return {"J": G.name3(j), "problem": "source"}
            ok = al.source.source == K.source and ch2.homotopy2_conditions(al.source, K, al.a)[k]
            return None if ok else {"J": G.name3(j)}
        return test

    out.run("2-homotopy-1", "λ′_{∂₂lm,n} = λ′_{m,n} + τ̄₃α′", range(n3), cond3(0))
    out.run("2-homotopy-2", "α′τ̄₂ = λ″_{∂₂lm,n} − λ″_{m,n}", range(n3), cond3(1))
    out.run("aut-level3", "every λ_{l,m,n} is a 2-homotopy λ_{m,n} ⇛ λ_{∂₂lm,n}", range(n3),
            lambda j: None if maps3[j].target == maps2[G.t3[j]] else {"J": G.name3(j)})

    pairs2 = [(a, b) for a, b in itertools.product(range(n2), repeat=2) if G.comp2[a, b] >= 0]

    def vc2(part):
        def test(p):
            after, first = p
            lhs = maps2[G.comp2[after, first]]
            rhs = ch2.vcomp_h1(maps2[after], maps2[first])
            ok = _eq(getattr(lhs, part), getattr(rhs, part)) and lhs.source == rhs.source
            return None if ok else {"Γ′": G.name2(after), "Γ": G.name2(first)}
        return test

    out.run("vcomp2-lambda1", "λ′ of (m′,∂₁mn)#₂(m,n) is the sum", pairs2, vc2("h1"))
    out.run("vcomp2-lambda2", "λ″ of (m′,∂₁mn)#₂(m,n) is the sum", pairs2, vc2("h2"))

    def hc(kind, part):
        comp = G.hcomp2_lower if kind == "lower" else G.hcomp2_upper
        op = ch2.hcomp_h1_lower if kind == "lower" else ch2.hcomp_h1_upper

        def test(p):
            g, h = p
            lhs = maps2[int(comp(g, h))]
            rhs = op(maps2[h], maps2[g])
            ok = _eq(getattr(lhs, part), getattr(rhs, part)) and lhs.source == rhs.source
            return None if ok else {"Γ": G.name2(g), "Γ′": G.name2(h)}
        return test

    all2 = list(itertools.product(range(n2), repeat=2))
    out.run("hcomp-lower-lambda1", "λ′ of the lower composite (m·ⁿm′, nn′)", all2, hc("lower", "h1"))
    out.run("hcomp-lower-lambda2", "λ″ of the lower composite (m·ⁿm′, nn′)", all2, hc("lower", "h2"))
    out.run("hcomp-upper-lambda1", "λ′ of the upper composite (^{∂₁m}(ⁿm′)m, nn′)", all2, hc("upper", "h1"))
    out.run("hcomp-upper-lambda2", "λ″ of the upper composite (^{∂₁m}(ⁿm′)m, nn′)", all2, hc("upper", "h2"))

    pairs3 = [(a, b) for a, b in itertools.product(range(n3), repeat=2) if G.comp3[a, b] >= 0]
    out.run("vcomp3", "λ of J′#₃J is λ_{J′}#₃λ_J", pairs3,
            lambda p: None if maps3[G.comp3[p[0], p[1]]] == ch2.vcomp_h2(maps3[p[0]], maps3[p[1]])
            else {"J′": G.name3(p[0]), "J": G.name3(p[1])})
    pairs1 = [(a, b) for a, b in itertools.product(range(n3), repeat=2) if G.comp1[a, b] >= 0]
    out.run("vcomp1", "λ of J′#₁J is λ_{J′}#₁λ_J", pairs1,
            lambda p: None if maps3[G.comp1[p[0], p[1]]] == ch2.vcomp1_h2(maps3[p[0]], maps3[p[1]])
            else {"J′": G.name3(p[0]), "J": G.name3(p[1])})
    out.run("group-operation-3", "λ_{JJ′} is the horizontal composite of λ_{J′} after λ_J",
            itertools.product(range(n3), repeat=2),
            lambda p: None if maps3[G.C3.mul[p[0], p[1]]] == ch2.hcomp_h2_lower(maps3[p[1]], maps3[p[0]])
            else {"J": G.name3(p[0]), "J′": G.name3(p[1])})
    return out.checks


# ---------------------------------------------------------------------------
# the length-1 construction for crossed modules

@dataclass
class Cat1Representation:
    Q: QuotientMap
    K: Subspace
    d: np.ndarray               # τ̄ restricted to K, into K(N)
    lam0: list
    lam1: list
    lam_h: dict                 # (m, n) ↦ λ′ matrix


def cat1_regular_rep(X, field=QQ):
    """Representation of the cat¹-group of a crossed module on K → K(N), built on its own."""
    G = _fake_gray(X)
    c = _Cells(G, field)
    M, N = X.M, X.N
    A2 = _Algebra2(X, field)
    J = ideal_closure(A2, list(_v2_level2(c)))
    Q = QuotientMap(J.space)
    sig_cols = []
    tau_cols = []
    for i in range(Q.dim):
        m, n = divmod(Q.reps[i], N.order)
        sig_cols.append(SparseVector._raw(field, N.order, {n: field.one}))
        tau_cols.append(SparseVector._raw(field, N.order, {int(N.mul[X.boundary.map[m], n]): field.one}))
    K = kernel(sig_cols, N.order, field)
    dcols = []
    for b in K.basis():
        out = {}
        for i, x in b.data.items():
            for k, y in tau_cols[i].data.items():
                out[k] = out.get(k, 0) + x * y
        dcols.append(SparseVector(field, N.order, out))
    d = matrix_from_columns(dcols, N.order, field)

    def vbar(m, n):
        return Q.reduce(c.v2(c.xm(m, n)))

    def coords(v):
        return SparseVector(field, K.rank, dict(enumerate(K.coordinates(v))))

    lam0, lam1, lam_h = [], [], {}
    for n in range(N.order):
        lam0.append(matrix_from_columns([SparseVector._raw(field, N.order, {int(N.mul[p, n]): field.one})
                                         for p in range(N.order)], N.order, field))
        pairs = [(vbar(m2, n2), coords(vbar(m2, N.mul[n2, n])))
                 for m2 in range(M.order) for n2 in range(N.order)]
        lam1.append(solve_on_spanning_set(K, pairs, K.rank, field))
    for m in range(M.order):
        for n in range(N.order):
            lam_h[m, n] = matrix_from_columns(
                [coords(vbar(X.action.map[p, m], N.mul[p, n])) for p in range(N.order)], K.rank, field)
    return Cat1Representation(Q, K, d, lam0, lam1, lam_h)


class _Algebra2:
    def __init__(self, X, field):
        from .groups import semidirect2
        self.group = semidirect2(X.M, X.N, X.action)
        self.field = field
        self.dim = self.group.order

    def left(self, g, v):
        return v.permute(self.group.mul[g], self.dim)

    def right(self, v, g):
        return v.permute(self.group.mul[:, g], self.dim)


class _fake_gray:
    """Enough of a Gray groupoid for the index helpers."""

    def __init__(self, X):
        self.base = from_crossed_module(X, check_axioms=False)


def degeneration_checks(X, rho):
    """Compare the 2-crossed construction on 1 → M → N with the length-1 one."""
    F = rho.bundle.field
    bar = cat1_regular_rep(X, F)
    B = rho.bundle
    out = []
    out.append(check("degenerate-K3", "K₃ = 0", B.K3.rank == 0, witness={"dim K3": B.K3.rank}))
    out.append(check("degenerate-ideal", "J₁ equals the crossed-module ideal", B.J1.space == bar.Q.J,
                     witness={"dim J1": B.J1.dim, "dim J": bar.Q.J.rank}))
    same = B.J1.space == bar.Q.J
    zero2 = all(h.h2.size == 0 or not np.any(h.h2 != 0) for h in rho.maps2)
    zero3 = all(a.a.size == 0 or not np.any(a.a != 0) for a in rho.maps3)
    out.append(check("degenerate-vanishing", "λ″ and α′ vanish", zero2 and zero3))
    if not same:
        out.append(Check("degenerate-maps", "λ⁰, λ¹, λ′ agree", SKIP, detail="ideals differ"))
        return out
    G = rho.gray
    bad = None
    for n in range(X.N.order):
        f = rho.maps1[n]
        if not (_eq(f.f0, bar.lam0[n]) and _eq(f.f1, bar.lam1[n])):
            bad = {"n": X.N.name(n)}
            break
    if bad is None:
        for g in range(G.C2.order):
            m, n = int(G.m2[g]), int(G.n2[g])
            if not _eq(rho.maps2[g].h1, bar.lam_h[m, n]):
                bad = {"m": X.M.name(m), "n": X.N.name(n)}
                break
    if bad is None and not _eq(rho.delta.d1, bar.d):
        bad = {"boundary": "τ̄"}
    out.append(check("degenerate-maps", "λ⁰, λ¹ and λ′_{(m,n)}(e_{n′}) = v̄_{ⁿ′m,n′n} agree", bad is None,
                     witness=bad))
    return out


# ---------------------------------------------------------------------------
# ablation

@dataclass
class AblationResult:
    dropped: tuple
    status: str                 # "same-ideal", "failures", "build-error", "all-pass"
    failures: list
    detail: str = ""
    dims: dict = dc_field(default_factory=dict)


def ablation(G, dropped=("alpha-face", "lambda-face"), field=QQ, families=DEFAULT_FAMILIES):
    """Rebuild without some J₂ families and report which equalities break."""
    full = quotient_cat2(G, field, families=families, saturate=False)
    fam = tuple(f for f in families if f not in dropped)
    try:
        B = quotient_cat2(G, field, families=fam, saturate=False)
    except WellDefinednessError as exc:
        return AblationResult(tuple(dropped), "build-error", [], str(exc))
    if B.J2.space == full.J2.space and B.J1.space == full.J1.space:
        return AblationResult(tuple(dropped), "same-ideal", [], "remaining families generate the same ideals",
                              B.dims())
    try:
        rho = build_representation(G, B)
    except (RepresentationError, ValueError) as exc:
        return AblationResult(tuple(dropped), "build-error", [], str(exc), B.dims())
    bad = [c.id for c in verify_representation(rho) if not c.ok]
    return AblationResult(tuple(dropped), "failures" if bad else "all-pass", bad, "", B.dims())


def ablation_checks(G, field=QQ, drops=(("alpha-face", "lambda-face"), ("alpha-face",), ("lambda-face",), ("cocycle",), ("v1",), ("u1",))):
    """One info record per dropped set; a loaded family shows up as failures."""
    out = []
    for d in drops:
        r = ablation(G, d, field)
        out.append(Check(f"ablation-{'+'.join(d)}", "removing relation families from J₂", INFO,
                         detail=f"{r.status}: {', '.join(r.failures) or r.detail}",
                         witness={"status": r.status, "failures": r.failures, "dims": r.dims}))
    return out
