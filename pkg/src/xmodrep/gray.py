"""The Gray 3-groupoid with one object built from a 2-crossed module, and back.

Cells are plain indices: a 1-cell is an element of N, a 2-cell an index of
M⋊N, a 3-cell an index of L⋊M⋊N (last coordinate fastest).  Partial
compositions are stored as dense tables ``comp[then, first]`` holding -1
where the pair is not composable.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .groups import FiniteGroup, GroupAction, GroupHom, ProductIndex, semidirect2, semidirect3
from .report import FAIL, INFO, PASS, Check, check
from .xmod2 import AxiomError, TwoCrossedModule, verify_2xm

DEFAULT_BUDGET = 10**8


class CompositionError(ValueError):
    """Raised when cells are not composable."""


@dataclass(frozen=True, eq=False)
class GrayGroupoid:
    base: TwoCrossedModule
    C1: FiniteGroup
    C2: FiniteGroup
    C3: FiniteGroup
    idx2: ProductIndex
    idx3: ProductIndex
    # coordinates of every 2-cell / 3-cell
    m2: np.ndarray
    n2: np.ndarray
    l3: np.ndarray
    m3: np.ndarray
    n3: np.ndarray
    s2: np.ndarray
    t2: np.ndarray
    s3: np.ndarray
    t3: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    comp2: np.ndarray      # Γ′ #₂ Γ
    comp3: np.ndarray      # J′ #₃ J
    comp1: np.ndarray      # J′ #₁ J  (J first)

    # -- cell constructors --------------------------------------------------

    def cell2(self, m, n):
        return self.idx2.encode(m, n)

    def cell3(self, l, m, n):
        return self.idx3.encode(l, m, n)

    def coords2(self, g):
        return int(self.m2[g]), int(self.n2[g])

    def coords3(self, j):
        return int(self.l3[j]), int(self.m3[j]), int(self.n3[j])

    def name2(self, g):
        return self.C2.name(g)

    def name3(self, j):
        return self.C3.name(j)

    # -- compositions -------------------------------------------------------

    def vcomp2(self, g, f):
        r = int(self.comp2[g, f])
        if r < 0:
            raise CompositionError(f"2-cells {self.name2(g)} and {self.name2(f)} are not composable")
        return r

    def vcomp3_2(self, j2, j):
        r = int(self.comp3[j2, j])
        if r < 0:
            raise CompositionError(f"3-cells {self.name3(j2)} #₃ {self.name3(j)} not composable")
        return r

    def vcomp3_1(self, j, j2):
        """J first, then J′ (along 1-cells): (l′·^{m′}l, m′m, n)."""
        r = int(self.comp1[j2, j])
        if r < 0:
            raise CompositionError(f"3-cells {self.name3(j)} #₁ {self.name3(j2)} not composable")
        return r

    # -- whiskerings (vectorised over array arguments) ----------------------

    def whisker1_left(self, n1, g):
        X = self.base
        return (X.act_nm.map[n1, self.m2[g]]) * self.C1.order + self.C1.mul[n1, self.n2[g]]

    def whisker1_right(self, g, n1):
        return self.m2[g] * self.C1.order + self.C1.mul[self.n2[g], n1]

    def whisker1_left3(self, n1, j):
        X = self.base
        nM, nN = X.M.order, X.N.order
        l = X.act_nl.map[n1, self.l3[j]]
        m = X.act_nm.map[n1, self.m3[j]]
        return (l * nM + m) * nN + self.C1.mul[n1, self.n3[j]]

    def whisker1_right3(self, j, n1):
        X = self.base
        return (self.l3[j] * X.M.order + self.m3[j]) * X.N.order + self.C1.mul[self.n3[j], n1]

    def whisker2_left(self, g, j):
        """(m′, ∂₁mn) ♮₂ (l, m, n) = (^{m′}l, m′m, n)."""
        X = self.base
        g, j = np.asarray(g), np.asarray(j)
        ok = self.s2[g] == self.t2[self.s3[j]]
        l = X.act_ml[self.m2[g], self.l3[j]]
        m = X.M.mul[self.m2[g], self.m3[j]]
        out = (l * X.M.order + m) * X.N.order + self.n3[j]
        return _mask(out, ok)

    def whisker2_right(self, j, g):
        """(l, m′, ∂₁mn) ♮₂ (m, n) = (l, m′m, n)."""
        X = self.base
        g, j = np.asarray(g), np.asarray(j)
        ok = self.s2[self.s3[j]] == self.t2[g]
        m = X.M.mul[self.m3[j], self.m2[g]]
        out = (self.l3[j] * X.M.order + m) * X.N.order + self.n2[g]
        return _mask(out, ok)

    # -- horizontal compositions and the interchange 3-cell -----------------

    def hcomp2_lower(self, g, h):
        """(m·ⁿm′, nn′): the group product of C2."""
        return self.C2.mul[g, h]

    def hcomp2_upper(self, g, h):
        X = self.base
        m, n, m1, n1 = self.m2[g], self.n2[g], self.m2[h], self.n2[h]
        inner = X.act_nm.map[X.d1.map[m], X.act_nm.map[n, m1]]
        return X.M.mul[inner, m] * X.N.order + X.N.mul[n, n1]

    def hcomp3_lower(self, j, k):
        return self.C3.mul[j, k]

    def hcomp3_upper(self, j, k):
        X = self.base
        l, m, n = self.l3[j], self.m3[j], self.n3[j]
        l1, m1, n1 = self.l3[k], self.m3[k], self.n3[k]
        dm = X.d1.map[m]
        mm = X.act_nm.map[dm, X.act_nm.map[n, m1]]
        ll = X.act_nl.map[dm, X.act_nl.map[n, l1]]
        lt = X.L.mul[ll, X.act_ml[mm, l]]
        return (lt * X.M.order + X.M.mul[mm, m]) * X.N.order + X.N.mul[n, n1]

    def interchange_cell(self, g, h):
        """Γ#Γ′ = ({m, ⁿm′}, m·ⁿm′, nn′)."""
        X = self.base
        m, n, m1, n1 = self.m2[g], self.n2[g], self.m2[h], self.n2[h]
        nm1 = X.act_nm.map[n, m1]
        return (X.lifting[m, nm1] * X.M.order + X.M.mul[m, nm1]) * X.N.order + X.N.mul[n, n1]


def _mask(out, ok):
    out = np.where(ok, out, -1)
    return int(out) if out.ndim == 0 else out


def theta(X, check_axioms=True):
    """Build the Gray 3-groupoid of a 2-crossed module."""
    if check_axioms:
        bad = [c for c in verify_2xm(X) if not c.ok]
        if bad:
            raise AxiomError(f"not a 2-crossed module: {bad[0].id} fails at {bad[0].witness}")
    L, M, N = X.L, X.M, X.N
    C2 = semidirect2(M, N, X.act_nm, label=f"{M.label}⋊{N.label}")
    C3 = semidirect3(L, M, N, X.act_nm, X.act_nl, X.lifting, X.d2,
                     label=f"{L.label}⋊{M.label}⋊{N.label}")
    idx2 = ProductIndex((M.order, N.order))
    idx3 = ProductIndex((L.order, M.order, N.order))
    m2, n2 = idx2.grid()
    l3, m3, n3 = idx3.grid()
    s2 = n2.copy()
    t2 = N.mul[X.d1.map[m2], n2]
    s3 = m3 * N.order + n3
    t3 = M.mul[X.d2.map[l3], m3] * N.order + n3
    e2 = M.identity * N.order + np.arange(N.order)
    e3 = (L.identity * M.order + m2) * N.order + n2

    # Γ′ #₂ Γ on rows Γ′, columns Γ
    ok = s2[:, None] == t2[None, :]
    comp2 = np.where(ok, M.mul[m2[:, None], m2[None, :]] * N.order + n2[None, :], -1)
    # J′ #₃ J
    ok = s3[:, None] == t3[None, :]
    comp3 = np.where(ok, (L.mul[l3[:, None], l3[None, :]] * M.order + m3[None, :]) * N.order + n3[None, :], -1)
    # J′ #₁ J with J = (l,m,n) first and J′ = (l′,m′,∂₁mn): (l′·^{m′}l, m′m, n)
    ok = n3[:, None] == t2[s3][None, :]
    aml = X.act_ml
    lt = L.mul[l3[:, None], aml[m3[:, None], l3[None, :]]]
    comp1 = np.where(ok, (lt * M.order + M.mul[m3[:, None], m3[None, :]]) * N.order + n3[None, :], -1)

    arrs = [m2, n2, l3, m3, n3, s2, t2, s3, t3, e2, e3, comp2, comp3, comp1]
    arrs = [np.ascontiguousarray(a, dtype=np.int64) for a in arrs]
    for a in arrs:
        a.setflags(write=False)
    return GrayGroupoid(X, N, C2, C3, idx2, idx3, *arrs)


# ---------------------------------------------------------------------------
# verification

class _Sampler:
    """Decides exhaustive vs sampled mode for each quantified check."""

    def __init__(self, budget, seed):
        self.budget = budget
        self.rng = np.random.default_rng(seed)
        self.seed = seed

    def exhaustive(self, visits):
        return visits <= self.budget


def _first_bad(mask):
    bad = np.argwhere(~np.asarray(mask))
    return None if len(bad) == 0 else tuple(int(x) for x in bad[0])


def _csr(comp):
    return _accel.csr_after(np.ascontiguousarray(comp))


def _groupoid_checks(prefix, comp, src, tgt, ident, names, anchor):
    """Source/target of composites, units, inverses and associativity of a partial composition."""
    out = []
    n = comp.shape[0]
    g, f = np.nonzero(comp >= 0)
    r = comp[g, f]
    ok = (src[r] == src[f]) & (tgt[r] == tgt[g])
    w = _first_bad(ok)
    out.append(check(f"{prefix}-boundary", f"s(g∘f) = s(f), t(g∘f) = t(g) for {anchor}", w is None,
                     witness=w and {"g": names(g[w[0]]), "f": names(f[w[0]])}, visited=len(r)))
    ar = np.arange(n)
    ok = (comp[ident[tgt], ar] == ar) & (comp[ar, ident[src]] == ar)
    w = _first_bad(ok)
    out.append(check(f"{prefix}-unit", f"identity cells are neutral for {anchor}", w is None,
                     witness=w and {"x": names(w[0])}, visited=n))
    has_inv = (comp == ident[src][None, :]).any(axis=0)
    w = _first_bad(has_inv)
    out.append(check(f"{prefix}-inverse", f"every cell is invertible for {anchor}", w is None,
                     witness=w and {"x": names(w[0])}, visited=n))
    ptr, idx = _csr(comp)
    wv = _accel.partial_assoc_witness(np.ascontiguousarray(comp), ptr, idx)
    ok = wv[0] < 0
    visits = int(sum((ptr[idx + 1] - ptr[idx]).tolist())) if len(idx) else 0
    out.append(check(f"{prefix}-assoc", f"h∘(g∘f) = (h∘g)∘f for {anchor}", ok,
                     witness=None if ok else {"f": names(wv[0]), "g": names(wv[1]), "h": names(wv[2])},
                     visited=visits))
    return out


def verify_gray(G, budget=DEFAULT_BUDGET, seed=0):
    """Checks of the Gray 3-groupoid structure; exhaustive within ``budget`` tuple visits."""
    S = _Sampler(budget, seed)
    X = G.base
    out = []
    n2, n3 = G.C2.order, G.C3.order
    N = G.C1

    def hom(id, anchor, src, tgt, f):
        w = _accel.hom_witness(src.mul, tgt.mul, np.ascontiguousarray(f))
        ok = w[0] < 0
        out.append(check(id, anchor, ok, witness=None if ok else {"x": src.name(w[0]), "y": src.name(w[1])},
                         visited=src.order ** 2))

    hom("s2-hom", "s₂(ΓΓ′) = s₂Γ·s₂Γ′", G.C2, N, G.s2)
    hom("t2-hom", "t₂(ΓΓ′) = t₂Γ·t₂Γ′", G.C2, N, G.t2)
    hom("s3-hom", "s₃(JJ′) = s₃J·s₃J′", G.C3, G.C2, G.s3)
    hom("t3-hom", "t₃(JJ′) = t₃J·t₃J′", G.C3, G.C2, G.t3)

    ok = G.t2[G.t3] == G.t2[G.s3]
    w = _first_bad(ok)
    out.append(check("globular", "t₂∘t₃ = t₂∘s₃ and s₂∘t₃ = s₂∘s₃", w is None and (G.s2[G.t3] == G.s2[G.s3]).all(),
                     witness=w and {"J": G.name3(w[0])}, visited=n3))
    ok = (G.s2[G.e2] == np.arange(N.order)) & (G.t2[G.e2] == np.arange(N.order))
    ok3 = (G.s3[G.e3] == np.arange(n2)) & (G.t3[G.e3] == np.arange(n2))
    out.append(check("identities", "s∘e = t∘e = id at levels 2 and 3", bool(ok.all() and ok3.all()),
                     witness=None, visited=N.order + n2))

    name2, name3 = G.name2, G.name3
    out += _groupoid_checks("comp2", G.comp2, G.s2, G.t2, G.e2, name2, "#₂")
    out += _groupoid_checks("comp3", G.comp3, G.s3, G.t3, G.e3, name3, "#₃")
    s1_3 = G.s2[G.s3]
    t1_3 = G.t2[G.s3]
    e1_3 = G.e3[G.e2]
    out += _groupoid_checks("comp1", G.comp1, s1_3, t1_3, e1_3, name3, "#₁")

    # s₃, t₃ are functors for #₁
    b, a = np.nonzero(G.comp1 >= 0)
    r = G.comp1[b, a]
    ok = (G.s3[r] == G.comp2[G.s3[b], G.s3[a]]) & (G.t3[r] == G.comp2[G.t3[b], G.t3[a]])
    w = _first_bad(ok)
    out.append(check("comp1-functor", "s₃, t₃ carry #₁ to #₂", w is None,
                     witness=w and {"J": name3(a[w[0]]), "J′": name3(b[w[0]])}, visited=len(r)))

    out.append(_interchange_13(G, S))
    out.append(_product_interchange(G, S))
    out.append(_interchange_cell_contract(G))
    out += _whiskering_checks(G)
    out += _horizontal_definitions(G)
    out += _two_functoriality(G, S)
    out += _one_functoriality(G, S)
    return out


def _interchange_13(G, S):
    anchor = "(J′#₃J)#₁(J′₁#₃J₁) = (J′#₁J′₁)#₃(J#₁J₁)"
    a_ptr, a_idx = _csr(G.comp3)
    b_ptr, b_idx = _csr(G.comp1)
    deg_a = np.diff(a_ptr)
    deg_b = np.diff(b_ptr)
    # visits = Σ_{x1} Σ_{x ∈ after₁(x1)} deg₃(x)·deg₃(x1)
    visits = int(sum(int(deg_a[b_idx[b_ptr[x]:b_ptr[x + 1]]].sum()) * int(deg_a[x]) for x in range(len(deg_a))))
    if S.exhaustive(visits):
        w = _accel.interchange_witness(G.comp3, G.comp1, a_ptr, a_idx, b_ptr, b_idx)
        ok = w[0] < 0
        return check("interchange-13", anchor, ok, visited=visits,
                     witness=None if ok else dict(zip(("J₁", "J", "J′", "J′₁"), map(G.name3, w))))
    k = int(S.budget)
    x1 = S.rng.integers(0, G.C3.order, k)
    x = _pick_after(S.rng, b_ptr, b_idx, x1)
    xp = _pick_after(S.rng, a_ptr, a_idx, x)
    x1p = _pick_after(S.rng, a_ptr, a_idx, x1)
    lhs = G.comp1[G.comp3[xp, x], G.comp3[x1p, x1]]
    rhs = G.comp3[G.comp1[xp, x1p], G.comp1[x, x1]]
    ok = (lhs == rhs) & (lhs >= 0)
    w = _first_bad(ok)
    c = check("interchange-13", anchor, w is None, visited=k,
              witness=w and dict(zip(("J₁", "J", "J′", "J′₁"), map(G.name3, (x1[w[0]], x[w[0]], xp[w[0]], x1p[w[0]])))))
    c.mode = f"sampled(seed={S.seed})"
    return c


def _pick_after(rng, ptr, idx, rows):
    deg = ptr[rows + 1] - ptr[rows]
    off = (rng.random(len(rows)) * deg).astype(np.int64)
    return idx[ptr[rows] + off]


def _product_interchange(G, S):
    anchor = "(α#₃β)·(γ#₃δ) = (α·γ)#₃(β·δ)"
    ptr, idx = _csr(G.comp3)
    deg = np.diff(ptr)
    visits = int(deg.sum()) ** 2
    if S.exhaustive(visits):
        w = _accel.product_interchange_witness(G.C3.mul, G.comp3, ptr, idx)
        ok = w[0] < 0
        return check("product-interchange", anchor, ok, visited=visits,
                     witness=None if ok else dict(zip(("β", "α", "δ", "γ"), map(G.name3, w))))
    k = int(S.budget)
    a = S.rng.integers(0, G.C3.order, k)
    c_ = S.rng.integers(0, G.C3.order, k)
    b = _pick_after(S.rng, ptr, idx, a)
    d = _pick_after(S.rng, ptr, idx, c_)
    lhs = G.C3.mul[G.comp3[b, a], G.comp3[d, c_]]
    rhs = G.comp3[G.C3.mul[b, d], G.C3.mul[a, c_]]
    w = _first_bad((lhs == rhs) & (rhs >= 0))
    c = check("product-interchange", anchor, w is None, visited=k,
              witness=w and dict(zip(("β", "α", "δ", "γ"), map(G.name3, (a[w[0]], b[w[0]], c_[w[0]], d[w[0]])))))
    c.mode = f"sampled(seed={S.seed})"
    return c


def _interchange_cell_contract(G):
    g = np.arange(G.C2.order)[:, None]
    h = np.arange(G.C2.order)[None, :]
    cell = G.interchange_cell(g, h)
    ok = (G.s3[cell] == G.hcomp2_lower(g, h)) & (G.t3[cell] == G.hcomp2_upper(g, h))
    w = _first_bad(ok)
    return check("interchange-cell", "s₃(Γ#Γ′) = lower composite, t₃(Γ#Γ′) = upper composite", w is None,
                 witness=w and {"Γ": G.name2(w[0]), "Γ′": G.name2(w[1])}, visited=ok.size)


def _whiskering_checks(G):
    out = []
    N = G.C1
    nN, n2, n3 = N.order, G.C2.order, G.C3.order
    a = np.arange(nN)[:, None, None]
    b = np.arange(nN)[None, :, None]

    def add(id, anchor, ok, names):
        w = _first_bad(ok)
        out.append(check(id, anchor, w is None, visited=int(np.size(ok)),
                         witness=w and {k: f(v) for (k, f), v in zip(names, w)}))

    nn = ("η", N.name), ("η′", N.name)
    for lvl, cells, wl, wr, nm in ((2, n2, G.whisker1_left, G.whisker1_right, G.name2),
                                   (3, n3, G.whisker1_left3, G.whisker1_right3, G.name3)):
        x = np.arange(cells)[None, None, :]
        add(f"whisker1-right-compose-{lvl}", "(x♮₁η′)♮₁η = x♮₁(η′η)",
            wr(wr(x, b), a) == wr(x, N.mul[b, a]), nn + (("x", nm),))
        add(f"whisker1-left-compose-{lvl}", "η♮₁(η′♮₁x) = (ηη′)♮₁x",
            wl(a, wl(b, x)) == wl(N.mul[a, b], x), nn + (("x", nm),))
        add(f"whisker1-commute-{lvl}", "(η♮₁x)♮₁η′ = η♮₁(x♮₁η′)",
            wr(wl(a, x), b) == wl(a, wr(x, b)), nn + (("x", nm),))

    # whiskering by a 1-cell is a 2-groupoid map
    for id, comp, wl, wr, nm, anchor in (
            ("whisker1-comp2", G.comp2, G.whisker1_left, G.whisker1_right, G.name2, "#₂"),
            ("whisker1-comp3", G.comp3, G.whisker1_left3, G.whisker1_right3, G.name3, "#₃"),
            ("whisker1-comp1", G.comp1, G.whisker1_left3, G.whisker1_right3, G.name3, "#₁")):
        g, f = np.nonzero(comp >= 0)
        r = comp[g, f]
        e = np.arange(nN)[:, None]
        okl = wl(e, r) == comp[wl(e, g), wl(e, f)]
        okr = wr(r, e) == comp[wr(g, e), wr(f, e)]
        ok = okl & okr
        w = _first_bad(ok)
        out.append(check(id, f"η♮₁ and ♮₁η preserve {anchor}", w is None, visited=int(ok.size),
                         witness=w and {"η": N.name(w[0]), "g": nm(g[w[1]]), "f": nm(f[w[1]])}))
    # boundaries commute with 1-whiskering
    e = np.arange(nN)[:, None]
    j = np.arange(n3)[None, :]
    ok = ((G.s3[G.whisker1_left3(e, j)] == G.whisker1_left(e, G.s3[j]))
          & (G.t3[G.whisker1_left3(e, j)] == G.whisker1_left(e, G.t3[j]))
          & (G.s3[G.whisker1_right3(j, e)] == G.whisker1_right(G.s3[j], e))
          & (G.t3[G.whisker1_right3(j, e)] == G.whisker1_right(G.t3[j], e)))
    w = _first_bad(ok)
    out.append(check("whisker1-boundary", "s₃, t₃ commute with whiskering by 1-cells", w is None,
                     visited=int(ok.size), witness=w and {"η": N.name(w[0]), "J": G.name3(w[1])}))
    # ♮₂ agrees with #₃-composition against identity 3-cells
    g = np.arange(n2)[:, None]
    j = np.arange(n3)[None, :]
    wl = G.whisker2_left(g, j)
    okl = np.where(wl >= 0, (G.s3[wl] == G.comp2[g, G.s3[j]]) & (G.t3[wl] == G.comp2[g, G.t3[j]]), True)
    wr = G.whisker2_right(j, g)
    okr = np.where(wr >= 0, (G.s3[wr] == G.comp2[G.s3[j], g]) & (G.t3[wr] == G.comp2[G.t3[j], g]), True)
    # Γ ♮₂ J = e₃(Γ) #₁ J  and  J ♮₂ Γ = J #₁ e₃(Γ)
    okl &= np.where(wl >= 0, wl == G.comp1[G.e3[g], j], True)
    okr &= np.where(wr >= 0, wr == G.comp1[j, G.e3[g]], True)
    ok = okl & okr
    w = _first_bad(ok)
    out.append(check("whisker2", "Γ♮₂J = e₃(Γ)#₁J and J♮₂Γ = J#₁e₃(Γ), with matching boundaries", w is None,
                     visited=int(ok.size), witness=w and {"Γ": G.name2(w[0]), "J": G.name3(w[1])}))
    return out


def _horizontal_definitions(G):
    """Horizontal composites agree with their whiskering definitions."""
    out = []
    g = np.arange(G.C2.order)[:, None]
    h = np.arange(G.C2.order)[None, :]
    lower = G.comp2[G.whisker1_right(g, G.t2[h]), G.whisker1_left(G.s2[g], h)]
    upper = G.comp2[G.whisker1_left(G.t2[g], h), G.whisker1_right(g, G.s2[h])]
    ok = (lower == G.hcomp2_lower(g, h)) & (upper == G.hcomp2_upper(g, h))
    w = _first_bad(ok)
    out.append(check("hcomp2-definition", "lower = (Γ♮₁t₂Γ′)#₂(s₂Γ♮₁Γ′), upper = (t₂Γ♮₁Γ′)#₂(Γ♮₁s₂Γ′)",
                     w is None, visited=int(ok.size), witness=w and {"Γ": G.name2(w[0]), "Γ′": G.name2(w[1])}))
    j = np.arange(G.C3.order)[:, None]
    k = np.arange(G.C3.order)[None, :]
    s1 = G.s2[G.s3]
    t1 = G.t2[G.s3]
    lower = G.comp1[G.whisker1_right3(j, t1[k]), G.whisker1_left3(s1[j], k)]
    upper = G.comp1[G.whisker1_left3(t1[j], k), G.whisker1_right3(j, s1[k])]
    ok = (lower == G.hcomp3_lower(j, k)) & (upper == G.hcomp3_upper(j, k))
    ok &= (G.s3[G.hcomp3_lower(j, k)] == G.hcomp2_lower(G.s3[j], G.s3[k]))
    ok &= (G.t3[G.hcomp3_upper(j, k)] == G.hcomp2_upper(G.t3[j], G.t3[k]))
    w = _first_bad(ok)
    out.append(check("hcomp3-definition", "lower = (J♮₁t₂J′)#₁(s₂J♮₁J′), upper = (t₂J♮₁J′)#₁(J♮₁s₂J′)",
                     w is None, visited=int(ok.size), witness=w and {"J": G.name3(w[0]), "J′": G.name3(w[1])}))
    return out


def _two_functoriality(G, S):
    """upper(J,J′) #₃ (Γ₁#Γ′₁) = (Γ₂#Γ′₂) #₃ lower(J,J′)."""
    out = []
    anchor = "[J over J′ upper]#₃(Γ₁#Γ′₁) = (Γ₂#Γ′₂)#₃[J, J′ lower]"

    def evaluate(j, k):
        lhs = G.comp3[G.hcomp3_upper(j, k), G.interchange_cell(G.s3[j], G.s3[k])]
        rhs = G.comp3[G.interchange_cell(G.t3[j], G.t3[k]), G.hcomp3_lower(j, k)]
        return (lhs == rhs) & (lhs >= 0)

    n3 = G.C3.order
    ids = G.e3
    j = ids[:, None]
    k = np.arange(n3)[None, :]
    ok = evaluate(j, k) & evaluate(k.T, j.T).T
    w = _first_bad(ok)
    out.append(check("2-functoriality-identity", anchor + " (J or J′ an identity)", w is None, visited=int(ok.size),
                     witness=w and {"e₃Γ": G.name3(ids[w[0]]), "J": G.name3(w[1])}))
    visits = n3 * n3
    if S.exhaustive(visits):
        j = np.arange(n3)[:, None]
        k = np.arange(n3)[None, :]
        ok = evaluate(j, k)
        w = _first_bad(ok)
        c = check("2-functoriality", anchor, w is None, visited=visits,
                  witness=w and {"J": G.name3(w[0]), "J′": G.name3(w[1])})
    else:
        j = S.rng.integers(0, n3, int(S.budget))
        k = S.rng.integers(0, n3, int(S.budget))
        ok = evaluate(j, k)
        w = _first_bad(ok)
        c = check("2-functoriality", anchor, w is None, visited=len(j),
                  witness=w and {"J": G.name3(j[w[0]]), "J′": G.name3(k[w[0]])})
        c.mode = f"sampled(seed={S.seed})"
    out.append(c)
    return out


def _one_functoriality(G, S):
    """(Γ′#₂Γ)#Γ″ and Γ#(Γ‴#₂Γ″) as #₃-composites of whiskered interchange cells."""
    out = []
    n2 = G.C2.order
    b, a = np.nonzero(G.comp2 >= 0)          # Γ′ = b after Γ = a
    visits = len(a) * n2
    sampled = not S.exhaustive(visits)
    if sampled:
        pick = S.rng.integers(0, len(a), int(S.budget))
        a, b = a[pick], b[pick]
        c = S.rng.integers(0, n2, len(a))
    else:
        a, b, c = np.repeat(a, n2), np.repeat(b, n2), np.tile(np.arange(n2), len(a))
    # first column composite: Γ = a, Γ′ = b, Γ″ = c
    lhs = G.interchange_cell(G.comp2[b, a], c)
    x = G.whisker2_right(G.interchange_cell(b, c), G.whisker1_right(a, G.s2[c]))
    y = G.whisker2_left(G.whisker1_right(b, G.t2[c]), G.interchange_cell(a, c))
    rhs = np.where((x >= 0) & (y >= 0), G.comp3[np.maximum(x, 0), np.maximum(y, 0)], -1)
    ok = (lhs == rhs) & (rhs >= 0)
    w = _first_bad(ok)
    ch = check("1-functoriality-left", "(Γ′#₂Γ)#Γ″ = [(Γ′#Γ″)♮₂(Γ♮₁s₂Γ″)]#₃[(Γ′♮₁t₂Γ″)♮₂(Γ#Γ″)]",
               w is None, visited=len(ok),
               witness=w and {"Γ": G.name2(a[w[0]]), "Γ′": G.name2(b[w[0]]), "Γ″": G.name2(c[w[0]])})
    if sampled:
        ch.mode = f"sampled(seed={S.seed})"
    out.append(ch)
    # second column: Γ = c, Γ″ = a, Γ‴ = b
    lhs = G.interchange_cell(c, G.comp2[b, a])
    x = G.whisker2_left(G.whisker1_left(G.t2[c], b), G.interchange_cell(c, a))
    y = G.whisker2_right(G.interchange_cell(c, b), G.whisker1_left(G.s2[c], a))
    rhs = np.where((x >= 0) & (y >= 0), G.comp3[np.maximum(x, 0), np.maximum(y, 0)], -1)
    ok = (lhs == rhs) & (rhs >= 0)
    w = _first_bad(ok)
    ch = check("1-functoriality-right", "Γ#(Γ‴#₂Γ″) = [(t₂Γ♮₁Γ‴)♮₂(Γ#Γ″)]#₃[(Γ#Γ‴)♮₂(s₂Γ♮₁Γ″)]",
               w is None, visited=len(ok),
               witness=w and {"Γ": G.name2(c[w[0]]), "Γ″": G.name2(a[w[0]]), "Γ‴": G.name2(b[w[0]])})
    if sampled:
        ch.mode = f"sampled(seed={S.seed})"
    out.append(ch)
    return out


def hcomp_witness(G):
    """First pair of 2-cells whose lower and upper horizontal composites differ, or None."""
    g = np.arange(G.C2.order)[:, None]
    h = np.arange(G.C2.order)[None, :]
    w = _first_bad(G.hcomp2_lower(g, h) == G.hcomp2_upper(g, h))
    return None if w is None else (G.name2(w[0]), G.name2(w[1]))


# ---------------------------------------------------------------------------
# kernel condition

def _kernel_commutator(G_, ks, kt):
    a = np.asarray(ks)[:, None]
    b = np.asarray(kt)[None, :]
    c = G_.mul[G_.mul[a, b], G_.mul[G_.inv[a], G_.inv[b]]]
    return _first_bad(c == G_.identity), c.size


def cat2_kernel_check(G):
    """[ker s₃, ker t₃] = 1 in C3 (asserted); level-2 commutators are recorded as info."""
    out = []
    ks3 = np.nonzero(G.s3 == G.e2[G.C1.identity])[0]
    kt3 = np.nonzero(G.t3 == G.e2[G.C1.identity])[0]
    w, v = _kernel_commutator(G.C3, ks3, kt3)
    out.append(check("kernel-3", "[ker s₃, ker t₃] = 1", w is None, visited=v,
                     witness=w and {"x": G.name3(ks3[w[0]]), "y": G.name3(kt3[w[1]])}))
    ks2 = np.nonzero(G.s2 == G.C1.identity)[0]
    kt2 = np.nonzero(G.t2 == G.C1.identity)[0]
    w, v = _kernel_commutator(G.C2, ks2, kt2)
    c = Check("kernel-2", "[ker s₂, ker t₂] = 1 (holds iff ∂₁ satisfies the Peiffer identity)", INFO,
              visited=v, witness=w and {"x": G.name2(ks2[w[0]]), "y": G.name2(kt2[w[1]])},
              detail="holds" if w is None else "fails: M→N is only a pre-crossed module")
    out.append(c)
    return out


# ---------------------------------------------------------------------------
# from Gray groupoids back to 2-crossed modules

@dataclass(frozen=True, eq=False)
class DeltaResult:
    X: TwoCrossedModule
    iso_L: GroupHom      # L → L′
    iso_M: GroupHom      # M → M′
    iso_N: GroupHom      # N → N′
    cells_L: np.ndarray  # L′ index → 3-cell of G
    cells_M: np.ndarray  # M′ index → 2-cell of G


def _subgroup(G_, elements, label):
    elements = np.asarray(elements, dtype=np.int64)
    pos = {int(e): i for i, e in enumerate(elements)}
    table = np.vectorize(lambda x: pos[int(x)])(G_.mul[elements[:, None], elements[None, :]])
    return FiniteGroup.from_table(table, pos[G_.identity], names=[G_.name(e) for e in elements],
                                  label=label, check=False), pos


def delta_functor(G):
    """Recover a 2-crossed module from ker s₃ → ker s₂ → C1 and compare with the base."""
    X = G.base
    N = G.C1
    kM = np.nonzero(G.s2 == N.identity)[0]                       # (m, 1)
    kL = np.nonzero(G.s3 == G.e2[N.identity])[0]                 # (l, 1, 1)
    M2, posM = _subgroup(G.C2, kM, "ker s₂")
    L2, posL = _subgroup(G.C3, kL, "ker s₃")
    d1 = GroupHom(M2, N, G.t2[kM])
    d2 = GroupHom(L2, M2, np.array([posM[int(G.t3[j])] for j in kL]))
    nN = np.arange(N.order)[:, None]
    act_nm = GroupAction(N, M2, np.vectorize(lambda x: posM[int(x)])(
        G.whisker1_right(G.whisker1_left(nN, kM[None, :]), N.inv[nN])))
    act_nl = GroupAction(N, L2, np.vectorize(lambda x: posL[int(x)])(
        G.whisker1_right3(G.whisker1_left3(nN, kL[None, :]), N.inv[nN])))
    # {Γ, Γ′} = (Γ#Γ′) · e₃(s₃(Γ#Γ′))⁻¹
    cell = G.interchange_cell(kM[:, None], kM[None, :])
    lift_cells = G.C3.mul[cell, G.C3.inv[G.e3[G.s3[cell]]]]
    lifting = np.vectorize(lambda x: posL[int(x)])(lift_cells)
    Y = TwoCrossedModule(L2, M2, N, d2, d1, act_nm, act_nl, lifting, label=f"Δ({X.label})")
    iso_L = GroupHom(X.L, L2, np.array([posL[G.cell3(l, X.M.identity, N.identity)] for l in range(X.L.order)]))
    iso_M = GroupHom(X.M, M2, np.array([posM[G.cell2(m, N.identity)] for m in range(X.M.order)]))
    iso_N = GroupHom.identity(N)
    return DeltaResult(Y, iso_L, iso_M, iso_N, kL, kM)


def delta_roundtrip_checks(G):
    """Δ(Θ(X)) is a 2-crossed module and the explicit maps form a levelwise isomorphism."""
    X = G.base
    out = []
    D = delta_functor(G)
    Y = D.X
    bad = [c for c in verify_2xm(Y) if not c.ok]
    out.append(check("delta-axioms", "Δ(C) satisfies 2CM1–2CM5", not bad,
                     witness=bad and {"axiom": bad[0].id, "at": bad[0].witness}))
    fL, fM = D.iso_L.map, D.iso_M.map
    ok_iso = all(h.check() is None and h.is_bijective() for h in (D.iso_L, D.iso_M))
    out.append(check("delta-iso", "l ↦ (l,1,1), m ↦ (m,1), n ↦ n are group isomorphisms", ok_iso))
    ok = (Y.d2.map[fL] == fM[X.d2.map]).all() and (Y.d1.map[fM] == X.d1.map).all()
    out.append(check("delta-boundaries", "iso commutes with ∂₂ and ∂₁", bool(ok)))
    ok = (Y.act_nm.map[:, fM] == fM[X.act_nm.map]).all() and (Y.act_nl.map[:, fL] == fL[X.act_nl.map]).all()
    out.append(check("delta-actions", "iso commutes with the N-actions", bool(ok)))
    lhs = Y.lifting[fM[:, None], fM[None, :]]
    rhs = fL[X.lifting]
    w = _first_bad(lhs == rhs)
    out.append(check("delta-lifting", "{(m,1),(m′,1)} = ({m,m′},1,1)", w is None,
                     witness=w and {"m": X.M.name(w[0]), "m′": X.M.name(w[1])}))
    swapped = bool((lhs == fL[X.lifting.T]).all())
    out.append(Check("delta-lifting-swapped", "{(m,1),(m′,1)} = ({m′,m},1,1)", INFO,
                     detail="agrees" if swapped else "differs: the reconstructed lifting is {m,m′}, not {m′,m}"))
    return out, D
