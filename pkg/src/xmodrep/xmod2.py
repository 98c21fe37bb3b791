"""Crossed modules and 2-crossed modules: data, axiom checks, lifting search."""

from dataclasses import dataclass
import itertools

import numpy as np

from .groups import FiniteGroup, GroupAction, GroupError, GroupHom, m_action_on_l
from .report import check, Check, FAIL, INFO, PASS


class AxiomError(ValueError):
    pass


class SearchCapExceeded(RuntimeError):
    pass


def _first(mask):
    """Index tuple of the first False entry of a boolean array, or None."""
    bad = np.argwhere(~mask)
    return None if len(bad) == 0 else tuple(int(x) for x in bad[0])


def _witness(names, idx, groups):
    return {k: g.name(i) for k, i, g in zip(names, idx, groups)}


@dataclass(frozen=True, eq=False)
class CrossedModule:
    M: FiniteGroup
    N: FiniteGroup
    boundary: GroupHom
    action: GroupAction
    label: str = ""


def _structure_checks(prefix, hom, act):
    out = []
    err = hom.check()
    out.append(check(f"{prefix}-hom", "boundary is a group homomorphism", err is None,
                     witness=None if err is None else {"kind": err[0], "at": list(err[1])}))
    err = act.check()
    out.append(check(f"{prefix}-action", "left action by automorphisms", err is None,
                     witness=None if err is None else {"kind": err[0], "at": list(err[1])}))
    return out


def verify_crossed_module(X):
    """Per-axiom checks (hom, action, CM1, CM2) with first lexicographic witnesses."""
    M, N, d, a = X.M, X.N, X.boundary.map, X.action.map
    out = _structure_checks("cm", X.boundary, X.action)
    n = np.arange(N.order)[:, None]
    m = np.arange(M.order)[None, :]
    lhs = d[a[n, m]]
    rhs = N.mul[N.mul[n, d[m]], N.inv[n]]
    w = _first(lhs == rhs)
    out.append(check("CM1", "∂(ⁿm) = n·∂m·n⁻¹", w is None,
                     witness=w and _witness(("n", "m"), w, (N, M))))
    m1 = np.arange(M.order)[:, None]
    m2 = np.arange(M.order)[None, :]
    lhs = a[d[m1], m2]
    rhs = M.mul[M.mul[m1, m2], M.inv[m1]]
    w = _first(lhs == rhs)
    out.append(check("CM2", "^{∂m}m′ = m·m′·m⁻¹", w is None,
                     witness=w and _witness(("m", "m′"), w, (M, M))))
    return out


@dataclass(frozen=True, eq=False)
class TwoCrossedModule:
    L: FiniteGroup
    M: FiniteGroup
    N: FiniteGroup
    d2: GroupHom
    d1: GroupHom
    act_nm: GroupAction
    act_nl: GroupAction
    lifting: np.ndarray
    label: str = ""

    def __post_init__(self):
        lift = np.asarray(self.lifting, dtype=np.int64)
        if lift.shape != (self.M.order, self.M.order):
            raise GroupError(f"lifting table must be {self.M.order}×{self.M.order}, got {lift.shape}")
        if lift.min() < 0 or lift.max() >= self.L.order:
            raise GroupError("lifting entry out of range")
        lift.setflags(write=False)
        object.__setattr__(self, "lifting", lift)
        if self.d2.source is not self.L or self.d2.target is not self.M:
            raise GroupError("∂₂ must map L to M")
        if self.d1.source is not self.M or self.d1.target is not self.N:
            raise GroupError("∂₁ must map M to N")

    @property
    def act_ml(self):
        """ᵐl = {∂₂l, m}·l as an |M|×|L| table."""
        cached = self.__dict__.get("_act_ml")
        if cached is None:
            cached = m_action_on_l(self.L, self.M, self.d2, self.lifting)
            cached.setflags(write=False)
            object.__setattr__(self, "_act_ml", cached)
        return cached

    def lift(self, m, m2):
        return int(self.lifting[m, m2])

    def orders(self):
        return self.L.order, self.M.order, self.N.order

    def truncation(self):
        return CrossedModule(self.M, self.N, self.d1, self.act_nm, label=self.label + "/trunc")


def from_crossed_module(X, check_axioms=True):
    """The 2-crossed module 1 → M → N with trivial lifting."""
    if check_axioms:
        bad = [c for c in verify_crossed_module(X) if not c.ok]
        if bad:
            raise AxiomError(f"not a crossed module: {bad[0].id} fails at {bad[0].witness}")
    L = FiniteGroup.trivial()
    return TwoCrossedModule(
        L, X.M, X.N,
        GroupHom.trivial(L, X.M), X.boundary, X.action, GroupAction.trivial(X.N, L),
        np.zeros((X.M.order, X.M.order), dtype=np.int64), label=X.label)


def verify_2xm(X, full=False):
    """One check per axiom; ``full`` records every counterexample count as well."""
    L, M, N = X.L, X.M, X.N
    d2, d1 = X.d2.map, X.d1.map
    anm, anl, lift, aml = X.act_nm.map, X.act_nl.map, X.lifting, X.act_ml
    out = []
    out += _structure_checks("d2", X.d2, X.act_nl)[:1]
    out += _structure_checks("d1", X.d1, X.act_nm)[:1]
    err = X.act_nm.check()
    out.append(check("act-nm", "N acts on M by automorphisms", err is None,
                     witness=None if err is None else {"kind": err[0], "at": list(err[1])}))
    err = X.act_nl.check()
    out.append(check("act-nl", "N acts on L by automorphisms", err is None,
                     witness=None if err is None else {"kind": err[0], "at": list(err[1])}))
    structural_ok = all(c.ok for c in out)

    def add(id, anchor, mask, names, groups):
        w = _first(mask)
        c = check(id, anchor, w is None, witness=w and _witness(names, w, groups),
                  visited=int(mask.size))
        if full and w is not None:
            c.detail = f"{int((~mask).sum())} counterexamples"
        out.append(c)

    l = np.arange(L.order)
    add("d1d2", "∂₁∂₂l = 1", d1[d2[l]] == N.identity, ("l",), (L,))

    n_ = np.arange(N.order)[:, None]
    l_ = np.arange(L.order)[None, :]
    add("d2-equivariant", "∂₂(ⁿl) = ⁿ(∂₂l)", d2[anl[n_, l_]] == anm[n_, d2[l_]], ("n", "l"), (N, L))
    m_ = np.arange(M.order)[None, :]
    add("d1-equivariant", "∂₁(ⁿm) = n·∂₁m·n⁻¹", d1[anm[n_, m_]] == N.mul[N.mul[n_, d1[m_]], N.inv[n_]],
        ("n", "m"), (N, M))

    a = np.arange(M.order)[:, None]
    b = np.arange(M.order)[None, :]
    peiffer = M.mul[M.mul[M.mul[anm[d1[a], b], a], M.inv[b]], M.inv[a]]
    add("2CM1", "∂₂{m,m′} = (^{∂₁m}m′)·m·m′⁻¹·m⁻¹", d2[lift] == peiffer, ("m", "m′"), (M, M))

    la = np.arange(L.order)[:, None]
    lb = np.arange(L.order)[None, :]
    comm = L.mul[L.mul[L.mul[lb, la], L.inv[lb]], L.inv[la]]        # [l′, l]
    add("2CM2", "{∂₂l, ∂₂l′} = [l′, l]", lift[d2[la], d2[lb]] == comm, ("l", "l′"), (L, L))

    A = np.arange(M.order)[:, None, None]
    B = np.arange(M.order)[None, :, None]
    C = np.arange(M.order)[None, None, :]
    lhs = lift[M.mul[A, B], C]
    conj = M.mul[M.mul[B, C], M.inv[B]]
    rhs = L.mul[anl[d1[A], lift[B, C]], lift[A, conj]]
    add("2CM3i", "{mm′, m″} = ^{∂₁m}{m′,m″}·{m, m′m″m′⁻¹}", lhs == rhs, ("m", "m′", "m″"), (M, M, M))
    lhs = lift[A, M.mul[B, C]]
    act = M.mul[M.mul[A, B], M.inv[A]]
    rhs = L.mul[lift[A, B], aml[act, lift[A, C]]]
    add("2CM3ii", "{m, m′m″} = {m,m′}·^{mm′m⁻¹}{m,m″}", lhs == rhs, ("m", "m′", "m″"), (M, M, M))

    m1 = np.arange(M.order)[:, None]
    l1 = np.arange(L.order)[None, :]
    lhs = L.mul[lift[m1, d2[l1]], lift[d2[l1], m1]]
    rhs = L.mul[anl[d1[m1], l1], L.inv[l1]]
    add("2CM4", "{m, ∂₂l}·{∂₂l, m} = ^{∂₁m}l·l⁻¹", lhs == rhs, ("m", "l"), (M, L))

    n3 = np.arange(N.order)[:, None, None]
    m3 = np.arange(M.order)[None, :, None]
    k3 = np.arange(M.order)[None, None, :]
    lhs = anl[n3, lift[m3, k3]]
    rhs = lift[anm[n3, m3], anm[n3, k3]]
    add("2CM5", "ⁿ{m,m′} = {ⁿm, ⁿm′}", lhs == rhs, ("n", "m", "m′"), (N, M, M))

    if not structural_ok:
        for c in out[4:]:
            c.detail = (c.detail + "; " if c.detail else "") + "structure maps invalid"
    return out


def truncation_checks(X):
    """CM1 must hold for (M, N, ∂₁); CM2 is informational (pre-crossed module)."""
    cs = verify_crossed_module(X.truncation())
    out = []
    for c in cs:
        if c.id == "CM2":
            c.result = INFO
            c.detail = "holds" if c.witness is None else "fails: truncation is only pre-crossed"
        c.id = "truncation-" + c.id
        out.append(c)
    return out


def is_valid(X):
    return all(c.ok for c in verify_2xm(X))


# ---------------------------------------------------------------------------
# Peiffer lifting search

def search_peiffer_liftings(L, M, N, d2, d1, act_nm, act_nl, limit=16, cap=200_000, label=""):
    """Enumerate liftings satisfying every axiom, by branch-and-propagate.

    Entries are restricted to the ∂₂-fibre required by 2CM1 and seeded by
    2CM2; after each choice the product rules 2CM3(i)/(ii) and N-equivariance
    fill whatever they force, and conflicts prune the branch.  Complete tables
    are verified in full before being returned.
    """
    nM = M.order
    a = np.arange(nM)[:, None]
    b = np.arange(nM)[None, :]
    peiffer = M.mul[M.mul[M.mul[act_nm.map[d1.map[a], b], a], M.inv[b]], M.inv[a]]
    fibres = {}
    for l in range(L.order):
        fibres.setdefault(int(d2.map[l]), []).append(l)

    lift = np.full((nM, nM), -1, dtype=np.int64)
    lift[M.identity, :] = L.identity       # forced by 2CM3 with trivial arguments
    lift[:, M.identity] = L.identity
    for x in range(L.order):
        for y in range(L.order):
            i, j = int(d2.map[x]), int(d2.map[y])
            v = L.comm(y, x)
            if lift[i, j] >= 0 and lift[i, j] != v:
                return []
            lift[i, j] = v
    ctx = _Propagator(L, M, N, d2, d1, act_nm, act_nl, peiffer)
    found = []
    visited = [0]

    def dfs(table):
        visited[0] += 1
        if visited[0] > cap:
            raise SearchCapExceeded(f"lifting search visited more than {cap} nodes")
        if not ctx.propagate(table):
            return
        unknown = np.argwhere(table < 0)
        if len(unknown) == 0:
            X = TwoCrossedModule(L, M, N, d2, d1, act_nm, act_nl, table.copy(), label=label)
            if is_valid(X):
                found.append(X)
            return
        i, j = (int(v) for v in unknown[0])
        for v in fibres.get(int(peiffer[i, j]), []):
            t = table.copy()
            t[i, j] = v
            dfs(t)
            if len(found) >= limit:
                return

    dfs(lift)
    return found


class _Propagator:
    def __init__(self, L, M, N, d2, d1, act_nm, act_nl, peiffer):
        self.L, self.M, self.N = L, M, N
        self.d2, self.d1 = d2.map, d1.map
        self.anm, self.anl = act_nm.map, act_nl.map
        self.peiffer = peiffer
        n = M.order
        A = np.arange(n)[:, None, None]
        B = np.arange(n)[None, :, None]
        C = np.arange(n)[None, None, :]
        self.shape3 = (n, n, n)
        self.AB = np.broadcast_to(M.mul[A, B], self.shape3)
        self.BC = np.broadcast_to(M.mul[B, C], self.shape3)
        self.BCB = np.broadcast_to(M.mul[M.mul[B, C], M.inv[B]], self.shape3)
        self.ABA = np.broadcast_to(M.mul[M.mul[A, B], M.inv[A]], self.shape3)
        self.A = np.broadcast_to(A, self.shape3)
        self.B = np.broadcast_to(B, self.shape3)
        self.C = np.broadcast_to(C, self.shape3)

    def _assign(self, table, rows, cols, vals):
        """Write forced values; False on a conflict with known or 2CM1-forbidden values."""
        if len(vals) == 0:
            return True, False
        cur = table[rows, cols]
        if (cur[cur >= 0] != vals[cur >= 0]).any():
            return False, False
        if (self.d2[vals] != self.peiffer[rows, cols]).any():
            return False, False
        new = cur < 0
        if not new.any():
            return True, False
        # the same cell may be forced twice in one sweep
        r, c, v = rows[new], cols[new], vals[new]
        key = r * table.shape[1] + c
        order = np.argsort(key, kind="stable")
        key, v = key[order], v[order]
        same = key[1:] == key[:-1]
        if (v[1:][same] != v[:-1][same]).any():
            return False, False
        table[r[order], c[order]] = v
        return True, True

    def propagate(self, table):
        L, N = self.L, self.N
        A, B, C = self.A, self.B, self.C
        while True:
            changed = False
            # 2CM3(ii): {a, bc} = {a,b} · ^{aba⁻¹}{a,c}, with ᵐl = {∂₂l, m}·l
            ab_, ac_ = table[A, B], table[A, C]
            ok = (ab_ >= 0) & (ac_ >= 0)
            inner = np.where(ok, table[self.d2[np.maximum(ac_, 0)], self.ABA], -1)
            ok &= inner >= 0
            vals = L.mul[ab_[ok], L.mul[inner[ok], ac_[ok]]]
            good, ch = self._assign(table, A[ok], self.BC[ok], vals)
            if not good:
                return False
            changed |= ch
            # 2CM3(i): {ab, c} = ^{∂₁a}{b,c} · {a, bcb⁻¹}
            bc_, abc_ = table[B, C], table[A, self.BCB]
            ok = (bc_ >= 0) & (abc_ >= 0)
            vals = L.mul[self.anl[self.d1[A[ok]], bc_[ok]], abc_[ok]]
            good, ch = self._assign(table, self.AB[ok], C[ok], vals)
            if not good:
                return False
            changed |= ch
            # 2CM5: {ⁿa, ⁿb} = ⁿ{a,b}
            kn = np.argwhere(table >= 0)
            if len(kn):
                n = np.arange(N.order)[:, None]
                r = self.anm[n, kn[None, :, 0]].ravel()
                c = self.anm[n, kn[None, :, 1]].ravel()
                vals = self.anl[n, table[kn[:, 0], kn[:, 1]][None, :]].ravel()
                good, ch = self._assign(table, r, c, vals)
                if not good:
                    return False
                changed |= ch
            if not changed:
                return True
