"""Finite groups as multiplication tables, homomorphisms, actions, semidirect products."""

from dataclasses import dataclass, field
import itertools
import re

import numpy as np

from . import _accel

DEFAULT_ORDER_CAP = 512


class GroupError(ValueError):
    """Raised when table data does not describe a group, hom or action."""


class OrderCapExceeded(GroupError):
    pass


def _as_table(rows):
    t = np.asarray(rows, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise GroupError(f"multiplication table must be square, got shape {t.shape}")
    return t


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    identity: int
    inv: np.ndarray
    names: tuple = field(default=None)
    label: str = ""

    @property
    def order(self):
        return self.mul.shape[0]

    def __len__(self):
        return self.mul.shape[0]

    def __repr__(self):
        return f"FiniteGroup({self.label or '?'}, order={self.order})"

    # -- construction -------------------------------------------------------

    @classmethod
    def from_table(cls, table, identity=None, names=None, label="", cap=DEFAULT_ORDER_CAP, check=True):
        mul = _as_table(table)
        n = mul.shape[0]
        if n > cap:
            raise OrderCapExceeded(f"group order {n} exceeds cap {cap}")
        if n == 0:
            raise GroupError("empty group")
        if mul.min() < 0 or mul.max() >= n:
            raise GroupError("table entry out of range")
        if identity is None:
            hits = [e for e in range(n) if np.array_equal(mul[e], np.arange(n))]
            if not hits:
                raise GroupError("no two-sided identity")
            identity = hits[0]
        identity = int(identity)
        ar = np.arange(n)
        if not (np.array_equal(mul[identity], ar) and np.array_equal(mul[:, identity], ar)):
            raise GroupError(f"element {identity} is not a two-sided identity")
        inv = np.full(n, -1, dtype=np.int64)
        for g in range(n):
            hit = np.nonzero(mul[g] == identity)[0]
            if len(hit) == 0 or mul[hit[0], g] != identity:
                raise GroupError(f"element {g} has no inverse")
            inv[g] = hit[0]
        if check:
            w = _accel.assoc_witness(np.ascontiguousarray(mul))
            if w[0] >= 0:
                raise GroupError(f"table is not associative at {tuple(int(x) for x in w)}")
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != n:
                raise GroupError("names length does not match order")
        mul.setflags(write=False)
        inv.setflags(write=False)
        return cls(mul, identity, inv, names, label)

    @classmethod
    def trivial(cls, label="1"):
        return cls.from_table([[0]], 0, names=["1"], label=label)

    @classmethod
    def cyclic(cls, n, label=None):
        ar = np.arange(n)
        table = (ar[:, None] + ar[None, :]) % n
        return cls.from_table(table, 0, names=[str(i) for i in range(n)], label=label or f"Z/{n}", check=False)

    @classmethod
    def from_perm_gens(cls, gens, degree, label="", cap=DEFAULT_ORDER_CAP):
        perms = [parse_perm(g, degree) if isinstance(g, str) else tuple(g) for g in gens]
        elements, index = closure(perms, degree, cap)
        n = len(elements)
        arr = np.array(elements, dtype=np.int64)
        # (a*b)(x) = a(b(x)): apply b first
        prod = arr[np.arange(n)[:, None, None], arr[None, :, :]]    # prod[a, b, x] = a[b[x]]
        table = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                table[a, b] = index[tuple(prod[a, b])]
        names = [format_perm(p) for p in elements]
        g = cls.from_table(table, 0, names=names, label=label, cap=cap, check=False)
        object.__setattr__(g, "_perms", arr)
        return g

    # -- arithmetic ---------------------------------------------------------

    def multiply(self, a, b):
        return int(self.mul[a, b])

    def inverse(self, a):
        return int(self.inv[a])

    def prod(self, *xs):
        r = self.identity
        for x in xs:
            r = int(self.mul[r, x])
        return r

    def conj(self, a, b):
        """a b a⁻¹"""
        return int(self.mul[self.mul[a, b], self.inv[a]])

    def comm(self, a, b):
        """[a, b] = a b a⁻¹ b⁻¹"""
        return int(self.mul[self.mul[a, b], self.mul[self.inv[a], self.inv[b]]])

    def element_order(self, g):
        k, x = 1, g
        while x != self.identity:
            x = int(self.mul[x, g])
            k += 1
        return k

    def name(self, g):
        return self.names[g] if self.names else str(g)

    def index_of(self, name):
        if isinstance(name, (int, np.integer)):
            g = int(name)
            if not 0 <= g < self.order:
                raise GroupError(f"element index {g} out of range for {self!r}")
            return g
        if self.names and name in self.names:
            return self.names.index(name)
        perms = getattr(self, "_perms", None)
        if perms is not None:
            p = np.array(parse_perm(name, perms.shape[1]))
            hit = np.nonzero((perms == p).all(axis=1))[0]
            if len(hit):
                return int(hit[0])
        raise GroupError(f"unknown element {name!r} of {self!r}")

    def perm(self, g):
        perms = getattr(self, "_perms", None)
        return None if perms is None else tuple(int(x) for x in perms[g])

    def is_abelian(self):
        return bool(np.array_equal(self.mul, self.mul.T))

    def generators(self):
        """A small generating set, found greedily by largest new subgroup."""
        gens = []
        span = {self.identity}
        while len(span) < self.order:
            best, best_span = None, None
            for g in range(self.order):
                if g in span:
                    continue
                s = self.subgroup_closure(gens + [g])
                if best_span is None or len(s) > len(best_span):
                    best, best_span = g, s
            gens.append(best)
            span = best_span
        return gens

    def subgroup_closure(self, gens):
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def check(self):
        """First failing group axiom as (name, witness) or None."""
        w = _accel.assoc_witness(np.ascontiguousarray(self.mul))
        if w[0] >= 0:
            return "associativity", tuple(int(x) for x in w)
        return None


# ---------------------------------------------------------------------------
# permutations

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_perm(text, degree):
    """Cycle notation on points 1..degree, e.g. "(1 2)(3 4)"; "()" is the identity."""
    img = list(range(degree))
    text = text.strip()
    if text not in ("", "()", "1", "e"):
        rest = _CYCLE.sub("", text).strip()
        if rest:
            raise GroupError(f"bad permutation {text!r}")
        # cycles compose right to left like the group product
        for cyc in reversed(_CYCLE.findall(text)):
            pts = [int(x) - 1 for x in cyc.replace(",", " ").split()]
            if any(not 0 <= p < degree for p in pts) or len(set(pts)) != len(pts):
                raise GroupError(f"bad cycle ({cyc}) for degree {degree}")
            step = {pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))}
            img = [step.get(x, x) for x in img]
    return tuple(img)


def format_perm(p):
    seen, out = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(x + 1))
            x = p[x]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"


def closure(perms, degree, cap=DEFAULT_ORDER_CAP):
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in perms:
                y = tuple(x[g[i]] for i in range(degree))
                if y not in index:
                    if len(elements) >= cap:
                        raise OrderCapExceeded(f"permutation group exceeds order cap {cap}")
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    return elements, index


# ---------------------------------------------------------------------------
# homomorphisms and actions

@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        if m.shape != (self.source.order,):
            raise GroupError("hom table length does not match source order")
        if m.min() < 0 or m.max() >= self.target.order:
            raise GroupError("hom image out of range")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    def __call__(self, g):
        return int(self.map[g])

    def check(self):
        if self.map[self.source.identity] != self.target.identity:
            return "identity", (self.source.identity,)
        w = _accel.hom_witness(self.source.mul, self.target.mul, self.map)
        if w[0] >= 0:
            return "multiplicative", (int(w[0]), int(w[1]))
        return None

    def compose(self, other):
        """self ∘ other"""
        return GroupHom(other.source, self.target, self.map[other.map])

    def kernel(self):
        return [int(g) for g in np.nonzero(self.map == self.target.identity)[0]]

    def is_bijective(self):
        return self.source.order == self.target.order and len(set(self.map.tolist())) == self.source.order

    @classmethod
    def trivial(cls, source, target):
        return cls(source, target, np.full(source.order, target.identity, dtype=np.int64))

    @classmethod
    def identity(cls, group):
        return cls(group, group, np.arange(group.order))

    @classmethod
    def from_images(cls, source, target, images):
        """Extend {generator: image} to a homomorphism; raises if inconsistent."""
        table = extend_hom(source, target, dict(images))
        return cls(source, target, table)


def extend_hom(source, target, images):
    """BFS extension of generator images; checks well-definedness and multiplicativity."""
    gens = list(images)
    table = np.full(source.order, -1, dtype=np.int64)
    table[source.identity] = target.identity
    frontier = [source.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(source.mul[x, g])
                val = int(target.mul[table[x], images[g]])
                if table[y] < 0:
                    table[y] = val
                    nxt.append(y)
                elif table[y] != val:
                    raise GroupError(f"generator images do not define a homomorphism (at {source.name(y)})")
        frontier = nxt
    if (table < 0).any():
        raise GroupError("given elements do not generate the source group")
    w = _accel.hom_witness(source.mul, target.mul, table)
    if w[0] >= 0:
        raise GroupError(f"generator images do not define a homomorphism at {tuple(int(v) for v in w)}")
    return table


@dataclass(frozen=True, eq=False)
class GroupAction:
    """Left action of `actor` on `acted` by automorphisms: table[n, m] = ⁿm."""

    actor: FiniteGroup
    acted: FiniteGroup
    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        if m.shape != (self.actor.order, self.acted.order):
            raise GroupError(f"action table shape {m.shape} does not match group orders")
        if m.min() < 0 or m.max() >= self.acted.order:
            raise GroupError("action image out of range")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    def __call__(self, n, m):
        return int(self.map[n, m])

    def check(self):
        """First failing action axiom as (name, witness) or None."""
        N, M, t = self.actor, self.acted, self.map
        bad = np.nonzero(t[N.identity] != np.arange(M.order))[0]
        if len(bad):
            return "unit", (N.identity, int(bad[0]))
        comp = t[N.mul]                       # comp[n, n', m] = ^(nn')m
        nested = t[np.arange(N.order)[:, None, None], t[None, :, :]]   # ⁿ(^(n')m)
        bad = np.argwhere(comp != nested)
        if len(bad):
            return "compatibility", tuple(int(x) for x in bad[0])
        for n in range(N.order):
            w = _accel.hom_witness(M.mul, M.mul, np.ascontiguousarray(t[n]))
            if w[0] >= 0:
                return "automorphism", (n, int(w[0]), int(w[1]))
            if len(set(t[n].tolist())) != M.order:
                return "automorphism", (n,)
        return None

    def is_trivial(self):
        return bool((self.map == np.arange(self.acted.order)[None, :]).all())

    @classmethod
    def trivial(cls, actor, acted):
        return cls(actor, acted, np.tile(np.arange(acted.order), (actor.order, 1)))

    @classmethod
    def conjugation(cls, actor, acted, embedding):
        """ⁿm = ι⁻¹(n ι(m) n⁻¹) for an injective hom ι: acted → actor with normal image."""
        emb = embedding.map
        back = {int(v): i for i, v in enumerate(emb)}
        if len(back) != acted.order:
            raise GroupError("conjugation action needs an injective embedding")
        table = np.empty((actor.order, acted.order), dtype=np.int64)
        for n in range(actor.order):
            for m in range(acted.order):
                c = actor.conj(n, int(emb[m]))
                if c not in back:
                    raise GroupError("image of embedding is not normal")
                table[n, m] = back[c]
        return cls(actor, acted, table)

    @classmethod
    def from_generator_automorphisms(cls, actor, acted, autos):
        """autos: {actor generator: automorphism table of acted}; extended over actor."""
        table = np.full((actor.order, acted.order), -1, dtype=np.int64)
        table[actor.identity] = np.arange(acted.order)
        gens = list(autos)
        frontier = [actor.identity]
        done = {actor.identity}
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(actor.mul[x, g])
                    row = table[x][np.asarray(autos[g])]        # ^(xg)m = ˣ(^g m)
                    if y not in done:
                        table[y] = row
                        done.add(y)
                        nxt.append(y)
                    elif not np.array_equal(table[y], row):
                        raise GroupError("generator automorphisms do not define an action")
            frontier = nxt
        if len(done) != actor.order:
            raise GroupError("action generators do not generate the acting group")
        act = cls(actor, acted, table)
        err = act.check()
        if err:
            raise GroupError(f"not an action: {err}")
        return act


# ---------------------------------------------------------------------------
# semidirect products

@dataclass(frozen=True, eq=False)
class ProductIndex:
    """Mixed-radix encoding of tuples; the last coordinate varies fastest."""

    shape: tuple

    def encode(self, *coords):
        idx = 0
        for c, s in zip(coords, self.shape):
            idx = idx * s + int(c)
        return idx

    def decode(self, idx):
        out = []
        for s in reversed(self.shape):
            out.append(int(idx % s))
            idx //= s
        return tuple(reversed(out))

    def grid(self):
        return [a.ravel() for a in np.meshgrid(*[np.arange(s) for s in self.shape], indexing="ij")]


def direct_product(M, N, label=""):
    return semidirect2(M, N, GroupAction.trivial(N, M), label=label)


def semidirect2(M, N, act, label=""):
    """M ⋊ N on pairs (m, n) with (m,n)(m',n') = (m·ⁿm', nn')."""
    err = act.check()
    if err:
        raise GroupError(f"action invariant violated: {err}")
    idx = ProductIndex((M.order, N.order))
    m, n = idx.grid()
    m2 = M.mul[m[:, None], act.map[n[:, None], m[None, :]]]
    n2 = N.mul[n[:, None], n[None, :]]
    table = m2 * N.order + n2
    ident = idx.encode(M.identity, N.identity)
    names = [f"({M.name(a)},{N.name(b)})" for a, b in zip(m, n)]
    G = FiniteGroup.from_table(table, ident, names=names, label=label or f"{M.label}⋊{N.label}",
                               cap=max(DEFAULT_ORDER_CAP, len(m)), check=False)
    object.__setattr__(G, "_index", idx)
    return G


def m_action_on_l(L, M, d2, lifting):
    """ᵐl := {∂₂l, m}·l as an |M|×|L| table."""
    lift = np.asarray(lifting)
    return L.mul[lift[d2.map[None, :], np.arange(M.order)[:, None]], np.arange(L.order)[None, :]]


def semidirect3(L, M, N, act_nm, act_nl, lifting, d2, label="", check=True):
    """L ⋊ M ⋊ N on triples with (l,m,n)(l',m',n') = (l·ᵐ(ⁿl'), m·ⁿm', nn')."""
    aml = m_action_on_l(L, M, d2, lifting)
    idx = ProductIndex((L.order, M.order, N.order))
    l, m, n = idx.grid()
    nl2 = act_nl.map[n[:, None], l[None, :]]               # ⁿl'
    l3 = L.mul[l[:, None], aml[m[:, None], nl2]]
    m3 = M.mul[m[:, None], act_nm.map[n[:, None], m[None, :]]]
    n3 = N.mul[n[:, None], n[None, :]]
    table = (l3 * M.order + m3) * N.order + n3
    ident = idx.encode(L.identity, M.identity, N.identity)
    names = [f"({L.name(a)},{M.name(b)},{N.name(c)})" for a, b, c in zip(l, m, n)]
    try:
        G = FiniteGroup.from_table(table, ident, names=names, label=label or "L⋊M⋊N",
                                   cap=max(DEFAULT_ORDER_CAP, len(l)), check=check)
    except GroupError as exc:
        raise GroupError(f"triple product is not a group ({exc}); the M-action on L "
                         "derived from the lifting is inconsistent") from exc
    object.__setattr__(G, "_index", idx)
    return G


# ---------------------------------------------------------------------------
# isomorphism oracle

def find_isomorphism(G, H):
    """Brute-force isomorphism G → H by backtracking over generator images, or None."""
    if G.order != H.order:
        return None
    gens = G.generators()
    ordH = [H.element_order(h) for h in range(H.order)]
    cands = [[h for h in range(H.order) if ordH[h] == G.element_order(g)] for g in gens]
    for images in itertools.product(*cands):
        try:
            table = extend_hom(G, H, dict(zip(gens, images)))
        except GroupError:
            continue
        if len(set(table.tolist())) == G.order:
            return GroupHom(G, H, table)
    return None
