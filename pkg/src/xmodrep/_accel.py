"""Table kernels for exhaustive axiom loops and modular row reduction.

Every kernel has a numba-compiled form and a pure numpy form with the same
signature and the same (lexicographically first) witness.  Setting the
environment variable ``XMODREP_PURE_NUMPY=1`` before import selects the numpy
forms; ``use_numba()`` reports which family is active.
"""

import os

import numpy as np

NO_WITNESS = -1

_FORCE_NUMPY = os.environ.get("XMODREP_PURE_NUMPY", "").strip() not in ("", "0", "false", "no")

try:
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def use_numba():
    return HAVE_NUMBA


def _none(k):
    return np.full(k, NO_WITNESS, dtype=np.int64)


# ---------------------------------------------------------------------------
# numpy forms

def assoc_witness_np(mul):
    n = mul.shape[0]
    for a in range(n):
        left = mul[mul[a]]            # left[b, c] = (ab)c
        right = mul[a][mul]           # right[b, c] = a(bc)
        bad = np.argwhere(left != right)
        if len(bad):
            return np.array([a, bad[0, 0], bad[0, 1]], dtype=np.int64)
    return _none(3)


def hom_witness_np(mul_s, mul_t, f):
    lhs = f[mul_s]
    rhs = mul_t[f[:, None], f[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return np.array([bad[0, 0], bad[0, 1]], dtype=np.int64)
    return _none(2)


def partial_assoc_witness_np(comp, after_ptr, after_idx):
    """comp[g, f] is "g after f" or -1; checks h(gf) = (hg)f on composable triples."""
    n = comp.shape[0]
    for f in range(n):
        gs = after_idx[after_ptr[f]:after_ptr[f + 1]]
        for g in gs:
            hs = after_idx[after_ptr[g]:after_ptr[g + 1]]
            if len(hs) == 0:
                continue
            gf = comp[g, f]
            lhs = comp[hs, gf]
            rhs = comp[comp[hs, g], f]
            bad = np.nonzero((lhs != rhs) | (lhs < 0))[0]
            if len(bad):
                return np.array([f, g, hs[bad[0]]], dtype=np.int64)
    return _none(3)


def interchange_witness_np(comp_a, comp_b, a_ptr, a_idx, b_ptr, b_idx):
    """Middle-four interchange between two partial compositions.

    For x1, y1 = b-composable after x1, x2 a-composable after y1... the
    quadruple (x1, x, x', x1') with x after x1 in b, x' after x in a, x1'
    after x1 in a must satisfy
        b(a(x', x), a(x1', x1)) == a(b(x', x1'), b(x, x1)).
    """
    n = comp_a.shape[0]
    for x1 in range(n):
        xs = b_idx[b_ptr[x1]:b_ptr[x1 + 1]]
        x1ps = a_idx[a_ptr[x1]:a_ptr[x1 + 1]]
        if len(x1ps) == 0:
            continue
        for x in xs:
            xps = a_idx[a_ptr[x]:a_ptr[x + 1]]
            if len(xps) == 0:
                continue
            top = comp_a[xps, x]                      # a(x', x)
            bot = comp_a[x1ps, x1]                    # a(x1', x1)
            lhs = comp_b[top[:, None], bot[None, :]]
            inner = comp_b[xps[:, None], x1ps[None, :]]
            rhs = comp_a[inner, comp_b[x, x1]]
            bad = np.argwhere((lhs != rhs) | (lhs < 0) | (inner < 0))
            if len(bad):
                i, j = bad[0]
                return np.array([x1, x, xps[i], x1ps[j]], dtype=np.int64)
    return _none(4)


def product_interchange_witness_np(mul, comp, ptr, idx):
    """(b∘a)·(d∘c) == (b·d)∘(a·c) for a→b and c→d composable."""
    n = mul.shape[0]
    for a in range(n):
        bs = idx[ptr[a]:ptr[a + 1]]
        for b in bs:
            ba = comp[b, a]
            for c in range(n):
                ds = idx[ptr[c]:ptr[c + 1]]
                if len(ds) == 0:
                    continue
                lhs = mul[ba, comp[ds, c]]
                rhs = comp[mul[b, ds], mul[a, c]]
                bad = np.nonzero((lhs != rhs) | (rhs < 0))[0]
                if len(bad):
                    return np.array([a, b, c, ds[bad[0]]], dtype=np.int64)
    return _none(4)


def rref_modp_np(a, p):
    """In-place reduced row echelon form mod p; returns (rank, pivot columns)."""
    rows, cols = a.shape
    pivots = np.full(min(rows, cols), -1, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots[r] = c
        r += 1
    return r, pivots[:r]


# ---------------------------------------------------------------------------
# numba forms

if HAVE_NUMBA:

    @njit(cache=True)
    def assoc_witness_nb(mul):
        n = mul.shape[0]
        out = np.full(3, -1, dtype=np.int64)
        for a in range(n):
            for b in range(n):
                ab = mul[a, b]
                for c in range(n):
                    if mul[ab, c] != mul[a, mul[b, c]]:
                        out[0] = a
                        out[1] = b
                        out[2] = c
                        return out
        return out

    @njit(cache=True)
    def hom_witness_nb(mul_s, mul_t, f):
        n = mul_s.shape[0]
        out = np.full(2, -1, dtype=np.int64)
        for a in range(n):
            for b in range(n):
                if f[mul_s[a, b]] != mul_t[f[a], f[b]]:
                    out[0] = a
                    out[1] = b
                    return out
        return out

    @njit(cache=True)
    def partial_assoc_witness_nb(comp, after_ptr, after_idx):
        n = comp.shape[0]
        out = np.full(3, -1, dtype=np.int64)
        for f in range(n):
            for gi in range(after_ptr[f], after_ptr[f + 1]):
                g = after_idx[gi]
                gf = comp[g, f]
                for hi in range(after_ptr[g], after_ptr[g + 1]):
                    h = after_idx[hi]
                    lhs = comp[h, gf]
                    hg = comp[h, g]
                    rhs = comp[hg, f]
                    if lhs < 0 or lhs != rhs:
                        out[0] = f
                        out[1] = g
                        out[2] = h
                        return out
        return out

    @njit(cache=True)
    def interchange_witness_nb(comp_a, comp_b, a_ptr, a_idx, b_ptr, b_idx):
        n = comp_a.shape[0]
        out = np.full(4, -1, dtype=np.int64)
        for x1 in range(n):
            for xi in range(b_ptr[x1], b_ptr[x1 + 1]):
                x = b_idx[xi]
                xx1 = comp_b[x, x1]
                for pi in range(a_ptr[x], a_ptr[x + 1]):
                    xp = a_idx[pi]
                    top = comp_a[xp, x]
                    for qi in range(a_ptr[x1], a_ptr[x1 + 1]):
                        x1p = a_idx[qi]
                        bot = comp_a[x1p, x1]
                        lhs = comp_b[top, bot]
                        inner = comp_b[xp, x1p]
                        bad = lhs < 0 or inner < 0
                        if not bad:
                            bad = lhs != comp_a[inner, xx1]
                        if bad:
                            out[0] = x1
                            out[1] = x
                            out[2] = xp
                            out[3] = x1p
                            return out
        return out

    @njit(cache=True)
    def product_interchange_witness_nb(mul, comp, ptr, idx):
        n = mul.shape[0]
        out = np.full(4, -1, dtype=np.int64)
        for a in range(n):
            for bi in range(ptr[a], ptr[a + 1]):
                b = idx[bi]
                ba = comp[b, a]
                for c in range(n):
                    for di in range(ptr[c], ptr[c + 1]):
                        d = idx[di]
                        rhs = comp[mul[b, d], mul[a, c]]
                        if rhs < 0 or mul[ba, comp[d, c]] != rhs:
                            out[0] = a
                            out[1] = b
                            out[2] = c
                            out[3] = d
                            return out
        return out

    @njit(cache=True)
    def _inv_modp(x, p):
        result = 1
        base = x % p
        e = p - 2
        while e > 0:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    @njit(cache=True)
    def rref_modp_nb(a, p):
        rows, cols = a.shape
        pivots = np.full(min(rows, cols), -1, dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            k = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    k = i
                    break
            if k < 0:
                continue
            if k != r:
                for j in range(cols):
                    t = a[r, j]
                    a[r, j] = a[k, j]
                    a[k, j] = t
            inv = _inv_modp(a[r, c], p)
            for j in range(cols):
                a[r, j] = (a[r, j] * inv) % p
            for i in range(rows):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(c, cols):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            pivots[r] = c
            r += 1
        return r, pivots[:r]


def _pick(name):
    if HAVE_NUMBA:
        return globals()[name + "_nb"]
    return globals()[name + "_np"]


assoc_witness = _pick("assoc_witness")
hom_witness = _pick("hom_witness")
partial_assoc_witness = _pick("partial_assoc_witness")
interchange_witness = _pick("interchange_witness")
product_interchange_witness = _pick("product_interchange_witness")


def rref_modp(a, p):
    """Row-reduce an int64 matrix over F_p in place."""
    if HAVE_NUMBA:
        rank, piv = rref_modp_nb(a, p)
        return int(rank), piv
    return rref_modp_np(a, p)


def csr_after(comp):
    """Adjacency of a partial composition table: row f lists g with comp[g, f] >= 0."""
    ok = comp.T >= 0
    counts = ok.sum(axis=1)
    ptr = np.zeros(comp.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    idx = np.nonzero(ok)[1].astype(np.int64)
    return ptr, idx
