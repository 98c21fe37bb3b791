import json
import os
import subprocess
import sys

import numpy as np
import pytest

from xmodrep import _accel
from xmodrep.fixtures import load_bundled
from xmodrep.gray import theta

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not active")


def both(name, *args):
    fresh = lambda: [a.copy() if isinstance(a, np.ndarray) else a for a in args]
    a = getattr(_accel, name + "_np")(*fresh())
    b = getattr(_accel, name + "_nb")(*fresh())
    return a, b


def broken_table(n, rng):
    t = np.add.outer(np.arange(n), np.arange(n)) % n
    i, j = rng.integers(0, n, 2)
    t[i, j] = (t[i, j] + 1) % n
    return t.astype(np.int64)


@needs_numba
def test_group_kernels_agree():
    rng = np.random.default_rng(4)
    for n in (2, 5, 9):
        t = broken_table(n, rng)
        a, b = both("assoc_witness", t)
        assert a.tolist() == b.tolist()
        f = rng.integers(0, n, n).astype(np.int64)
        a, b = both("hom_witness", t, t, f)
        assert a.tolist() == b.tolist()


@needs_numba
def test_composition_kernels_agree_on_corrupted_tables():
    G = theta(load_bundled("z2-lift").module)
    rng = np.random.default_rng(9)
    for trial in range(5):
        comp3 = G.comp3.copy()
        if trial:
            ok = np.argwhere(comp3 >= 0)
            i, j = ok[rng.integers(len(ok))]
            comp3[i, j] = (comp3[i, j] + 1) % G.C3.order
        ptr, idx = _accel.csr_after(np.ascontiguousarray(comp3))
        bptr, bidx = _accel.csr_after(np.ascontiguousarray(G.comp1))
        for name, args in (("partial_assoc_witness", (comp3, ptr, idx)),
                           ("interchange_witness", (comp3, G.comp1, ptr, idx, bptr, bidx)),
                           ("product_interchange_witness", (G.C3.mul, comp3, ptr, idx))):
            a, b = both(name, *args)
            assert a.tolist() == b.tolist(), (name, trial)


@needs_numba
def test_rref_modp_agrees():
    rng = np.random.default_rng(2)
    for p in (2, 3, 7):
        m = rng.integers(0, p, (12, 15)).astype(np.int64)
        m[5] = (m[1] + 2 * m[3]) % p
        x, y = m.copy(), m.copy()
        r1, p1 = _accel.rref_modp_np(x, p)
        r2, p2 = _accel.rref_modp_nb(y, p)
        assert r1 == r2 and p1.tolist() == p2.tolist() and np.array_equal(x, y)


def test_pure_numpy_switch_gives_same_report():
    env = dict(os.environ, XMODREP_PURE_NUMPY="1")
    code = ("import json, sys; from xmodrep import _accel; from xmodrep.cli import run_pipeline;"
            "from xmodrep.fixtures import load_bundled; r = run_pipeline(load_bundled('z2-lift'));"
            "print(json.dumps({'numba': _accel.HAVE_NUMBA, 'sections': r.to_dict()['sections']}))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    got = json.loads(out.stdout)
    from xmodrep.cli import run_pipeline
    here = json.loads(json.dumps(run_pipeline(load_bundled("z2-lift")).to_dict()["sections"], ensure_ascii=False))
    assert got["numba"] is False
    assert got["sections"] == here
