"""Time the compiled table kernels against their numpy forms.

    python benchmarks/bench_kernels.py [--repeat 5]

Both families live in xmodrep._accel side by side, so one process can time
them on identical inputs.  Compilation time is reported separately from the
steady-state timings.
"""

import argparse
import time

import numpy as np

from xmodrep import _accel
from xmodrep.fixtures import load_bundled
from xmodrep.gray import theta
from xmodrep.groups import FiniteGroup, direct_product


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    S4 = FiniteGroup.from_perm_gens(["(1 2)", "(1 2 3 4)"], 4)
    big = direct_product(S4, FiniteGroup.from_perm_gens(["(1 2)", "(1 2 3)"], 3))
    G = theta(load_bundled("s3-s3-z2").module)
    ptr, idx = _accel.csr_after(np.ascontiguousarray(G.comp3))
    a_ptr, a_idx = _accel.csr_after(np.ascontiguousarray(G.comp3))
    b_ptr, b_idx = _accel.csr_after(np.ascontiguousarray(G.comp1))
    rng = np.random.default_rng(0)
    mat = rng.integers(0, 7, (240, 300)).astype(np.int64)
    yield "assoc |G|=144", "assoc_witness", (big.mul,)
    yield "hom |G|=144", "hom_witness", (big.mul, big.mul, np.arange(big.order, dtype=np.int64))
    yield "partial assoc #3", "partial_assoc_witness", (np.ascontiguousarray(G.comp3), ptr, idx)
    yield "interchange #3/#1", "interchange_witness", (G.comp3, G.comp1, a_ptr, a_idx, b_ptr, b_idx)
    yield "product interchange", "product_interchange_witness", (G.C3.mul, G.comp3, ptr, idx)
    yield "rref mod 7 240x300", "rref_modp", (mat, 7)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba unavailable (or XMODREP_PURE_NUMPY set); timing numpy forms only")
    print(f"{'kernel':<24}{'numpy s':>12}{'numba s':>12}{'speedup':>10}{'compile s':>12}")
    for label, name, inputs in cases():
        fresh = lambda: tuple(x.copy() if isinstance(x, np.ndarray) else x for x in inputs)
        np_fn = getattr(_accel, name + "_np")
        t_np, out_np = best_of(lambda *a: np_fn(*fresh()), (), args.repeat)
        if not _accel.HAVE_NUMBA:
            print(f"{label:<24}{t_np:>12.4f}")
            continue
        nb_fn = getattr(_accel, name + "_nb")
        t0 = time.perf_counter()
        nb_fn(*fresh())
        t_compile = time.perf_counter() - t0
        t_nb, out_nb = best_of(lambda *a: nb_fn(*fresh()), (), args.repeat)
        same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in
                   zip(out_np if isinstance(out_np, tuple) else (out_np,),
                       out_nb if isinstance(out_nb, tuple) else (out_nb,)))
        flag = "" if same else "  MISMATCH"
        print(f"{label:<24}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x{t_compile:>12.3f}{flag}")


if __name__ == "__main__":
    main()
