"""Compare the compiled and pure-Python kernels on fingerprinting and pairwise Tanimoto.

    python3 benchmarks/bench_kernels.py [--molecules 300] [--repeat 3]
"""

import argparse
import random
import timeit

import numpy as np

from graphwords import _kernels_py
from graphwords.chem import random_molecule
from graphwords.genlab.metrics import FP_BITS, FP_MAX_PATH

try:
    from graphwords import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def csr(g):
    indptr = np.zeros(g.num_atoms + 1, dtype=np.int32)
    indices, orders = [], []
    for i in range(g.num_atoms):
        for j, order in g.neighbors(i):
            indices.append(j)
            orders.append(int(order))
        indptr[i + 1] = len(indices)
    return (np.asarray(g.elements, dtype=np.int32), indptr, np.asarray(indices, dtype=np.int32),
            np.asarray(orders, dtype=np.int32))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--molecules", type=int, default=300)
    ap.add_argument("--max-atoms", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = random.Random(0)
    graphs = [csr(random_molecule(rng, max_atoms=args.max_atoms)) for _ in range(args.molecules)]
    backends = {"python": _kernels_py}
    if _kernels_c is not None:
        backends["cython"] = _kernels_c
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    for name, mod in backends.items():
        fps = np.stack([mod.path_fingerprint(*g, FP_MAX_PATH, FP_BITS) for g in graphs])
        fp_t = min(timeit.repeat(lambda: [mod.path_fingerprint(*g, FP_MAX_PATH, FP_BITS) for g in graphs],
                                 number=1, repeat=args.repeat))
        tm_t = min(timeit.repeat(lambda: mod.tanimoto_matrix(fps), number=1, repeat=args.repeat))
        results[name] = (fps, mod.tanimoto_matrix(fps), fp_t, tm_t)
        print(f"{name:7s} fingerprint {fp_t * 1e3:9.2f} ms   tanimoto {len(fps)}x{len(fps)} {tm_t * 1e3:9.2f} ms")

    if len(results) == 2:
        (fa, ta, fpa, tma), (fb, tb, fpb, tmb) = results["python"], results["cython"]
        assert np.array_equal(fa, fb) and np.allclose(ta, tb, atol=1e-12, rtol=0), "backends disagree"
        print(f"speedup  fingerprint x{fpa / fpb:.1f}   tanimoto x{tma / tmb:.1f}   (outputs identical)")


if __name__ == "__main__":
    main()
