"""Pure-Python/numpy versions of the compiled kernels; results are bit-identical."""

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a(values) -> int:
    h = FNV_OFFSET
    for v in values:
        h ^= v & 0xFF
        h = (h * FNV_PRIME) & MASK64
    return h


def path_fingerprint(elements, indptr, indices, orders, max_len, nbits):
    """Bits set by every simple path of 0..max_len bonds, direction-canonicalized and FNV-hashed."""
    elements = np.asarray(elements, dtype=np.int32)
    indptr = np.asarray(indptr, dtype=np.int32)
    indices = np.asarray(indices, dtype=np.int32)
    orders = np.asarray(orders, dtype=np.int32)
    n = len(elements)
    bits = np.zeros(nbits, dtype=np.uint8)
    on_path = [False] * n
    atoms: list[int] = []
    bonds: list[int] = []

    def emit():
        fwd = [int(elements[atoms[0]])]
        for o, a in zip(bonds, atoms[1:]):
            fwd.append(o)
            fwd.append(int(elements[a]))
        rev = fwd[::-1]
        bits[_fnv1a(min(fwd, rev)) % nbits] = 1

    def extend(u: int):
        emit()
        if len(bonds) == max_len:
            return
        for p in range(indptr[u], indptr[u + 1]):
            v = int(indices[p])
            if on_path[v]:
                continue
            on_path[v] = True
            atoms.append(v)
            bonds.append(int(orders[p]))
            extend(v)
            atoms.pop()
            bonds.pop()
            on_path[v] = False

    for s in range(n):
        on_path[s] = True
        atoms.append(s)
        extend(s)
        atoms.pop()
        on_path[s] = False
    return bits


def tanimoto_matrix(bits):
    """Pairwise |a & b| / |a | b| over rows of a 0/1 matrix; 1.0 when both rows are empty."""
    b = np.asarray(bits, dtype=np.float64)
    inter = b @ b.T
    counts = b.sum(axis=1)
    union = counts[:, None] + counts[None, :] - inter
    out = np.ones_like(inter)
    nz = union > 0
    out[nz] = inter[nz] / union[nz]
    return out
