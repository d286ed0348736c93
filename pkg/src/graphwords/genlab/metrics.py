"""Validity, uniqueness, novelty and internal diversity of generated molecules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..chem import ChemError, MolecularGraph, canonical_form, check_valence
from ..kernels import path_fingerprint, tanimoto_matrix

FP_BITS = 2048
FP_MAX_PATH = 7


def fingerprint(g: MolecularGraph, nbits: int = FP_BITS, max_len: int = FP_MAX_PATH) -> np.ndarray:
    """Hashed linear-path fingerprint: one bit per (element, bond order, ...) path of up to max_len bonds."""
    n = g.num_atoms
    indptr = np.zeros(n + 1, dtype=np.int32)
    indices, orders = [], []
    for i in range(n):
        for j, order in g.neighbors(i):
            indices.append(j)
            orders.append(int(order))
        indptr[i + 1] = len(indices)
    return path_fingerprint(np.asarray(g.elements, dtype=np.int32), indptr,
                            np.asarray(indices, dtype=np.int32), np.asarray(orders, dtype=np.int32), max_len, nbits)


def tanimoto(fp_a: np.ndarray, fp_b: np.ndarray) -> float:
    a = np.asarray(fp_a, dtype=bool)
    b = np.asarray(fp_b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"fingerprint lengths differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def int_div(fps: np.ndarray, p: int) -> float:
    """1 - (mean over all ordered pairs, self-pairs included, of T^p)^(1/p)."""
    if len(fps) == 0:
        return 0.0
    sim = tanimoto_matrix(np.asarray(fps, dtype=np.uint8))
    return float(1.0 - np.mean(sim ** p) ** (1.0 / p))


def is_valid(g: MolecularGraph | None) -> bool:
    if g is None:
        return False
    try:
        return check_valence(g)
    except ChemError:
        return False


@dataclass
class GenerationMetrics:
    total: int
    valid: int
    unique: int
    novel: int
    validity: float
    uniqueness: float
    novelty: float
    intdiv_1: float
    intdiv_2: float

    def to_line(self) -> str:
        cols = ("validity", "uniqueness", "novelty", "intdiv_1", "intdiv_2", "total", "valid", "unique", "novel")
        return "\t".join(f"{c}={getattr(self, c):.6g}" if isinstance(getattr(self, c), float)
                         else f"{c}={getattr(self, c)}" for c in cols)


def metrics(generated: Sequence[MolecularGraph | None], training: Iterable[MolecularGraph | str]) -> GenerationMetrics:
    """``None`` entries stand for decode failures.  Training items may be graphs or canonical forms."""
    total = len(generated)
    if total == 0:
        raise ValueError("metrics need at least one generated molecule")
    train_canon = {t if isinstance(t, str) else canonical_form(t) for t in training}
    valid = [g for g in generated if is_valid(g)]
    canon = [canonical_form(g) for g in valid]
    unique = set(canon)
    novel = unique - train_canon
    fps = np.array([fingerprint(g) for g in valid], dtype=np.uint8).reshape(len(valid), FP_BITS)
    return GenerationMetrics(
        total=total,
        valid=len(valid),
        unique=len(unique),
        novel=len(novel),
        validity=len(valid) / total,
        uniqueness=len(unique) / len(valid) if valid else 0.0,
        novelty=len(novel) / len(unique) if unique else 0.0,
        intdiv_1=int_div(fps, 1),
        intdiv_2=int_div(fps, 2),
    )
