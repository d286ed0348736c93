"""Affine operations on Graph Words.  Endpoints return exact copies of the inputs."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def _check(a: np.ndarray, b: np.ndarray):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"graph word shapes differ: {a.shape} vs {b.shape}")
    return a, b


def _coef(x: float, name: str) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name}={x} outside [0, 1]")
    return float(x)


def mixup(w_i: np.ndarray, w_j: np.ndarray, lam: float) -> np.ndarray:
    """lam * w_i + (1 - lam) * w_j."""
    w_i, w_j = _check(w_i, w_j)
    lam = _coef(lam, "lambda")
    if lam == 1.0:
        return w_i.copy()
    if lam == 0.0:
        return w_j.copy()
    return (lam * w_i + (1.0 - lam) * w_j).astype(w_i.dtype)


def interpolate(w_s: np.ndarray, w_t: np.ndarray, alphas: Sequence[float]) -> list[np.ndarray]:
    """(1 - a) * w_s + a * w_t for each a."""
    return [mixup(w_t, w_s, _coef(a, "alpha")) for a in alphas]


def hybridize(w_s: np.ndarray, w_t: np.ndarray, indices: Iterable[int]) -> np.ndarray:
    """Replace source rows listed in ``indices`` (1-based, as in w_1..w_k) with target rows."""
    w_s, w_t = _check(w_s, w_t)
    k = w_s.shape[0]
    out = w_s.copy()
    for i in indices:
        if not 1 <= i <= k:
            raise ValueError(f"graph word index {i} outside 1..{k}")
        out[i - 1] = w_t[i - 1]
    return out
