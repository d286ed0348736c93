"""Layers shared by the encoder and decoder."""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Parameter, Tensor


class Module:
    """Parameter container; parameters are discovered from attributes in definition order."""

    def named_parameters(self, prefix: str = ""):
        for key, val in self.__dict__.items():
            name = f"{prefix}{key}"
            if isinstance(val, Parameter):
                yield name, val
            elif isinstance(val, Module):
                yield from val.named_parameters(name + ".")
            elif isinstance(val, (list, tuple)):
                for i, item in enumerate(val):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def assign_names(self, prefix: str = "") -> None:
        for name, p in self.named_parameters(prefix):
            p.name = name


def init_matrix(rng: np.random.Generator, shape, dtype, std: float = 0.02) -> Parameter:
    return Parameter(rng.normal(0.0, std, size=shape).astype(dtype))


class Linear(Module):
    def __init__(self, rng, d_in: int, d_out: int, dtype, bias: bool = True, std: float = 0.02):
        self.weight = init_matrix(rng, (d_in, d_out), dtype, std)
        self.bias = Parameter(np.zeros(d_out, dtype=dtype)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        return T.linear(x, self.weight, self.bias)


class RMSNorm(Module):
    def __init__(self, d: int, dtype):
        self.gain = Parameter(np.ones(d, dtype=dtype))

    def __call__(self, x: Tensor) -> Tensor:
        return T.rmsnorm(x, self.gain)


class PositionCodebook(Module):
    """m learnable unit vectors of size d_p; rows are re-normalized after each optimizer step."""

    def __init__(self, rng, m: int, d_p: int, dtype):
        raw = rng.normal(size=(m, d_p))
        self.vectors = Parameter((raw / np.linalg.norm(raw, axis=1, keepdims=True)).astype(dtype))

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def d_p(self) -> int:
        return self.vectors.shape[1]

    def renormalize(self) -> None:
        v = self.vectors.data
        v /= np.linalg.norm(v, axis=1, keepdims=True)


class Attention(Module):
    def __init__(self, rng, d: int, heads: int, dtype):
        if d % heads:
            raise ValueError(f"hidden size {d} not divisible by {heads} heads")
        self.heads = heads
        self.wq = init_matrix(rng, (d, d), dtype)
        self.wk = init_matrix(rng, (d, d), dtype)
        self.wv = init_matrix(rng, (d, d), dtype)
        self.wo = init_matrix(rng, (d, d), dtype)

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        b, s, d = x.shape
        h = self.heads

        def split(t: Tensor) -> Tensor:
            return T.transpose(T.reshape(t, (b, s, h, d // h)), (0, 2, 1, 3))

        q, k, v = split(x @ self.wq), split(x @ self.wk), split(x @ self.wv)
        out = T.masked_attention(q, k, v, mask[:, None, :, :])
        out = T.reshape(T.transpose(out, (0, 2, 1, 3)), (b, s, d))
        return out @ self.wo


class Block(Module):
    """Pre-norm transformer block: attention and a swish MLP, both residual."""

    def __init__(self, rng, d: int, heads: int, dtype, mlp_ratio: int = 4):
        self.norm1 = RMSNorm(d, dtype)
        self.attn = Attention(rng, d, heads, dtype)
        self.norm2 = RMSNorm(d, dtype)
        self.fc1 = Linear(rng, d, mlp_ratio * d, dtype)
        self.fc2 = Linear(rng, mlp_ratio * d, d, dtype)

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        x = x + self.attn(self.norm1(x), mask)
        return x + self.fc2(T.swish(self.fc1(self.norm2(x))))


class GraphTokenEmbedding(Module):
    """Token row + projected [o_left, o_right] pair + segment row."""

    def __init__(self, rng, vocab: int, d: int, m: int, d_p: int, dtype):
        self.tokens = init_matrix(rng, (vocab, d), dtype)
        self.codebook = PositionCodebook(rng, m, d_p, dtype)
        self.gpe_proj = init_matrix(rng, (2 * d_p, d), dtype)
        self.segments = init_matrix(rng, (2, d), dtype)

    def __call__(self, tok: np.ndarray, left: np.ndarray, right: np.ndarray, seg: np.ndarray) -> Tensor:
        m = self.codebook.m
        if left.size and (max(left.max(), right.max()) >= m or min(left.min(), right.min()) < 0):
            raise IndexError(f"position slot outside the {m}-row codebook")
        cb = self.codebook.vectors
        gpe = T.concat([T.embedding(cb, left), T.embedding(cb, right)], axis=-1)
        return T.embedding(self.tokens, tok) + gpe @ self.gpe_proj + T.embedding(self.segments, seg)


def key_padding_mask(valid: np.ndarray) -> np.ndarray:
    """(B, S) validity -> (B, S, S) mask; padded queries see only themselves."""
    mask = np.broadcast_to(valid[:, None, :], valid.shape + (valid.shape[1],)).copy()
    b_idx, s_idx = np.nonzero(~valid)
    mask[b_idx, s_idx, :] = False
    mask[b_idx, s_idx, s_idx] = True
    return mask
