"""Graph2Seq: full-attention transformer from [prompts; conditions; FTSeq] to k Graph Words."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tensor as T
from .ftseq import EDGE, NodeToken, Token
from .nn import Block, GraphTokenEmbedding, Module, RMSNorm, init_matrix, key_padding_mask
from .tensor import Tensor
from .vocab import NUM_ATOM_TYPES, VocabError


class ContextOverflowError(ValueError):
    pass


@dataclass(frozen=True)
class EncoderConfig:
    num_bonds: int
    k: int = 1
    d: int = 64
    layers: int = 2
    heads: int = 4
    d_p: int = 64
    m: int = 128
    mlp_ratio: int = 4
    conditions: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.d % self.heads:
            raise ValueError("hidden size must be divisible by the head count")
        if self.k < 1:
            raise ValueError("k must be at least 1")

    @property
    def context_limit(self) -> int:
        return 2 * self.m + self.k + 4


def token_arrays(seqs: Sequence[Sequence[Token]], perms: Sequence[np.ndarray] | None, length: int):
    """Right-padded (B, length) arrays: token id, left/right codebook rows, segment, validity."""
    b = len(seqs)
    tok = np.zeros((b, length), dtype=np.int64)
    left = np.zeros((b, length), dtype=np.int64)
    right = np.zeros((b, length), dtype=np.int64)
    seg = np.zeros((b, length), dtype=np.int64)
    valid = np.zeros((b, length), dtype=bool)
    for i, seq in enumerate(seqs):
        perm = perms[i] if perms is not None else None
        for t, token in enumerate(seq):
            lo, hi = token.slots
            if isinstance(token, NodeToken):
                tok[i, t] = token.atom_id
            else:
                tok[i, t] = NUM_ATOM_TYPES + token.bond_id
                seg[i, t] = EDGE
            if perm is not None:
                if max(lo, hi) >= len(perm):
                    raise IndexError(f"slot {max(lo, hi)} exceeds the {len(perm)}-row codebook")
                lo, hi = perm[lo], perm[hi]
            left[i, t], right[i, t] = lo, hi
            valid[i, t] = True
    return tok, left, right, seg, valid


class Encoder(Module):
    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator, dtype=np.float32):
        self.cfg = cfg
        d = cfg.d
        self.embed = GraphTokenEmbedding(rng, NUM_ATOM_TYPES + cfg.num_bonds, d, cfg.m, cfg.d_p, dtype)
        self.gp = init_matrix(rng, (d,), dtype)
        self.prompt_pos = init_matrix(rng, (cfg.k, d), dtype)
        nc = max(1, len(cfg.conditions))
        self.cond_base = init_matrix(rng, (nc, d), dtype)
        self.cond_dir = init_matrix(rng, (nc, d), dtype)
        self.blocks = [Block(rng, d, cfg.heads, dtype, cfg.mlp_ratio) for _ in range(cfg.layers)]
        self.norm = RMSNorm(d, dtype)

    def _condition_index(self, name: str) -> int:
        try:
            return self.cfg.conditions.index(name)
        except ValueError:
            raise VocabError(f"unknown condition token {name!r}") from None

    def encode(self, seqs: Sequence[Sequence[Token]], perms: Sequence[np.ndarray] | None = None,
               conditions: Sequence[Sequence[tuple[str, float]]] | None = None) -> Tensor:
        """Graph Words for a batch, shape (B, k, d)."""
        cfg = self.cfg
        b = len(seqs)
        conds = conditions if conditions is not None else [()] * b
        k = cfg.k
        lengths = [len(c) + len(s) for c, s in zip(conds, seqs)]
        if max(lengths, default=0) + k > cfg.context_limit:
            raise ContextOverflowError(
                f"input of {max(lengths) + k} tokens exceeds the context limit {cfg.context_limit}")
        body = max(lengths, default=0)
        dtype = self.gp.dtype

        tok, left, right, seg, _ = token_arrays(seqs, perms, body)
        is_tok = np.zeros((b, body), dtype=bool)
        is_cond = np.zeros((b, body), dtype=bool)
        cidx = np.zeros((b, body), dtype=np.int64)
        cval = np.zeros((b, body), dtype=dtype)
        for i, (c, q) in enumerate(zip(conds, seqs)):
            nc = len(c)
            if nc:
                # graph tokens sit behind the example's condition tokens
                for arr in (tok, left, right, seg):
                    arr[i, nc:nc + len(q)] = arr[i, :len(q)].copy()
                    arr[i, :nc] = 0
            for j, (name, value) in enumerate(c):
                cidx[i, j] = self._condition_index(name)
                cval[i, j] = value
                is_cond[i, j] = True
            is_tok[i, nc:nc + len(q)] = True

        parts = []
        prompts = T.add(self.prompt_pos, self.gp)
        parts.append(T.mul(T.reshape(prompts, (1, k, cfg.d)), np.ones((b, 1, 1), dtype=dtype)))
        if body:
            emb = T.mul(self.embed(tok, left, right, seg), is_tok[..., None].astype(dtype))
            if is_cond.any():
                cond = T.embedding(self.cond_base, cidx) + T.mul(T.embedding(self.cond_dir, cidx), cval[..., None])
                emb = emb + T.mul(cond, is_cond[..., None].astype(dtype))
            parts.append(emb)
        x = T.concat(parts, axis=1) if len(parts) > 1 else parts[0]

        valid = np.concatenate([np.ones((b, k), dtype=bool), is_tok | is_cond], axis=1)
        mask = key_padding_mask(valid)
        for block in self.blocks:
            x = block(x, mask)
        x = self.norm(x)
        return x[:, :k, :]

    def encode_one(self, seq: Sequence[Token], perm: np.ndarray | None = None,
                   conditions: Sequence[tuple[str, float]] = ()) -> np.ndarray:
        with T.no_grad():
            words = self.encode([seq], None if perm is None else [perm], [tuple(conditions)])
        return words.data[0]
