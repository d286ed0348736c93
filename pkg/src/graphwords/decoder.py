"""GraphGPT: edge-centric autoregressive decoder over a block-wise causal mask."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tensor as T
from .chem import ChemError, MolecularGraph, check_valence
from .ftseq import EdgeToken, FTSeqError, NodeToken, Token, blocks_of, unflatten
from .encoder import token_arrays
from .nn import Block, GraphTokenEmbedding, Linear, Module, RMSNorm, init_matrix
from .tensor import Tensor
from .vocab import NUM_ATOM_TYPES, BondDict


@dataclass(frozen=True)
class DecoderConfig:
    num_bonds: int
    k: int = 1
    d: int = 64
    layers: int = 2
    heads: int = 4
    d_p: int = 64
    m: int = 128
    mlp_ratio: int = 4
    threshold: float = 0.5
    max_blocks: int = 128

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.d % self.heads:
            raise ValueError("hidden size must be divisible by the head count")

    @property
    def eos(self) -> int:
        """Class index of [EOS] in the next-edge head."""
        return self.num_bonds


class BlockLayoutError(ValueError):
    pass


def build_block_mask(blocks: Sequence[tuple[int, int]], prefix_len: int) -> np.ndarray:
    """Position i sees j iff block(j) <= block(i); the prefix is block 0.

    ``blocks`` are half-open token ranges after the prefix and must tile
    0..T contiguously.
    """
    ids = [0] * prefix_len
    expect = 0
    for b, (lo, hi) in enumerate(blocks, start=1):
        if lo != expect or hi <= lo:
            raise BlockLayoutError(f"block {b - 1} = [{lo}, {hi}) overlaps or leaves a gap")
        ids.extend([b] * (hi - lo))
        expect = hi
    arr = np.asarray(ids)
    return arr[None, :] <= arr[:, None]


def _cosine_scores(g: np.ndarray, rows: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.float64)
    g = g / np.linalg.norm(g)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return rows @ g


def step2_left_attach(g_left: np.ndarray, used_rows: np.ndarray) -> tuple[int, float]:
    """Index of the existing node whose slot vector best matches the predicted left position."""
    if len(used_rows) == 0:
        raise ValueError("no nodes to attach to")
    c = _cosine_scores(g_left, used_rows)
    u = int(np.argmax(c))
    return u, float(c[u])


def step3_right_place(g_right: np.ndarray, used_rows: np.ndarray, threshold: float) -> tuple[int, bool, float]:
    """(node index, is_existing, similarity).  Existing only when similarity > threshold."""
    c = _cosine_scores(g_right, used_rows)
    u = int(np.argmax(c))
    if c[u] > threshold:
        return u, True, float(c[u])
    return len(used_rows), False, float(c[u])


def pick(logits: np.ndarray, temperature: float = 0.0, rng: np.random.Generator | None = None) -> int:
    """Greedy argmax (lowest id wins ties) or temperature sampling."""
    if temperature <= 0.0:
        return int(np.argmax(logits))
    z = np.asarray(logits, dtype=np.float64) / temperature
    p = np.exp(z - z.max())
    p /= p.sum()
    return int(rng.choice(len(p), p=p))


@dataclass
class TraceStep:
    kind: str
    chosen: int
    case: str = ""
    similarity: float = float("nan")
    width: int = 0


@dataclass
class GenerationResult:
    seq: list
    trace: list[TraceStep]
    graph: MolecularGraph | None = None
    valid: bool = False
    truncated: bool = False
    reason: str = ""

    @property
    def num_tokens(self) -> int:
        return len(self.seq)

    @property
    def num_blocks(self) -> int:
        return len(blocks_of(self.seq)) if self.seq else 0


@dataclass
class GenerationState:
    seq: list = field(default_factory=list)
    elements: list = field(default_factory=list)
    edges: set = field(default_factory=set)
    finished: bool = False
    edges_emitted: int = 0

    @property
    def j(self) -> int:
        return len(self.elements)


class Decoder(Module):
    def __init__(self, cfg: DecoderConfig, rng: np.random.Generator, dtype=np.float32):
        self.cfg = cfg
        d = cfg.d
        self.embed = GraphTokenEmbedding(rng, NUM_ATOM_TYPES + cfg.num_bonds, d, cfg.m, cfg.d_p, dtype)
        self.bos = init_matrix(rng, (d,), dtype)
        self.blocks = [Block(rng, d, cfg.heads, dtype, cfg.mlp_ratio) for _ in range(cfg.layers)]
        self.norm = RMSNorm(d, dtype)
        self.pred_v = Linear(rng, d, NUM_ATOM_TYPES, dtype)
        self.pred_e = Linear(rng, d, cfg.num_bonds + 1, dtype)
        self.pred_pos_l = Linear(rng, d, cfg.d_p, dtype)
        self.pred_pos_r = Linear(rng, d, cfg.d_p, dtype)

    @property
    def codebook(self):
        return self.embed.codebook

    def hidden(self, words: Tensor, seqs: Sequence[Sequence[Token]],
               perms: Sequence[np.ndarray] | None = None) -> Tensor:
        """Final hidden states for [words; BOS; tokens], shape (B, k+1+T, d)."""
        b, k, d = words.shape
        length = max((len(s) for s in seqs), default=0)
        prefix = k + 1
        s_len = prefix + length
        mask = np.zeros((b, s_len, s_len), dtype=bool)
        for i, seq in enumerate(seqs):
            n = prefix + len(seq)
            mask[i, :n, :n] = build_block_mask(blocks_of(seq) if seq else [], prefix)
            # padded queries attend only to themselves
            idx = np.arange(n, s_len)
            mask[i, idx, idx] = True
        dtype = words.dtype
        bos = T.mul(T.reshape(self.bos, (1, 1, d)), np.ones((b, 1, 1), dtype=dtype))
        parts = [words, bos]
        if length:
            tok, left, right, seg, valid = token_arrays(seqs, perms, length)
            parts.append(T.mul(self.embed(tok, left, right, seg), valid[..., None].astype(dtype)))
        x = T.concat(parts, axis=1)
        for block in self.blocks:
            x = block(x, mask)
        return self.norm(x)

    # -- training ---------------------------------------------------------

    def teacher_forced_losses(self, words: Tensor, seqs: Sequence[Sequence[Token]],
                              perms: Sequence[np.ndarray] | None = None) -> tuple[Tensor, Tensor]:
        """(L_token, L_attach), each summed over the batch."""
        cfg = self.cfg
        b, k, _ = words.shape
        h = self.hidden(words, seqs, perms)
        prefix = k + 1
        m = self.codebook.m

        first_rows, first_targets = [], []
        edge_b, edge_p, edge_targets = [], [], []
        attach_b, attach_p, left_rows, right_rows = [], [], [], []
        for i, seq in enumerate(seqs):
            perm = perms[i] if perms is not None else np.arange(m)
            first_rows.append(i)
            first_targets.append(seq[0].atom_id)
            blocks = blocks_of(seq)
            for bi, (lo, hi) in enumerate(blocks):
                pos = prefix + hi - 1
                edge_b.append(i)
                edge_p.append(pos)
                if bi + 1 < len(blocks):
                    nxt = seq[blocks[bi + 1][0]]
                    edge_targets.append(nxt.bond_id)
                    if max(nxt.left_pos, nxt.right_pos) >= m:
                        raise IndexError(f"target slot outside the {m}-row decoder codebook")
                    attach_b.append(i)
                    attach_p.append(pos)
                    left_rows.append(perm[nxt.left_pos])
                    right_rows.append(perm[nxt.right_pos])
                else:
                    edge_targets.append(cfg.eos)

        h_first = h[np.asarray(first_rows), np.full(len(first_rows), k)]
        loss_token = T.cross_entropy(self.pred_v(h_first), first_targets)
        h_edge = h[np.asarray(edge_b), np.asarray(edge_p)]
        loss_token = loss_token + T.cross_entropy(self.pred_e(h_edge), edge_targets)

        cb = self.codebook.vectors
        gram = T.tabs(cb @ T.transpose(cb))
        off = ~np.eye(m, dtype=bool)
        neg_mean = T.scale(T.tsum(T.mul(gram, off.astype(cb.dtype))), 1.0 / (m * (m - 1)))
        n_app = 2 * len(attach_b)
        if n_app:
            h_att = h[np.asarray(attach_b), np.asarray(attach_p)]
            pl = T.l2_normalize_rows(self.pred_pos_l(h_att))
            pr = T.l2_normalize_rows(self.pred_pos_r(h_att))
            # slot vectors act as fixed keys here; the codebook learns through embeddings and the negative term
            tl, tr = T.detach(cb[np.asarray(left_rows)]), T.detach(cb[np.asarray(right_rows)])
            s_pos = T.tsum(T.mul(pl, tl)) + T.tsum(T.mul(pr, tr))
            loss_attach = T.sub(float(n_app), s_pos) + T.scale(neg_mean, float(n_app))
        else:
            loss_attach = T.scale(neg_mean, 0.0)
        return loss_token, loss_attach

    # -- generation -------------------------------------------------------

    def _head_outputs(self, words: np.ndarray, seq: list, perm: np.ndarray):
        with T.no_grad():
            h = self.hidden(T.Tensor(words[None]), [seq], [perm] if seq else None)
        return h.data[0]

    def step0_first_node(self, words: np.ndarray, temperature: float = 0.0, rng=None) -> int:
        h = self._head_outputs(words, [], np.arange(self.codebook.m))
        with T.no_grad():
            logits = self.pred_v(T.Tensor(h[words.shape[0]][None])).data[0]
        return pick(logits, temperature, rng)

    def generate(self, words: np.ndarray, bond_dict: BondDict, temperature: float = 0.0,
                 rng: np.random.Generator | None = None, perm: np.ndarray | None = None) -> GenerationResult:
        """Decode a molecule from one (k, d) Graph Words matrix."""
        cfg = self.cfg
        m = self.codebook.m
        perm = np.arange(m) if perm is None else np.asarray(perm)
        words = np.asarray(words, dtype=self.bos.dtype)
        if not np.all(np.isfinite(words)):
            raise ValueError("graph words contain non-finite values")
        k = words.shape[0]
        cb = self.codebook.vectors.data
        state = GenerationState()
        trace: list[TraceStep] = []

        def finish(reason: str = "", truncated: bool = False) -> GenerationResult:
            res = GenerationResult(seq=state.seq, trace=trace, truncated=truncated, reason=reason)
            if reason:
                return res
            try:
                g = unflatten(state.seq, bond_dict)
                res.graph = g
                res.valid = check_valence(g)
                if not res.valid:
                    res.reason = "valence"
            except (FTSeqError, ChemError) as exc:
                res.reason = str(exc)
            return res

        v1 = self.step0_first_node(words, temperature, rng)
        trace.append(TraceStep("node", v1, width=NUM_ATOM_TYPES))
        state.seq.append(NodeToken(v1, 0))
        state.elements.append(v1 + 1)

        while True:
            if state.edges_emitted >= cfg.max_blocks:
                return finish("max blocks exceeded", truncated=True)
            h = self._head_outputs(words, state.seq, perm)
            h_last = T.Tensor(h[k + len(state.seq)][None])
            with T.no_grad():
                logits = self.pred_e(h_last).data[0]
                g_l = self.pred_pos_l(h_last).data[0]
                g_r = self.pred_pos_r(h_last).data[0]
            e = pick(logits, temperature, rng)
            trace.append(TraceStep("edge", e, width=len(logits)))
            if e == cfg.eos:
                state.finished = True
                return finish()
            state.edges_emitted += 1
            used = cb[perm[:state.j]]
            u_l, c_l = step2_left_attach(g_l, used)
            trace.append(TraceStep("left", u_l, similarity=c_l, width=state.j))
            u_r, existing, c_r = step3_right_place(g_r, used, cfg.threshold)
            trace.append(TraceStep("right", u_r, case="existing" if existing else "new", similarity=c_r,
                                   width=state.j))
            za, zb, _ = bond_dict.decode(e)
            zl = state.elements[u_l]
            if zl not in (za, zb):
                state.seq.append(EdgeToken(e, u_l, u_r))
                return finish("bond type does not fit the attached atom")
            far = zb if zl == za else za
            if existing:
                key = (min(u_l, u_r), max(u_l, u_r))
                state.seq.append(EdgeToken(e, u_l, u_r))
                if u_l == u_r:
                    return finish("self-loop")
                if key in state.edges:
                    return finish("duplicate edge")
                if state.elements[u_r] != far:
                    return finish("bond type does not fit the placed atom")
                state.edges.add(key)
            else:
                if state.j + 1 > m:
                    return finish("position codebook exhausted", truncated=True)
                state.edges.add((u_l, u_r))
                state.seq.append(EdgeToken(e, u_l, u_r))
                state.seq.append(NodeToken(far - 1, u_r))
                state.elements.append(far)
