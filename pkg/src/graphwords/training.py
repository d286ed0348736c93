"""Joint encoder/decoder pretraining, batching, and the linear probe."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from typing import Iterator, Sequence, TextIO

import numpy as np

from . import tensor as T
from .chem import MolecularGraph, scaffold
from .ftseq import flatten, shuffle_codebook
from .model import GraphsGPT, ModelConfig, condition_values
from .tensor import AdamW, cosine_warmup_lr
from .vocab import BondDict, build_bond_dict

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    batch_size: int = 32
    steps: int = 2000
    warmup: int = 100
    lr_max: float = 1e-3
    lr_min: float = 1e-4
    seed: int = 0
    shuffle_codebook: bool = True
    k: int = 1
    d: int = 64
    layers: int = 2
    heads: int = 4
    d_p: int = 64
    m: int = 128
    threshold: float = 0.5
    weight_decay: float = 0.1
    conditions: tuple[str, ...] = field(default=())
    log_every: int = 10

    def __post_init__(self):
        if self.warmup >= self.steps:
            raise ValueError("warmup must be smaller than the total step count")

    def model_config(self) -> ModelConfig:
        return ModelConfig(k=self.k, d=self.d, layers=self.layers, heads=self.heads, d_p=self.d_p, m=self.m,
                           threshold=self.threshold, conditions=tuple(self.conditions), seed=self.seed)

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "TrainConfig":
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                raise ValueError(f"unknown training option {key!r}")
            typ = types[key]
            if typ == "bool":
                kwargs[key] = str(raw).lower() in ("1", "true", "yes", "on")
            elif typ == "int":
                kwargs[key] = int(raw)
            elif typ == "float":
                kwargs[key] = float(raw)
            else:
                kwargs[key] = tuple(x for x in str(raw).split(",") if x) if not isinstance(raw, tuple) else raw
        return cls(**kwargs)


def read_config_file(path) -> dict[str, str]:
    """Flat key=value file; '#' comments and blank lines ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            out[key.strip()] = val.strip()
    return out


@dataclass
class Example:
    graph: MolecularGraph
    seq: list
    enc_seq: list
    conditions: tuple = ()


@dataclass
class Batch:
    seqs: list
    enc_seqs: list
    enc_perms: list | None
    conditions: list | None

    @property
    def lengths(self) -> list[int]:
        return [len(s) for s in self.seqs]

    @property
    def num_pad(self) -> int:
        return len(self.seqs) * max(self.lengths) - sum(self.lengths)


def condition_stats(graphs: Sequence[MolecularGraph], names: Sequence[str]) -> dict[str, tuple[float, float]]:
    stats = {}
    for name in names:
        vals = np.array([condition_values(g)[name] for g in graphs], dtype=np.float64)
        std = float(vals.std())
        stats[name] = (float(vals.mean()), std if std > 0 else 1.0)
    return stats


def make_examples(graphs: Sequence[MolecularGraph], model: GraphsGPT) -> tuple[list[Example], int]:
    """Tokenize a corpus; oversized graphs are skipped and counted."""
    out, skipped = [], 0
    limit = model.encoder.cfg.context_limit - model.cfg.k - len(model.cfg.conditions)
    for g in graphs:
        if g.num_atoms > model.cfg.m:
            skipped += 1
            continue
        seq = flatten(g, model.bond_dict)
        if len(seq) > limit:
            skipped += 1
            continue
        if model.cfg.conditions:
            sc = scaffold(g)
            enc_seq = flatten(sc, model.bond_dict) if sc is not None else []
            vals = condition_values(g)
            conds = tuple(model.normalized_conditions({n: vals[n] for n in model.cfg.conditions}))
        else:
            enc_seq, conds = seq, ()
        out.append(Example(g, seq, enc_seq, conds))
    if skipped:
        log.warning("skipped %d examples exceeding the context limit", skipped)
    return out, skipped


def make_batches(examples: Sequence[Example], batch_size: int, m: int, seed: int, epoch: int,
                 shuffle: bool = True) -> Iterator[Batch]:
    """One epoch of right-padded batches; seeded example order and codebook permutations."""
    rng = np.random.default_rng([seed, epoch])
    order = rng.permutation(len(examples))
    for start in range(0, len(order), batch_size):
        idx = order[start:start + batch_size]
        chunk = [examples[i] for i in idx]
        perms = None
        if shuffle:
            perms = [shuffle_codebook(m, int(s)) for s in rng.integers(0, 2**63 - 1, size=len(chunk))]
        conds = [ex.conditions for ex in chunk] if any(ex.conditions for ex in chunk) else None
        yield Batch([ex.seq for ex in chunk], [ex.enc_seq for ex in chunk], perms, conds)


def batch_losses(model: GraphsGPT, batch: Batch):
    words = model.encoder.encode(batch.enc_seqs, batch.enc_perms, batch.conditions)
    return model.decoder.teacher_forced_losses(words, batch.seqs)


def train_step(model: GraphsGPT, batch: Batch, opt: AdamW, lr: float) -> tuple[float, float, float]:
    opt.zero_grad()
    loss_token, loss_attach = batch_losses(model, batch)
    total = loss_token + loss_attach
    value = total.item()
    if not math.isfinite(value):
        raise TrainingError(
            f"non-finite loss at optimizer step {opt.step_count}: token={loss_token.item()} attach={loss_attach.item()}")
    total.backward()
    opt.step(lr)
    model.renormalize_codebooks()
    return loss_token.item(), loss_attach.item(), value


def build_model(graphs: Sequence[MolecularGraph], cfg: TrainConfig, bond_dict: BondDict | None = None,
                dtype=np.float32) -> GraphsGPT:
    bond_dict = bond_dict or build_bond_dict(graphs)
    stats = condition_stats(graphs, cfg.conditions) if cfg.conditions else None
    return GraphsGPT(cfg.model_config(), bond_dict, dtype=dtype, condition_stats=stats)


def pretrain(graphs: Sequence[MolecularGraph], cfg: TrainConfig, model: GraphsGPT | None = None,
             log_file: TextIO | None = None, progress=None) -> tuple[GraphsGPT, list[tuple[int, float, float, float]]]:
    """Train encoder and decoder jointly; returns the model and (step, lr, L_token, L_attach) rows."""
    model = model or build_model(graphs, cfg)
    examples, _ = make_examples(graphs, model)
    if not examples:
        raise TrainingError("no trainable examples in the corpus")
    opt = AdamW(model.parameters(), betas=(0.9, 0.95), weight_decay=cfg.weight_decay)
    history = []
    if log_file is not None:
        log_file.write("step\tlr\tL_token\tL_attach\n")
    step, epoch = 0, 0
    while step < cfg.steps:
        for batch in make_batches(examples, cfg.batch_size, cfg.m, cfg.seed, epoch, cfg.shuffle_codebook):
            if step >= cfg.steps:
                break
            lr = cosine_warmup_lr(step, cfg.warmup, cfg.steps, cfg.lr_max, cfg.lr_min)
            lt, la, _ = train_step(model, batch, opt, lr)
            history.append((step, lr, lt, la))
            if log_file is not None and (step % cfg.log_every == 0 or step == cfg.steps - 1):
                log_file.write(f"{step}\t{lr:.6g}\t{lt:.6f}\t{la:.6f}\n")
            if progress is not None:
                progress(step, lr, lt, la)
            step += 1
        epoch += 1
    return model, history


def encode_corpus(model: GraphsGPT, graphs: Sequence[MolecularGraph], batch_size: int = 64,
                  perms: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """Graph Words for every graph, shape (N, k, d); identity codebook order unless perms given."""
    out = []
    seqs = [model.tokenize(g) for g in graphs]
    with T.no_grad():
        for start in range(0, len(seqs), batch_size):
            chunk = seqs[start:start + batch_size]
            p = None if perms is None else list(perms[start:start + batch_size])
            out.append(model.encoder.encode(chunk, p).data)
    if not out:
        return np.zeros((0, model.cfg.k, model.cfg.d), dtype=model.dtype)
    return np.concatenate(out, axis=0)


@dataclass
class ProbeResult:
    task: str
    metric: float
    train_size: int
    test_size: int


def _stratified_split(labels: np.ndarray, rng: np.random.Generator, test_frac: float = 0.2):
    train, test = [], []
    for c in np.unique(labels):
        idx = rng.permutation(np.nonzero(labels == c)[0])
        n_test = max(1, int(round(test_frac * len(idx)))) if len(idx) > 1 else 0
        test.extend(idx[:n_test])
        train.extend(idx[n_test:])
    return np.sort(train), np.sort(test)


def linear_probe(words: np.ndarray, labels: Sequence, epochs: int = 200, task: str = "classification",
                 seed: int = 0, lr: float = 0.05) -> ProbeResult:
    """Fit a linear head on frozen Graph Words; accuracy (classification) or MAE (regression) on a 20% split."""
    x = np.asarray(words, dtype=np.float64).reshape(len(words), -1)
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    mu, sd = x.mean(axis=0), x.std(axis=0) + 1e-8
    x = (x - mu) / sd
    if task == "classification":
        classes, y_idx = np.unique(y, return_inverse=True)
        if len(classes) < 2:
            raise ValueError("linear probe needs at least two distinct labels")
        train, test = _stratified_split(y_idx, rng)
        w = T.Parameter(np.zeros((x.shape[1], len(classes))), name="probe.w")
        b = T.Parameter(np.zeros(len(classes)), name="probe.b")
        opt = AdamW([w, b], weight_decay=0.0)
        xt = T.Tensor(x[train])
        for _ in range(epochs):
            opt.zero_grad()
            loss = T.scale(T.cross_entropy(T.linear(xt, w, b), y_idx[train]), 1.0 / len(train))
            loss.backward()
            opt.step(lr)
        pred = np.argmax(x[test] @ w.data + b.data, axis=1)
        return ProbeResult(task, float(np.mean(pred == y_idx[test])), len(train), len(test))
    if task == "regression":
        yv = y.astype(np.float64)
        if np.all(yv == yv[0]):
            raise ValueError("linear probe needs at least two distinct labels")
        perm = rng.permutation(len(yv))
        n_test = max(1, int(round(0.2 * len(yv))))
        test, train = np.sort(perm[:n_test]), np.sort(perm[n_test:])
        ym, ys = yv[train].mean(), yv[train].std() + 1e-8
        w = T.Parameter(np.zeros((x.shape[1], 1)), name="probe.w")
        b = T.Parameter(np.zeros(1), name="probe.b")
        opt = AdamW([w, b], weight_decay=0.0)
        xt = T.Tensor(x[train])
        yt = ((yv[train] - ym) / ys)[:, None]
        for _ in range(epochs):
            opt.zero_grad()
            diff = T.sub(T.linear(xt, w, b), yt)
            loss = T.mean(T.mul(diff, diff))
            loss.backward()
            opt.step(lr)
        pred = (x[test] @ w.data + b.data)[:, 0] * ys + ym
        return ProbeResult(task, float(np.mean(np.abs(pred - yv[test]))), len(train), len(test))
    raise ValueError(f"unknown probe task {task!r}")
