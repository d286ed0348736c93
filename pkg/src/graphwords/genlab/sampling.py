"""Decoding Graph Words: few-shot sampling, conditional prompts and permutation consistency."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..chem import MolecularGraph, canonical_form, scaffold
from ..decoder import GenerationResult
from ..ftseq import flatten, shuffle_codebook, unflatten
from ..model import GraphsGPT, condition_values
from ..training import encode_corpus


def decode_words(model: GraphsGPT, words: np.ndarray, temperature: float = 0.0,
                 rng: np.random.Generator | None = None) -> GenerationResult:
    return model.decoder.generate(np.asarray(words), model.bond_dict, temperature=temperature, rng=rng)


def result_graph(res: GenerationResult) -> MolecularGraph | None:
    return res.graph if res.valid else None


@dataclass
class WordBank:
    """Encoded reference molecules; the mixture components for few-shot sampling."""

    words: np.ndarray
    graphs: list[MolecularGraph] = field(default_factory=list)

    def __post_init__(self):
        self.words = np.asarray(self.words)
        if self.words.ndim != 3 or len(self.words) == 0:
            raise ValueError(f"word bank needs a non-empty (M, k, d) array, got shape {self.words.shape}")
        if self.graphs and len(self.graphs) != len(self.words):
            raise ValueError("word bank graphs and words differ in length")

    @classmethod
    def from_graphs(cls, model: GraphsGPT, graphs: Sequence[MolecularGraph]) -> "WordBank":
        return cls(encode_corpus(model, graphs), list(graphs))

    def __len__(self) -> int:
        return len(self.words)


def fewshot_sample(bank: WordBank, s: float, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` words: a uniformly chosen bank entry plus N(0, s I) noise.

    Returns (words, component indices).  s == 0 returns the bank rows unchanged.
    """
    if s < 0:
        raise ValueError(f"variance must be non-negative, got {s}")
    rng = np.random.default_rng(seed)
    comps = rng.integers(0, len(bank), size=count)
    base = bank.words[comps]
    if s == 0:
        return base.copy(), comps
    noise = rng.standard_normal(base.shape) * math.sqrt(s)
    return (base + noise).astype(bank.words.dtype), comps


def conditional_words(model: GraphsGPT, scaffold_graph: MolecularGraph | None,
                      conditions: dict[str, float], perm: np.ndarray | None = None) -> np.ndarray:
    """Encoder words for a scaffold prompt plus raw property targets."""
    missing = set(model.cfg.conditions) - set(conditions)
    if missing:
        raise ValueError(f"missing condition values: {', '.join(sorted(missing))}")
    extra = set(conditions) - set(model.cfg.conditions)
    if extra:
        raise ValueError(f"model was not trained with conditions: {', '.join(sorted(extra))}")
    seq = flatten(scaffold_graph, model.bond_dict) if scaffold_graph is not None else []
    conds = model.normalized_conditions({n: conditions[n] for n in model.cfg.conditions})
    return model.encoder.encode_one(seq, perm, conds)


def prompt_for(model: GraphsGPT, g: MolecularGraph) -> tuple[MolecularGraph | None, dict[str, float]]:
    """Scaffold and condition values of a reference molecule, as seen in conditional training."""
    vals = condition_values(g)
    return scaffold(g), {n: vals[n] for n in model.cfg.conditions}


@dataclass
class ConsistencyResult:
    consistency: float
    outcomes: Counter

    @property
    def majority(self) -> str | None:
        if not self.outcomes:
            return None
        return self.outcomes.most_common(1)[0][0]


def _codec_outcome(model_or_dict, g: MolecularGraph, rng: np.random.Generator) -> str | None:
    bond_dict = model_or_dict.bond_dict if isinstance(model_or_dict, GraphsGPT) else model_or_dict
    relabel = rng.permutation(g.num_atoms)
    h = g.permute([int(i) for i in relabel])
    seq = flatten(h, bond_dict, start=int(rng.integers(h.num_atoms)))
    return canonical_form(unflatten(seq, bond_dict))


def permutation_consistency(g: MolecularGraph, n: int, seed: int, model: GraphsGPT | None = None,
                            bond_dict=None) -> ConsistencyResult:
    """Share of ``n`` decodes, one per encoder codebook shuffle, agreeing on the most common molecule.

    Without a model the codec alone is exercised: each trial relabels the atoms, picks a random
    start atom, flattens and rebuilds.  Invalid decodes never count towards agreement.
    """
    if n < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    outcomes: Counter = Counter()
    for _ in range(n):
        if model is None:
            if bond_dict is None:
                raise ValueError("codec-only consistency needs a bond dictionary")
            key = _codec_outcome(bond_dict, g, rng)
        else:
            perm = shuffle_codebook(model.cfg.m, int(rng.integers(0, 2**63 - 1)))
            words = model.encode_graph(g, perm)
            res = decode_words(model, words)
            key = canonical_form(res.graph) if res.valid else None
        if key is not None:
            outcomes[key] += 1
    best = max(outcomes.values()) if outcomes else 0
    return ConsistencyResult(best / n, outcomes)


def consistency_report(scores: Sequence[float], thresholds: Sequence[float] = (0.25, 0.5, 0.75, 1.0)) -> dict[str, float]:
    """C@q: fraction of molecules whose consistency reaches q, plus the mean."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no consistency scores")
    out = {"mean": float(arr.mean())}
    for q in thresholds:
        out[f"C@{q:g}"] = float(np.mean(arr >= q - 1e-12))
    return out
