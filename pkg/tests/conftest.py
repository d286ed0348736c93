import time

import networkx as nx
import numpy as np
import pytest

from graphwords.chem import MolecularGraph, random_corpus
from graphwords.training import TrainConfig, pretrain

OVERFIT_CONFIG = dict(batch_size=10, steps=1000, warmup=50, lr_max=3e-3, lr_min=3e-4, seed=0,
                      k=1, d=64, layers=2, heads=4, log_every=100)


def to_networkx(g: MolecularGraph) -> nx.Graph:
    h = nx.Graph()
    for i, z in enumerate(g.elements):
        h.add_node(i, z=z)
    for b in g.bonds:
        h.add_edge(b.left, b.right, order=int(b.order))
    return h


def nx_isomorphic(a: MolecularGraph, b: MolecularGraph) -> bool:
    return nx.is_isomorphic(to_networkx(a), to_networkx(b),
                            node_match=lambda x, y: x["z"] == y["z"],
                            edge_match=lambda x, y: x["order"] == y["order"])


@pytest.fixture(scope="session")
def overfit_corpus():
    return random_corpus(5, 10, max_atoms=8, min_atoms=3)


OVERFIT_SECONDS: list[float] = []


@pytest.fixture(scope="session")
def overfit_model(overfit_corpus):
    """k=1, d=64, two layers, trained on ten small molecules until it reconstructs them."""
    start = time.perf_counter()
    model, history = pretrain(overfit_corpus, TrainConfig(**OVERFIT_CONFIG))
    OVERFIT_SECONDS.append(time.perf_counter() - start)
    return model, history


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def tiny_model(graphs, dtype=np.float64, seed=0, **overrides):
    from graphwords.model import GraphsGPT, ModelConfig
    from graphwords.vocab import build_bond_dict

    cfg = dict(k=2, d=16, layers=1, heads=2, d_p=8, m=24, seed=seed)
    cfg.update(overrides)
    return GraphsGPT(ModelConfig(**cfg), build_bond_dict(graphs), dtype=dtype)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, text = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {text}")
