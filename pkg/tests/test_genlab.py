import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphwords.chem import MolecularGraph, parse_smiles, random_corpus, random_molecule
from graphwords.genlab import (WordBank, consistency_report, fewshot_sample, fingerprint, hybridize, int_div,
                               interpolate, metrics, mixup, permutation_consistency, tanimoto)
from graphwords.vocab import build_bond_dict
from oracles import reference_metrics

S = parse_smiles
INVALID = MolecularGraph.from_lists([6, 9], [(0, 1, 2)])

METRIC_SETS = [
    ([S("CCO")] * 4, [S("CC")]),
    ([S("CCO"), None, INVALID, S("c1ccccc1"), S("OCC")], [S("CCO")]),
    ([S("C1CC1"), S("CC(=O)O"), S("N#CC")], [S("CCCC"), S("O")]),
    ([S("c1ccncc1"), S("c1ccccc1O"), S("CCN"), S("CCN"), S("NCC"), S("ClCCBr"), S("C=CC=C")],
     [S("CCN"), S("C=CC=C")]),
    ([None, INVALID], [S("C")]),
]


@pytest.mark.parametrize("case", range(len(METRIC_SETS)))
def test_metrics_match_exhaustive_oracle(case):
    generated, training = METRIC_SETS[case]
    got = metrics(generated, training)
    want = reference_metrics(generated, training, fingerprint)
    for key, val in want.items():
        assert abs(getattr(got, key) - val) < 1e-9, key


def test_metric_edge_cases():
    same = metrics([S("CCO")] * 5, [S("C")])
    assert same.uniqueness == pytest.approx(1 / 5)
    assert same.intdiv_1 == 0.0 and same.novelty == 1.0
    with pytest.raises(ValueError):
        metrics([], [])
    assert metrics([S("CCO")], ["C.O|0-1:1"]).novelty == 1.0


def test_metric_ranges():
    gen = random_corpus(61, 40, max_atoms=10)
    m = metrics(gen + [None], gen[:10])
    assert 0 <= m.intdiv_2 <= 1 and 0 <= m.intdiv_1 <= 1
    assert 0 <= m.validity <= 1 and m.novel <= m.unique <= m.valid <= m.total


def test_tanimoto_examples():
    a = np.zeros(8, dtype=np.uint8)
    b = np.zeros(8, dtype=np.uint8)
    assert tanimoto(a, b) == 1.0
    a[[1, 2, 3]] = 1
    b[[2, 3, 4]] = 1
    assert tanimoto(a, b) == 0.5
    assert tanimoto(a, a) == 1.0
    c = np.zeros(8, dtype=np.uint8)
    c[[5, 6]] = 1
    assert tanimoto(a, c) == 0.0
    with pytest.raises(ValueError):
        tanimoto(a, np.zeros(4))


def test_int_div_definition():
    fps = np.array([[1, 1, 0, 0], [0, 1, 1, 0]], dtype=np.uint8)
    # pairs: 1, 1/3, 1/3, 1
    assert int_div(fps, 1) == pytest.approx(1 - (8 / 3) / 4)
    assert int_div(fps, 2) == pytest.approx(1 - np.sqrt((2 + 2 / 9) / 4))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), shuffle=st.integers(0, 10**6))
def test_fingerprint_is_label_invariant(seed, shuffle):
    g = random_molecule(random.Random(seed), max_atoms=14)
    perm = list(range(g.num_atoms))
    random.Random(shuffle).shuffle(perm)
    fp = fingerprint(g)
    assert fp.shape == (2048,)
    assert np.array_equal(fp, fingerprint(g.permute(perm)))


def test_fingerprint_separates_simple_molecules():
    assert not np.array_equal(fingerprint(S("CCO")), fingerprint(S("COC")))
    assert tanimoto(fingerprint(S("CCCCCCO")), fingerprint(S("CCCCCCN"))) > tanimoto(
        fingerprint(S("CCCCCCO")), fingerprint(S("c1ccncc1")))


def test_latent_endpoints_are_bitwise():
    rng = np.random.default_rng(0)
    w_i, w_j = rng.normal(size=(3, 4)).astype(np.float32), rng.normal(size=(3, 4)).astype(np.float32)
    w_i[0, 0] = -0.0
    assert mixup(w_i, w_j, 1.0).tobytes() == w_i.tobytes()
    assert mixup(w_i, w_j, 0.0).tobytes() == w_j.tobytes()
    path = interpolate(w_i, w_j, [0.0, 0.5, 1.0])
    assert path[0].tobytes() == w_i.tobytes() and path[2].tobytes() == w_j.tobytes()
    assert np.allclose(path[1], 0.5 * (w_i + w_j))
    assert hybridize(w_i, w_j, []).tobytes() == w_i.tobytes()
    assert hybridize(w_i, w_j, [1, 2, 3]).tobytes() == w_j.tobytes()
    h = hybridize(w_i, w_j, [2])
    assert np.array_equal(h[1], w_j[1]) and np.array_equal(h[[0, 2]], w_i[[0, 2]])


def test_latent_errors():
    w = np.zeros((2, 3))
    with pytest.raises(ValueError):
        mixup(w, np.zeros((3, 3)), 0.5)
    with pytest.raises(ValueError):
        mixup(w, w, 1.5)
    with pytest.raises(ValueError):
        interpolate(w, w, [-0.1])
    with pytest.raises(ValueError):
        hybridize(w, w, [0])
    with pytest.raises(ValueError):
        hybridize(w, w, [3])


def test_fewshot_sampling():
    bank = WordBank(np.random.default_rng(0).normal(size=(5, 2, 3)).astype(np.float32))
    words, comps = fewshot_sample(bank, 0.0, 20, seed=3)
    assert np.array_equal(words, bank.words[comps])
    again, comps2 = fewshot_sample(bank, 0.5, 20, seed=3)
    again2, _ = fewshot_sample(bank, 0.5, 20, seed=3)
    assert np.array_equal(again, again2)
    noise = again - bank.words[comps2]
    assert 0.4 < noise.var() < 0.6
    with pytest.raises(ValueError):
        fewshot_sample(bank, -1.0, 3, seed=0)
    with pytest.raises(ValueError):
        WordBank(np.zeros((0, 2, 3)))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_codec_only_consistency_is_total(seed):
    g = random_molecule(random.Random(seed), max_atoms=12)
    res = permutation_consistency(g, 8, seed, bond_dict=build_bond_dict([g]))
    assert res.consistency == 1.0
    assert len(res.outcomes) == 1


def test_consistency_report():
    rep = consistency_report([1.0, 0.5, 0.25, 0.8])
    assert rep["mean"] == pytest.approx(0.6375)
    assert rep["C@1"] == 0.25 and rep["C@0.5"] == 0.75 and rep["C@0.25"] == 1.0
    with pytest.raises(ValueError):
        consistency_report([])


def test_single_trial_consistency(overfit_model, overfit_corpus):
    model, _ = overfit_model
    assert permutation_consistency(overfit_corpus[0], 1, 0, model=model).consistency in (0.0, 1.0)


@pytest.mark.slow
def test_converged_model_is_permutation_consistent():
    from conftest import OVERFIT_CONFIG
    from graphwords.training import TrainConfig, pretrain

    graphs = random_corpus(50, 50, max_atoms=8, min_atoms=3)
    model, _ = pretrain(graphs, TrainConfig(**{**OVERFIT_CONFIG, "steps": 300, "batch_size": 25}))
    scores = [permutation_consistency(g, 16, i, model=model).consistency for i, g in enumerate(graphs)]
    assert consistency_report(scores)["mean"] >= 0.8
