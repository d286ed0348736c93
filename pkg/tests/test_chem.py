import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import nx_isomorphic
from graphwords.chem import (
    BondOrder,
    DisconnectedGraphError,
    MolecularGraph,
    SmilesSyntaxError,
    UnsupportedElementError,
    UnsupportedFeatureError,
    ValenceError,
    are_isomorphic,
    canonical_form,
    check_valence,
    parse_smiles,
    random_corpus,
    random_molecule,
    read_smiles_file,
    scaffold,
    write_smiles,
)


@pytest.mark.parametrize("smi", ["C", "CCO", "c1ccccc1", "C1CCC1", "CC(=O)Oc1ccccc1C(=O)O", "C#N", "C%10CC%10",
                                 "ClCBr", "O=S(=O)(O)O"])
def test_smiles_round_trip(smi):
    g = parse_smiles(smi)
    back = parse_smiles(write_smiles(g))
    assert nx_isomorphic(g, back)
    assert canonical_form(g) == canonical_form(back)


def test_parse_counts():
    g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")
    assert g.num_atoms == 13
    assert g.num_bonds == 13
    assert g.ring_count() == 1
    assert sum(b.order == BondOrder.AROMATIC for b in g.bonds) == 6


def test_bracket_hydrogen_is_ignored():
    assert canonical_form(parse_smiles("c1cc[nH]c1")) == canonical_form(parse_smiles("c1ccnc1"))


@pytest.mark.parametrize("smi,err", [
    ("C(C", SmilesSyntaxError),
    ("C1CC", SmilesSyntaxError),
    ("CC)", SmilesSyntaxError),
    ("C.C", DisconnectedGraphError),
    ("F/C=C/F", UnsupportedFeatureError),
    ("[13C]", UnsupportedFeatureError),
    ("[C@H](F)(Cl)Br", UnsupportedFeatureError),
    ("[NH4+]", UnsupportedFeatureError),
    ("FF(F)F", ValenceError),
    ("C(C)(C)(C)(C)C", ValenceError),
])
def test_parse_errors(smi, err):
    with pytest.raises(err):
        parse_smiles(smi)


def test_syntax_error_reports_position():
    with pytest.raises(SmilesSyntaxError) as info:
        parse_smiles("CC(C")
    assert "position" in str(info.value)


def test_check_valence_unsupported_element():
    g = MolecularGraph.from_lists([6, 26], [(0, 1, 1)])
    with pytest.raises(UnsupportedElementError):
        check_valence(g)


def test_canonical_form_separates_isomers():
    assert canonical_form(parse_smiles("CCO")) == canonical_form(parse_smiles("OCC"))
    assert canonical_form(parse_smiles("CCO")) != canonical_form(parse_smiles("COC"))
    assert canonical_form(parse_smiles("C=CC")) != canonical_form(parse_smiles("CCC"))


def test_canonical_form_on_symmetric_graphs():
    # cubane-like and two regular graphs that 1-WL cannot separate
    hexagon = MolecularGraph.from_lists([6] * 6, [(i, (i + 1) % 6, 1) for i in range(6)])
    two_triangles_bridged = MolecularGraph.from_lists(
        [6] * 6, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1), (0, 3, 1)])
    prism = MolecularGraph.from_lists(
        [6] * 6, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1), (0, 3, 1), (1, 4, 1), (2, 5, 1)])
    k33 = MolecularGraph.from_lists([6] * 6, [(i, j, 1) for i in range(3) for j in range(3, 6)])
    assert canonical_form(prism) != canonical_form(k33)
    assert canonical_form(hexagon) != canonical_form(two_triangles_bridged)
    rng = random.Random(0)
    for g in (prism, k33, hexagon):
        perm = list(range(6))
        rng.shuffle(perm)
        assert canonical_form(g.permute(perm)) == canonical_form(g)


def test_canonical_form_agrees_with_networkx():
    graphs = random_corpus(11, 120, max_atoms=9)
    for a, b in zip(graphs[::2], graphs[1::2]):
        assert (canonical_form(a) == canonical_form(b)) == nx_isomorphic(a, b)
        assert are_isomorphic(a, b) == nx_isomorphic(a, b)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), shuffle_seed=st.integers(0, 10**6))
def test_canonical_form_is_label_invariant(seed, shuffle_seed):
    g = random_molecule(random.Random(seed), max_atoms=14)
    perm = list(range(g.num_atoms))
    random.Random(shuffle_seed).shuffle(perm)
    h = g.permute(perm)
    assert canonical_form(g) == canonical_form(h)
    assert are_isomorphic(g, h)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_written_smiles_round_trip(seed):
    g = random_molecule(random.Random(seed), max_atoms=16)
    assert nx_isomorphic(g, parse_smiles(write_smiles(g)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_random_molecules_are_valid_and_connected(seed):
    g = random_molecule(random.Random(seed), max_atoms=12)
    assert g.is_connected()
    assert check_valence(g)


def test_scaffold():
    assert scaffold(parse_smiles("CCO")) is None
    sc = scaffold(parse_smiles("CCc1ccccc1O"))
    assert canonical_form(sc) == canonical_form(parse_smiles("c1ccccc1"))


def test_read_smiles_file(tmp_path):
    p = tmp_path / "x.smi"
    p.write_text("# header\nCCO name\n\nc1ccccc1\n")
    assert list(read_smiles_file(p)) == [(2, "CCO"), (4, "c1ccccc1")]
