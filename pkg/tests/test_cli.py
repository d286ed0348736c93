import subprocess
import sys

import pytest

from graphwords.chem import canonical_form, parse_smiles, write_smiles
from graphwords.cli import build_parser, main
from graphwords.model import save_checkpoint


def run(*args):
    return subprocess.run([sys.executable, "-m", "graphwords.cli", *map(str, args)], capture_output=True, text=True)


@pytest.fixture(scope="module")
def overfit_files(overfit_model, overfit_corpus, tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    model, _ = overfit_model
    save_checkpoint(model, root / "m.gw")
    (root / "bank.smi").write_text("".join(write_smiles(g) + "\n" for g in overfit_corpus))
    return root


def test_every_subcommand_has_help(capsys):
    _, table = build_parser()
    for name in table:
        with pytest.raises(SystemExit) as info:
            main([name, "--help"])
        assert info.value.code == 0
        assert "--" in capsys.readouterr().out


def test_corpus_and_roundtrip(tmp_path, capsys):
    corpus = tmp_path / "c.smi"
    assert main(["corpus", "--count", "300", "--max-atoms", "16", "--seed", "2", "--out", str(corpus)]) == 0
    assert main(["roundtrip", "--in", str(corpus), "--random-start", "--seed", "5"]) == 0
    assert capsys.readouterr().out == "300/300 exact round trips\n"


def test_tokenize_four_cycle(tmp_path, capsys):
    one = tmp_path / "one.smi"
    one.write_text("C1CCC1\n")
    assert main(["tokenize", "--in", str(one), "--dict-out", str(tmp_path / "d.txt")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert lines[0] == "node\t5\t0" and lines[-1] == "edge\t0\t3\t0"
    assert (tmp_path / "d.txt").read_text() == "C C single 0\n"


def test_validation_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.smi"
    bad.write_text("CCO\n# comment\nC(C\n")
    res = run("roundtrip", "--in", bad)
    assert res.returncode == 1
    assert f"{bad}:3:" in res.stderr
    assert run("roundtrip", "--in", tmp_path / "missing.smi").returncode == 1
    assert run("roundtrip", "--in", bad, "--bogus").returncode == 1
    assert run("roundtrip", "--in", bad, "--ra").returncode == 1
    assert run("frobnicate").returncode == 1
    assert run("generate", "--model", bad, "--words", bad).returncode == 1


def test_runtime_failure_exits_two(tmp_path):
    corpus = tmp_path / "big.smi"
    corpus.write_text("CCCCCCCCCC\n")
    res = run("pretrain", "--in", corpus, "--out", tmp_path / "m.gw", "--m", "4", "--steps", "5", "--warmup", "1",
              "--d", "8", "--heads", "2", "--d-p", "4", "--layers", "1")
    assert res.returncode == 2
    assert "no trainable examples" in res.stderr


def test_config_file_overlay(tmp_path):
    corpus = tmp_path / "c.smi"
    corpus.write_text("CCO\nCC=O\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("steps=3\nwarmup=1\nd=8\nheads=2\nd_p=4\nm=8\nlayers=1\nbatch_size=2\n")
    res = run("pretrain", "--in", corpus, "--out", tmp_path / "m.gw", "--config", cfg, "--steps", "4")
    assert res.returncode == 0, res.stderr
    assert "steps=4" in res.stderr and "d=8" in res.stderr
    cfg.write_text("stepz=3\n")
    assert run("pretrain", "--in", corpus, "--out", tmp_path / "m.gw", "--config", cfg).returncode == 1


def test_words_round_trip_between_encode_and_generate(overfit_files, tmp_path):
    root = overfit_files
    for fmt in ("binary", "text"):
        words = tmp_path / f"w.{fmt}"
        assert run("encode", "--model", root / "m.gw", "--in", root / "bank.smi", "--out", words,
                   "--format", fmt).returncode == 0
        gen = tmp_path / f"gen.{fmt}.smi"
        trace = tmp_path / f"trace.{fmt}.tsv"
        res = run("generate", "--model", root / "m.gw", "--words", words, "--format", fmt, "--out", gen,
                  "--trace", trace)
        assert res.returncode == 0, res.stderr
        lines = gen.read_text().splitlines()
        bank = (root / "bank.smi").read_text().splitlines()
        assert len(lines) == len(bank)
        hits = sum(not a.startswith("#") and canonical_form(parse_smiles(a)) == canonical_form(parse_smiles(b))
                   for a, b in zip(lines, bank))
        assert hits >= 9
        header, *rows = trace.read_text().splitlines()
        assert header == "molecule\tstep\tkind\tchosen\tcase\tsimilarity"
        assert {r.split("\t")[2] for r in rows} == {"node", "edge", "left", "right"}


def test_sample_zero_variance_regenerates_bank(overfit_files, tmp_path):
    root = overfit_files
    out = tmp_path / "s.smi"
    res = run("sample", "--model", root / "m.gw", "--bank", root / "bank.smi", "--s", "0", "--count", "10",
              "--out", out, "--seed", "1")
    assert res.returncode == 0, res.stderr
    bank = {canonical_form(parse_smiles(x)) for x in (root / "bank.smi").read_text().split()}
    gen = [x for x in out.read_text().splitlines() if not x.startswith("#")]
    assert len(gen) >= 9
    assert all(canonical_form(parse_smiles(x)) in bank for x in gen)
    assert "novelty=0" in res.stdout


def test_latent_metrics_consistency_probe(overfit_files, tmp_path):
    root = overfit_files
    bank = (root / "bank.smi").read_text().split()
    res = run("latent", "interp", "--model", root / "m.gw", "--source", bank[0], "--target", bank[1],
              "--alphas", "0,0.5,1")
    assert res.returncode == 0, res.stderr
    assert [line.split("\t")[0] for line in res.stdout.splitlines()] == ["alpha=0", "alpha=0.5", "alpha=1"]
    res = run("latent", "hybrid", "--model", root / "m.gw", "--source", bank[0], "--target", bank[1],
              "--indices", "2")
    assert res.returncode == 1
    gen = tmp_path / "g.smi"
    gen.write_text("CCO\n# invalid: self-loop\nc1ccccc1\n")
    res = run("metrics", "--generated", gen, "--train", root / "bank.smi", "--verbose-out", tmp_path / "v.tsv")
    assert res.returncode == 0
    assert res.stdout.startswith("validity=0.666667\tuniqueness=1\t")
    assert len((tmp_path / "v.tsv").read_text().splitlines()) == 4
    res = run("consistency", "--in", root / "bank.smi", "--trials", "4")
    assert res.stdout.startswith("mode=codec\tmolecules=10\ttrials=4\tmean=1\t")
    res = run("probe", "--model", root / "m.gw", "--in", root / "bank.smi", "--threshold", "6")
    assert res.returncode == 0 and res.stdout.startswith("task=classification\taccuracy=")
