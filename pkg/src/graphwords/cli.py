"""Command-line interface: ``graphwords <subcommand> [flags]``.

Exit status: 0 success, 1 invalid input or arguments, 2 runtime failure.
Logs and the resolved configuration go to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from .chem import (ChemError, MolecularGraph, canonical_form, parse_smiles, random_corpus, read_smiles_file,
                   write_smiles)
from .ftseq import flatten, format_tokens, unflatten
from .genlab import (consistency_report, decode_words, fewshot_sample, hybridize, interpolate, metrics, mixup,
                     permutation_consistency)
from .genlab.metrics import is_valid
from .genlab.sampling import WordBank, conditional_words
from .model import CheckpointError, condition_values, load_checkpoint, save_checkpoint
from .training import TrainConfig, encode_corpus, linear_probe, pretrain, read_config_file
from .vocab import CONDITION_NAMES, BondDict, VocabError, build_bond_dict

log = logging.getLogger("graphwords")

INVALID_PREFIX = "# invalid"

SMILES_FORMAT = "SMILES files hold one molecule per line; blank lines and '#' comments are skipped."
WORDS_FORMAT = ("Graph Words files: 'binary' is raw little-endian float32, k*d values per molecule, no header; "
                "'text' is one whitespace-separated row of k*d values per molecule.")


class CliError(Exception):
    """Invalid user input; exit status 1."""


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- input/output helpers ---------------------------------------------------


def load_corpus(path: str, skip_invalid: bool = False) -> list[MolecularGraph]:
    graphs = []
    try:
        for lineno, smi in read_smiles_file(path):
            try:
                graphs.append(parse_smiles(smi))
            except ChemError as exc:
                if not skip_invalid:
                    raise CliError(f"{path}:{lineno}: {exc}") from exc
                log.warning("%s:%d: skipped: %s", path, lineno, exc)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not graphs:
        raise CliError(f"{path}: no molecules")
    return graphs


def load_generated(path: str) -> list[MolecularGraph | None]:
    """Generated SMILES; '# invalid' lines and unparsable lines count as failed decodes."""
    out: list[MolecularGraph | None] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if line.startswith(INVALID_PREFIX):
                    out.append(None)
                    continue
                if not line or line.startswith("#"):
                    continue
                try:
                    out.append(parse_smiles(line.split()[0]))
                except ChemError as exc:
                    log.warning("%s:%d: counted as invalid: %s", path, lineno, exc)
                    out.append(None)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not out:
        raise CliError(f"{path}: no generated molecules")
    return out


@contextmanager
def output(path: str | None, binary: bool = False):
    if path is None or path == "-":
        if binary:
            raise CliError("binary output needs --out FILE")
        yield sys.stdout
        sys.stdout.flush()
        return
    mode = "wb" if binary else "w"
    kwargs = {} if binary else {"encoding": "utf-8", "newline": "\n"}
    try:
        fh = open(path, mode, **kwargs)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from exc
    with fh:
        yield fh


def load_model(path: str):
    try:
        return load_checkpoint(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def write_words(path: str | None, words: np.ndarray, fmt: str) -> None:
    flat = np.asarray(words, dtype=np.float32).reshape(len(words), -1)
    if fmt == "binary":
        with output(path, binary=True) as fh:
            fh.write(flat.astype("<f4").tobytes())
    else:
        with output(path) as fh:
            for row in flat:
                fh.write(" ".join(f"{v:.9g}" for v in row) + "\n")


def read_words(path: str, fmt: str, k: int, d: int) -> np.ndarray:
    width = k * d
    try:
        if fmt == "binary":
            raw = np.fromfile(path, dtype="<f4")
            if raw.size % width:
                raise CliError(f"{path}: size is not a multiple of k*d={width} float32 values")
            flat = raw.reshape(-1, width)
        else:
            rows = []
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        vals = [float(x) for x in line.split()]
                    except ValueError as exc:
                        raise CliError(f"{path}:{lineno}: {exc}") from exc
                    if len(vals) != width:
                        raise CliError(f"{path}:{lineno}: expected {width} values, found {len(vals)}")
                    rows.append(vals)
            flat = np.array(rows, dtype=np.float32).reshape(-1, width)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not np.all(np.isfinite(flat)):
        raise CliError(f"{path}: non-finite values")
    return flat.reshape(-1, k, d).astype(np.float32)


def smiles_line(res) -> str:
    if res.valid:
        return write_smiles(res.graph)
    return f"{INVALID_PREFIX}: {res.reason or 'decode failed'}"


def write_trace(fh, index: int, res) -> None:
    for step, t in enumerate(res.trace):
        sim = "" if np.isnan(t.similarity) else f"{t.similarity:.6f}"
        fh.write(f"{index}\t{step}\t{t.kind}\t{t.chosen}\t{t.case}\t{sim}\n")


def parse_float_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(f"--{name}: {exc}") from exc


def parse_index_set(text: str) -> list[int]:
    try:
        return sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError as exc:
        raise CliError(f"--indices: {exc}") from exc


def echo_config(args: argparse.Namespace, extra: dict | None = None) -> None:
    items = {k: v for k, v in vars(args).items() if k not in ("func", "config") and not k.startswith("_")}
    items.update(extra or {})
    log.info("resolved config: %s", " ".join(f"{k}={items[k]}" for k in sorted(items)))


# -- subcommands ------------------------------------------------------------


def cmd_corpus(args) -> int:
    echo_config(args)
    graphs = random_corpus(args.seed, args.count, max_atoms=args.max_atoms, min_atoms=args.min_atoms)
    with output(args.out) as fh:
        for g in graphs:
            fh.write(write_smiles(g) + "\n")
    return 0


def cmd_tokenize(args) -> int:
    echo_config(args)
    graphs = load_corpus(args.input)
    bd = BondDict.load(args.bond_dict) if args.bond_dict else build_bond_dict(graphs)
    with output(args.out) as fh:
        for i, g in enumerate(graphs):
            if i:
                fh.write("\n")
            fh.write(format_tokens(flatten(g, bd, args.start)))
    if args.dict_out:
        bd.save(args.dict_out)
    return 0


def cmd_roundtrip(args) -> int:
    echo_config(args)
    graphs = load_corpus(args.input, args.skip_invalid)
    bd = build_bond_dict(graphs)
    rng = np.random.default_rng(args.seed)
    ok = 0
    for i, g in enumerate(graphs):
        start = int(rng.integers(g.num_atoms)) if args.random_start else None
        back = unflatten(flatten(g, bd, start), bd)
        if canonical_form(back) == canonical_form(g):
            ok += 1
        else:
            log.error("molecule %d does not round trip: %s -> %s", i + 1, write_smiles(g), write_smiles(back))
    with output(args.out) as fh:
        fh.write(f"{ok}/{len(graphs)} exact round trips\n")
    return 0 if ok == len(graphs) else 2


def _train_config(args) -> TrainConfig:
    keys = ("batch_size", "steps", "warmup", "lr_max", "lr_min", "k", "d", "layers", "heads", "d_p", "m",
            "threshold", "weight_decay", "log_every")
    values = {key: getattr(args, key) for key in keys}
    conds = tuple(x for x in args.conditions.split(",") if x)
    for name in conds:
        if name not in CONDITION_NAMES:
            raise CliError(f"unknown condition {name!r}; choose from {', '.join(CONDITION_NAMES)}")
    return TrainConfig(seed=args.seed, conditions=conds, shuffle_codebook=not args.no_shuffle, **values)


def cmd_pretrain(args) -> int:
    cfg = _train_config(args)
    echo_config(args)
    graphs = load_corpus(args.input, args.skip_invalid)

    def progress(step, lr, lt, la):
        if step % cfg.log_every == 0 or step == cfg.steps - 1:
            log.info("step %d lr %.3g L_token %.4f L_attach %.4f", step, lr, lt, la)

    if args.log:
        with output(args.log) as fh:
            model, _ = pretrain(graphs, cfg, log_file=fh, progress=progress)
    else:
        model, _ = pretrain(graphs, cfg, progress=progress)
    save_checkpoint(model, args.out)
    log.info("saved %s", args.out)
    return 0


def cmd_encode(args) -> int:
    echo_config(args)
    model = load_model(args.model)
    graphs = load_corpus(args.input)
    if model.cfg.conditions:
        raise CliError("conditional models encode scaffold prompts; use generate --scaffold/--condition")
    write_words(args.out, encode_corpus(model, graphs), args.format)
    return 0


def _parse_conditions(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        if not sep:
            raise CliError(f"--condition expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError as exc:
            raise CliError(f"--condition {item!r}: {exc}") from exc
    return out


def _decode_all(model, words, args, out_path, trace_path) -> list:
    rng = np.random.default_rng(args.seed)
    results = [decode_words(model, w, args.temperature, rng) for w in words]
    with output(out_path) as fh:
        for res in results:
            fh.write(smiles_line(res) + "\n")
    if trace_path:
        with output(trace_path) as fh:
            fh.write("molecule\tstep\tkind\tchosen\tcase\tsimilarity\n")
            for i, res in enumerate(results):
                write_trace(fh, i, res)
    return results


def cmd_generate(args) -> int:
    echo_config(args)
    model = load_model(args.model)
    if args.words:
        if args.condition or args.scaffold:
            raise CliError("--words cannot be combined with --scaffold/--condition")
        words = read_words(args.words, args.format, model.cfg.k, model.cfg.d)
    else:
        if not model.cfg.conditions:
            raise CliError("--words is required for an unconditional model")
        sc = None
        if args.scaffold:
            try:
                sc = parse_smiles(args.scaffold)
            except ChemError as exc:
                raise CliError(f"--scaffold: {exc}") from exc
        w = conditional_words(model, sc, _parse_conditions(args.condition))
        words = np.repeat(w[None], args.count, axis=0)
    results = _decode_all(model, words, args, args.out, args.trace)
    log.info("%d/%d decodes valid", sum(r.valid for r in results), len(results))
    return 0


def cmd_sample(args) -> int:
    echo_config(args)
    model = load_model(args.model)
    bank_graphs = load_corpus(args.bank)
    bank = WordBank.from_graphs(model, bank_graphs)
    words, _ = fewshot_sample(bank, args.s, args.count, args.seed)
    results = _decode_all(model, words, args, args.out, args.trace)
    report = metrics([r.graph if r.valid else None for r in results], bank_graphs)
    sys.stdout.write(report.to_line() + "\n")
    return 0


def cmd_latent(args) -> int:
    echo_config(args)
    model = load_model(args.model)
    try:
        src, tgt = parse_smiles(args.source), parse_smiles(args.target)
    except ChemError as exc:
        raise CliError(f"--source/--target: {exc}") from exc
    w_s, w_t = model.encode_graph(src), model.encode_graph(tgt)
    if args.op == "mix":
        labels, words = [f"lambda={args.lam:g}"], [mixup(w_s, w_t, args.lam)]
    elif args.op == "interp":
        alphas = parse_float_list(args.alphas, "alphas")
        if not alphas:
            raise CliError("--alphas is empty")
        labels, words = [f"alpha={a:g}" for a in alphas], interpolate(w_s, w_t, alphas)
    else:
        idx = parse_index_set(args.indices)
        labels, words = ["indices=" + ",".join(map(str, idx))], [hybridize(w_s, w_t, idx)]
    rng = np.random.default_rng(args.seed)
    with output(args.out) as fh:
        for label, w in zip(labels, words):
            fh.write(f"{label}\t{smiles_line(decode_words(model, w, args.temperature, rng))}\n")
    if args.words_out:
        write_words(args.words_out, np.stack(words), args.format)
    return 0


def cmd_metrics(args) -> int:
    echo_config(args)
    generated = load_generated(args.generated)
    training = load_corpus(args.train)
    report = metrics(generated, training)
    sys.stdout.write(report.to_line() + "\n")
    if args.verbose_out:
        train_canon = {canonical_form(g) for g in training}
        with output(args.verbose_out) as fh:
            fh.write("index\tvalid\tsmiles\tnovel\n")
            for i, g in enumerate(generated):
                if is_valid(g):
                    fh.write(f"{i}\t1\t{write_smiles(g)}\t{int(canonical_form(g) not in train_canon)}\n")
                else:
                    fh.write(f"{i}\t0\t\t\n")
    return 0


def cmd_consistency(args) -> int:
    echo_config(args)
    graphs = load_corpus(args.input)[:args.limit]
    model = load_model(args.model) if args.model else None
    bd = model.bond_dict if model else build_bond_dict(graphs)
    scores = []
    for i, g in enumerate(graphs):
        res = permutation_consistency(g, args.trials, args.seed + i, model=model, bond_dict=bd)
        scores.append(res.consistency)
    report = consistency_report(scores)
    mode = "model" if model else "codec"
    fields = [f"mode={mode}", f"molecules={len(graphs)}", f"trials={args.trials}"]
    fields += [f"{k}={v:.6g}" for k, v in report.items()]
    sys.stdout.write("\t".join(fields) + "\n")
    if args.verbose_out:
        with output(args.verbose_out) as fh:
            fh.write("index\tsmiles\tconsistency\n")
            for i, (g, s) in enumerate(zip(graphs, scores)):
                fh.write(f"{i}\t{write_smiles(g)}\t{s:.6g}\n")
    return 0


def cmd_probe(args) -> int:
    echo_config(args)
    model = load_model(args.model)
    graphs = load_corpus(args.input)
    if args.labels:
        try:
            with open(args.labels, encoding="utf-8") as fh:
                labels = [line.strip() for line in fh if line.strip()]
        except OSError as exc:
            raise CliError(f"cannot read {args.labels}: {exc.strerror or exc}") from exc
        if len(labels) != len(graphs):
            raise CliError(f"{args.labels}: {len(labels)} labels for {len(graphs)} molecules")
        if args.task == "regression":
            try:
                labels = [float(x) for x in labels]
            except ValueError as exc:
                raise CliError(f"{args.labels}: {exc}") from exc
    else:
        vals = [condition_values(g)[args.property] for g in graphs]
        labels = [int(v >= args.threshold) for v in vals] if args.task == "classification" else vals
    words = encode_corpus(model, graphs)
    res = linear_probe(words, labels, epochs=args.epochs, task=args.task, seed=args.seed)
    name = "accuracy" if res.task == "classification" else "mae"
    sys.stdout.write(f"task={res.task}\t{name}={res.metric:.6g}\ttrain={res.train_size}\ttest={res.test_size}\n")
    return 0


# -- parser -----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--config", metavar="FILE", help="key=value file; keys are flag names with '_' for '-'")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--verbose", action="store_true", help="debug logging")


def _decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--temperature", type=float, default=0.0, help="0 decodes greedily (default)")
    p.add_argument("--trace", metavar="FILE",
                   help="trace TSV: molecule, step, kind (node/edge/left/right), chosen id, case, similarity")


def build_parser() -> tuple[ArgParser, dict[str, argparse.ArgumentParser]]:
    parser = ArgParser(prog="graphwords", description=__doc__,
                       formatter_class=argparse.RawDescriptionHelpFormatter, allow_abbrev=False)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgParser)
    subs.required = True
    table: dict[str, argparse.ArgumentParser] = {}

    def add(name, func, help_text, epilog=""):
        p = subs.add_parser(name, help=help_text, description=help_text, epilog=epilog, allow_abbrev=False)
        p.set_defaults(func=func)
        table[name] = p
        return p

    p = add("corpus", cmd_corpus, "write a random corpus of valid molecules", SMILES_FORMAT)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--max-atoms", type=int, default=12)
    p.add_argument("--min-atoms", type=int, default=1)
    p.add_argument("--out", metavar="FILE", help="SMILES output (default stdout)")
    _common(p)

    p = add("tokenize", cmd_tokenize, "dump flexible token sequences",
            "Token lines are tab-separated: 'node ATOM_ID SLOT' or 'edge BOND_ID LEFT_SLOT RIGHT_SLOT'; "
            "molecules are separated by a blank line. Bond dictionary lines: 'A B ORDER ID'. " + SMILES_FORMAT)
    p.add_argument("--in", dest="input", required=True, metavar="FILE", help="SMILES input")
    p.add_argument("--start", type=int, help="start atom index (default: first atom written)")
    p.add_argument("--bond-dict", metavar="FILE", help="existing bond dictionary (default: built from input)")
    p.add_argument("--dict-out", metavar="FILE", help="write the bond dictionary used")
    p.add_argument("--out", metavar="FILE", help="token output (default stdout)")
    _common(p, seed=False)

    p = add("roundtrip", cmd_roundtrip, "check graph -> tokens -> graph for every molecule",
            "Prints 'OK/TOTAL exact round trips'; exit status 2 if any molecule fails. " + SMILES_FORMAT)
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--random-start", action="store_true", help="start each traversal at a seeded random atom")
    p.add_argument("--skip-invalid", action="store_true", help="warn about unparsable lines instead of failing")
    p.add_argument("--out", metavar="FILE")
    _common(p)

    d = TrainConfig.__dataclass_fields__
    p = add("pretrain", cmd_pretrain, "train encoder and decoder jointly",
            "The training log is TSV with columns step, lr, L_token, L_attach. " + SMILES_FORMAT)
    p.add_argument("--in", dest="input", required=True, metavar="FILE", help="SMILES corpus")
    p.add_argument("--out", required=True, metavar="FILE", help="checkpoint to write")
    p.add_argument("--log", metavar="FILE", help="training log TSV")
    for name in ("batch_size", "steps", "warmup", "k", "d", "layers", "heads", "d_p", "m", "log_every"):
        p.add_argument("--" + name.replace("_", "-"), type=int, default=d[name].default)
    for name in ("lr_max", "lr_min", "threshold", "weight_decay"):
        p.add_argument("--" + name.replace("_", "-"), type=float, default=d[name].default)
    p.add_argument("--conditions", default="", help=f"comma list from {','.join(CONDITION_NAMES)}")
    p.add_argument("--no-shuffle", action="store_true", help="keep the encoder codebook order fixed")
    p.add_argument("--skip-invalid", action="store_true")
    _common(p)

    p = add("encode", cmd_encode, "encode molecules into Graph Words", WORDS_FORMAT)
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="words output (binary needs a file)")
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    _common(p, seed=False)

    p = add("generate", cmd_generate, "decode Graph Words (or conditional prompts) into molecules",
            "Output has one line per decode: a SMILES string or '# invalid: REASON'. " + WORDS_FORMAT)
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--words", metavar="FILE", help="Graph Words input")
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    p.add_argument("--scaffold", metavar="SMILES", help="scaffold prompt for a conditional model")
    p.add_argument("--condition", action="append", default=[], metavar="NAME=VALUE",
                   help="property target for a conditional model (repeatable)")
    p.add_argument("--count", type=int, default=1, help="decodes per conditional prompt")
    p.add_argument("--out", metavar="FILE")
    _decode_flags(p)
    _common(p)

    p = add("sample", cmd_sample, "few-shot sampling around encoded bank molecules",
            "Writes generated molecules to --out and one metrics line to stdout. " + SMILES_FORMAT)
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--bank", required=True, metavar="FILE", help="SMILES of the reference molecules")
    p.add_argument("--s", type=float, default=1.0, help="noise variance (default 1.0)")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--out", metavar="FILE")
    _decode_flags(p)
    _common(p)

    p = add("latent", cmd_latent, "mix, interpolate or hybridize two molecules in Graph Words space",
            "Each output line is 'LABEL<TAB>SMILES'. Hybrid indices are 1-based rows of the k words.")
    p.add_argument("op", choices=("mix", "interp", "hybrid"))
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--source", required=True, metavar="SMILES")
    p.add_argument("--target", required=True, metavar="SMILES")
    p.add_argument("--lam", type=float, default=0.5, help="mix: weight of the source")
    p.add_argument("--alphas", default="0,0.25,0.5,0.75,1", help="interp: comma list of target weights")
    p.add_argument("--indices", default="", help="hybrid: comma list of word rows taken from the target")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--words-out", metavar="FILE", help="also write the combined words")
    p.add_argument("--format", choices=("binary", "text"), default="text")
    p.add_argument("--temperature", type=float, default=0.0)
    _common(p)

    p = add("metrics", cmd_metrics, "validity, uniqueness, novelty and internal diversity",
            "Prints one TSV line of key=value fields. Lines starting with '# invalid' count as failed "
            "decodes. The verbose file has columns index, valid, smiles, novel.")
    p.add_argument("--generated", required=True, metavar="FILE")
    p.add_argument("--train", required=True, metavar="FILE")
    p.add_argument("--verbose-out", metavar="FILE")
    _common(p, seed=False)

    p = add("consistency", cmd_consistency, "decode agreement across encoder codebook shuffles",
            "Without --model only the codec is exercised (random relabeling and start atom). "
            "Prints one TSV line with the mean consistency and C@q fractions.")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--model", metavar="FILE")
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--limit", type=int, default=50, help="use at most this many molecules")
    p.add_argument("--verbose-out", metavar="FILE")
    _common(p)

    p = add("probe", cmd_probe, "linear probe on frozen Graph Words",
            "Labels come from --labels (one per molecule) or from a computed --property.")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--labels", metavar="FILE")
    p.add_argument("--property", choices=CONDITION_NAMES, default="atom_count")
    p.add_argument("--threshold", type=float, default=6.0, help="classification: label = property >= threshold")
    p.add_argument("--task", choices=("classification", "regression"), default="classification")
    p.add_argument("--epochs", type=int, default=200)
    _common(p)
    return parser, table


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser, table = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = table[args.command]
        try:
            values = read_config_file(args.config)
        except OSError as exc:
            parser.error(f"cannot read {args.config}: {exc.strerror or exc}")
        except ValueError as exc:
            parser.error(str(exc))
        dests = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - dests - {"func"})
        if unknown or "config" in values:
            parser.error(f"{args.config}: unknown keys: {', '.join(unknown or ['config'])}")
        for action in sub._actions:
            if action.dest in values and isinstance(action, argparse._StoreTrueAction):
                values[action.dest] = values[action.dest].lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CliError, ChemError, VocabError, CheckpointError, ValueError) as exc:
        log.error("%s", exc.args[0] if isinstance(exc, KeyError) and exc.args else exc)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.error("runtime failure: %s", exc)
        if args.verbose:
            raise
        return 2


if __name__ == "__main__":
    sys.exit(main())
