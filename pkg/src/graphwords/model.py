"""Encoder + decoder pair, its bond vocabulary, and the binary checkpoint format.

Checkpoint layout (all integers little-endian u32):

    b"GWGT"                      magic
    version                      currently 1
    meta_len, meta bytes         UTF-8 text, one "key=value" per line
    count                        number of tensor records
    count x record:
        name_len, name bytes     UTF-8 parameter path
        ndim, dims[ndim]
        payload                  prod(dims) little-endian f32 values

The metadata carries the model configuration, the bond dictionary
(``bond=elemA elemB order id`` lines) and condition normalization stats.
"""

from __future__ import annotations

import struct
from dataclasses import asdict, dataclass, field

import numpy as np

from .chem import MolecularGraph
from .decoder import Decoder, DecoderConfig
from .encoder import Encoder, EncoderConfig
from .ftseq import flatten
from .vocab import CONDITION_NAMES, BondDict

MAGIC = b"GWGT"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    k: int = 1
    d: int = 64
    layers: int = 2
    heads: int = 4
    d_p: int = 64
    m: int = 128
    mlp_ratio: int = 4
    threshold: float = 0.5
    max_blocks: int = 128
    conditions: tuple[str, ...] = field(default=())
    seed: int = 0

    def encoder_config(self, num_bonds: int) -> EncoderConfig:
        return EncoderConfig(num_bonds=num_bonds, k=self.k, d=self.d, layers=self.layers, heads=self.heads,
                             d_p=self.d_p, m=self.m, mlp_ratio=self.mlp_ratio, conditions=self.conditions)

    def decoder_config(self, num_bonds: int) -> DecoderConfig:
        return DecoderConfig(num_bonds=num_bonds, k=self.k, d=self.d, layers=self.layers, heads=self.heads,
                             d_p=self.d_p, m=self.m, mlp_ratio=self.mlp_ratio, threshold=self.threshold,
                             max_blocks=self.max_blocks)


def condition_values(g: MolecularGraph) -> dict[str, float]:
    """Computable molecular properties used as generation conditions."""
    return {"atom_count": float(g.num_atoms), "bond_count": float(g.num_bonds), "ring_count": float(g.ring_count())}


class GraphsGPT:
    def __init__(self, cfg: ModelConfig, bond_dict: BondDict, dtype=np.float32,
                 condition_stats: dict[str, tuple[float, float]] | None = None):
        for name in cfg.conditions:
            if name not in CONDITION_NAMES:
                raise ValueError(f"unknown condition {name!r}; choose from {', '.join(CONDITION_NAMES)}")
        self.cfg = cfg
        self.bond_dict = bond_dict
        self.dtype = np.dtype(dtype)
        self.condition_stats = dict(condition_stats or {})
        rng = np.random.default_rng(cfg.seed)
        self.encoder = Encoder(cfg.encoder_config(len(bond_dict)), rng, dtype)
        self.decoder = Decoder(cfg.decoder_config(len(bond_dict)), rng, dtype)
        self.encoder.assign_names("encoder.")
        self.decoder.assign_names("decoder.")

    def named_parameters(self):
        yield from self.encoder.named_parameters("encoder.")
        yield from self.decoder.named_parameters("decoder.")

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def renormalize_codebooks(self) -> None:
        self.encoder.embed.codebook.renormalize()
        self.decoder.embed.codebook.renormalize()

    def tokenize(self, g: MolecularGraph, start: int | None = None):
        return flatten(g, self.bond_dict, start)

    def normalized_conditions(self, values: dict[str, float]) -> list[tuple[str, float]]:
        out = []
        for name, v in values.items():
            mean, std = self.condition_stats.get(name, (0.0, 1.0))
            out.append((name, (v - mean) / std))
        return out

    def encode_graph(self, g: MolecularGraph, perm: np.ndarray | None = None) -> np.ndarray:
        return self.encoder.encode_one(self.tokenize(g), perm)

    # -- serialization ----------------------------------------------------

    def metadata(self) -> str:
        cfg = asdict(self.cfg)
        lines = ["format=graphwords\n"]
        for key, val in cfg.items():
            if key == "conditions":
                val = ",".join(val)
            lines.append(f"{key}={val}\n")
        for name in self.cfg.conditions:
            mean, std = self.condition_stats.get(name, (0.0, 1.0))
            lines.append(f"condition_stats={name} {mean!r} {std!r}\n")
        for line in self.bond_dict.to_text().splitlines():
            lines.append(f"bond={line}\n")
        return "".join(lines)


def _parse_metadata(text: str):
    cfg_kwargs: dict = {}
    bond_lines, stats = [], {}
    fields = {f.name: f for f in ModelConfig.__dataclass_fields__.values()}
    for line in text.splitlines():
        key, _, val = line.partition("=")
        if key == "bond":
            bond_lines.append(val)
        elif key == "condition_stats":
            name, mean, std = val.split()
            stats[name] = (float(mean), float(std))
        elif key == "conditions":
            cfg_kwargs[key] = tuple(x for x in val.split(",") if x)
        elif key in fields:
            typ = fields[key].type
            cfg_kwargs[key] = float(val) if typ in ("float", float) else int(val)
        elif key == "format":
            continue
        else:
            raise CheckpointError(f"unknown metadata key {key!r}")
    return ModelConfig(**cfg_kwargs), BondDict.from_text("\n".join(bond_lines)), stats


def save_checkpoint(model: GraphsGPT, path) -> None:
    meta = model.metadata().encode("utf-8")
    params = list(model.named_parameters())
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        fh.write(struct.pack("<I", len(params)))
        for name, p in params:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", p.ndim))
            fh.write(struct.pack(f"<{p.ndim}I", *p.shape))
            fh.write(np.ascontiguousarray(p.data, dtype="<f4").tobytes())


def load_checkpoint(path, dtype=np.float32) -> GraphsGPT:
    with open(path, "rb") as fh:
        blob = fh.read()
    view = memoryview(blob)
    pos = 0

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(blob):
            raise CheckpointError(f"checkpoint {path} is truncated")
        out = view[pos:pos + n]
        pos += n
        return bytes(out)

    def u32() -> int:
        return struct.unpack("<I", take(4))[0]

    if take(4) != MAGIC:
        raise CheckpointError(f"{path}: bad magic bytes, not a graphwords checkpoint")
    version = u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version} (expected {FORMAT_VERSION})")
    meta = take(u32()).decode("utf-8")
    cfg, bond_dict, stats = _parse_metadata(meta)
    model = GraphsGPT(cfg, bond_dict, dtype=dtype, condition_stats=stats)
    params = dict(model.named_parameters())
    count = u32()
    if count != len(params):
        raise CheckpointError(f"{path}: {count} tensors stored, model expects {len(params)}")
    for _ in range(count):
        name = take(u32()).decode("utf-8")
        ndim = u32()
        shape = struct.unpack(f"<{ndim}I", take(4 * ndim))
        size = int(np.prod(shape)) if ndim else 1
        values = np.frombuffer(take(4 * size), dtype="<f4").reshape(shape)
        if name not in params:
            raise CheckpointError(f"{path}: unexpected tensor {name!r}")
        p = params[name]
        if p.shape != tuple(shape):
            raise CheckpointError(f"{path}: tensor {name!r} has shape {shape}, expected {p.shape}")
        p.data[...] = values
    if pos != len(blob):
        raise CheckpointError(f"{path}: trailing bytes after the last tensor")
    return model
