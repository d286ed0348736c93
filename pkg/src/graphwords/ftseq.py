"""Lossless graph <-> flexible token sequence codec.

A sequence starts with one node token; every following block is an edge
token, optionally followed by the node it introduces.  Slots are symbolic:
the i-th distinct node visited owns slot i, and a position codebook
permutation maps slots to physical codebook rows only at embedding time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .chem import Atom, Bond, BondOrder, ChemError, DisconnectedGraphError, MolecularGraph, stack_limit_guard
from .vocab import BondDict, decode_atom, encode_atom

NODE, EDGE = 0, 1


class FTSeqError(ValueError):
    pass


@dataclass(frozen=True)
class NodeToken:
    atom_id: int
    pos: int

    segment = NODE

    @property
    def slots(self) -> tuple[int, int]:
        return (self.pos, self.pos)


@dataclass(frozen=True)
class EdgeToken:
    bond_id: int
    left_pos: int
    right_pos: int

    segment = EDGE

    @property
    def slots(self) -> tuple[int, int]:
        return (self.left_pos, self.right_pos)


Token = Union[NodeToken, EdgeToken]
FTSeq = list


def flatten(g: MolecularGraph, bond_dict: BondDict, start: int | None = None) -> list[Token]:
    """DFS flattening: emit each edge once, and a node right after the edge that first reaches it."""
    n = g.num_atoms
    if start is None:
        start = g.origin_first_atom or 0
    if not 0 <= start < n:
        raise FTSeqError(f"start atom {start} out of range for a {n}-atom graph")
    if not g.is_connected():
        raise DisconnectedGraphError("flatten requires a connected graph")
    slot = {start: 0}
    seq: list[Token] = [NodeToken(encode_atom(g.atoms[start]), 0)]
    done: set[tuple[int, int]] = set()

    def visit(u: int):
        for v, order in g.neighbors(u):
            key = (u, v) if u < v else (v, u)
            if key in done:
                continue
            done.add(key)
            bond_id = bond_dict.encode(g.atoms[u].atomic_number, g.atoms[v].atomic_number, order)
            if v in slot:
                seq.append(EdgeToken(bond_id, slot[u], slot[v]))
            else:
                slot[v] = len(slot)
                seq.append(EdgeToken(bond_id, slot[u], slot[v]))
                seq.append(NodeToken(encode_atom(g.atoms[v]), slot[v]))
                visit(v)

    stack_limit_guard(n)
    visit(start)
    return seq


def unflatten(seq: Sequence[Token], bond_dict: BondDict) -> MolecularGraph:
    """Rebuild the graph; cross-checks node elements against bond endpoint types."""
    if not seq:
        raise FTSeqError("empty token sequence")
    first = seq[0]
    if not isinstance(first, NodeToken):
        raise FTSeqError("sequence must start with a node token")
    elements: list[int] = [decode_atom(first.atom_id).atomic_number]
    atom_of_slot = {first.pos: 0}
    bonds: list[Bond] = []
    seen: set[tuple[int, int]] = set()
    i = 1
    while i < len(seq):
        tok = seq[i]
        if not isinstance(tok, EdgeToken):
            raise FTSeqError(f"token {i}: node token not introduced by an edge")
        if tok.left_pos not in atom_of_slot:
            raise FTSeqError(f"token {i}: left slot {tok.left_pos} not introduced yet")
        za, zb, order = bond_dict.decode(tok.bond_id)
        u = atom_of_slot[tok.left_pos]
        zu = elements[u]
        if zu not in (za, zb):
            raise FTSeqError(f"token {i}: bond type does not fit its left atom")
        far = zb if zu == za else za
        if tok.right_pos in atom_of_slot:
            v = atom_of_slot[tok.right_pos]
            if sorted((zu, elements[v])) != [za, zb]:
                raise FTSeqError(f"token {i}: bond type does not fit its endpoints")
            i += 1
        else:
            nxt = seq[i + 1] if i + 1 < len(seq) else None
            if not isinstance(nxt, NodeToken) or nxt.pos != tok.right_pos:
                raise FTSeqError(f"token {i}: new right slot {tok.right_pos} without its node token")
            z_node = decode_atom(nxt.atom_id).atomic_number
            if z_node != far:
                raise FTSeqError(f"token {i + 1}: node element disagrees with its introducing bond")
            v = len(elements)
            elements.append(z_node)
            atom_of_slot[tok.right_pos] = v
            i += 2
        if u == v:
            raise FTSeqError(f"token {i}: self-loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FTSeqError(f"duplicate edge between slots {tok.left_pos} and {tok.right_pos}")
        seen.add(key)
        bonds.append(Bond(u, v, BondOrder(order)))
    try:
        return MolecularGraph(tuple(Atom(z) for z in elements), tuple(bonds), origin_first_atom=0)
    except ChemError as exc:
        raise FTSeqError(str(exc)) from exc


def blocks_of(seq: Sequence[Token]) -> list[tuple[int, int]]:
    """Half-open index ranges: [v1], then (edge) or (edge, new node) blocks."""
    if not seq or not isinstance(seq[0], NodeToken):
        raise FTSeqError("sequence must start with a node token")
    blocks = [(0, 1)]
    i = 1
    while i < len(seq):
        if not isinstance(seq[i], EdgeToken):
            raise FTSeqError(f"token {i}: block must start with an edge token")
        if i + 1 < len(seq) and isinstance(seq[i + 1], NodeToken):
            blocks.append((i, i + 2))
            i += 2
        else:
            blocks.append((i, i + 1))
            i += 1
    return blocks


def block_ids(seq: Sequence[Token]) -> list[int]:
    ids = []
    for b, (lo, hi) in enumerate(blocks_of(seq)):
        ids.extend([b] * (hi - lo))
    return ids


def num_nodes(seq: Sequence[Token]) -> int:
    return sum(1 for t in seq if isinstance(t, NodeToken))


def shuffle_codebook(m: int, seed: int) -> np.ndarray:
    """Seeded uniform permutation of the m codebook slots."""
    return np.random.default_rng(seed).permutation(m)


def format_tokens(seq: Sequence[Token]) -> str:
    lines = []
    for t in seq:
        if isinstance(t, NodeToken):
            lines.append(f"node\t{t.atom_id}\t{t.pos}\n")
        else:
            lines.append(f"edge\t{t.bond_id}\t{t.left_pos}\t{t.right_pos}\n")
    return "".join(lines)


def parse_tokens(text: str) -> list[Token]:
    seq: list[Token] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if parts[0] == "node" and len(parts) == 3:
            seq.append(NodeToken(int(parts[1]), int(parts[2])))
        elif parts[0] == "edge" and len(parts) == 4:
            seq.append(EdgeToken(int(parts[1]), int(parts[2]), int(parts[3])))
        else:
            raise FTSeqError(f"token line {lineno}: malformed")
    return seq
