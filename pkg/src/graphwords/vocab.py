"""Token id spaces: atoms by atomic number, endpoint-typed bonds, special tokens."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .chem import ELEMENTS, SYMBOL_TO_Z, Atom, BondOrder, MolecularGraph

NUM_ATOM_TYPES = 118

CONDITION_NAMES = ("atom_count", "bond_count", "ring_count")


class VocabError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "vocabulary error"


def encode_atom(atom: Atom | int) -> int:
    z = atom.atomic_number if isinstance(atom, Atom) else int(atom)
    if not 1 <= z <= NUM_ATOM_TYPES:
        raise VocabError(f"atomic number {z} outside the atom dictionary")
    return z - 1


def decode_atom(token_id: int) -> Atom:
    if not 0 <= token_id < NUM_ATOM_TYPES:
        raise VocabError(f"atom id {token_id} outside [0, {NUM_ATOM_TYPES})")
    return Atom(token_id + 1)


BondTriple = tuple[int, int, BondOrder]


def bond_triple(z1: int, z2: int, order: BondOrder) -> BondTriple:
    return (min(z1, z2), max(z1, z2), BondOrder(order))


class BondDict:
    """Endpoint-typed bond vocabulary, ids in first-occurrence order."""

    def __init__(self, triples: Iterable[BondTriple]):
        self._triples: list[BondTriple] = []
        self._ids: dict[BondTriple, int] = {}
        for t in triples:
            t = bond_triple(*t)
            if t in self._ids:
                raise VocabError(f"duplicate bond triple {t}")
            self._ids[t] = len(self._triples)
            self._triples.append(t)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self):
        return iter(self._triples)

    def __eq__(self, other) -> bool:
        return isinstance(other, BondDict) and self._triples == other._triples

    def __contains__(self, triple) -> bool:
        return bond_triple(*triple) in self._ids

    def encode(self, z1: int, z2: int, order: BondOrder) -> int:
        t = bond_triple(z1, z2, order)
        try:
            return self._ids[t]
        except KeyError:
            raise VocabError(
                f"bond {ELEMENTS[t[0] - 1]}-{ELEMENTS[t[1] - 1]} ({t[2].name.lower()}) is not in the bond dictionary"
            ) from None

    def decode(self, token_id: int) -> BondTriple:
        if not 0 <= token_id < len(self._triples):
            raise VocabError(f"bond id {token_id} outside [0, {len(self._triples)})")
        return self._triples[token_id]

    def to_text(self) -> str:
        return "".join(
            f"{ELEMENTS[a - 1]} {ELEMENTS[b - 1]} {o.name.lower()} {i}\n" for i, (a, b, o) in enumerate(self._triples)
        )

    @classmethod
    def from_text(cls, text: str) -> "BondDict":
        triples = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise VocabError(f"bond dictionary line {lineno}: expected 'elemA elemB order id'")
            a, b, order, idx = parts
            if int(idx) != len(triples):
                raise VocabError(f"bond dictionary line {lineno}: id {idx} out of sequence")
            triples.append((SYMBOL_TO_Z[a], SYMBOL_TO_Z[b], BondOrder.parse(order)))
        return cls(triples)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "BondDict":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def encode_bond(bond, g: MolecularGraph, bond_dict: BondDict) -> int:
    return bond_dict.encode(g.atoms[bond.left].atomic_number, g.atoms[bond.right].atomic_number, bond.order)


def build_bond_dict(corpus: Iterable[MolecularGraph], cap: int = 256) -> BondDict:
    triples: dict[BondTriple, None] = {}
    empty = True
    for g in corpus:
        empty = False
        for b in g.bonds:
            t = bond_triple(g.atoms[b.left].atomic_number, g.atoms[b.right].atomic_number, b.order)
            if t not in triples:
                triples[t] = None
                if len(triples) > cap:
                    raise VocabError(f"bond dictionary exceeds its cap of {cap} entries")
    if empty:
        raise VocabError("cannot build a bond dictionary from an empty corpus")
    return BondDict(triples)


@dataclass(frozen=True)
class SpecialTokens:
    """Special ids live after atoms and bonds in one shared id space."""

    num_bonds: int
    conditions: tuple[str, ...] = ()

    @property
    def bos(self) -> int:
        return NUM_ATOM_TYPES + self.num_bonds

    @property
    def eos(self) -> int:
        return self.bos + 1

    @property
    def pad(self) -> int:
        return self.bos + 2

    @property
    def gp(self) -> int:
        return self.bos + 3

    def condition(self, name: str) -> int:
        try:
            return self.bos + 4 + self.conditions.index(name)
        except ValueError:
            raise VocabError(f"unknown condition token {name!r}") from None

    @property
    def size(self) -> int:
        return self.bos + 4 + len(self.conditions)
