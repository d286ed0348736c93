"""Heavy-atom molecular graphs, a SMILES subset, valence rules and canonical identity."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

ELEMENTS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn "
    "Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce "
    "Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn "
    "Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl "
    "Mc Lv Ts Og"
).split()
assert len(ELEMENTS) == 118

SYMBOL_TO_Z = {sym: z for z, sym in enumerate(ELEMENTS, start=1)}

ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_SYMBOLS = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S", "se": "Se", "as": "As"}

# max total bond order per element; aromatic bonds count 1.5
VALENCE = {5: 3, 6: 4, 7: 3, 8: 2, 9: 1, 15: 5, 16: 6, 17: 1, 35: 1, 53: 1}

MAX_CANONICAL_ATOMS = 64


class ChemError(ValueError):
    """Base class for molecule-level validation failures."""


class SmilesSyntaxError(ChemError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class UnsupportedFeatureError(ChemError):
    pass


class DisconnectedGraphError(ChemError):
    pass


class ValenceError(ChemError):
    pass


class UnsupportedElementError(ChemError):
    pass


class BondOrder(enum.IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> float:
        return 1.5 if self is BondOrder.AROMATIC else float(self.value)

    @property
    def symbol(self) -> str:
        return {1: "-", 2: "=", 3: "#", 4: ":"}[self.value]

    @classmethod
    def from_symbol(cls, ch: str) -> "BondOrder":
        return {"-": cls.SINGLE, "=": cls.DOUBLE, "#": cls.TRIPLE, ":": cls.AROMATIC}[ch]

    @classmethod
    def parse(cls, text: str) -> "BondOrder":
        try:
            return cls[text.upper()]
        except KeyError:
            return cls(int(text))


@dataclass(frozen=True)
class Atom:
    atomic_number: int

    def __post_init__(self):
        if not 1 <= self.atomic_number <= 118:
            raise ChemError(f"atomic number {self.atomic_number} outside [1, 118]")

    @property
    def symbol(self) -> str:
        return ELEMENTS[self.atomic_number - 1]


@dataclass(frozen=True)
class Bond:
    left: int
    right: int
    order: BondOrder

    def __post_init__(self):
        if self.left == self.right:
            raise ChemError(f"self-loop on atom {self.left}")
        object.__setattr__(self, "order", BondOrder(self.order))

    @property
    def key(self) -> tuple[int, int]:
        return (self.left, self.right) if self.left < self.right else (self.right, self.left)


@dataclass(frozen=True)
class MolecularGraph:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    origin_first_atom: int | None = None
    _adj: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, Atom) else Atom(int(a)) for a in self.atoms)
        bonds = tuple(self.bonds)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "bonds", bonds)
        n = len(atoms)
        seen = set()
        adj: list[list[tuple[int, BondOrder]]] = [[] for _ in range(n)]
        for b in bonds:
            if not (0 <= b.left < n and 0 <= b.right < n):
                raise ChemError(f"bond {b.left}-{b.right} references a missing atom")
            if b.key in seen:
                raise ChemError(f"duplicate bond {b.key}")
            seen.add(b.key)
            adj[b.left].append((b.right, b.order))
            adj[b.right].append((b.left, b.order))
        for nbrs in adj:
            nbrs.sort()
        object.__setattr__(self, "_adj", tuple(tuple(x) for x in adj))

    @classmethod
    def from_lists(cls, elements: Sequence[int], bonds: Iterable[tuple[int, int, int]]) -> "MolecularGraph":
        return cls(tuple(Atom(z) for z in elements), tuple(Bond(i, j, BondOrder(o)) for i, j, o in bonds))

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    @property
    def elements(self) -> list[int]:
        return [a.atomic_number for a in self.atoms]

    def neighbors(self, i: int) -> tuple[tuple[int, BondOrder], ...]:
        """(neighbor, order) pairs in ascending neighbor index."""
        return self._adj[i]

    def bond_between(self, i: int, j: int) -> BondOrder | None:
        for k, order in self._adj[i]:
            if k == j:
                return order
        return None

    def is_connected(self) -> bool:
        if not self.atoms:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.atoms)

    def ring_count(self) -> int:
        """Cyclomatic number (independent rings) of a connected graph."""
        return self.num_bonds - self.num_atoms + 1 if self.atoms else 0

    def permute(self, perm: Sequence[int]) -> "MolecularGraph":
        """Relabel atom i as perm[i]."""
        n = self.num_atoms
        atoms = [None] * n
        for i, a in enumerate(self.atoms):
            atoms[perm[i]] = a
        bonds = tuple(Bond(perm[b.left], perm[b.right], b.order) for b in self.bonds)
        origin = None if self.origin_first_atom is None else perm[self.origin_first_atom]
        return MolecularGraph(tuple(atoms), bonds, origin)


def bond_valence(g: MolecularGraph, i: int) -> float:
    return sum(order.valence for _, order in g.neighbors(i))


def check_valence(g: MolecularGraph) -> bool:
    """True iff every atom's summed bond order fits the valence table.

    Raises UnsupportedElementError for elements outside the table.
    """
    for i, atom in enumerate(g.atoms):
        z = atom.atomic_number
        if z not in VALENCE:
            raise UnsupportedElementError(f"no valence rule for element {atom.symbol}")
        if bond_valence(g, i) > VALENCE[z]:
            return False
    return True


# ---------------------------------------------------------------------------
# SMILES parsing

_BOND_CHARS = "-=#:"


def parse_smiles(text: str) -> MolecularGraph:
    """Parse the supported SMILES subset into a connected heavy-atom graph."""
    s = text.strip()
    if not s:
        raise SmilesSyntaxError("empty SMILES", text, 0)
    elements: list[int] = []
    aromatic: list[bool] = []
    bonds: dict[tuple[int, int], tuple[int, int, BondOrder | None]] = {}
    ring_open: dict[int, tuple[int, BondOrder | None, int]] = {}
    branch_stack: list[int] = []
    prev: int | None = None
    pending: BondOrder | None = None
    pending_pos = 0
    pos = 0

    def add_bond(a: int, b: int, order: BondOrder | None, at: int):
        key = (min(a, b), max(a, b))
        if a == b:
            raise SmilesSyntaxError("ring closure onto the same atom", text, at)
        if key in bonds:
            raise SmilesSyntaxError("duplicate bond", text, at)
        bonds[key] = (a, b, order)

    def add_atom(z: int, arom: bool, at: int):
        nonlocal prev, pending
        idx = len(elements)
        elements.append(z)
        aromatic.append(arom)
        if prev is not None:
            add_bond(prev, idx, pending, at)
        elif pending is not None:
            raise SmilesSyntaxError("bond symbol without a preceding atom", text, pending_pos)
        pending = None
        prev = idx

    while pos < len(s):
        ch = s[pos]
        if ch == "[":
            end = s.find("]", pos)
            if end < 0:
                raise SmilesSyntaxError("unclosed bracket atom", text, pos)
            z, arom = _parse_bracket(s[pos + 1:end], text, pos)
            add_atom(z, arom, pos)
            pos = end + 1
            continue
        if ch.isalpha():
            two = s[pos:pos + 2]
            if two in ("Cl", "Br"):
                add_atom(SYMBOL_TO_Z[two], False, pos)
                pos += 2
            elif ch in ORGANIC_SUBSET:
                add_atom(SYMBOL_TO_Z[ch], False, pos)
                pos += 1
            elif ch in AROMATIC_SYMBOLS:
                add_atom(SYMBOL_TO_Z[AROMATIC_SYMBOLS[ch]], True, pos)
                pos += 1
            else:
                raise SmilesSyntaxError(f"unsupported atom symbol {ch!r}", text, pos)
            continue
        if ch in _BOND_CHARS:
            if pending is not None:
                raise SmilesSyntaxError("two consecutive bond symbols", text, pos)
            pending = BondOrder.from_symbol(ch)
            pending_pos = pos
            pos += 1
            continue
        if ch in "/\\":
            raise UnsupportedFeatureError(f"stereo bond {ch!r} at position {pos} in {text!r}")
        if ch == "(":
            if prev is None or pending is not None:
                raise SmilesSyntaxError("branch must follow an atom", text, pos)
            branch_stack.append(prev)
            pos += 1
            continue
        if ch == ")":
            if not branch_stack:
                raise SmilesSyntaxError("unbalanced ')'", text, pos)
            if pending is not None:
                raise SmilesSyntaxError("dangling bond symbol", text, pending_pos)
            prev = branch_stack.pop()
            pos += 1
            continue
        if ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesSyntaxError("ring closure before any atom", text, pos)
            if ch == "%":
                digits = s[pos + 1:pos + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise SmilesSyntaxError("malformed %nn ring closure", text, pos)
                label, width = int(digits), 3
            else:
                label, width = int(ch), 1
            if label in ring_open:
                other, order, _ = ring_open.pop(label)
                if order is not None and pending is not None and order != pending:
                    raise SmilesSyntaxError("conflicting ring-closure bond orders", text, pos)
                add_bond(other, prev, pending if pending is not None else order, pos)
            else:
                ring_open[label] = (prev, pending, pos)
            pending = None
            pos += width
            continue
        if ch == ".":
            raise DisconnectedGraphError(f"multi-fragment SMILES rejected: {text!r}")
        if ch.isspace():
            break
        raise SmilesSyntaxError(f"unexpected character {ch!r}", text, pos)

    if pending is not None:
        raise SmilesSyntaxError("dangling bond symbol", text, pending_pos)
    if branch_stack:
        raise SmilesSyntaxError("unclosed branch", text, len(s))
    if ring_open:
        label, (_, _, at) = next(iter(ring_open.items()))
        raise SmilesSyntaxError(f"unclosed ring {label}", text, at)

    bond_list = []
    for a, b, order in bonds.values():
        if order is None:
            order = BondOrder.AROMATIC if aromatic[a] and aromatic[b] else BondOrder.SINGLE
        bond_list.append(Bond(a, b, order))
    g = MolecularGraph(tuple(Atom(z) for z in elements), tuple(bond_list), origin_first_atom=0)
    if not g.is_connected():
        raise DisconnectedGraphError(f"graph is not connected: {text!r}")
    if not check_valence(g):
        raise ValenceError(f"valence exceeded in {text!r}")
    return g


def _parse_bracket(body: str, text: str, at: int) -> tuple[int, bool]:
    i = 0
    if body[:1].isdigit():
        raise UnsupportedFeatureError(f"isotope in bracket atom at position {at} in {text!r}")
    sym = None
    for cand in (body[:2], body[:1]):
        if cand in SYMBOL_TO_Z or cand in AROMATIC_SYMBOLS:
            sym = cand
            break
    if sym is None:
        raise SmilesSyntaxError(f"unknown element in [{body}]", text, at)
    i = len(sym)
    rest = body[i:]
    if "@" in rest:
        raise UnsupportedFeatureError(f"chirality in bracket atom at position {at} in {text!r}")
    if "+" in rest or "-" in rest:
        raise UnsupportedFeatureError(f"charge in bracket atom at position {at} in {text!r}")
    if ":" in rest:
        raise UnsupportedFeatureError(f"atom class in bracket atom at position {at} in {text!r}")
    if rest and not (rest[0] == "H" and (rest[1:] == "" or rest[1:].isdigit())):
        raise SmilesSyntaxError(f"malformed bracket atom [{body}]", text, at)
    if sym in AROMATIC_SYMBOLS:
        return SYMBOL_TO_Z[AROMATIC_SYMBOLS[sym]], True
    return SYMBOL_TO_Z[sym], False


# ---------------------------------------------------------------------------
# SMILES writing

def write_smiles(g: MolecularGraph, start: int | None = None) -> str:
    """Emit a SMILES string that re-parses to a graph isomorphic to ``g``."""
    n = g.num_atoms
    if n == 0:
        raise ChemError("cannot write an empty graph")
    if start is None:
        start = g.origin_first_atom or 0
    aromatic = [any(o is BondOrder.AROMATIC for _, o in g.neighbors(i)) for i in range(n)]
    lower = {v: k for k, v in AROMATIC_SYMBOLS.items()}

    def atom_text(i: int) -> str:
        sym = g.atoms[i].symbol
        if aromatic[i] and sym in lower:
            s = lower[sym]
            return s if len(s) == 1 else f"[{s}]"
        return sym if sym in ORGANIC_SUBSET else f"[{sym}]"

    writes_lower = [aromatic[i] and g.atoms[i].symbol in lower for i in range(n)]

    def bond_text(i: int, j: int, order: BondOrder) -> str:
        both = writes_lower[i] and writes_lower[j]
        if order is BondOrder.SINGLE:
            return "-" if both else ""
        if order is BondOrder.AROMATIC:
            return "" if both else ":"
        return order.symbol

    # spanning tree by DFS, back edges become ring closures
    visited = [False] * n
    order_seen: list[int] = []
    children: list[list[int]] = [[] for _ in range(n)]
    closures: dict[int, list[tuple[int, BondOrder]]] = {i: [] for i in range(n)}
    tree_edges = set()

    def dfs(u: int, parent: int | None):
        visited[u] = True
        order_seen.append(u)
        for v, order in g.neighbors(u):
            if v == parent:
                continue
            if not visited[v]:
                tree_edges.add((min(u, v), max(u, v)))
                children[u].append(v)
                dfs(v, u)

    stack_limit_guard(n)
    dfs(start, None)
    if len(order_seen) != n:
        raise DisconnectedGraphError("cannot write a disconnected graph")
    rank = {a: r for r, a in enumerate(order_seen)}
    for b in g.bonds:
        if b.key not in tree_edges:
            lo, hi = sorted((b.left, b.right), key=rank.__getitem__)
            closures[lo].append((hi, b.order))
            closures[hi].append((lo, b.order))

    free_labels = list(range(1, 100))
    open_labels: dict[tuple[int, int], int] = {}
    out: list[str] = []

    def label_text(k: int) -> str:
        return str(k) if k < 10 else f"%{k:02d}"

    def emit(u: int):
        out.append(atom_text(u))
        for v, order in sorted(closures[u], key=lambda t: rank[t[0]]):
            key = (min(u, v), max(u, v))
            if key in open_labels:
                k = open_labels.pop(key)
                out.append(bond_text(u, v, order) + label_text(k))
                free_labels.append(k)
                free_labels.sort()
            else:
                k = free_labels.pop(0)
                open_labels[key] = k
                out.append(bond_text(u, v, order) + label_text(k))
        kids = children[u]
        for idx, v in enumerate(kids):
            order = g.bond_between(u, v)
            last = idx == len(kids) - 1
            if not last:
                out.append("(")
            out.append(bond_text(u, v, order))
            emit(v)
            if not last:
                out.append(")")

    emit(start)
    return "".join(out)


def stack_limit_guard(n: int) -> None:
    import sys

    need = 4 * n + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


# ---------------------------------------------------------------------------
# canonical identity

def _refine(g: MolecularGraph, colors: list[int]) -> list[int]:
    """Iterated neighborhood refinement until the partition is stable.

    Colors are relabelled by sorted signature so the result depends only on
    the (colored) graph, never on atom indices.
    """
    n = g.num_atoms
    while True:
        sigs = [
            (colors[i], tuple(sorted((colors[j], int(o)) for j, o in g.neighbors(i))))
            for i in range(n)
        ]
        palette = {s: k for k, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(palette) == len(set(colors)):
            return new
        colors = new


def _initial_colors(g: MolecularGraph) -> list[int]:
    sigs = [
        (a.atomic_number, tuple(sorted(int(o) for _, o in g.neighbors(i))))
        for i, a in enumerate(g.atoms)
    ]
    palette = {s: k for k, s in enumerate(sorted(set(sigs)))}
    return [palette[s] for s in sigs]


def _encode_labeling(g: MolecularGraph, colors: list[int]) -> tuple:
    # colors form a discrete partition here: color = canonical index
    elems = [0] * g.num_atoms
    for i, c in enumerate(colors):
        elems[c] = g.atoms[i].atomic_number
    edges = sorted(
        (min(colors[b.left], colors[b.right]), max(colors[b.left], colors[b.right]), int(b.order))
        for b in g.bonds
    )
    return tuple(elems), tuple(edges)


def canonical_form(g: MolecularGraph, max_leaves: int = 200_000) -> str:
    """Permutation-invariant identity string for a heavy-atom graph."""
    n = g.num_atoms
    if n > MAX_CANONICAL_ATOMS:
        raise ChemError(f"canonical_form supports at most {MAX_CANONICAL_ATOMS} atoms, got {n}")
    if n == 0:
        return ""
    best: tuple | None = None
    leaves = 0

    def search(colors: list[int]):
        nonlocal best, leaves
        colors = _refine(g, colors)
        k = len(set(colors))
        if k == n:
            leaves += 1
            if leaves > max_leaves:
                raise ChemError("canonical_form search exceeded its leaf budget")
            cand = _encode_labeling(g, colors)
            if best is None or cand < best:
                best = cand
            return
        # first smallest non-singleton cell, chosen by color value (index-free)
        sizes: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            sizes.setdefault(c, []).append(i)
        target = min((c for c, m in sizes.items() if len(m) > 1), key=lambda c: (len(sizes[c]), c))
        for v in sizes[target]:
            # individualize v: it sorts just ahead of the rest of its cell
            indiv = [2 * c + 1 for c in colors]
            indiv[v] = 2 * target
            search(indiv)

    search(_initial_colors(g))
    elems, edges = best
    return ".".join(ELEMENTS[z - 1] for z in elems) + "|" + ",".join(f"{a}-{b}:{o}" for a, b, o in edges)


def are_isomorphic(a: MolecularGraph, b: MolecularGraph) -> bool:
    """Exact labelled isomorphism (elements and bond orders) by backtracking."""
    n = a.num_atoms
    if n != b.num_atoms or a.num_bonds != b.num_bonds:
        return False
    if sorted(a.elements) != sorted(b.elements):
        return False
    sig_a = [(a.atoms[i].atomic_number, tuple(sorted(int(o) for _, o in a.neighbors(i)))) for i in range(n)]
    sig_b = [(b.atoms[i].atomic_number, tuple(sorted(int(o) for _, o in b.neighbors(i)))) for i in range(n)]
    if sorted(sig_a) != sorted(sig_b):
        return False
    order = _bfs_order(a)
    mapping: dict[int, int] = {}
    used = [False] * n

    def feasible(u: int, v: int) -> bool:
        if sig_a[u] != sig_b[v]:
            return False
        for w, o in a.neighbors(u):
            if w in mapping and b.bond_between(v, mapping[w]) != o:
                return False
        mapped_nbrs = sum(1 for w, _ in a.neighbors(u) if w in mapping)
        inv_nbrs = sum(1 for x, _ in b.neighbors(v) if used[x])
        return mapped_nbrs == inv_nbrs

    def extend(k: int) -> bool:
        if k == n:
            return True
        u = order[k]
        for v in range(n):
            if not used[v] and feasible(u, v):
                mapping[u] = v
                used[v] = True
                if extend(k + 1):
                    return True
                del mapping[u]
                used[v] = False
        return False

    stack_limit_guard(n)
    return extend(0)


def _bfs_order(g: MolecularGraph) -> list[int]:
    seen = [False] * g.num_atoms
    order = []
    for s in range(g.num_atoms):
        if seen[s]:
            continue
        seen[s] = True
        queue = [s]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v, _ in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return order


def scaffold(g: MolecularGraph) -> MolecularGraph | None:
    """Ring systems plus linkers: repeatedly strip degree-1 atoms.

    Returns None for acyclic molecules.
    """
    alive = set(range(g.num_atoms))
    deg = {i: len(g.neighbors(i)) for i in alive}
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            if deg[i] <= 1 and len(alive) > 1:
                alive.discard(i)
                for j, _ in g.neighbors(i):
                    if j in alive:
                        deg[j] -= 1
                changed = True
    if g.ring_count() == 0 or len(alive) < 3:
        return None
    keep = sorted(alive)
    remap = {old: new for new, old in enumerate(keep)}
    bonds = tuple(Bond(remap[b.left], remap[b.right], b.order) for b in g.bonds if b.left in alive and b.right in alive)
    return MolecularGraph(tuple(g.atoms[i] for i in keep), bonds, origin_first_atom=0)


# ---------------------------------------------------------------------------
# corpora

def read_smiles_file(path) -> Iterator[tuple[int, str]]:
    """Yield (line number, SMILES) pairs, skipping blanks and '#' comments."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split()[0]


_RANDOM_ELEMENTS = (6, 6, 6, 6, 6, 6, 7, 7, 8, 8, 9, 16, 17)


def random_molecule(rng: random.Random, max_atoms: int = 12, min_atoms: int = 1,
                    ring_prob: float = 0.3, aromatic_prob: float = 0.15) -> MolecularGraph:
    """Random connected, valence-valid heavy-atom graph.

    Grows a random tree, then adds ring-closing bonds and occasionally a
    benzene-like aromatic six-ring.
    """
    n = rng.randint(min_atoms, max_atoms)
    elems: list[int] = []
    bonds: dict[tuple[int, int], BondOrder] = {}
    load: list[float] = []

    def free(i: int) -> float:
        return VALENCE[elems[i]] - load[i]

    if n >= 6 and rng.random() < aromatic_prob:
        for i in range(6):
            elems.append(rng.choice((6, 6, 6, 6, 7)))
            load.append(0.0)
        for i in range(6):
            bonds[(min(i, (i + 1) % 6), max(i, (i + 1) % 6))] = BondOrder.AROMATIC
            load[i] += 1.5
            load[(i + 1) % 6] += 1.5
    else:
        elems.append(rng.choice(_RANDOM_ELEMENTS))
        load.append(0.0)

    while len(elems) < n:
        hosts = [i for i in range(len(elems)) if free(i) >= 1]
        if not hosts:
            break
        host = rng.choice(hosts)
        z = rng.choice(_RANDOM_ELEMENTS)
        cap = min(free(host), VALENCE[z])
        orders = [BondOrder.SINGLE]
        if cap >= 2 and z != 9 and z != 17:
            orders += [BondOrder.DOUBLE]
        if cap >= 3 and z in (6, 7):
            orders += [BondOrder.TRIPLE]
        order = rng.choice(orders) if rng.random() < 0.3 else BondOrder.SINGLE
        idx = len(elems)
        elems.append(z)
        load.append(0.0)
        bonds[(host, idx)] = order
        load[host] += order.valence
        load[idx] += order.valence

    m = len(elems)
    for _ in range(2):
        if m < 3 or rng.random() >= ring_prob:
            continue
        cands = [(i, j) for i in range(m) for j in range(i + 1, m)
                 if (i, j) not in bonds and free(i) >= 1 and free(j) >= 1]
        if cands:
            i, j = rng.choice(cands)
            bonds[(i, j)] = BondOrder.SINGLE
            load[i] += 1
            load[j] += 1
    g = MolecularGraph.from_lists(elems, [(i, j, int(o)) for (i, j), o in bonds.items()])
    return MolecularGraph(g.atoms, g.bonds, origin_first_atom=0)


def random_corpus(seed: int, count: int, max_atoms: int = 12, min_atoms: int = 1) -> list[MolecularGraph]:
    rng = random.Random(seed)
    return [random_molecule(rng, max_atoms=max_atoms, min_atoms=min_atoms) for _ in range(count)]
