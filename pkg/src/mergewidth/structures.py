"""Finite binary relational structures.

A structure is a non-empty universe of string identifiers together with one
set of ordered pairs per relation symbol.  Every symbol is binary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import InvalidInput, LimitExceeded, UnknownName

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

Pair = tuple[str, str]


@dataclass(frozen=True)
class Signature:
    symbols: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        seen = set()
        for name in self.symbols:
            if not isinstance(name, str) or not _IDENT.match(name):
                raise InvalidInput(f"bad relation symbol {name!r}")
            if name in seen:
                raise InvalidInput(f"duplicate relation symbol {name!r}")
            seen.add(name)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name):
        return name in self.symbols

    def arity(self, name):
        if name not in self.symbols:
            raise UnknownName(f"unknown relation symbol {name!r}")
        return 2


def _freeze_relations(signature, universe, relations):
    members = set(universe)
    frozen = {}
    for name in signature:
        pairs = frozenset((u, v) for u, v in relations.get(name, ()))
        for u, v in pairs:
            if u not in members or v not in members:
                raise InvalidInput(f"pair ({u}, {v}) of {name} leaves the universe")
        frozen[name] = pairs
    extra = set(relations) - set(signature.symbols)
    if extra:
        raise UnknownName(f"relations for undeclared symbols: {sorted(extra)}")
    return MappingProxyType(frozen)


@dataclass(frozen=True, eq=False)
class BinaryStructure:
    signature: Signature
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset[Pair]]
    name: str = field(default="G")

    def __post_init__(self):
        if not isinstance(self.signature, Signature):
            object.__setattr__(self, "signature", Signature(tuple(self.signature)))
        universe = tuple(self.universe)
        if not universe:
            raise InvalidInput("universe must be non-empty")
        if len(set(universe)) != len(universe):
            raise InvalidInput("duplicate element in universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(
            self, "relations", _freeze_relations(self.signature, universe, dict(self.relations))
        )

    def __eq__(self, other):
        if not isinstance(other, BinaryStructure):
            return NotImplemented
        return (
            self.signature == other.signature
            and set(self.universe) == set(other.universe)
            and dict(self.relations) == dict(other.relations)
        )

    def __hash__(self):
        return hash((self.signature, frozenset(self.universe),
                     tuple(self.relations[z] for z in self.signature)))

    def __repr__(self):
        rels = ", ".join(f"{z}:{len(self.relations[z])}" for z in self.signature)
        return f"BinaryStructure({self.name!r}, n={len(self.universe)}, {rels})"

    def holds(self, symbol, u, v):
        return (u, v) in self.relations[symbol]

    def type_of(self, u, v):
        """Truth vector of all symbols on the ordered pair (u, v)."""
        return tuple((u, v) in self.relations[z] for z in self.signature)

    def renamed(self, mapping, name=None):
        return BinaryStructure(
            self.signature,
            tuple(mapping[x] for x in self.universe),
            {z: {(mapping[u], mapping[v]) for u, v in ps} for z, ps in self.relations.items()},
            name=self.name if name is None else name,
        )


def ordered_pairs(elements: Iterable[str]) -> frozenset[Pair]:
    """All ordered pairs of distinct elements."""
    return frozenset(permutations(elements, 2))


# -- graphs -----------------------------------------------------------------

def is_graph(s: BinaryStructure) -> bool:
    if s.signature.symbols != ("E",):
        return False
    edges = s.relations["E"]
    return all(u != v and (v, u) in edges for u, v in edges)


def make_graph(vertices, edges, name="G") -> BinaryStructure:
    """Build a graph from undirected edges given as 2-element iterables."""
    pairs = set()
    for u, v in edges:
        if u == v:
            raise InvalidInput(f"loop at {u} in a graph")
        pairs.add((u, v))
        pairs.add((v, u))
    return BinaryStructure(Signature(("E",)), tuple(vertices), {"E": pairs}, name=name)


def path_graph(names, name="P") -> BinaryStructure:
    names = list(names)
    return make_graph(names, zip(names, names[1:]), name=name)


def complete_graph(names, name="K") -> BinaryStructure:
    names = list(names)
    return make_graph(names, [(u, v) for i, u in enumerate(names) for v in names[i + 1:]], name=name)


def edgeless_graph(names, name="I") -> BinaryStructure:
    return make_graph(list(names), [], name=name)


def edges_of(g: BinaryStructure) -> set[frozenset]:
    return {frozenset(p) for p in g.relations["E"]}


def neighbourhoods(g: BinaryStructure) -> dict[str, set[str]]:
    adj = {v: set() for v in g.universe}
    for u, v in g.relations["E"]:
        adj[u].add(v)
    return adj


# -- operations -------------------------------------------------------------

def gaifman(s: BinaryStructure) -> BinaryStructure:
    """Graph joining distinct elements that co-occur in some tuple.

    Loop tuples never produce an edge.
    """
    edges = set()
    for pairs in s.relations.values():
        for u, v in pairs:
            if u != v:
                edges.add((u, v))
                edges.add((v, u))
    return BinaryStructure(Signature(("E",)), s.universe, {"E": edges}, name=s.name)


def reduct(s: BinaryStructure, keep: Iterable[str]) -> BinaryStructure:
    keep = set(keep)
    unknown = keep - set(s.signature.symbols)
    if unknown:
        raise UnknownName(f"unknown relation symbols {sorted(unknown)}")
    symbols = tuple(z for z in s.signature if z in keep)
    return BinaryStructure(
        Signature(symbols), s.universe, {z: s.relations[z] for z in symbols}, name=s.name
    )


def complement_expand(g: BinaryStructure) -> BinaryStructure:
    """Add a relation F holding exactly on ordered pairs of distinct non-adjacent vertices."""
    if not is_graph(g):
        raise InvalidInput("complement_expand expects a graph over {E}")
    edges = g.relations["E"]
    non_edges = ordered_pairs(g.universe) - edges
    return BinaryStructure(Signature(("E", "F")), g.universe, {"E": edges, "F": non_edges}, name=g.name)


def matches_via(s1: BinaryStructure, s2: BinaryStructure, f: Mapping[str, str]) -> bool:
    """True iff ``f`` is an isomorphism from ``s1`` onto ``s2``."""
    try:
        image = [f[x] for x in s1.universe]
    except KeyError:
        return False
    if len(set(image)) != len(image) or set(image) != set(s2.universe):
        return False
    if s1.signature != s2.signature:
        return False
    for z in s1.signature:
        mapped = {(f[u], f[v]) for u, v in s1.relations[z]}
        if mapped != set(s2.relations[z]):
            return False
    return True


def biclique_number(g: BinaryStructure, limit: int = 64) -> int:
    """Largest t such that K_{t,t} is a (not necessarily induced) subgraph of ``g``.

    Works on any structure by going through its Gaifman graph.
    """
    if len(g.universe) > limit:
        raise LimitExceeded(f"biclique search on {len(g.universe)} vertices exceeds limit {limit}")
    if not is_graph(g):
        g = gaifman(g)
    adj = neighbourhoods(g)
    vertices = [v for v in g.universe if adj[v]]

    def has_side(t):
        # Choose the A-side in element order; the common neighbourhood of A
        # is automatically disjoint from A and must keep at least t vertices.
        def extend(start, size, common):
            if size == t:
                return True
            for idx in range(start, len(vertices)):
                v = vertices[idx]
                narrowed = adj[v] if common is None else common & adj[v]
                if len(narrowed) < t:
                    continue
                if len(vertices) - idx < t - size:
                    return False
                if extend(idx + 1, size + 1, narrowed):
                    return True
            return False

        return extend(0, 0, None)

    best = 0
    while 2 * (best + 1) <= len(vertices) and has_side(best + 1):
        best += 1
    return best
