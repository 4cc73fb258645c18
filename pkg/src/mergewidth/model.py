"""Merge-models: tree-ordered structures carrying S_{Z,alpha} transversal tuples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping

from .errors import InvalidInput, Report, UnknownName
from .structures import BinaryStructure, Pair, Signature
from .treeorder import TreeOrder, validate_tree_order

ORDER_SYMBOL = "prec"


def s_symbol(z: str, alpha: int) -> str:
    """Name of S_{Z,alpha} when a model is flattened into a plain structure."""
    return f"S__{z}__{alpha}"


@dataclass(frozen=True, eq=False)
class MergeModel:
    base_signature: Signature
    order: TreeOrder
    s_tuples: Mapping[tuple[str, int], frozenset[Pair]]
    name: str = "M"

    def __post_init__(self):
        if not isinstance(self.base_signature, Signature):
            object.__setattr__(self, "base_signature", Signature(tuple(self.base_signature)))
        nodes = set(self.order.nodes)
        tuples = {}
        for key, pairs in dict(self.s_tuples).items():
            z, alpha = key
            if z not in self.base_signature:
                raise UnknownName(f"S-tuples for unknown symbol {z!r}")
            if alpha not in (0, 1):
                raise InvalidInput(f"alpha must be 0 or 1, got {alpha!r}")
            pairs = frozenset(tuple(p) for p in pairs)
            for x, y in pairs:
                if x not in nodes or y not in nodes:
                    raise UnknownName(f"S-tuple ({x}, {y}) uses an unknown node")
            tuples[(z, alpha)] = pairs
        for z in self.base_signature:
            for alpha in (0, 1):
                tuples.setdefault((z, alpha), frozenset())
        object.__setattr__(self, "s_tuples", tuples)

    def __eq__(self, other):
        if not isinstance(other, MergeModel):
            return NotImplemented
        return (self.base_signature == other.base_signature and self.order == other.order
                and self.s_tuples == other.s_tuples)

    def __hash__(self):
        return hash((self.base_signature, self.order,
                     frozenset((k, v) for k, v in self.s_tuples.items())))

    def __repr__(self):
        n = sum(len(v) for v in self.s_tuples.values())
        return f"MergeModel({self.name!r}, {len(self.order.nodes)} nodes, {n} S-tuples)"

    @property
    def nodes(self):
        return self.order.nodes

    @property
    def leaves(self):
        return self.order.leaves

    @property
    def root(self):
        return self.order.root

    def s_z(self, z) -> frozenset[Pair]:
        return self.s_tuples[(z, 0)] | self.s_tuples[(z, 1)]

    @cached_property
    def s_all(self) -> frozenset[Pair]:
        out = set()
        for pairs in self.s_tuples.values():
            out |= pairs
        return frozenset(out)

    def pair_le(self, p: Pair, q: Pair) -> bool:
        return self.order.le(p[0], q[0]) and self.order.le(p[1], q[1])

    def with_tuples(self, s_tuples, name=None) -> "MergeModel":
        return MergeModel(self.base_signature, self.order, s_tuples, name or self.name)

    def renamed(self, mapping, name=None) -> "MergeModel":
        order = TreeOrder([mapping[x] for x in self.order.nodes],
                          {mapping[x]: mapping[p] for x, p in self.order.parent.items()})
        tuples = {k: {(mapping[x], mapping[y]) for x, y in v} for k, v in self.s_tuples.items()}
        return MergeModel(self.base_signature, order, tuples, name or self.name)


def validate_model(m: MergeModel) -> Report:
    tree = validate_tree_order(m.order)
    if not tree:
        return Report.fail("1", f"order is not a tree-order: {tree.message}", *tree.witness)
    order = m.order
    for (z, alpha), pairs in sorted(m.s_tuples.items()):
        for x, y in sorted(pairs):
            if x != y and order.is_comparable(x, y):
                return Report.fail("2", f"S_{z},{alpha}({x}, {y}) joins distinct comparable nodes",
                                   z, alpha, x, y)
    s_all = m.s_all
    by_first = {}
    for x, y in s_all:
        by_first.setdefault(x, set()).add(y)
    # cross pattern: x < x', y < y' strictly, S(x, y') and S(x', y)
    for x, yp in sorted(s_all):
        for xp in sorted(order.descendants(x) - {x}):
            for y in by_first.get(xp, ()):
                if y != yp and order.lt(y, yp):
                    return Report.fail(
                        "3", f"crossing S-tuples ({x}, {yp}) and ({xp}, {y})", (x, y), (xp, yp)
                    )
    for z in m.base_signature:
        both = m.s_tuples[(z, 0)] & m.s_tuples[(z, 1)]
        if both:
            x, y = min(both)
            return Report.fail("4", f"S_{z},0 and S_{z},1 both hold on ({x}, {y})", z, x, y)
    leaves = order.leaves
    for z in m.base_signature:
        sz = m.s_z(z)
        carriers = {}
        for x, y in sz:
            carriers.setdefault(x, set()).add(y)
        for u in leaves:
            anc_u = order.ancestors(u)
            for v in leaves:
                if u == v:
                    continue
                anc_v = set(order.ancestors(v))
                if not any(carriers.get(x, set()) & anc_v for x in anc_u):
                    return Report.fail("5", f"no S_{z} tuple below leaf pair ({u}, {v})", z, u, v)
    return Report(True)


def _require_valid(m: MergeModel):
    report = validate_model(m)
    if not report:
        raise InvalidInput(f"invalid merge-model: condition {report.condition}: {report.message}")


def hat(m: MergeModel, u, v) -> Pair:
    """Componentwise-maximal S-carrying pair below the leaf pair (u, v)."""
    order = m.order
    if u == v:
        raise InvalidInput("hat needs two distinct leaves")
    if not (order.is_leaf(u) and order.is_leaf(v)):
        raise InvalidInput(f"hat needs leaves, got ({u}, {v})")
    s_all = m.s_all
    found = [(x, y) for x in order.ancestors(u) for y in order.ancestors(v) if (x, y) in s_all]
    if not found:
        raise InvalidInput(f"no S-tuple below ({u}, {v})")
    best = max(found, key=lambda p: order.depth[p[0]] + order.depth[p[1]])
    if not all(m.pair_le(p, best) for p in found):
        raise InvalidInput(f"S-tuples below ({u}, {v}) do not form a chain")
    return best


def interpret(m: MergeModel, check: bool = True) -> BinaryStructure:
    if check:
        _require_valid(m)
    leaves = m.order.leaves
    relations = {z: set() for z in m.base_signature}
    for u in leaves:
        for v in leaves:
            if u == v:
                continue
            h = hat(m, u, v)
            for z in m.base_signature:
                if h in m.s_tuples[(z, 1)]:
                    relations[z].add((u, v))
    return BinaryStructure(m.base_signature, leaves, relations, name=m.name)


def skeleton(m: MergeModel) -> frozenset:
    """Root, leaves and every node that appears in an S-tuple in either position."""
    keep = {m.order.root, *m.order.leaves}
    for x, y in m.s_all:
        keep.update((x, y))
    return frozenset(keep)


def restrict_model(m: MergeModel, keep: Iterable) -> MergeModel:
    keep = set(keep)
    order = m.order.restrict(keep)
    tuples = {k: {(x, y) for x, y in v if x in keep and y in keep} for k, v in m.s_tuples.items()}
    return MergeModel(m.base_signature, order, tuples, m.name)


def compactify(m: MergeModel) -> MergeModel:
    _require_valid(m)
    return restrict_model(m, skeleton(m))


def is_compact(m: MergeModel) -> bool:
    return skeleton(m) == frozenset(m.order.nodes)


def is_loopless(m: MergeModel) -> bool:
    return all(x != y for x, y in m.s_all)


def _descent_arcs(order: TreeOrder, pairs: Iterable[Pair], symmetric: bool):
    """Arc u -> u' whenever u is strictly below some v with (v, u') a tuple."""
    graph = {x: set() for x in order.nodes}
    for v, up in pairs:
        ends = [(v, up), (up, v)] if symmetric else [(v, up)]
        for a, b in ends:
            for u in order.ancestors(a)[1:]:
                graph[u].add(b)
    return graph


def _acyclic(graph) -> bool:
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError:
        return False
    return True


def sequenceability(m: MergeModel) -> bool:
    """True iff no cyclic chain u_i < v_i, S(v_i, u_{i+1}) with every step strict."""
    _require_valid(m)
    return _acyclic(_descent_arcs(m.order, m.s_all, symmetric=False))


def model_structure(m: MergeModel) -> BinaryStructure:
    """The model as a plain structure over {prec} and the S__Z__alpha symbols.

    ``prec`` is the strict ancestor relation, ancestor first.
    """
    symbols = [ORDER_SYMBOL]
    relations = {ORDER_SYMBOL: m.order.strict_pairs()}
    for z in m.base_signature:
        for alpha in (0, 1):
            symbols.append(s_symbol(z, alpha))
            relations[s_symbol(z, alpha)] = m.s_tuples[(z, alpha)]
    return BinaryStructure(Signature(tuple(symbols)), m.order.nodes, relations, name=m.name)


def s_part_graph(m: MergeModel) -> BinaryStructure:
    """Gaifman graph of the S-tuples alone (the unordered part)."""
    edges = set()
    for x, y in m.s_all:
        if x != y:
            edges.update(((x, y), (y, x)))
    return BinaryStructure(Signature(("E",)), m.order.nodes, {"E": edges}, name=m.name)
