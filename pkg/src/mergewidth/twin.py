"""Twin-models, the clique-expression builder and the translation to merge-models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cliquewidth import (Add, AddSym, CliqueExpression, Create, Relabel, Term, Union,
                          eval_cliqueexpr, walk)
from .errors import InvalidInput, Report, UnknownName
from .model import ORDER_SYMBOL, MergeModel, _acyclic, _descent_arcs, validate_model
from .structures import BinaryStructure, Pair, Signature
from .treeorder import TreeOrder, validate_tree_order


def z_symbol(r: str) -> str:
    return f"Z__{r}"


@dataclass(frozen=True, eq=False)
class TwinModel:
    base_signature: Signature
    order: TreeOrder
    z_tuples: Mapping[str, frozenset[Pair]]
    name: str = "T"

    def __post_init__(self):
        if not isinstance(self.base_signature, Signature):
            object.__setattr__(self, "base_signature", Signature(tuple(self.base_signature)))
        if ORDER_SYMBOL in self.base_signature:
            raise InvalidInput(f"symbol name {ORDER_SYMBOL!r} is reserved for the tree order")
        nodes = set(self.order.nodes)
        tuples = {}
        for r, pairs in dict(self.z_tuples).items():
            if r not in self.base_signature:
                raise UnknownName(f"Z-tuples for unknown symbol {r!r}")
            pairs = frozenset(tuple(p) for p in pairs)
            for x, y in pairs:
                if x not in nodes or y not in nodes:
                    raise UnknownName(f"Z-tuple ({x}, {y}) uses an unknown node")
            tuples[r] = pairs
        for r in self.base_signature:
            tuples.setdefault(r, frozenset())
        object.__setattr__(self, "z_tuples", tuples)

    def __eq__(self, other):
        if not isinstance(other, TwinModel):
            return NotImplemented
        return (self.base_signature == other.base_signature and self.order == other.order
                and self.z_tuples == other.z_tuples)

    def __hash__(self):
        return hash((self.base_signature, self.order, frozenset(self.z_tuples.items())))

    def __repr__(self):
        n = sum(len(v) for v in self.z_tuples.values())
        return f"TwinModel({self.name!r}, {len(self.order.nodes)} nodes, {n} Z-tuples)"

    @property
    def z_all(self) -> frozenset[Pair]:
        out = set()
        for pairs in self.z_tuples.values():
            out |= pairs
        return frozenset(out)


def validate_twin_model(t: TwinModel) -> Report:
    tree = validate_tree_order(t.order)
    if not tree:
        return Report.fail("tree", f"order is not a tree-order: {tree.message}", *tree.witness)
    order = t.order
    for r in t.base_signature:
        for x, y in sorted(t.z_tuples[r]):
            if order.is_comparable(x, y):
                return Report.fail("comparable", f"Z_{r}({x}, {y}) joins comparable nodes",
                                   r, x, y)
    for r in t.base_signature:
        pairs = t.z_tuples[r]
        for x, y in sorted(pairs):
            for xp in order.ancestors(x):
                for yp in order.ancestors(y):
                    if (xp, yp) != (x, y) and (xp, yp) in pairs:
                        return Report.fail("minimal", f"Z_{r}({x}, {y}) lies above "
                                           f"Z_{r}({xp}, {yp})", r, (x, y), (xp, yp))
    if not _acyclic(_descent_arcs(order, t.z_all, symmetric=True)):
        return Report.fail("cycle", "alternating tree/Z cycle without two consecutive Z edges")
    return Report(True)


def twin_interpret(t: TwinModel, check: bool = True) -> BinaryStructure:
    if check:
        report = validate_twin_model(t)
        if not report:
            raise InvalidInput(f"invalid twin-model: {report.condition}: {report.message}")
    order = t.order
    leaves = order.leaves
    relations = {r: set() for r in t.base_signature}
    for u in leaves:
        for v in leaves:
            if u == v:
                continue
            anc_v = set(order.ancestors(v))
            for r in t.base_signature:
                pairs = t.z_tuples[r]
                if any((x, y) in pairs for x in order.ancestors(u) for y in anc_v):
                    relations[r].add((u, v))
    return BinaryStructure(t.base_signature, leaves, relations, name=t.name)


def twin_structure(t: TwinModel) -> BinaryStructure:
    """The model over {prec} and Z__R: strict ancestor order plus Z-tuples."""
    symbols = (ORDER_SYMBOL,) + tuple(z_symbol(r) for r in t.base_signature)
    relations = {ORDER_SYMBOL: t.order.strict_pairs()}
    for r in t.base_signature:
        relations[z_symbol(r)] = t.z_tuples[r]
    return BinaryStructure(Signature(symbols), t.order.nodes, relations, name=t.name)


def z_part_graph(t: TwinModel) -> BinaryStructure:
    edges = set()
    for x, y in t.z_all:
        edges.update(((x, y), (y, x)))
    return BinaryStructure(Signature(("E",)), t.order.nodes, {"E": edges}, name=t.name)


# -- construction from a clique expression ---------------------------------

class _Forest:
    """Colored pre-model: colors are (label, primed)."""

    def __init__(self, taken):
        self.parent = {}
        self.color = {}
        self.nodes = []
        self.z = set()
        self._taken = set(taken)
        self._counter = 0

    def fresh(self):
        while True:
            self._counter += 1
            name = f"_{self._counter}"
            if name not in self._taken:
                self._taken.add(name)
                return name

    def fresh_root(self):
        name = "_r"
        while name in self._taken:
            name = "_" + name
        self._taken.add(name)
        return name

    def add_node(self, name, color):
        self.nodes.append(name)
        self.color[name] = color


def _replay(e: CliqueExpression, pruned: frozenset | None):
    """Replay ``e`` over a colored forest.

    With ``pruned`` given, also emits the witness term over the model
    signature, leaving out Z-tuples in ``pruned``.
    """
    t = e.label_count
    elements = [n.name for n in _creates(e.term)]
    forest = _Forest(elements)
    emit = pruned is not None
    zname = {r: z_symbol(r) for r in e.signature}

    def members(nodes, label, primed):
        return [x for x in nodes if forest.color[x] == (label, primed)]

    def check_invariant(nodes):
        # label-colored nodes are forest roots; primed nodes sit below a root
        # of the matching label
        for x in nodes:
            lab, primed = forest.color[x]
            if not primed and x in forest.parent:
                raise AssertionError(f"{x} has an unprimed color but is not a root")
            if primed:
                y = x
                while y in forest.parent:
                    y = forest.parent[y]
                if forest.color[y] != (lab, False):
                    raise AssertionError(f"{x} is not below a root of label {lab}")

    def run(node):
        # returns (nodes of this sub-forest, witness term or None)
        if isinstance(node, Create):
            forest.add_node(node.name, (node.label, False))
            return [node.name], (Create(node.label, node.name) if emit else None)
        if isinstance(node, Union):
            ln, lw = run(node.left)
            rn, rw = run(node.right)
            return ln + rn, (Union(lw, rw) if emit else None)
        nodes, w = run(node.child)
        if isinstance(node, (Add, AddSym)):
            i, j = node.i, node.j
            roots_i, roots_j = members(nodes, i, False), members(nodes, j, False)
            if not roots_i or not roots_j:
                return nodes, w
            for x in nodes:
                lab, primed = forest.color[x]
                if lab in (i, j) and not primed:
                    forest.color[x] = (lab, True)
            x, y = forest.fresh(), forest.fresh()
            forest.add_node(x, (i, False))
            forest.add_node(y, (j, False))
            for root in roots_i:
                forest.parent[root] = x
            for root in roots_j:
                forest.parent[root] = y
            ties = [(node.symbol, x, y)]
            if isinstance(node, AddSym):
                ties.append((node.symbol, y, x))
            forest.z.update(ties)
            nodes = nodes + [x, y]
            if emit:
                w = Relabel(i, t + i, w)
                w = Relabel(j, t + j, w)
                w = Union(Create(i, x), w)
                w = Union(Create(j, y), w)
                w = Add(ORDER_SYMBOL, i, t + i, w)
                w = Add(ORDER_SYMBOL, j, t + j, w)
                kept = [tie for tie in ties if tie not in pruned]
                z = zname[node.symbol]
                if len(kept) == 2:
                    w = AddSym(z, i, j, w)
                elif kept == [(node.symbol, x, y)]:
                    w = Add(z, i, j, w)
                elif kept:
                    w = Add(z, j, i, w)
            check_invariant(nodes)
            return nodes, w
        if isinstance(node, Relabel):
            i, j = node.i, node.j
            roots_i = members(nodes, i, False)
            if not roots_i:
                return nodes, w
            roots_j = members(nodes, j, False)
            for x in nodes:
                lab, _ = forest.color[x]
                if lab in (i, j):
                    forest.color[x] = (j, True)
            y = forest.fresh()
            forest.add_node(y, (j, False))
            for root in roots_i + roots_j:
                forest.parent[root] = y
            nodes = nodes + [y]
            if emit:
                w = Relabel(t + i, t + j, w)
                w = Relabel(i, t + j, w)
                w = Relabel(j, t + j, w)
                w = Union(Create(j, y), w)
                w = Add(ORDER_SYMBOL, j, t + j, w)
            check_invariant(nodes)
            return nodes, w
        raise InvalidInput(f"unknown expression node {node!r}")

    nodes, w = run(e.term)
    roots = [x for x in nodes if x not in forest.parent]
    root = forest.fresh_root()
    forest.add_node(root, (1, False))
    for x in roots:
        forest.parent[x] = root
    if emit:
        for c in range(1, 2 * t + 1):
            if c != t + 1:
                w = Relabel(c, t + 1, w)
        w = Union(Create(1, root), w)
        w = Add(ORDER_SYMBOL, 1, t + 1, w)
    return forest, root, w


def _creates(term: Term):
    return [n for n in walk(term) if isinstance(n, Create)]


def _prune(order: TreeOrder, z: set) -> set:
    """Tuples with a distinct componentwise-smaller tuple of the same symbol."""
    out = set()
    for r, x, y in z:
        for xp in order.ancestors(x):
            for yp in order.ancestors(y):
                if (xp, yp) != (x, y) and (r, xp, yp) in z:
                    out.add((r, x, y))
    return out


def twin_model_from_cliqueexpr(e: CliqueExpression) -> tuple[TwinModel, CliqueExpression]:
    """Twin-model of the structure built by ``e`` and a 2t-label witness expression."""
    eval_cliqueexpr(e)  # rejects malformed expressions
    forest, root, _ = _replay(e, None)
    nodes = [root] + [x for x in forest.nodes if x != root]
    order = TreeOrder(nodes, forest.parent)
    pruned = frozenset(_prune(order, forest.z))
    forest2, root2, witness = _replay(e, pruned)
    assert forest2.nodes == forest.nodes and root2 == root
    z = {r: set() for r in e.signature}
    for r, x, y in forest.z - pruned:
        z[r].add((x, y))
    model = TwinModel(e.signature, order, z)
    sigma = Signature((ORDER_SYMBOL,) + tuple(z_symbol(r) for r in e.signature))
    return model, CliqueExpression(witness, sigma, label_count=2 * e.label_count)


def twin_to_merge(t: TwinModel) -> MergeModel:
    """Merge-model over {E}: Z_E becomes S_{E,1} and Z_F becomes S_{E,0}."""
    if set(t.base_signature.symbols) != {"E", "F"}:
        raise InvalidInput("twin_to_merge expects a twin-model over {E, F}")
    m = MergeModel(Signature(("E",)), t.order,
                   {("E", 1): t.z_tuples["E"], ("E", 0): t.z_tuples["F"]}, name=t.name)
    report = validate_model(m)
    if not report:
        raise InvalidInput(f"translated model violates condition {report.condition}: "
                           f"{report.message}")
    return m
