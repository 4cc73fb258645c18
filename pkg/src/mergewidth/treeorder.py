"""Tree-orders stored by parent pointers.

The order relation is the reflexive-transitive closure of "parent of"; the
root is the minimum and the leaves are the maximal elements.
"""

from __future__ import annotations

from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InvalidInput, Report, UnknownName


class Relation(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class TreeOrder:
    """Immutable tree-order on a finite node set.

    ``parent`` maps every non-root node to its parent.  Construction does not
    validate; call :func:`validate_tree_order` (model validators do so).
    """

    __slots__ = ("nodes", "parent", "__dict__")

    def __init__(self, nodes: Iterable[str], parent: Mapping[str, str]):
        self.nodes = tuple(nodes)
        self.parent = dict(parent)

    def __eq__(self, other):
        if not isinstance(other, TreeOrder):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and self.parent == other.parent

    def __hash__(self):
        return hash((frozenset(self.nodes), frozenset(self.parent.items())))

    def __repr__(self):
        return f"TreeOrder({len(self.nodes)} nodes, root={self.root!r})"

    def _check(self, x):
        if x not in self._index:
            raise UnknownName(f"unknown node {x!r}")

    @cached_property
    def _index(self):
        return {x: i for i, x in enumerate(self.nodes)}

    @cached_property
    def root(self):
        roots = [x for x in self.nodes if x not in self.parent]
        if len(roots) != 1:
            raise InvalidInput(f"tree-order needs exactly one root, found {roots}")
        return roots[0]

    @cached_property
    def children(self) -> dict[str, list[str]]:
        kids = {x: [] for x in self.nodes}
        for x in self.nodes:
            if x in self.parent:
                kids[self.parent[x]].append(x)
        return kids

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(x for x in self.nodes if not self.children[x])

    def is_leaf(self, x):
        self._check(x)
        return not self.children[x]

    @cached_property
    def depth(self) -> dict[str, int]:
        depth = {self.root: 0}
        stack = [self.root]
        while stack:
            x = stack.pop()
            for y in self.children[x]:
                depth[y] = depth[x] + 1
                stack.append(y)
        if len(depth) != len(self.nodes):
            raise InvalidInput("tree-order has nodes unreachable from the root")
        return depth

    @cached_property
    def _chains(self) -> dict[str, tuple[str, ...]]:
        chains = {}
        for x in self.nodes:
            chain = [x]
            while chain[-1] in self.parent:
                chain.append(self.parent[chain[-1]])
                if len(chain) > len(self.nodes):
                    raise InvalidInput("parent map has a cycle")
            chains[x] = tuple(chain)
        return chains

    def ancestors(self, x) -> tuple[str, ...]:
        """Chain from ``x`` (inclusive) up to the root (inclusive)."""
        self._check(x)
        return self._chains[x]

    @cached_property
    def _ancestor_sets(self):
        return {x: frozenset(c) for x, c in self._chains.items()}

    def le(self, x, y) -> bool:
        """x ⪯ y, i.e. x is an ancestor of y or equal to it."""
        self._check(x)
        self._check(y)
        return x in self._ancestor_sets[y]

    def lt(self, x, y) -> bool:
        return x != y and self.le(x, y)

    def comparable(self, x, y) -> Relation:
        self._check(x)
        self._check(y)
        if x == y:
            return Relation.EQUAL
        if x in self._ancestor_sets[y]:
            return Relation.LESS
        if y in self._ancestor_sets[x]:
            return Relation.GREATER
        return Relation.INCOMPARABLE

    def is_comparable(self, x, y) -> bool:
        return self.comparable(x, y) is not Relation.INCOMPARABLE

    @cached_property
    def _descendants(self) -> dict[str, frozenset[str]]:
        desc = {x: {x} for x in self.nodes}
        for x in sorted(self.nodes, key=lambda n: -self.depth[n]):
            if x in self.parent:
                desc[self.parent[x]] |= desc[x]
        return {x: frozenset(d) for x, d in desc.items()}

    def descendants(self, x) -> frozenset[str]:
        """All y with x ⪯ y (x included)."""
        self._check(x)
        return self._descendants[x]

    def leaves_below(self, x) -> frozenset[str]:
        return frozenset(y for y in self.descendants(x) if not self.children[y])

    def comparable_set(self, x) -> frozenset[str]:
        """Every node comparable with ``x`` (ancestors, descendants, itself)."""
        return self._ancestor_sets[x] | self._descendants[x]

    def strict_pairs(self) -> set[tuple[str, str]]:
        """The strict order as a set of (ancestor, descendant) pairs."""
        return {(a, x) for x in self.nodes for a in self._chains[x][1:]}

    def restrict(self, keep: Iterable[str]) -> "TreeOrder":
        """Induced tree-order on ``keep``; parents become nearest kept ancestors."""
        keep = set(keep)
        if self.root not in keep:
            raise InvalidInput("restriction must keep the root")
        parent = {}
        for x in self.nodes:
            if x not in keep or x == self.root:
                continue
            for a in self._chains[x][1:]:
                if a in keep:
                    parent[x] = a
                    break
        return TreeOrder([x for x in self.nodes if x in keep], parent)


def validate_tree_order(t: TreeOrder) -> Report:
    nodes = set(t.nodes)
    if len(nodes) != len(t.nodes):
        return Report.fail("nodes", "duplicate node")
    if not t.nodes:
        return Report.fail("nodes", "empty tree-order")
    for x, p in t.parent.items():
        if x not in nodes:
            return Report.fail("parent", f"parent given for unknown node {x!r}", x)
        if p not in nodes:
            return Report.fail("parent", f"node {x!r} has unknown parent {p!r}", x)
        if p == x:
            return Report.fail("cycle", f"node {x!r} is its own parent", x)
    roots = [x for x in t.nodes if x not in t.parent]
    if not roots:
        return Report.fail("cycle", "no root: the parent map is cyclic", t.nodes[0])
    if len(roots) > 1:
        return Report.fail("root", f"several roots {roots}", *roots)
    for x in t.nodes:
        seen = {x}
        y = x
        while y in t.parent:
            y = t.parent[y]
            if y in seen:
                return Report.fail("cycle", f"cycle through {y!r}", y)
            seen.add(y)
    return Report(True)


def is_antichain(t: TreeOrder, members: Iterable[str], maximal: bool = False) -> bool:
    members = list(dict.fromkeys(members))
    for x in members:
        t._check(x)
    for i, x in enumerate(members):
        for y in members[i + 1:]:
            if t.is_comparable(x, y):
                return False
    if maximal:
        covered = set()
        for x in members:
            covered |= t.comparable_set(x)
        return covered == set(t.nodes)
    return True
