"""Clique-width expressions: terms, evaluation, linearity and generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union as _U

from .errors import InvalidInput
from .structures import BinaryStructure, Signature


@dataclass(frozen=True)
class Create:
    label: int
    name: str


@dataclass(frozen=True)
class Union:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Add:
    symbol: str
    i: int
    j: int
    child: "Term"


@dataclass(frozen=True)
class AddSym:
    symbol: str
    i: int
    j: int
    child: "Term"


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "Term"


Term = _U[Create, Union, Add, AddSym, Relabel]


def labels_used(term: Term) -> set[int]:
    out = set()
    for node in walk(term):
        if isinstance(node, Create):
            out.add(node.label)
        elif isinstance(node, (Add, AddSym, Relabel)):
            out.update((node.i, node.j))
    return out


def symbols_used(term: Term) -> set[str]:
    return {n.symbol for n in walk(term) if isinstance(n, (Add, AddSym))}


def walk(term: Term):
    """Pre-order traversal without recursion."""
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Union):
            stack.append(node.right)
            stack.append(node.left)
        elif not isinstance(node, Create):
            stack.append(node.child)


@dataclass(frozen=True)
class CliqueExpression:
    term: Term
    signature: Signature
    label_count: int = 0

    def __post_init__(self):
        if not isinstance(self.signature, Signature):
            object.__setattr__(self, "signature", Signature(tuple(self.signature)))
        used = labels_used(self.term)
        if self.label_count == 0:
            object.__setattr__(self, "label_count", max(used))
        unknown = symbols_used(self.term) - set(self.signature.symbols)
        if unknown:
            raise InvalidInput(f"expression uses undeclared symbols {sorted(unknown)}")

    @property
    def linear(self) -> bool:
        return is_linear(self.term)


def is_linear(term) -> bool:
    if isinstance(term, CliqueExpression):
        term = term.term
    return all(
        isinstance(n.left, Create) or isinstance(n.right, Create)
        for n in walk(term) if isinstance(n, Union)
    )


def _check_labels(node, t):
    labels = [node.label] if isinstance(node, Create) else [node.i, node.j]
    for lab in labels:
        if not 1 <= lab <= t:
            raise InvalidInput(f"label {lab} outside 1..{t}")
    if not isinstance(node, Create) and node.i == node.j:
        raise InvalidInput(f"operation needs distinct labels, got {node.i} twice")


def eval_cliqueexpr(e: CliqueExpression) -> tuple[BinaryStructure, dict[str, int]]:
    """Evaluate bottom-up; returns the structure and the final labeling."""
    t = e.label_count
    relations = {z: set() for z in e.signature}
    order = []

    def run(node) -> dict[str, int]:
        # returns element -> label for the subterm
        if not isinstance(node, Union):
            _check_labels(node, t)
        if isinstance(node, Create):
            order.append(node.name)
            return {node.name: node.label}
        if isinstance(node, Union):
            left = run(node.left)
            right = run(node.right)
            clash = left.keys() & right.keys()
            if clash:
                raise InvalidInput(f"duplicate element names {sorted(clash)}")
            return {**left, **right}
        labels = run(node.child)
        if isinstance(node, Relabel):
            return {x: (node.j if lab == node.i else lab) for x, lab in labels.items()}
        xs = [x for x, lab in labels.items() if lab == node.i]
        ys = [y for y, lab in labels.items() if lab == node.j]
        for x in xs:
            for y in ys:
                relations[node.symbol].add((x, y))
                if isinstance(node, AddSym):
                    relations[node.symbol].add((y, x))
        return labels

    labeling = run(e.term)
    if len(set(order)) != len(order):
        raise InvalidInput("duplicate element names")
    return BinaryStructure(e.signature, order, relations), labeling


# -- generators -------------------------------------------------------------

def complement_expansion_expression(g: BinaryStructure) -> CliqueExpression:
    """Linear expression over {E, F} building the complement expansion of graph ``g``.

    Vertices are added in universe order.  Earlier vertices whose adjacency
    to every later vertex agrees share a label.
    """
    names = list(g.universe)
    adj = {v: set() for v in names}
    for u, v in g.relations["E"]:
        adj[u].add(v)
    label_of = {}
    term = None
    for k, v in enumerate(names):
        used = set(label_of.values())
        new = min(lab for lab in range(1, len(names) + 2) if lab not in used)
        leaf = Create(new, v)
        term = leaf if term is None else Union(leaf, term)
        for lab in sorted(used):
            member = next(x for x in names[:k] if label_of[x] == lab)
            symbol = "E" if v in adj[member] else "F"
            term = AddSym(symbol, lab, new, term)
        label_of[v] = new
        future = names[k + 1:]
        by_profile = {}
        for x in names[: k + 1]:
            profile = tuple(y in adj[x] for y in future)
            by_profile.setdefault(profile, []).append(x)
        for group in by_profile.values():
            target = min(label_of[x] for x in group)
            for lab in sorted({label_of[x] for x in group} - {target}):
                term = Relabel(lab, target, term)
            for x in group:
                label_of[x] = target
    return CliqueExpression(term, Signature(("E", "F")))


def random_cliqueexpr(rng: random.Random, t: int, n: int, linear: bool,
                      symbols=("E",), op_rate: float = 0.6) -> CliqueExpression:
    """Random expression with labels in 1..t and n elements named e0.."""
    counter = iter(range(n))

    def ops(term):
        while rng.random() < op_rate and t >= 2:
            i, j = rng.sample(range(1, t + 1), 2)
            kind = rng.random()
            z = rng.choice(symbols)
            if kind < 0.4:
                term = Add(z, i, j, term)
            elif kind < 0.75:
                term = AddSym(z, i, j, term)
            else:
                term = Relabel(i, j, term)
        return term

    def leaf():
        return Create(rng.randint(1, t), f"e{next(counter)}")

    def build(k):
        if k == 1:
            return ops(leaf())
        if linear:
            rest = build(k - 1)
            pair = (leaf(), rest) if rng.random() < 0.5 else (rest, leaf())
            return ops(Union(*pair))
        split = rng.randint(1, k - 1)
        return ops(Union(build(split), build(k - split)))

    term = build(n)
    return CliqueExpression(term, Signature(tuple(symbols)), label_count=t)
