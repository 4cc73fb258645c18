"""A compact ranked merge-model of a compact clean ranked merge-model.

The input model is read as a plain structure over the strict order symbol
and one symbol per S-relation; the output represents that structure with at
most twice the merge-walk width.
"""

from __future__ import annotations

from .errors import InvalidInput
from .model import ORDER_SYMBOL, MergeModel, is_compact, model_structure
from .ranked import RankedMergeModel, _clean_problem, _require_valid
from .structures import BinaryStructure
from .treeorder import TreeOrder

LIFT_ROOT = "|root"


def leaf_code(u, role: int) -> str:
    """Node name for (u, role) with role -1 for leaves, 0 or 1 for internal nodes."""
    return f"{u}|{role}"


def lifted_leaf_map(rm: RankedMergeModel) -> dict[str, str]:
    """Node of the input model -> leaf of the lifted model representing it."""
    order = rm.order
    return {u: leaf_code(u, -1 if order.is_leaf(u) else 1) for u in order.nodes}


def lift_model(rm: RankedMergeModel) -> RankedMergeModel:
    _require_valid(rm)
    problem = _clean_problem(rm)
    if problem is not None:
        raise InvalidInput(f"lift_model needs a clean model: {problem}")
    if not is_compact(rm.model):
        raise InvalidInput("lift_model needs a compact model")
    order = rm.order
    flat = model_structure(rm.model)
    sigma = flat.signature
    internal = [u for u in order.nodes if not order.is_leaf(u)]

    nodes = [LIFT_ROOT]
    parent = {}

    def internal_parent(u):
        p = order.parent.get(u)
        return LIFT_ROOT if p is None else leaf_code(p, 0)

    for u in internal:
        nodes += [leaf_code(u, 0), leaf_code(u, 1)]
        parent[leaf_code(u, 0)] = internal_parent(u)
        parent[leaf_code(u, 1)] = internal_parent(u)
    for v in order.leaves:
        nodes.append(leaf_code(v, -1))
        parent[leaf_code(v, -1)] = internal_parent(v)
    tree = TreeOrder(nodes, parent)

    code = lifted_leaf_map(rm)
    tuples = {(y, a): set() for y in sigma for a in (0, 1)}
    for y in sigma:
        tuples[(y, 0)].add((LIFT_ROOT, LIFT_ROOT))
    for u in internal:
        tuples[(ORDER_SYMBOL, 1)].add((leaf_code(u, 1), leaf_code(u, 0)))
    for y in sigma:
        if y == ORDER_SYMBOL:
            continue
        for a, b in flat.relations[y]:
            tuples[(y, 1)].add((code[a], code[b]))
    lifted = MergeModel(sigma, tree, tuples, name=rm.model.name)

    m = rm.lo(order.root)
    ranking = {LIFT_ROOT: (m + 1, m + 1)}
    for v in order.leaves:
        ranking[leaf_code(v, -1)] = rm.ranking[v]
    for u in internal:
        ranking[leaf_code(u, 0)] = rm.ranking[u]
        ranking[leaf_code(u, 1)] = (1, rm.hi(u))
    return RankedMergeModel(lifted, ranking)


def lift_target(rm: RankedMergeModel) -> BinaryStructure:
    """What the lifted model interprets to, named by lifted leaves.

    The input's structure restricted to distinct pairs: loops of S-relations
    are invisible to the interpretation, which only covers distinct leaves.
    """
    flat = model_structure(rm.model)
    code = lifted_leaf_map(rm)
    relations = {y: {(code[a], code[b]) for a, b in flat.relations[y] if a != b}
                 for y in flat.signature}
    return BinaryStructure(flat.signature, [code[u] for u in flat.universe], relations,
                           name=flat.name)
