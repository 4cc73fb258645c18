"""Graphviz export for structures and models."""

from __future__ import annotations

from .errors import InvalidInput
from .model import MergeModel
from .ranked import RankedMergeModel
from .sequence import MergeSequence
from .structures import BinaryStructure
from .twin import TwinModel

_TRANSVERSAL = 'color="gray30", constraint=false'


def _q(name) -> str:
    return '"' + str(name).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _tree_lines(order, labels=None):
    out = []
    for x in sorted(order.nodes):
        label = labels.get(x, x) if labels else x
        shape = "box" if order.is_leaf(x) else "ellipse"
        out.append(f"  {_q(x)} [label={_q(label)}, shape={shape}];")
    for x in sorted(order.parent):
        out.append(f"  {_q(order.parent[x])} -> {_q(x)} [arrowhead=none];")
    return out


def model_dot(m: MergeModel | RankedMergeModel) -> str:
    """Tree edges solid; S_{Z,1} solid gray; S_{Z,0} dotted gray."""
    labels = None
    if isinstance(m, RankedMergeModel):
        labels = {x: f"{x} [{lo},{hi}]" for x, (lo, hi) in m.ranking.items()}
        m = m.model
    out = [f"digraph {_q(m.name)} {{", "  rankdir=TB;"]
    out += _tree_lines(m.order, labels)
    for z in m.base_signature:
        for alpha in (1, 0):
            style = "solid" if alpha else "dotted"
            for x, y in sorted(m.s_tuples[(z, alpha)]):
                out.append(f"  {_q(x)} -> {_q(y)} [style={style}, {_TRANSVERSAL}, "
                           f"label={_q(f'{z},{alpha}')}];")
    out.append("}")
    return "\n".join(out) + "\n"


def twin_dot(t: TwinModel) -> str:
    out = [f"digraph {_q(t.name)} {{", "  rankdir=TB;"]
    out += _tree_lines(t.order)
    for r in t.base_signature:
        for x, y in sorted(t.z_tuples[r]):
            out.append(f"  {_q(x)} -> {_q(y)} [style=solid, {_TRANSVERSAL}, label={_q(r)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def structure_dot(s: BinaryStructure) -> str:
    out = [f"digraph {_q(s.name)} {{"]
    out += [f"  {_q(x)};" for x in sorted(s.universe)]
    for z in s.signature:
        for u, v in sorted(s.relations[z]):
            out.append(f"  {_q(u)} -> {_q(v)} [label={_q(z)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def sequence_dot(seq: MergeSequence) -> str:
    """Parts as nodes, each linked to the part containing it one step later."""
    names = {}
    out = [f"digraph {_q(seq.structure_ref)} {{", "  rankdir=BT;"]
    for i, step in enumerate(seq.steps, 1):
        for p in step.partition:
            if p not in names:
                names[p] = "{" + ",".join(sorted(p)) + "}"
                out.append(f"  {_q(names[p])} [shape=box];")
        if i > 1:
            prev = seq.steps[i - 2].partition
            for p in prev:
                q = next(q for q in step.partition if p <= q)
                if p != q:
                    out.append(f"  {_q(names[p])} -> {_q(names[q])};")
    out.append("}")
    return "\n".join(out) + "\n"


def to_dot(obj) -> str:
    if isinstance(obj, (MergeModel, RankedMergeModel)):
        return model_dot(obj)
    if isinstance(obj, TwinModel):
        return twin_dot(obj)
    if isinstance(obj, BinaryStructure):
        return structure_dot(obj)
    if isinstance(obj, MergeSequence):
        return sequence_dot(obj)
    raise InvalidInput(f"cannot draw {type(obj).__name__}")
