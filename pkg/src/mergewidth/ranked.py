"""Ranked merge-models: interval rankings, cleaning, conversions to and from
merge sequences, merge-walk reachability and ranked compactification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidInput, Report
from .model import MergeModel, restrict_model, skeleton, validate_model
from .sequence import MergeSequence, validate_sequence
from .structures import BinaryStructure, ordered_pairs
from .treeorder import TreeOrder

Interval = tuple[Fraction, Fraction]


def _interval(value) -> Interval:
    lo, hi = value
    return Fraction(lo), Fraction(hi)


@dataclass(frozen=True, eq=False)
class RankedMergeModel:
    model: MergeModel
    ranking: Mapping[str, Interval]

    def __post_init__(self):
        object.__setattr__(self, "ranking",
                           {x: _interval(iv) for x, iv in dict(self.ranking).items()})

    def __eq__(self, other):
        if not isinstance(other, RankedMergeModel):
            return NotImplemented
        return self.model == other.model and self.ranking == other.ranking

    def __hash__(self):
        return hash((self.model, frozenset(self.ranking.items())))

    def __repr__(self):
        return f"RankedMergeModel({self.model!r})"

    @property
    def order(self) -> TreeOrder:
        return self.model.order

    def lo(self, x) -> Fraction:
        return self.ranking[x][0]

    def hi(self, x) -> Fraction:
        return self.ranking[x][1]

    def overlap_max(self, x, y):
        """max of I(x) ∩ I(y), or None when the intervals are disjoint."""
        lo = max(self.lo(x), self.lo(y))
        hi = min(self.hi(x), self.hi(y))
        return hi if lo <= hi else None

    def renamed(self, mapping) -> "RankedMergeModel":
        return RankedMergeModel(self.model.renamed(mapping),
                                {mapping[x]: iv for x, iv in self.ranking.items()})


def _clean_problem(rm: RankedMergeModel):
    order = rm.order
    root = order.root
    m = rm.lo(root)
    if m.denominator != 1 or m < 1:
        return "root left endpoint is not a positive integer"
    los = {rm.lo(x) for x in order.nodes}
    if los != {Fraction(k) for k in range(1, int(m) + 1)}:
        return f"left endpoints are not exactly 1..{m}"
    for v in order.leaves:
        if rm.lo(v) != 1:
            return f"leaf {v} does not start at 1"
    if rm.hi(root) != m:
        return f"root interval is not [{m},{m}]"
    for x, p in order.parent.items():
        if rm.hi(x) != rm.lo(p) - 1:
            return f"node {x} does not end right before its parent starts"
    return None


def validate_ranking(rm: RankedMergeModel) -> Report:
    """Checks the model, then both ranking clauses; notes whether it is clean."""
    base = validate_model(rm.model)
    if not base:
        return Report.fail("model", f"model condition {base.condition}: {base.message}",
                           *base.witness)
    order = rm.order
    for x in order.nodes:
        if x not in rm.ranking:
            return Report.fail("interval", f"node {x} has no interval", x)
        if rm.lo(x) > rm.hi(x):
            return Report.fail("interval", f"interval of {x} is empty", x)
    extra = set(rm.ranking) - set(order.nodes)
    if extra:
        return Report.fail("interval", f"intervals for unknown nodes {sorted(extra)}",
                           *sorted(extra))
    for x in order.nodes:
        p = order.parent.get(x)
        if p is not None and not rm.hi(x) < rm.lo(p):
            return Report.fail("1", f"interval of {p} is not right of its child {x}", p, x)
    for x, y in sorted(rm.model.s_all):
        if rm.overlap_max(x, y) is None:
            return Report.fail("2", f"S({x}, {y}) joins disjoint intervals", x, y)
    problem = _clean_problem(rm)
    note = "clean" if problem is None else f"not clean: {problem}"
    return Report(True, notes=(note,))


def is_clean(rm: RankedMergeModel) -> bool:
    return _clean_problem(rm) is None


def _require_valid(rm):
    report = validate_ranking(rm)
    if not report:
        raise InvalidInput(f"invalid ranked merge-model: {report.condition}: {report.message}")


def cleaning(rm: RankedMergeModel) -> RankedMergeModel:
    """Integer-normalized ranking that keeps the order of non-leaf left endpoints."""
    _require_valid(rm)
    order = rm.order
    leaves = set(order.leaves)
    leaf_lo = min(rm.lo(v) for v in leaves)
    f = {x: (leaf_lo if x in leaves else rm.lo(x)) for x in order.nodes}
    values = sorted(set(f.values()))
    rank = {val: k for k, val in enumerate(values, 1)}
    g = {x: rank[f[x]] for x in order.nodes}
    clean = {}
    for x in order.nodes:
        p = order.parent.get(x)
        clean[x] = (g[x], g[x]) if p is None else (g[x], g[p] - 1)
    return RankedMergeModel(rm.model, clean)


# -- sequences to models ----------------------------------------------------

def _compact_name(elements):
    names = sorted(elements)
    if all(len(x) == 1 for x in names):
        return "".join(names)
    return "_".join(names)


def sequence_part_names(seq: MergeSequence) -> dict[frozenset, str]:
    """Deterministic node names for every part occurring in ``seq``."""
    parts = []
    for step in seq.steps:
        for p in step.partition:
            if p not in parts:
                parts.append(p)
    universe = frozenset().union(*parts)
    names = {}
    for p in parts:
        if len(p) == 1:
            names[p] = f"L_{next(iter(p))}"
        elif p == universe:
            names[p] = "Root"
        else:
            names[p] = f"N_{_compact_name(p)}"
    if len(set(names.values())) != len(names):
        ordered = sorted(parts, key=lambda p: (len(p), sorted(p)))
        names = {p: f"P{k}" for k, p in enumerate(ordered)}
    return names


def model_of_sequence(seq: MergeSequence, g: BinaryStructure, clean: bool = True
                      ) -> RankedMergeModel:
    """The model of a merge sequence with its occurrence ranking.

    Pairs already revealed at the first step are attached to the singleton
    parts holding them.  With ``clean`` (the default) the occurrence ranking
    is passed through :func:`cleaning`.
    """
    report = validate_sequence(seq, g)
    if not report:
        raise InvalidInput(f"invalid merge sequence: {report.message}")
    names = sequence_part_names(seq)
    occurrences = {}
    for i, step in enumerate(seq.steps, 1):
        for p in step.partition:
            occurrences.setdefault(p, []).append(i)

    parent = {}
    for p in names:
        above = [q for q in names if q > p]
        if above:
            parent[names[p]] = names[min(above, key=len)]
    nodes = [names[p] for p in sorted(names, key=lambda p: (-len(p), sorted(p)))]
    order = TreeOrder(nodes, parent)

    cumulative = seq.cumulative()
    tuples = {(z, a): set() for z in g.signature for a in (0, 1)}
    # level 0 holds R_1, seen through the singleton partition
    batches = [(seq.steps[0].partition, cumulative[0])]
    for i in range(len(seq.steps) - 1):
        batches.append((seq.steps[i].partition, cumulative[i + 1] - cumulative[i]))
    for partition, fresh in batches:
        if not fresh:
            continue
        where = {x: p for p in partition for x in p}
        groups = {}
        for u, v in fresh:
            groups.setdefault((where[u], where[v]), set()).add((u, v))
        for (p, q), pairs in groups.items():
            for z in g.signature:
                inside = [pr in g.relations[z] for pr in pairs]
                if all(inside):
                    tuples[(z, 1)].add((names[p], names[q]))
                elif not any(inside):
                    tuples[(z, 0)].add((names[p], names[q]))
    model = MergeModel(g.signature, order, tuples, name=g.name)
    ranking = {names[p]: (min(occ), max(occ)) for p, occ in occurrences.items()}
    rm = RankedMergeModel(model, ranking)
    return cleaning(rm) if clean else rm


def layers(rm: RankedMergeModel) -> list[list[str]]:
    """L_1..L_m of a clean model: nodes whose interval contains i."""
    m = int(rm.lo(rm.order.root))
    return [[x for x in rm.order.nodes if rm.lo(x) <= i <= rm.hi(x)] for i in range(1, m + 1)]


def sequence_of_model(rm: RankedMergeModel) -> MergeSequence:
    _require_valid(rm)
    problem = _clean_problem(rm)
    if problem is not None:
        raise InvalidInput(f"sequence_of_model needs a clean model: {problem}")
    order = rm.order
    leaves = order.leaves
    partitions = [
        tuple(order.leaves_below(x) for x in layer) for layer in layers(rm)
    ]
    # each leaf pair is first revealed one step after the overlap of its hat
    # ends; pairs below several S-tuples take the earliest
    s_all = rm.model.s_all
    first = {}
    for u in leaves:
        anc_u = order.ancestors(u)
        for v in leaves:
            if u == v:
                continue
            anc_v = order.ancestors(v)
            best = None
            for x in anc_u:
                for y in anc_v:
                    if (x, y) in s_all:
                        top = rm.overlap_max(x, y)
                        if best is None or top < best:
                            best = top
            if best is not None:
                first[(u, v)] = best
    m = len(partitions)
    cumulative = [frozenset(p for p, t in first.items() if t < i) for i in range(1, m + 1)]
    if len(leaves) > 1:
        partitions.append(partitions[-1])
        cumulative.append(ordered_pairs(leaves))
    return MergeSequence.from_cumulative(rm.model.name, partitions, cumulative)


# -- merge-walks ------------------------------------------------------------

def _tau_range(rm):
    root_lo = rm.lo(rm.order.root)
    ends = set()
    for lo, hi in rm.ranking.values():
        ends.update((lo, hi))
    return sorted(e for e in ends if e < root_lo)


def mwreach(rm: RankedMergeModel, v, tau, r: int, check: bool = True) -> set[str]:
    """End nodes of tau-bounded merge-walks of order at most r starting at leaf v.

    S-steps may follow an S-tuple in either orientation.
    """
    if check:
        _require_valid(rm)
    order = rm.order
    tau = Fraction(tau)
    if not tau < rm.lo(order.root):
        raise InvalidInput(f"tau={tau} must lie below the root's left endpoint")
    if not order.is_leaf(v):
        raise InvalidInput(f"{v} is not a leaf")
    partners = {}
    for x, y in rm.model.s_all:
        top = rm.overlap_max(x, y)
        if top is not None and top <= tau:
            partners.setdefault(x, set()).add(y)
            partners.setdefault(y, set()).add(x)

    def endpoint(x):
        p = order.parent.get(x)
        return p is not None and rm.lo(x) <= tau < rm.lo(p)

    reached = set()
    seen = {v}
    frontier = {v}
    for step in range(r + 1):
        near = set()
        for u in frontier:
            near |= order.comparable_set(u)
        reached |= {x for x in near if endpoint(x)}
        if step == r:
            break
        nxt = set()
        for x in near:
            nxt |= partners.get(x, set())
        frontier = nxt - seen
        if not frontier:
            break
        seen |= frontier
    return reached


def ranked_width(rm: RankedMergeModel, r: int) -> int:
    _require_valid(rm)
    best = 0
    for tau in _tau_range(rm):
        for v in rm.order.leaves:
            best = max(best, len(mwreach(rm, v, tau, r, check=False)))
    return best


def compactify_ranked(rm: RankedMergeModel) -> RankedMergeModel:
    _require_valid(rm)
    keep = skeleton(rm.model)
    model = restrict_model(rm.model, keep)
    return cleaning(RankedMergeModel(model, {x: rm.ranking[x] for x in keep}))


def perturb_ranking(rm: RankedMergeModel, rng) -> RankedMergeModel:
    """A random valid non-clean ranking of the same model with the same
    relative order of non-leaf left endpoints as ``rm``."""
    order = rm.order
    endpoints = sorted({e for iv in rm.ranking.values() for e in iv})
    # strictly increasing rational map on the endpoint set
    image, cur = {}, Fraction(rng.randint(-5, 5))
    for e in endpoints:
        cur += Fraction(rng.randint(1, 6), rng.randint(1, 4))
        image[e] = cur
    ranking = {x: [image[lo], image[hi]] for x, (lo, hi) in rm.ranking.items()}
    s_all = rm.model.s_all
    for x in sorted(order.nodes, key=lambda n: -order.depth[n]):
        p = order.parent.get(x)
        if p is not None and rng.random() < 0.5:
            room = ranking[p][0] - ranking[x][1]
            ranking[x][1] += room * Fraction(rng.randint(0, 3), 4)
            ranking[x][1] = min(ranking[x][1], ranking[p][0] - Fraction(1, 97))
            ranking[x][1] = max(ranking[x][1], ranking[x][0])
        if rng.random() < 0.5:
            if order.is_leaf(x):
                ranking[x][0] -= Fraction(rng.randint(0, 3), 2)
            else:
                kids_hi = max(ranking[c][1] for c in order.children[x])
                gap = ranking[x][0] - kids_hi
                ranking[x][0] -= gap * Fraction(rng.randint(0, 3), 4)
                ranking[x][0] = max(ranking[x][0], kids_hi + Fraction(1, 89))
    out = RankedMergeModel(rm.model, {x: tuple(iv) for x, iv in ranking.items()})
    # enlarging intervals keeps S-overlaps; reject anything that broke an order
    if not validate_ranking(out) or not _same_internal_order(rm, out):
        return RankedMergeModel(rm.model, {x: (image[lo], image[hi])
                                           for x, (lo, hi) in rm.ranking.items()})
    return out


def _same_internal_order(a: RankedMergeModel, b: RankedMergeModel) -> bool:
    internal = [x for x in a.order.nodes if not a.order.is_leaf(x)]
    for x in internal:
        for y in internal:
            if (a.lo(x) < a.lo(y)) != (b.lo(x) < b.lo(y)) or \
               (a.lo(x) == a.lo(y)) != (b.lo(x) == b.lo(y)):
                return False
    return True
