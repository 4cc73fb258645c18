"""Merge sequences: validity, radius-r width, an exact oracle and heuristics."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInput, LimitExceeded, Report
from .structures import BinaryStructure, Pair, ordered_pairs

Part = frozenset


@dataclass(frozen=True)
class Step:
    partition: tuple[frozenset, ...]
    revealed: frozenset[Pair] = frozenset()

    def __post_init__(self):
        parts = tuple(sorted((frozenset(p) for p in self.partition), key=_part_key))
        object.__setattr__(self, "partition", parts)
        object.__setattr__(self, "revealed", frozenset(tuple(p) for p in self.revealed))


def _part_key(part):
    return sorted(part)


@dataclass(frozen=True)
class MergeSequence:
    structure_ref: str
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise InvalidInput("a merge sequence needs at least one step")

    def __len__(self):
        return len(self.steps)

    def partition(self, i: int) -> tuple[frozenset, ...]:
        """P_i with 1-based indexing."""
        return self.steps[i - 1].partition

    def cumulative(self) -> list[frozenset[Pair]]:
        out, acc = [], set()
        for step in self.steps:
            acc |= step.revealed
            out.append(frozenset(acc))
        return out

    def revealed_upto(self, i: int) -> frozenset[Pair]:
        """R_i with 1-based indexing."""
        return self.cumulative()[i - 1]

    def elements(self) -> set:
        out = set()
        for step in self.steps:
            for part in step.partition:
                out |= part
            for u, v in step.revealed:
                out.update((u, v))
        return out

    def relabel(self, mapping, structure_ref=None) -> "MergeSequence":
        steps = [
            Step(
                tuple(frozenset(mapping[x] for x in p) for p in s.partition),
                frozenset((mapping[u], mapping[v]) for u, v in s.revealed),
            )
            for s in self.steps
        ]
        return MergeSequence(structure_ref or self.structure_ref, steps)

    @classmethod
    def from_cumulative(cls, structure_ref, partitions, cumulative) -> "MergeSequence":
        """Build from P_i and R_i lists; stored reveals are the increments."""
        steps, prev = [], frozenset()
        for parts, r in zip(partitions, cumulative):
            r = frozenset(r)
            steps.append(Step(tuple(parts), r - prev))
            prev = prev | r
        return cls(structure_ref, steps)


def pair_product(a: Iterable, b: Iterable) -> set[Pair]:
    """AB: ordered pairs with first coordinate in a, second in b, distinct."""
    return {(u, v) for u in a for v in b if u != v}


def _uniform(pairs, relation):
    inside = [p in relation for p in pairs]
    return all(inside) or not any(inside)


def validate_sequence(seq: MergeSequence, g: BinaryStructure) -> Report:
    universe = set(g.universe)
    stray = seq.elements() - universe
    if stray:
        raise InvalidInput(f"sequence mentions elements not in {g.name}: {sorted(stray)}")
    m = len(seq.steps)

    for i, step in enumerate(seq.steps, 1):
        seen = set()
        for part in step.partition:
            if not part:
                return Report.fail("partition", f"step {i} has an empty part", i)
            if seen & part:
                return Report.fail("partition", f"step {i}: parts overlap", i, part)
            seen |= part
        if seen != universe:
            return Report.fail("partition", f"step {i} does not cover the universe", i,
                               frozenset(universe - seen))
        if i == 1 and any(len(p) != 1 for p in step.partition):
            return Report.fail("first", "first partition must consist of singletons", i)
        if i > 1:
            coarse = {x: p for p in step.partition for x in p}
            for part in seq.steps[i - 2].partition:
                if len({coarse[x] for x in part}) != 1:
                    return Report.fail("refinement",
                                       f"step {i - 1} does not refine step {i}", i, part)
    if seq.steps[-1].partition != (frozenset(universe),):
        return Report.fail("last", "last partition must be the single part V", m)

    revealed = set()
    for i, step in enumerate(seq.steps, 1):
        for u, v in step.revealed:
            if u == v:
                return Report.fail("pairs", f"step {i} reveals a loop ({u}, {v})", i, (u, v))
        revealed |= step.revealed
        for p in step.partition:
            for q in step.partition:
                hidden = pair_product(p, q) - revealed
                if not hidden:
                    continue
                for z in g.signature:
                    if not _uniform(hidden, g.relations[z]):
                        return Report.fail(
                            "uniform",
                            f"step {i}: unrevealed pairs between {sorted(p)} and {sorted(q)} "
                            f"are mixed in {z}",
                            i, p, q, z,
                            notes=("part pairs include P = Q",),
                        )
    if revealed != ordered_pairs(g.universe):
        missing = ordered_pairs(g.universe) - revealed
        return Report.fail("complete", "final revealed set is not all ordered pairs", m,
                           frozenset(missing))
    return Report(True, notes=("part pairs include P = Q",))


def _ball(adj: dict, v, r: int) -> set:
    ball, frontier = {v}, {v}
    for _ in range(r):
        frontier = {w for u in frontier for w in adj[u]} - ball
        if not frontier:
            break
        ball |= frontier
    return ball


def _undirected(universe, pairs):
    adj = {x: set() for x in universe}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def reach(seq: MergeSequence, g: BinaryStructure, v, i: int, r: int) -> set[frozenset]:
    """Parts of P_{i-1} within distance r of v in the undirected graph of R_i."""
    if not 2 <= i <= len(seq.steps):
        raise InvalidInput(f"step index {i} outside 2..{len(seq.steps)}")
    if v not in g.universe:
        raise InvalidInput(f"unknown element {v!r}")
    ball = _ball(_undirected(g.universe, seq.revealed_upto(i)), v, r)
    return {p for p in seq.partition(i - 1) if p & ball}


def _width_unchecked(seq, universe, r):
    best = 0
    cumulative = seq.cumulative()
    for i in range(2, len(seq.steps) + 1):
        adj = _undirected(universe, cumulative[i - 1])
        parts = seq.partition(i - 1)
        for v in universe:
            ball = _ball(adj, v, r)
            best = max(best, sum(1 for p in parts if p & ball))
    return best


def width(seq: MergeSequence, g: BinaryStructure, r: int) -> int:
    report = validate_sequence(seq, g)
    if not report:
        raise InvalidInput(f"invalid merge sequence: {report.message}")
    return _width_unchecked(seq, g.universe, r)


# -- bitmask engine shared by the oracle and the heuristics -----------------

class _Engine:
    """Elements as bit positions; pair (u, v) as bit u*n+v."""

    def __init__(self, g: BinaryStructure):
        self.g = g
        self.names = list(g.universe)
        n = self.n = len(self.names)
        self.full_parts = (1 << n) - 1
        self.all_pairs = 0
        for u in range(n):
            for v in range(n):
                if u != v:
                    self.all_pairs |= 1 << (u * n + v)
        idx = {x: k for k, x in enumerate(self.names)}
        self.idx = idx
        types = {}
        for u in range(n):
            for v in range(n):
                if u != v:
                    t = g.type_of(self.names[u], self.names[v])
                    types[t] = types.get(t, 0) | (1 << (u * n + v))
        # class order fixed by type vector for determinism
        self.classes = [types[t] for t in sorted(types)]
        self._pp = {}

    def pairs(self, a: int, b: int) -> int:
        key = (a, b)
        got = self._pp.get(key)
        if got is None:
            n, got = self.n, 0
            for u in range(n):
                if a >> u & 1:
                    for v in range(n):
                        if b >> v & 1 and u != v:
                            got |= 1 << (u * n + v)
            self._pp[key] = got
        return got

    def adjacency(self, rmask: int) -> list[int]:
        n = self.n
        adj = [0] * n
        for u in range(n):
            row = (rmask >> (u * n)) & ((1 << n) - 1)
            adj[u] |= row
            for v in range(n):
                if row >> v & 1:
                    adj[v] |= 1 << u
        return adj

    def cost(self, parts: Sequence[int], rmask: int, r: int) -> int:
        adj = self.adjacency(rmask)
        best = 0
        for v in range(self.n):
            ball = frontier = 1 << v
            for _ in range(r):
                nxt = 0
                f = frontier
                while f:
                    low = f & -f
                    nxt |= adj[low.bit_length() - 1]
                    f ^= low
                frontier = nxt & ~ball
                if not frontier:
                    break
                ball |= frontier
            best = max(best, sum(1 for p in parts if p & ball))
        return best

    def mixed_options(self, parts: Sequence[int], rmask: int) -> list[list[int]]:
        """Per ordered part pair with mixed unrevealed pairs: the reveal sets
        that keep exactly one non-empty type class hidden."""
        out = []
        for a in parts:
            for b in parts:
                hidden = self.pairs(a, b) & ~rmask
                if not hidden:
                    continue
                present = [hidden & c for c in self.classes if hidden & c]
                if len(present) > 1:
                    out.append([hidden & ~keep for keep in present])
        return out

    def forced_reveals(self, parts: Sequence[int], rmask: int) -> list[int]:
        """All minimal reveal sets making ``parts`` satisfy uniformity, deduplicated."""
        options = self.mixed_options(parts, rmask)
        seen, out = set(), []
        for combo in product(*options):
            extra = 0
            for c in combo:
                extra |= c
            if extra not in seen:
                seen.add(extra)
                out.append(extra)
        return out

    def uniform(self, parts: Sequence[int], rmask: int) -> bool:
        return not self.mixed_options(parts, rmask)

    def to_parts(self, parts: Sequence[int]) -> tuple[frozenset, ...]:
        return tuple(
            frozenset(self.names[k] for k in range(self.n) if p >> k & 1) for p in parts
        )

    def to_pairs(self, rmask: int) -> frozenset[Pair]:
        n = self.n
        return frozenset(
            (self.names[b // n], self.names[b % n]) for b in range(n * n) if rmask >> b & 1
        )

    def to_sequence(self, chain) -> MergeSequence:
        partitions = [self.to_parts(p) for p, _ in chain]
        cumulative = [self.to_pairs(rm) for _, rm in chain]
        return MergeSequence.from_cumulative(self.g.name, partitions, cumulative)


def _canon(parts: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(parts))


def _set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield [[first]] + sub
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1:]


def _coarsenings(parts: tuple[int, ...], strict: bool = True) -> list[tuple[int, ...]]:
    out = set()
    for blocks in _set_partitions(list(parts)):
        if strict and len(blocks) == len(parts):
            continue
        merged = []
        for block in blocks:
            m = 0
            for p in block:
                m |= p
            merged.append(m)
        out.add(_canon(merged))
    return sorted(out, key=lambda ps: (len(ps), ps))


def mw_exact(g: BinaryStructure, r: int, nmax: int = 5) -> tuple[int, MergeSequence]:
    """Exact radius-r merge-width by dynamic programming over canonical sequences.

    Canonical sequences strictly coarsen at every step, reveal only what
    uniformity forces (branching over which type class stays hidden), and end
    with one extra full-reveal step once the partition is {V}.
    """
    n = len(g.universe)
    if n > nmax:
        raise LimitExceeded(f"exact merge-width on {n} elements exceeds nmax={nmax}")
    eng = _Engine(g)
    singletons = _canon(1 << k for k in range(n))
    if n == 1:
        return 0, eng.to_sequence([(singletons, 0)])
    top = (eng.full_parts,)

    @lru_cache(maxsize=None)
    def solve(parts, rmask):
        # best width of the remaining steps after (parts, rmask), plus the move
        if parts == top:
            return 1, None
        best, move = None, None
        for nxt in _coarsenings(parts):
            for extra in eng.forced_reveals(nxt, rmask):
                r2 = rmask | extra
                c = eng.cost(parts, r2, r)
                if best is not None and c >= best:
                    continue
                sub, _ = solve(nxt, r2)
                total = max(c, sub)
                if best is None or total < best:
                    best, move = total, (nxt, r2)
                    if best == 1:
                        return best, move
        return best, move

    value, _ = solve(singletons, 0)
    chain = [(singletons, 0)]
    state = (singletons, 0)
    while state[0] != top:
        _, move = solve(*state)
        chain.append(move)
        state = move
    chain.append((top, eng.all_pairs))
    solve.cache_clear()
    return value, eng.to_sequence(chain)


def canonical_sequences(g: BinaryStructure, limit: int = 100000) -> Iterator[MergeSequence]:
    """Every canonical sequence of ``g`` (strict chains, forced reveals only)."""
    eng = _Engine(g)
    n = len(g.universe)
    singletons = _canon(1 << k for k in range(n))
    top = (eng.full_parts,)
    count = 0

    def walk(chain):
        nonlocal count
        parts, rmask = chain[-1]
        if parts == top:
            count += 1
            if count > limit:
                raise LimitExceeded(f"more than {limit} canonical sequences")
            tail = [] if n == 1 else [(top, eng.all_pairs)]
            yield eng.to_sequence(chain + tail)
            return
        for nxt in _coarsenings(parts):
            for extra in eng.forced_reveals(nxt, rmask):
                yield from walk(chain + [(nxt, rmask | extra)])

    yield from walk([(singletons, 0)])


def mw_unreduced(g: BinaryStructure, r: int, max_steps: int = 6, nmax: int = 3) -> int:
    """Merge-width by brute force over all sequences with at most ``max_steps`` steps.

    Partitions may repeat and any superset of the previous revealed set that
    keeps uniformity is allowed.  Independent of the canonical-form argument.
    """
    n = len(g.universe)
    if n > nmax:
        raise LimitExceeded(f"unreduced enumeration on {n} elements exceeds nmax={nmax}")
    if n == 1:
        return 0
    eng = _Engine(g)
    singletons = _canon(1 << k for k in range(n))
    top = (eng.full_parts,)
    pair_bits = [b for b in range(n * n) if eng.all_pairs >> b & 1]

    @lru_cache(maxsize=None)
    def supersets(rmask):
        out = [rmask]
        for b in pair_bits:
            if not rmask >> b & 1:
                out += [m | 1 << b for m in out]
        return out

    uniform = lru_cache(maxsize=None)(eng.uniform)
    cost = lru_cache(maxsize=None)(eng.cost)
    coarsenings = lru_cache(maxsize=None)(_coarsenings)

    @lru_cache(maxsize=None)
    def moves(parts, rmask):
        return [(nxt, r2) for nxt in coarsenings(parts, False) for r2 in supersets(rmask)
                if uniform(nxt, r2)]

    @lru_cache(maxsize=None)
    def solve(parts, rmask, steps_left):
        # minimal max cost of the remaining steps; None when no completion fits
        if parts == top and rmask == eng.all_pairs:
            return 0
        if steps_left == 0:
            return None
        best = None
        for nxt, r2 in moves(parts, rmask):
            here = cost(parts, r2, r)
            if best is not None and here >= best:
                continue
            sub = solve(nxt, r2, steps_left - 1)
            if sub is None:
                continue
            total = max(here, sub)
            if best is None or total < best:
                best = total
        return best

    best = None
    for r1 in supersets(0):
        sub = solve(singletons, r1, max_steps - 1)
        if sub is not None and (best is None or sub < best):
            best = sub
    return best


def _finish(eng, chain):
    top = (eng.full_parts,)
    if eng.n > 1 and (chain[-1][0] != top or chain[-1][1] != eng.all_pairs):
        chain.append((top, eng.all_pairs))
    return eng.to_sequence(chain)


def greedy_sequence(g: BinaryStructure, r: int = 1) -> MergeSequence:
    """Pairwise merges, each minimizing the number of forced reveals.

    Within a merge the largest type class stays hidden.  Ties go to the
    smaller radius-r step cost, then to element order.
    """
    eng = _Engine(g)
    parts = list(_canon(1 << k for k in range(eng.n)))
    rmask = 0
    chain = [(tuple(parts), 0)]
    while len(parts) > 1:
        best = None
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                nxt = _canon([p for k, p in enumerate(parts) if k not in (a, b)]
                             + [parts[a] | parts[b]])
                extra = 0
                for options in eng.mixed_options(nxt, rmask):
                    extra |= min(options, key=lambda o: (bin(o).count("1"), o))
                r2 = rmask | extra
                key = (bin(extra).count("1"), eng.cost(tuple(parts), r2, r), a, b)
                if best is None or key < best[0]:
                    best = (key, nxt, r2)
        _, nxt, rmask = best
        parts = list(nxt)
        chain.append((nxt, rmask))
    return _finish(eng, chain)


def random_sequence(g: BinaryStructure, rng: random.Random, extra_reveal: float = 0.1,
                    repeat: float = 0.1) -> MergeSequence:
    """A random valid sequence: random merges, random hidden class, extra reveals,
    occasional repeated partitions."""
    eng = _Engine(g)
    parts = list(_canon(1 << k for k in range(eng.n)))
    rmask = 0
    chain = [(tuple(parts), 0)]
    pair_bits = [b for b in range(eng.n * eng.n) if eng.all_pairs >> b & 1]
    while len(parts) > 1:
        if rng.random() < repeat:
            nxt = tuple(parts)
        else:
            k = rng.randint(2, len(parts))
            chosen = rng.sample(range(len(parts)), k)
            merged = 0
            for c in chosen:
                merged |= parts[c]
            nxt = _canon([p for j, p in enumerate(parts) if j not in chosen] + [merged])
        for b in pair_bits:
            if rng.random() < extra_reveal:
                rmask |= 1 << b
        for options in eng.mixed_options(nxt, rmask):
            rmask |= rng.choice(options)
        parts = list(nxt)
        chain.append((nxt, rmask))
    return _finish(eng, chain)
