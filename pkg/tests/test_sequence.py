import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import PROPERTY, fixture, seeded_structures, structures, structures_with_sequences
from mergewidth.errors import InvalidInput, LimitExceeded
from mergewidth.sequence import (MergeSequence, Step, canonical_sequences, greedy_sequence,
                                 mw_exact, random_sequence, reach, validate_sequence, width)
from mergewidth.structures import (BinaryStructure, Signature, complete_graph, edgeless_graph,
                                   ordered_pairs, path_graph)

P3 = path_graph("abc", name="P3")
V = frozenset("abc")


def parts(*groups):
    return tuple(frozenset(g) for g in groups)


def sym(*pairs):
    out = set()
    for u, v in pairs:
        out |= {(u, v), (v, u)}
    return frozenset(out)


SIGMA_P3 = MergeSequence("P3", [
    Step(parts("a", "b", "c"), frozenset()),
    Step(parts("ac", "b"), frozenset()),
    Step(parts("abc"), sym("ac")),
    Step(parts("abc"), sym("ab", "bc")),
])


def naive_width(seq, g, r):
    """Width straight from the definition: BFS distances in the revealed graph."""
    best = 0
    acc = set()
    cumulative = []
    for step in seq.steps:
        acc |= step.revealed
        cumulative.append(set(acc))
    for i in range(2, len(seq.steps) + 1):
        rev = cumulative[i - 1]
        for v in g.universe:
            dist = {v: 0}
            queue = [v]
            while queue:
                u = queue.pop(0)
                for w in g.universe:
                    if w not in dist and ((u, w) in rev or (w, u) in rev):
                        dist[w] = dist[u] + 1
                        queue.append(w)
            near = {x for x, d in dist.items() if d <= r}
            best = max(best, sum(1 for p in seq.partition(i - 1) if p & near))
    return best


class TestValidate:
    def test_fixture_matches_file(self):
        assert fixture("sigma-p3.mseq") == SIGMA_P3

    def test_sigma_p3(self):
        assert validate_sequence(SIGMA_P3, P3)

    def test_removed_reveal(self):
        steps = list(SIGMA_P3.steps)
        steps[2] = Step(steps[2].partition, frozenset())
        steps[3] = Step(steps[3].partition, sym("ab", "bc", "ac"))
        report = validate_sequence(MergeSequence("P3", steps), P3)
        assert not report
        assert report.condition == "uniform"
        assert report.witness == (3, V, V, "E")

    def test_single_vertex(self):
        g = edgeless_graph("v")
        seq = MergeSequence("I", [Step(parts("v"), frozenset())])
        assert validate_sequence(seq, g)
        assert width(seq, g, 1) == 0

    def test_first_not_singletons(self):
        seq = MergeSequence("P3", [Step(parts("ab", "c"), frozenset()),
                                   Step(parts("abc"), ordered_pairs("abc"))])
        assert validate_sequence(seq, P3).condition == "first"

    def test_not_refining(self):
        seq = MergeSequence("P3", [Step(parts("a", "b", "c"), frozenset()),
                                   Step(parts("ab", "c"), ordered_pairs("abc")),
                                   Step(parts("ac", "b"), frozenset()),
                                   Step(parts("abc"), frozenset())])
        assert validate_sequence(seq, P3).condition == "refinement"

    def test_incomplete(self):
        seq = MergeSequence("P3", list(SIGMA_P3.steps[:3]))
        assert validate_sequence(seq, P3).condition == "complete"

    def test_loop_reveal(self):
        steps = list(SIGMA_P3.steps)
        steps[3] = Step(steps[3].partition, steps[3].revealed | {("a", "a")})
        assert validate_sequence(MergeSequence("P3", steps), P3).condition == "pairs"

    def test_stray_element(self):
        with pytest.raises(InvalidInput):
            validate_sequence(SIGMA_P3, path_graph("ab"))

    def test_diagonal_part_pair_is_checked(self):
        # {a,b,c} against itself is the only part pair at the last level
        g = BinaryStructure(Signature(("E",)), "ab", {"E": {("a", "b")}})
        seq = MergeSequence("G", [Step(parts("a", "b"), frozenset()),
                                  Step(parts("ab"), frozenset()),
                                  Step(parts("ab"), ordered_pairs("ab"))])
        assert validate_sequence(seq, g).witness == (2, frozenset("ab"), frozenset("ab"), "E")


class TestReach:
    def test_a_step3(self):
        assert reach(SIGMA_P3, P3, "a", 3, 1) == {frozenset("ac")}

    def test_b_step3(self):
        assert reach(SIGMA_P3, P3, "b", 3, 1) == {frozenset("b")}

    def test_a_step4(self):
        assert reach(SIGMA_P3, P3, "a", 4, 1) == {V}

    def test_out_of_range(self):
        with pytest.raises(InvalidInput):
            reach(SIGMA_P3, P3, "a", 1, 1)
        with pytest.raises(InvalidInput):
            reach(SIGMA_P3, P3, "a", 5, 1)


class TestWidth:
    def test_sigma_p3(self):
        assert width(SIGMA_P3, P3, 1) == 1

    def test_shortcut_has_width_two(self):
        seq = MergeSequence("P3", [Step(parts("a", "b", "c"), frozenset()),
                                   Step(parts("abc"), sym("ac")),
                                   Step(parts("abc"), sym("ab", "bc"))])
        assert validate_sequence(seq, P3)
        assert width(seq, P3, 1) == 2
        assert reach(seq, P3, "a", 2, 1) == {frozenset("a"), frozenset("c")}

    def test_rejects_invalid(self):
        with pytest.raises(InvalidInput):
            width(MergeSequence("P3", list(SIGMA_P3.steps[:3])), P3, 1)

    @PROPERTY
    @given(structures_with_sequences(), st.integers(1, 3))
    def test_matches_naive(self, gs, r):
        g, seq = gs
        assert width(seq, g, r) == naive_width(seq, g, r)

    @PROPERTY
    @given(structures_with_sequences(), st.integers(1, 3))
    def test_monotone_in_radius(self, gs, r):
        g, seq = gs
        assert width(seq, g, r) <= width(seq, g, r + 1)


class TestOracle:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_complete_and_edgeless(self, n):
        names = [f"v{k}" for k in range(n)]
        assert mw_exact(complete_graph(names), 1)[0] == 1
        assert mw_exact(edgeless_graph(names), 1)[0] == 1

    def test_p3(self):
        value, witness = mw_exact(P3, 1)
        assert value == 1
        assert validate_sequence(witness, P3)
        assert width(witness, P3, 1) == width(SIGMA_P3, P3, 1) == 1

    def test_single_vertex(self):
        value, witness = mw_exact(edgeless_graph("v"), 1)
        assert value == 0 and len(witness) == 1

    def test_limit(self):
        with pytest.raises(LimitExceeded):
            mw_exact(edgeless_graph("abcdef"), 1)

    @PROPERTY
    @given(structures(max_n=4), st.integers(1, 3))
    def test_witness_achieves_value(self, g, r):
        value, witness = mw_exact(g, r)
        assert validate_sequence(witness, g)
        assert width(witness, g, r) == value

    @pytest.mark.parametrize("g", seeded_structures(7, 12, 4), ids=lambda g: g.name)
    def test_minimum_over_canonical_sequences(self, g):
        best = min(width(s, g, 1) for s in canonical_sequences(g))
        assert mw_exact(g, 1)[0] == best

    @PROPERTY
    @given(structures(max_n=4), st.integers(1, 2), st.integers(0, 2 ** 32))
    def test_lower_bound_for_random_sequences(self, g, r, seed):
        seq = random_sequence(g, random.Random(seed))
        assert mw_exact(g, r)[0] <= width(seq, g, r)


class TestGreedy:
    def test_single_vertex(self):
        assert len(greedy_sequence(edgeless_graph("v"))) == 1

    def test_k2(self):
        g = complete_graph("ab")
        seq = greedy_sequence(g)
        assert [s.partition for s in seq.steps] == [parts("a", "b"), parts("ab"), parts("ab")]
        assert seq.steps[1].revealed == frozenset()
        assert width(seq, g, 1) == 1

    def test_p3_valid(self):
        assert validate_sequence(greedy_sequence(P3), P3)

    @PROPERTY
    @given(structures(max_n=6), st.integers(1, 3))
    def test_valid_and_above_oracle(self, g, r):
        seq = greedy_sequence(g, r)
        assert validate_sequence(seq, g)
        if len(g.universe) <= 4:
            assert width(seq, g, r) >= mw_exact(g, r)[0]


@PROPERTY
@given(structures(max_n=5), st.integers(0, 2 ** 32))
def test_random_sequences_are_valid(g, seed):
    assert validate_sequence(random_sequence(g, random.Random(seed)), g)


@PROPERTY
@given(structures(max_n=5), st.integers(0, 2 ** 32), st.integers(1, 3))
def test_extra_reveals_never_lower_width(g, seed, r):
    rng = random.Random(seed)
    seq = random_sequence(g, rng)
    pairs = sorted(ordered_pairs(g.universe))
    bigger = MergeSequence(seq.structure_ref, [
        Step(s.partition, s.revealed | {p for p in pairs if rng.random() < 0.2})
        for s in seq.steps])
    assert validate_sequence(bigger, g)
    assert width(seq, g, r) <= width(bigger, g, r)
