import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import PROPERTY, fixture, seeded_structures, structures
from mergewidth import ranked
from mergewidth.errors import InvalidInput
from mergewidth.model import MergeModel, interpret
from mergewidth.ranked import (RankedMergeModel, cleaning, compactify_ranked, is_clean, layers,
                               model_of_sequence, mwreach, perturb_ranking, ranked_width,
                               sequence_of_model, validate_ranking)
from mergewidth.sequence import (MergeSequence, Step, canonical_sequences, greedy_sequence,
                                 mw_exact, random_sequence, validate_sequence, width)
from mergewidth.structures import complete_graph, edgeless_graph, path_graph
from mergewidth.treeorder import TreeOrder, is_antichain

RM_P3 = fixture("model-p3.mmod")
SIGMA_P3 = fixture("sigma-p3.mseq")
P3 = fixture("p3.bst")
CLEAN_P3 = {"L_a": (1, 1), "L_b": (1, 2), "L_c": (1, 1), "N_ac": (2, 2), "Root": (3, 3)}


def with_ranking(rm, **changes):
    ranking = dict(rm.ranking)
    ranking.update(changes)
    return RankedMergeModel(rm.model, ranking)


def single_node():
    return RankedMergeModel(MergeModel(["E"], TreeOrder(["v"], {}), {}), {"v": (1, 1)})


def chain_with_root_loop():
    order = TreeOrder(["root", "x", "leaf"], {"x": "root", "leaf": "x"})
    m = MergeModel(["E"], order, {("E", 1): {("root", "root")}})
    return RankedMergeModel(m, {"leaf": (1, 1), "x": (2, 2), "root": (3, 3)})


@st.composite
def ranked_models(draw, max_n=5, greedy=None):
    """Clean ranked models of greedy or random sequences."""
    g = draw(structures(max_n=max_n))
    if greedy is None:
        greedy = draw(st.booleans())
    if greedy:
        seq = greedy_sequence(g, draw(st.integers(1, 3)))
    else:
        seq = random_sequence(g, random.Random(draw(st.integers(0, 2 ** 32))))
    return model_of_sequence(seq, g)


class TestValidateRanking:
    def test_fixture_clean(self):
        assert RM_P3.ranking == {x: (Fraction(a), Fraction(b)) for x, (a, b) in CLEAN_P3.items()}
        report = validate_ranking(RM_P3)
        assert report and report.notes == ("clean",)

    def test_wide_root_not_clean(self):
        rm = with_ranking(RM_P3, Root=(3, 4))
        report = validate_ranking(rm)
        assert report
        assert not is_clean(rm)
        assert "root interval" in report.notes[0]

    def test_swapped(self):
        rm = with_ranking(RM_P3, N_ac=(3, 3), Root=(2, 2))
        assert validate_ranking(rm).condition == "1"

    def test_disjoint_partners(self):
        order = TreeOrder(["r", "a", "b"], {"a": "r", "b": "r"})
        m = MergeModel(["E"], order, {("E", 1): {("a", "b"), ("r", "r")}})
        rm = RankedMergeModel(m, {"a": (1, 1), "b": (2, 2), "r": (3, 3)})
        assert validate_ranking(rm).condition == "2"

    def test_empty_interval(self):
        assert validate_ranking(with_ranking(RM_P3, L_a=(2, 1))).condition == "interval"


class TestCleaning:
    def test_raw_model(self):
        raw = model_of_sequence(SIGMA_P3, P3, clean=False)
        assert raw.ranking["Root"] == (3, 4)
        assert cleaning(raw) == RM_P3

    def test_clean_fixed(self):
        assert cleaning(RM_P3) == RM_P3

    def test_leaf_shift(self):
        shifted = with_ranking(RM_P3, L_a=(-9, 1), L_b=(-9, 1), L_c=(-9, Fraction(3, 2)))
        assert validate_ranking(shifted)
        assert cleaning(shifted) == RM_P3

    def test_invalid(self):
        with pytest.raises(InvalidInput):
            cleaning(with_ranking(RM_P3, N_ac=(3, 3), Root=(2, 2)))

    @PROPERTY
    @given(ranked_models(), st.integers(0, 2 ** 32))
    def test_order_only(self, rm, seed):
        noisy = perturb_ranking(rm, random.Random(seed))
        assert validate_ranking(noisy)
        assert cleaning(noisy) == rm
        assert cleaning(cleaning(noisy)) == cleaning(noisy)

    @PROPERTY
    @given(ranked_models(), st.integers(0, 2 ** 32), st.integers(1, 3))
    def test_never_raises_width(self, rm, seed, r):
        noisy = perturb_ranking(rm, random.Random(seed))
        assert ranked_width(cleaning(noisy), r) <= ranked_width(noisy, r)


class TestModelOfSequence:
    def test_sigma_p3(self):
        assert model_of_sequence(SIGMA_P3, P3) == RM_P3

    def test_single_vertex(self):
        g = edgeless_graph("v")
        rm = model_of_sequence(greedy_sequence(g), g)
        assert rm.order.nodes == ("L_v",)
        assert rm.ranking == {"L_v": (1, 1)}

    def test_k2(self):
        g = complete_graph("ab")
        rm = model_of_sequence(greedy_sequence(g), g)
        assert len(rm.order.nodes) == 3
        assert rm.model.s_tuples[("E", 1)] == {("Root", "Root")}
        assert rm.model.s_tuples[("E", 0)] == frozenset()

    def test_first_step_reveals_go_to_singletons(self):
        g = path_graph("ab", name="G")
        seq = MergeSequence("G", [Step((frozenset("a"), frozenset("b")), frozenset({("a", "b")})),
                                  Step((frozenset("ab"),), frozenset({("b", "a")}))])
        assert validate_sequence(seq, g)
        rm = model_of_sequence(seq, g)
        assert ("L_a", "L_b") in rm.model.s_tuples[("E", 1)]

    @PROPERTY
    @given(ranked_models())
    def test_valid_and_clean(self, rm):
        assert validate_ranking(rm)
        assert is_clean(rm)


class TestSequenceOfModel:
    def test_fixture(self):
        seq = sequence_of_model(RM_P3)
        assert seq == SIGMA_P3.relabel({x: f"L_{x}" for x in "abc"})

    def test_layers_are_maximal_antichains(self):
        assert layers(RM_P3) == [["L_a", "L_b", "L_c"], ["L_b", "N_ac"], ["Root"]]

    def test_single_node(self):
        assert len(sequence_of_model(single_node())) == 1

    def test_needs_clean(self):
        with pytest.raises(InvalidInput):
            sequence_of_model(with_ranking(RM_P3, Root=(3, 4)))

    @PROPERTY
    @given(ranked_models())
    def test_layers(self, rm):
        for layer in layers(rm):
            assert is_antichain(rm.order, layer, maximal=True)

    @PROPERTY
    @given(ranked_models())
    def test_valid_for_interpretation(self, rm):
        assert validate_sequence(sequence_of_model(rm), interpret(rm.model))


class TestMergeWalks:
    def test_a_at_2(self):
        assert mwreach(RM_P3, "L_a", 2, 1) == {"N_ac"}

    def test_b_at_2(self):
        assert mwreach(RM_P3, "L_b", 2, 1) == {"L_b"}

    def test_a_at_1(self):
        assert mwreach(RM_P3, "L_a", 1, 3) == {"L_a"}

    def test_tau_range(self):
        with pytest.raises(InvalidInput):
            mwreach(RM_P3, "L_a", 3, 1)

    def test_width(self):
        assert ranked_width(RM_P3, 1) == 1
        assert ranked_width(single_node(), 1) == 0

    @PROPERTY
    @given(ranked_models())
    def test_tau_membership(self, rm):
        order = rm.order
        for x, p in order.parent.items():
            for tau in range(1, int(rm.lo(order.root))):
                assert (rm.lo(x) <= tau < rm.lo(p)) == (rm.lo(x) <= tau <= rm.hi(x))

    @PROPERTY
    @given(ranked_models(), st.integers(1, 3))
    def test_width_equals_sequence_width(self, rm, r):
        assert width(sequence_of_model(rm), interpret(rm.model), r) == ranked_width(rm, r)

    @PROPERTY
    @given(ranked_models(), st.integers(1, 3))
    def test_monotone_in_radius(self, rm, r):
        assert ranked_width(rm, r) <= ranked_width(rm, r + 1)


class TestCompactifyRanked:
    def test_fixture(self):
        assert compactify_ranked(RM_P3) == RM_P3

    def test_chain(self):
        c = compactify_ranked(chain_with_root_loop())
        assert c.order.nodes == ("root", "leaf")
        assert c.ranking == {"leaf": (1, 1), "root": (2, 2)}

    @PROPERTY
    @given(ranked_models())
    def test_idempotent_and_faithful(self, rm):
        c = compactify_ranked(rm)
        assert compactify_ranked(c) == c
        assert interpret(c.model) == interpret(rm.model)
        assert is_clean(c)


@pytest.mark.parametrize("g", seeded_structures(3, 12, 4, ("E", "F")), ids=lambda g: g.name)
def test_best_model_matches_oracle(g):
    for r in (1, 2):
        best = min(ranked_width(model_of_sequence(s, g), r) for s in canonical_sequences(g))
        assert best == mw_exact(g, r)[0]


class TestKnownGaps:
    """Instances where a width inequality fails although the objects are valid."""

    def test_rebuilt_sequence_can_be_wider(self):
        g, seq = fixture("sigmap-gap.bst"), fixture("sigmap-gap.mseq")
        assert validate_sequence(seq, g)
        rm = model_of_sequence(seq, g)
        back = sequence_of_model(rm)
        assert width(seq, g, 1) == 2
        assert width(back, interpret(rm.model), 1) == 3
        # the partial block reveal at step 3 becomes a full one
        step3 = {(u[2:], v[2:]) for u, v in back.steps[2].revealed}
        assert step3 == {("v3", "v1"), ("v3", "v2")}
        assert seq.steps[2].revealed == {("v3", "v1")}

    def test_compactification_can_widen(self):
        rm = fixture("mhat-gap.mmod")
        assert validate_ranking(rm) and is_clean(rm)
        c = compactify_ranked(rm)
        assert interpret(c.model) == interpret(rm.model)
        assert ranked_width(rm, 2) == 3
        assert ranked_width(c, 2) == 4
        # N_v1_v2 carries no S-tuple, so L_v1 and L_v2 hang from the root
        assert "N_v1_v2" not in c.order.nodes
        assert mwreach(c, "L_v3", 1, 2) == {"L_v0", "L_v1", "L_v2", "L_v3"}
