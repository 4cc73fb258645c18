from itertools import combinations

import pytest
from hypothesis import given

from helpers import PROPERTY, fixture, graphs, structures
from mergewidth.errors import InvalidInput, LimitExceeded, UnknownName
from mergewidth.model import model_structure
from mergewidth.structures import (BinaryStructure, Signature, biclique_number, complement_expand,
                                   complete_graph, edgeless_graph, edges_of, gaifman, is_graph,
                                   make_graph, matches_via, ordered_pairs, path_graph, reduct)

P3 = path_graph("abc")


def brute_biclique(g):
    """Largest t with disjoint t-sets A, B fully joined, by exhaustive search."""
    adj = {v: set() for v in g.universe}
    for u, v in g.relations["E"]:
        adj[u].add(v)
    best = 0
    vs = list(g.universe)
    for t in range(1, len(vs) // 2 + 1):
        found = False
        for a in combinations(vs, t):
            common = set(vs)
            for x in a:
                common &= adj[x]
            if len(common) >= t:
                found = True
                break
        if not found:
            break
        best = t
    return best


class TestSignature:
    def test_rejects_duplicates(self):
        with pytest.raises(InvalidInput):
            Signature(("E", "E"))

    def test_rejects_bad_identifier(self):
        with pytest.raises(InvalidInput):
            Signature(("1E",))

    def test_arity_is_two(self):
        assert Signature(("E",)).arity("E") == 2
        with pytest.raises(UnknownName):
            Signature(("E",)).arity("F")


class TestStructure:
    def test_pair_outside_universe(self):
        with pytest.raises(InvalidInput):
            BinaryStructure(Signature(("E",)), ["a"], {"E": {("a", "b")}})

    def test_empty_universe(self):
        with pytest.raises(InvalidInput):
            BinaryStructure(Signature(("E",)), [], {})

    def test_undeclared_symbol(self):
        with pytest.raises(UnknownName):
            BinaryStructure(Signature(("E",)), ["a"], {"F": set()})

    def test_graph_view(self):
        assert is_graph(P3)
        assert not is_graph(BinaryStructure(Signature(("E",)), "ab", {"E": {("a", "b")}}))
        with pytest.raises(InvalidInput):
            make_graph("a", [("a", "a")])


class TestGaifman:
    def test_single_pair(self):
        s = BinaryStructure(Signature(("R", "Q")), "ab", {"R": {("a", "b")}, "Q": set()})
        assert edges_of(gaifman(s)) == {frozenset("ab")}

    def test_loops_give_no_edges(self):
        s = BinaryStructure(Signature(("R",)), "a", {"R": {("a", "a")}})
        assert edges_of(gaifman(s)) == set()

    def test_model_fixture_without_order_is_edgeless(self):
        flat = model_structure(fixture("model-p3.mmod").model)
        g = gaifman(reduct(flat, [z for z in flat.signature if z != "prec"]))
        assert len(g.universe) == 5
        assert edges_of(g) == set()

    @PROPERTY
    @given(structures())
    def test_idempotent(self, s):
        assert gaifman(gaifman(s)) == gaifman(s)

    @PROPERTY
    @given(structures(symbols=("E", "F")))
    def test_reduct_subgraph(self, s):
        assert gaifman(reduct(s, ["E"])).relations["E"] <= gaifman(s).relations["E"]


class TestReduct:
    def test_identity(self):
        assert reduct(P3, ["E"]) == P3

    def test_drop_complement(self):
        assert reduct(complement_expand(P3), ["E"]) == P3

    def test_empty(self):
        bare = reduct(P3, [])
        assert bare.signature == Signature(())
        assert bare.universe == P3.universe

    def test_unknown(self):
        with pytest.raises(UnknownName):
            reduct(P3, ["F"])


class TestBiclique:
    def test_k22(self):
        assert biclique_number(make_graph("abcd", ["ac", "ad", "bc", "bd"])) == 2

    def test_path(self):
        assert biclique_number(path_graph("abcd")) == 1

    def test_edgeless(self):
        assert biclique_number(edgeless_graph("abc")) == 0

    def test_limit(self):
        with pytest.raises(LimitExceeded):
            biclique_number(complete_graph("abcde"), limit=4)

    @PROPERTY
    @given(graphs(max_n=7))
    def test_matches_brute_force(self, g):
        t = biclique_number(g)
        assert t == brute_biclique(g)
        assert t <= len(g.universe) // 2

    @PROPERTY
    @given(graphs(max_n=6))
    def test_monotone_under_edge_addition(self, g):
        missing = sorted(ordered_pairs(g.universe) - g.relations["E"])
        if missing:
            u, v = missing[0]
            bigger = make_graph(g.universe, list(edges_of(g)) + [(u, v)])
            assert biclique_number(bigger) >= biclique_number(g)


class TestComplementExpand:
    def test_k2(self):
        s = complement_expand(complete_graph("ab"))
        assert s.relations["F"] == frozenset()
        assert s.relations["E"] == {("a", "b"), ("b", "a")}

    def test_edgeless_pair(self):
        s = complement_expand(edgeless_graph("ab"))
        assert s.relations["E"] == frozenset()
        assert s.relations["F"] == {("a", "b"), ("b", "a")}

    def test_p3(self):
        s = complement_expand(P3)
        assert s.relations["E"] == {("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")}
        assert s.relations["F"] == {("a", "c"), ("c", "a")}

    def test_rejects_non_graph(self):
        with pytest.raises(InvalidInput):
            complement_expand(complement_expand(P3))

    @PROPERTY
    @given(graphs())
    def test_partition(self, g):
        s = complement_expand(g)
        e, f = s.relations["E"], s.relations["F"]
        assert e | f == ordered_pairs(g.universe)
        assert not e & f


class TestMatchesVia:
    def test_identity(self):
        assert matches_via(P3, P3, {x: x for x in "abc"})

    def test_relabel(self):
        assert matches_via(P3, path_graph("xyz"), dict(zip("abc", "xyz")))

    def test_mismatch(self):
        assert not matches_via(P3, complete_graph("abc"), {x: x for x in "abc"})

    def test_not_injective(self):
        assert not matches_via(P3, P3, {"a": "a", "b": "a", "c": "c"})
