"""Shared strategies and fixture loaders for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mergewidth import formats
from mergewidth.sequence import greedy_sequence
from mergewidth.structures import BinaryStructure, Signature, make_graph, ordered_pairs
from mergewidth.verify import random_structure

DATA = Path(__file__).parent / "data"

PROPERTY = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])


def fixture(name):
    return formats.load(DATA / name)[1]


def fixture_text(name) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@st.composite
def structures(draw, max_n=5, symbols=None):
    n = draw(st.integers(1, max_n))
    if symbols is None:
        symbols = draw(st.sampled_from([("E",), ("E", "F")]))
    universe = [f"v{k}" for k in range(n)]
    pairs = sorted(ordered_pairs(universe))
    relations = {z: set(draw(st.lists(st.sampled_from(pairs), unique=True))) if pairs else set()
                 for z in symbols}
    return BinaryStructure(Signature(symbols), universe, relations)


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    universe = [f"v{k}" for k in range(n)]
    possible = [(universe[i], universe[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(possible), unique=True)) if possible else []
    return make_graph(universe, edges)


@st.composite
def structures_with_sequences(draw, max_n=5):
    """A structure and a greedy merge sequence for it."""
    g = draw(structures(max_n=max_n))
    r = draw(st.integers(1, 3))
    return g, greedy_sequence(g, r)


def seeded_structures(seed, count, max_n, symbols=("E",)):
    rng = random.Random(seed)
    return [random_structure(rng, rng.randint(1, max_n), symbols, name=f"s{k}")
            for k in range(count)]
