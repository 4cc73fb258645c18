import json
import random
import re

import pytest

from mergewidth import cli, formats, ranked, verify
from mergewidth.ranked import RankedMergeModel
from mergewidth.verify import (LEMMAS, TrialConfig, json_report, oracle_crosscheck,
                               run_lemma_suite, text_report, write_counterexamples)

FAST = [name for name in LEMMAS if name not in ("oracle", "mw_red")]


def off_by_one_cleaning(rm):
    """Cleaning with every rank shifted up by one."""
    order = rm.order
    leaves = set(order.leaves)
    leaf_lo = min(rm.lo(v) for v in leaves)
    f = {x: (leaf_lo if x in leaves else rm.lo(x)) for x in order.nodes}
    rank = {val: k for k, val in enumerate(sorted(set(f.values())), 2)}
    g = {x: rank[f[x]] for x in order.nodes}
    out = {}
    for x in order.nodes:
        p = order.parent.get(x)
        out[x] = (g[x], g[x]) if p is None else (g[x], g[p] - 1)
    return RankedMergeModel(rm.model, out)


class TestConfig:
    def test_bounds(self):
        with pytest.raises(ValueError):
            TrialConfig(nmax=0)
        with pytest.raises(ValueError):
            TrialConfig(trials=0)
        with pytest.raises(ValueError):
            TrialConfig(profile="XY")

    def test_unknown_lemma(self):
        with pytest.raises(ValueError):
            run_lemma_suite(TrialConfig(trials=1), ["nope"])


def test_deterministic():
    cfg = TrialConfig(seed=7, nmax=4, trials=15)
    a = run_lemma_suite(cfg, FAST)
    b = run_lemma_suite(cfg, FAST)
    assert text_report(a) == text_report(b)
    assert json_report(cfg, a) == json_report(cfg, b)
    assert [r.failures for r in a] == [r.failures for r in b]


def test_single_lemma_matches_suite():
    cfg = TrialConfig(seed=3, nmax=4, trials=10)
    alone = run_lemma_suite(cfg, ["width_eq"])[0]
    full = {r.lemma: r for r in run_lemma_suite(cfg, ["seq_to_mod", "width_eq"])}
    assert alone.failures == full["width_eq"].failures and alone.trials == full["width_eq"].trials


def test_degenerate_universe():
    reports = run_lemma_suite(TrialConfig(seed=1, nmax=1, trials=20))
    assert all(r.ok for r in reports), text_report(reports)


def test_mutated_cleaning_is_caught(monkeypatch):
    monkeypatch.setattr(ranked, "cleaning", off_by_one_cleaning)
    report = run_lemma_suite(TrialConfig(seed=1, nmax=4, trials=20), ["width_eq"])[0]
    assert not report.ok


def test_oracle_small():
    report = oracle_crosscheck(TrialConfig(nmax=2, radii=(1, 2)))
    assert report.ok
    # loop tuples included: 2 structures on one element, 16 on two, two radii
    assert report.trials == (2 + 16) * 2


def test_json_summary():
    cfg = TrialConfig(seed=2, nmax=3, trials=5)
    data = json.loads(json_report(cfg, run_lemma_suite(cfg, ["seq_to_mod"])))
    assert data["config"]["seed"] == 2
    assert data["reports"][0] == {"lemma": "seq_to_mod", "trials": 5, "failures": 0,
                                  "messages": []}


def test_counterexamples_replay_through_cli(tmp_path, capsys):
    cfg = TrialConfig(seed=1, nmax=5, trials=100)
    report = run_lemma_suite(cfg, ["mhat"])[0]
    assert not report.ok  # compactification can widen a model; see the ranked tests
    written = write_counterexamples([report], tmp_path)
    assert written
    for failure_index, failure in enumerate(report.failures):
        r = int(re.match(r"r=(\d+)", failure["message"]).group(1))
        prefix = tmp_path / f"mhat-{failure_index}-"
        for name in ("structure.bst", "sequence.mseq", "model.mmod", "compact.mmod"):
            assert cli.dispatch(["validate", f"{prefix}{name}"]) == 0
        capsys.readouterr()
        assert cli.dispatch(["wr", "--r", str(r), f"{prefix}model.mmod"]) == 0
        before = int(capsys.readouterr().out)
        assert cli.dispatch(["compact", f"{prefix}model.mmod", "-o", str(tmp_path / "c.mmod")]) == 0
        assert formats.load(tmp_path / "c.mmod")[1] == formats.load(f"{prefix}compact.mmod")[1]
        assert cli.dispatch(["wr", "--r", str(r), str(tmp_path / "c.mmod")]) == 0
        after = int(capsys.readouterr().out)
        assert after > before


def test_generators_are_seeded():
    a = verify.random_structure(random.Random(4), 5, ("E", "F"))
    b = verify.random_structure(random.Random(4), 5, ("E", "F"))
    assert a == b
