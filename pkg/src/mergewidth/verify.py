"""Randomized and exhaustive cross-checks of the width relations.

Every check ("lemma") draws its own seeded generator, so running one check
alone gives the same trials as running the whole suite.  Failures are data:
each carries the offending objects serialized in the native file formats.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import ranked
from .cliquewidth import (complement_expansion_expression, eval_cliqueexpr, is_linear,
                          random_cliqueexpr)
from .formats import format_any
from .lift import lift_model, lift_target
from .model import interpret, is_compact, is_loopless, s_part_graph, validate_model
from .sequence import (MergeSequence, Step, greedy_sequence, mw_exact, mw_unreduced,
                       random_sequence, width)
from .structures import (BinaryStructure, Signature, biclique_number, gaifman, make_graph,
                         matches_via, ordered_pairs, reduct)
from .twin import (twin_interpret, twin_model_from_cliqueexpr, twin_structure, twin_to_merge,
                   validate_twin_model, z_part_graph)

PROFILES = {"E": [("E",)], "EF": [("E", "F")], "mixed": [("E",), ("E", "F")]}


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 1
    nmax: int = 5
    trials: int = 100
    radii: tuple[int, ...] = (1, 2, 3)
    profile: str = "mixed"

    def __post_init__(self):
        if self.nmax < 1:
            raise ValueError("nmax must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        object.__setattr__(self, "radii", tuple(self.radii))

    def rng(self, lemma: str) -> random.Random:
        return random.Random(f"{self.seed}:{lemma}")


@dataclass
class LemmaReport:
    lemma: str
    trials: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, trial, message, **objects):
        files = {name: format_any(obj) for name, obj in objects.items()}
        self.failures.append({"trial": trial, "message": message, "files": files})

    def summary(self) -> dict:
        return {"lemma": self.lemma, "trials": self.trials, "failures": len(self.failures),
                "messages": [f["message"] for f in self.failures]}


# -- generators -------------------------------------------------------------------

def random_structure(rng: random.Random, n: int, symbols=("E",),
                     symmetric: bool | None = None, name="G") -> BinaryStructure:
    """Edge-density sweep: one density per structure drawn uniformly from [0, 1]."""
    universe = [f"v{k}" for k in range(n)]
    if symmetric is None:
        symmetric = rng.random() < 0.5
    density = rng.random()
    relations = {}
    for z in symbols:
        pairs = set()
        if symmetric:
            for u, v in itertools.combinations(universe, 2):
                if rng.random() < density:
                    pairs.update(((u, v), (v, u)))
        else:
            pairs = {p for p in sorted(ordered_pairs(universe)) if rng.random() < density}
        relations[z] = pairs
    return BinaryStructure(Signature(tuple(symbols)), universe, relations, name=name)


def random_graph(rng: random.Random, n: int, name="G") -> BinaryStructure:
    density = rng.random()
    universe = [f"v{k}" for k in range(n)]
    edges = [e for e in itertools.combinations(universe, 2) if rng.random() < density]
    return make_graph(universe, edges, name=name)


def _structure(cfg, rng, trial):
    n = rng.randint(1, cfg.nmax)
    symbols = rng.choice(PROFILES[cfg.profile])
    return random_structure(rng, n, symbols, name=f"t{trial}")


def _leaf_map(seq):
    names = ranked.sequence_part_names(seq)
    return {next(iter(p)): n for p, n in names.items() if len(p) == 1}


def _guard(report, trial, objects, check):
    """Run ``check``; it returns None, a message, or a message with extra objects."""
    report.trials += 1
    try:
        problem = check()
    except Exception as exc:  # failures are data
        problem = f"{type(exc).__name__}: {exc}"
    if isinstance(problem, tuple):
        problem, extra = problem
        objects = {**objects, **extra}
    if problem:
        report.fail(trial, problem, **objects)


# -- the checks ----------------------------------------------------------------------

def check_seq_to_mod(cfg):
    rep, rng = LemmaReport("seq_to_mod"), cfg.rng("seq_to_mod")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))

        def check():
            rm = ranked.model_of_sequence(seq, g)
            if not matches_via(g, interpret(rm.model), _leaf_map(seq)):
                return "interpretation differs from the input"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_width_eq(cfg):
    rep, rng = LemmaReport("width_eq"), cfg.rng("width_eq")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))

        def check():
            rm = ranked.model_of_sequence(seq, g)
            back = ranked.sequence_of_model(rm)
            target = interpret(rm.model)
            for r in cfg.radii:
                a, b = width(back, target, r), ranked.ranked_width(rm, r)
                if a != b:
                    return f"r={r}: sequence width {a} != walk width {b}"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_sigmap(cfg):
    rep, rng = LemmaReport("sigmap"), cfg.rng("sigmap")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))

        def check():
            rm = ranked.model_of_sequence(seq, g)
            back = ranked.sequence_of_model(rm)
            target = interpret(rm.model)
            for r in cfg.radii:
                a, b = width(back, target, r), width(seq, g, r)
                if a > b:
                    return f"r={r}: rebuilt sequence has width {a} > {b}"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_cleaning(cfg):
    rep, rng = LemmaReport("cleaning"), cfg.rng("cleaning")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))
        sub = random.Random(rng.random())

        def check():
            rm = ranked.model_of_sequence(seq, g)
            noisy = ranked.perturb_ranking(rm, sub)
            if ranked.cleaning(rm) != rm:
                return "cleaning a clean model changed it"
            if ranked.cleaning(noisy) != rm:
                return "cleaning depends on more than the order of internal left endpoints"
            for r in cfg.radii:
                a, b = ranked.ranked_width(rm, r), ranked.ranked_width(noisy, r)
                if a > b:
                    return f"r={r}: cleaning raised the width from {b} to {a}"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_ws_model(cfg):
    rep, rng = LemmaReport("ws_model"), cfg.rng("ws_model")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))
        sub = random.Random(rng.random())

        def check():
            rm = ranked.model_of_sequence(seq, g)
            if sub.random() < 0.5:
                rm = ranked.perturb_ranking(rm, sub)
            b, w = biclique_number(s_part_graph(rm.model)), ranked.ranked_width(rm, 1)
            if b > w:
                return f"biclique number {b} exceeds w_1 = {w}"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_mhat(cfg):
    rep, rng = LemmaReport("mhat"), cfg.rng("mhat")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = greedy_sequence(g, rng.choice(cfg.radii))

        def check():
            rm = ranked.model_of_sequence(seq, g)
            c = ranked.compactify_ranked(rm)
            files = {"model.mmod": rm, "compact.mmod": c}
            if interpret(c.model) != interpret(rm.model):
                return "compactification changed the interpretation", files
            for r in cfg.radii:
                a, b = ranked.ranked_width(c, r), ranked.ranked_width(rm, r)
                if a > b:
                    return f"r={r}: compactification raised the width from {b} to {a}", files

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def check_lift(cfg):
    rep, rng = LemmaReport("lift"), cfg.rng("lift")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        if len(g.universe) < 2:
            continue
        seq = greedy_sequence(g, rng.choice(cfg.radii))

        def check():
            rm = ranked.compactify_ranked(ranked.model_of_sequence(seq, g))
            problem = lift_problem(rm, cfg.radii)
            return problem and (problem, {"model.mmod": rm})

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq}, check)
    return rep


def lift_problem(rm, radii):
    """None when the lift of ``rm`` meets every claimed property."""
    out = lift_model(rm)
    report = ranked.validate_ranking(out)
    if not report:
        return f"lift is invalid: {report.message}"
    if not ranked.is_clean(out):
        return "lift is not clean"
    if not is_compact(out.model):
        return "lift is not compact"
    if interpret(out.model) != lift_target(rm):
        return "lift does not interpret to the input model"
    for r in radii:
        a, b = ranked.ranked_width(out, r), ranked.ranked_width(rm, r)
        if a > 2 * b:
            return f"r={r}: lift width {a} exceeds twice {b}"
    return None


def check_min_sigma(cfg):
    rep, rng = LemmaReport("min_sigma"), cfg.rng("min_sigma")
    for trial in range(cfg.trials):
        g = _structure(cfg, rng, trial)
        seq = random_sequence(g, rng)
        bigger = _add_reveals(seq, g, rng)

        def check():
            for r in cfg.radii:
                a, b = width(seq, g, r), width(bigger, g, r)
                if a > b:
                    return f"r={r}: extra reveals lowered the width from {a} to {b}"

        _guard(rep, trial, {"structure.bst": g, "sequence.mseq": seq, "larger.mseq": bigger},
               check)
    return rep


def _add_reveals(seq, g, rng):
    pairs = sorted(ordered_pairs(g.universe))
    steps = []
    for step in seq.steps:
        extra = {p for p in pairs if rng.random() < 0.15}
        steps.append(Step(step.partition, step.revealed | extra))
    return MergeSequence(seq.structure_ref, steps)


def check_mw_red(cfg):
    rep, rng = LemmaReport("mw_red"), cfg.rng("mw_red")
    nmax = min(cfg.nmax, 4)
    for trial in range(cfg.trials):
        n = rng.randint(1, nmax)
        g = random_structure(rng, n, ("E", "F"), name=f"t{trial}")
        r = rng.choice(cfg.radii)

        def check():
            full = mw_exact(g, r)[0]
            for small in (reduct(g, ["E"]), reduct(g, ["F"]), gaifman(g)):
                value = mw_exact(small, r)[0]
                if value > full:
                    return f"r={r}: a reduct has merge-width {value} > {full}"

        _guard(rep, trial, {"structure.bst": g}, check)
    return rep


def check_cw_model(cfg):
    rep, rng = LemmaReport("cw_model"), cfg.rng("cw_model")
    for trial in range(cfg.trials):
        t = rng.randint(1, 4)
        n = rng.randint(1, max(cfg.nmax, 2) * 2)
        linear = trial % 2 == 0
        symbols = rng.choice(PROFILES[cfg.profile])
        e = random_cliqueexpr(rng, t, n, linear, symbols)

        def check():
            return cw_model_problem(e)

        _guard(rep, trial, {"expression.cwe": e}, check)
    return rep


def cw_model_problem(e):
    t = e.label_count
    tm, witness = twin_model_from_cliqueexpr(e)
    report = validate_twin_model(tm)
    if not report:
        return f"twin-model invalid: {report.condition}: {report.message}"
    if twin_interpret(tm) != eval_cliqueexpr(e)[0]:
        return "twin-model interprets to a different structure"
    b = biclique_number(z_part_graph(tm))
    if b > 2 * t:
        return f"biclique number {b} exceeds 2t = {2 * t}"
    if witness.label_count > 2 * t:
        return f"witness uses {witness.label_count} labels"
    if is_linear(e) and not is_linear(witness):
        return "witness of a linear expression is not linear"
    if eval_cliqueexpr(witness)[0] != twin_structure(tm):
        return "witness does not build the twin-model"
    return None


def check_mw_tww(cfg):
    rep, rng = LemmaReport("mw_tww"), cfg.rng("mw_tww")
    for trial in range(cfg.trials):
        g = random_graph(rng, rng.randint(1, min(cfg.nmax + 1, 6)), name=f"t{trial}")

        def check():
            return mw_tww_problem(g)

        _guard(rep, trial, {"graph.bst": g}, check)
    return rep


def mw_tww_problem(g):
    e = complement_expansion_expression(g)
    tm, _ = twin_model_from_cliqueexpr(e)
    m = twin_to_merge(tm)
    if not is_loopless(m):
        return "translated model has a loop"
    report = validate_model(m)
    if not report:
        return f"translated model violates condition {report.condition}"
    if interpret(m) != g:
        return "translated model interprets to a different graph"
    return None


def oracle_crosscheck(cfg: TrialConfig) -> LemmaReport:
    """Exact oracle against the unreduced enumerator on every structure with at most
    three elements (over the first symbol of the profile), loop tuples included."""
    rep = LemmaReport("oracle")
    nmax = min(cfg.nmax, 3)
    for n in range(1, nmax + 1):
        universe = [f"v{k}" for k in range(n)]
        pairs = list(itertools.product(universe, repeat=2))
        for bits in range(1 << len(pairs)):
            chosen = {p for k, p in enumerate(pairs) if bits >> k & 1}
            g = BinaryStructure(Signature(("E",)), universe, {"E": chosen}, name=f"n{n}b{bits}")
            for r in cfg.radii:

                def check():
                    a, b = mw_exact(g, r)[0], mw_unreduced(g, r)
                    if a != b:
                        return f"r={r}: oracle {a} != unreduced {b}"

                _guard(rep, (n, bits, r), {"structure.bst": g}, check)
    return rep


LEMMAS = {
    "seq_to_mod": check_seq_to_mod,
    "width_eq": check_width_eq,
    "sigmap": check_sigmap,
    "cleaning": check_cleaning,
    "ws_model": check_ws_model,
    "mhat": check_mhat,
    "lift": check_lift,
    "min_sigma": check_min_sigma,
    "mw_red": check_mw_red,
    "cw_model": check_cw_model,
    "mw_tww": check_mw_tww,
    "oracle": oracle_crosscheck,
}


def run_lemma_suite(cfg: TrialConfig, lemmas=None) -> list[LemmaReport]:
    names = list(LEMMAS) if lemmas is None else list(lemmas)
    unknown = [n for n in names if n not in LEMMAS]
    if unknown:
        raise ValueError(f"unknown lemma(s) {unknown}; known: {sorted(LEMMAS)}")
    return [LEMMAS[name](cfg) for name in names]


def text_report(reports) -> str:
    lines = []
    for rep in reports:
        status = "PASS" if rep.ok else "FAIL"
        lines.append(f"{status} {rep.lemma:<12} trials={rep.trials} failures={len(rep.failures)}")
        for f in rep.failures[:5]:
            lines.append(f"     trial {f['trial']}: {f['message']}")
    return "\n".join(lines) + "\n"


def json_report(cfg: TrialConfig, reports) -> str:
    data = {"config": {"seed": cfg.seed, "nmax": cfg.nmax, "trials": cfg.trials,
                       "radii": list(cfg.radii), "profile": cfg.profile},
            "reports": [r.summary() for r in reports]}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_counterexamples(reports, directory) -> list[Path]:
    directory = Path(directory)
    written = []
    for rep in reports:
        for k, failure in enumerate(rep.failures):
            for fname, text in sorted(failure["files"].items()):
                path = directory / f"{rep.lemma}-{k}-{fname}"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(text, encoding="utf-8")
                written.append(path)
    return written
