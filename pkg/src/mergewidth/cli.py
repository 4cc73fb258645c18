"""Command line front end.

Exit codes: 0 success, 1 validation or lemma failure, 2 parse error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats, ranked, verify
from .cliquewidth import CliqueExpression, eval_cliqueexpr
from .dot import to_dot
from .errors import InvalidInput, LimitExceeded, MergeWidthError, ParseError, UnknownName
from .lift import lift_model
from .model import MergeModel, compactify, interpret, s_part_graph, validate_model
from .sequence import MergeSequence, mw_exact, validate_sequence, width
from .structures import BinaryStructure, Signature, biclique_number, complement_expand, gaifman
from .twin import (TwinModel, twin_interpret, twin_model_from_cliqueexpr, twin_to_merge,
                   validate_twin_model, z_part_graph)

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_LIMIT = 0, 1, 2, 3


class Failure(Exception):
    """A validation failure to report with exit code 1."""


def _load(path, *kinds):
    kind, obj = formats.load(path)
    if kinds and kind not in kinds:
        raise ParseError(f"expected a {' or '.join('.' + k for k in kinds)} file, "
                         f"found .{kind} content", path=path)
    return obj


def _ranked(path) -> ranked.RankedMergeModel:
    obj = _load(path, "mmod")
    if not isinstance(obj, ranked.RankedMergeModel):
        raise Failure(f"{path}: this command needs intervals on every node")
    return obj


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _check(report, what):
    if not report:
        raise Failure(f"{what}: condition {report.condition}: {report.message}")


# -- verbs --------------------------------------------------------------------------

def cmd_validate(args):
    kind, obj = formats.load(args.file)
    notes = []
    if isinstance(obj, MergeSequence):
        # without the structure only the partition chain and completeness are checkable
        bare = BinaryStructure(Signature(()), sorted(obj.elements()), {})
        _check(validate_sequence(obj, bare), "sequence")
        notes.append("uniformity not checked without the structure")
    elif isinstance(obj, ranked.RankedMergeModel):
        report = ranked.validate_ranking(obj)
        _check(report, "ranked merge-model")
        notes.extend(report.notes)
    elif isinstance(obj, MergeModel):
        _check(validate_model(obj), "merge-model")
    elif isinstance(obj, TwinModel):
        _check(validate_twin_model(obj), "twin-model")
    elif isinstance(obj, CliqueExpression):
        eval_cliqueexpr(obj)
        notes.append("linear" if obj.linear else "not linear")
    print("ok" + "".join(f" ({n})" for n in notes) + f" [{kind}]")


def cmd_width(args):
    seq = _load(args.sequence, "mseq")
    g = _load(args.structure, "bst", "gr")
    _check(validate_sequence(seq, g), "sequence")
    print(width(seq, g, args.r))


def cmd_mw(args):
    g = _load(args.structure, "bst", "gr")
    value, _ = mw_exact(g, args.r, nmax=args.nmax)
    print(value)


def cmd_seq2model(args):
    seq = _load(args.sequence, "mseq")
    g = _load(args.structure, "bst", "gr")
    _check(validate_sequence(seq, g), "sequence")
    _emit(formats.format_model(ranked.model_of_sequence(seq, g)), args.output)


def cmd_model2seq(args):
    _emit(formats.format_sequence(ranked.sequence_of_model(_ranked(args.model))), args.output)


def cmd_clean(args):
    _emit(formats.format_model(ranked.cleaning(_ranked(args.model))), args.output)


def cmd_compact(args):
    obj = _load(args.model, "mmod")
    if isinstance(obj, ranked.RankedMergeModel):
        out = ranked.compactify_ranked(obj)
    else:
        _check(validate_model(obj), "merge-model")
        out = compactify(obj)
    _emit(formats.format_model(out), args.output)


def cmd_wr(args):
    rm = _ranked(args.model)
    _check(ranked.validate_ranking(rm), "ranked merge-model")
    print(ranked.ranked_width(rm, args.r))


def cmd_interpret(args):
    obj = _load(args.model, "mmod", "tmod")
    if isinstance(obj, TwinModel):
        _check(validate_twin_model(obj), "twin-model")
        out = twin_interpret(obj)
    else:
        model = obj.model if isinstance(obj, ranked.RankedMergeModel) else obj
        _check(validate_model(model), "merge-model")
        out = interpret(model)
    _emit(formats.format_structure(out), args.output)


def cmd_bomega(args):
    obj = _load(args.file, "bst", "gr", "mmod", "tmod")
    if isinstance(obj, ranked.RankedMergeModel):
        obj = obj.model
    if isinstance(obj, MergeModel):
        graph = s_part_graph(obj)
    elif isinstance(obj, TwinModel):
        graph = z_part_graph(obj)
    else:
        graph = gaifman(obj)
    print(biclique_number(graph, limit=args.limit))


def cmd_cw2twin(args):
    e = _load(args.expression, "cwe")
    model, witness = twin_model_from_cliqueexpr(e)
    _emit(formats.format_twin(model), args.output)
    if args.emit_expr:
        Path(args.emit_expr).write_text(formats.format_cliqueexpr(witness), encoding="utf-8")


def cmd_twin2merge(args):
    t = _load(args.model, "tmod")
    _check(validate_twin_model(t), "twin-model")
    _emit(formats.format_model(twin_to_merge(t)), args.output)


def cmd_lift(args):
    _emit(formats.format_model(lift_model(_ranked(args.model))), args.output)


def cmd_cexpand(args):
    g = _load(args.graph, "gr", "bst")
    _emit(formats.format_structure(complement_expand(g)), args.output)


def cmd_dot(args):
    _emit(to_dot(_load(args.file)), args.output)


def cmd_verify(args):
    cfg = verify.TrialConfig(seed=args.seed, nmax=args.nmax, trials=args.trials)
    lemmas = [args.lemma] if args.lemma else None
    try:
        reports = verify.run_lemma_suite(cfg, lemmas)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    sys.stdout.write(verify.text_report(reports))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(verify.json_report(cfg, reports), encoding="utf-8")
        verify.write_counterexamples(reports, out / "counterexamples")
    if not all(r.ok for r in reports):
        raise Failure("some checks failed")


# -- parser ---------------------------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mergewidth",
                                     description="Merge sequences, merge-models and "
                                                 "twin-models on finite binary structures.")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    def output(p):
        p.add_argument("-o", "--output", metavar="FILE", help="output file (default: stdout)")

    p = verb("validate", cmd_validate, "validate any supported file (kind from its header)")
    p.add_argument("file")

    p = verb("width", cmd_width, "radius-r width of a merge sequence")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("sequence")
    p.add_argument("structure")

    p = verb("mw", cmd_mw, "exact radius-r merge-width (small structures only)")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--nmax", type=_positive, default=5)
    p.add_argument("structure")

    p = verb("seq2model", cmd_seq2model, "clean ranked model of a merge sequence")
    p.add_argument("sequence")
    p.add_argument("structure")
    output(p)

    p = verb("model2seq", cmd_model2seq, "merge sequence of a clean ranked model")
    p.add_argument("model")
    output(p)

    p = verb("clean", cmd_clean, "clean the ranking of a ranked model")
    p.add_argument("model")
    output(p)

    p = verb("compact", cmd_compact, "compactify a (ranked) model")
    p.add_argument("model")
    output(p)

    p = verb("wr", cmd_wr, "merge-walk width of a ranked model")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("model")

    p = verb("interpret", cmd_interpret, "structure represented by a merge- or twin-model")
    p.add_argument("model")
    output(p)

    p = verb("bomega", cmd_bomega, "biclique number (of the transversal part for models)")
    p.add_argument("--limit", type=_positive, default=64)
    p.add_argument("file")

    p = verb("cw2twin", cmd_cw2twin, "twin-model of a clique-width expression")
    p.add_argument("expression")
    output(p)
    p.add_argument("--emit-expr", metavar="FILE",
                   help="also write the doubled-label expression building the model")

    p = verb("twin2merge", cmd_twin2merge, "loopless merge-model of a twin-model over {E, F}")
    p.add_argument("model")
    output(p)

    p = verb("lift", cmd_lift, "compact ranked model of a compact ranked model")
    p.add_argument("model")
    output(p)

    p = verb("cexpand", cmd_cexpand, "complement expansion of a graph")
    p.add_argument("graph")
    output(p)

    p = verb("dot", cmd_dot, "Graphviz drawing of any supported file")
    p.add_argument("file")
    output(p)

    p = verb("verify", cmd_verify, "randomized cross-checks of the width relations")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--nmax", type=_positive, default=5)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--lemma", choices=sorted(verify.LEMMAS))
    p.add_argument("--out", metavar="DIR",
                   help="write summary.json and counterexample files here")
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        args.func(args)
    except ParseError as exc:
        return _fail(exc, EXIT_PARSE)
    except OSError as exc:
        return _fail(f"{exc.filename}: {exc.strerror}", EXIT_PARSE)
    except LimitExceeded as exc:
        return _fail(exc, EXIT_LIMIT)
    except (Failure, InvalidInput, UnknownName, MergeWidthError) as exc:
        return _fail(exc, EXIT_INVALID)
    return EXIT_OK


def _fail(message, code):
    print(f"mergewidth: {message}", file=sys.stderr)
    return code


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
