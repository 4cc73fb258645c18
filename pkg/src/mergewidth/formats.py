"""Line-oriented text formats.

=====  ==========================================================
.bst   ``structure``, ``signature``, ``elements``, ``rel`` lines
.gr    DIMACS edge format, expanded to a symmetric ``E``
.mseq  ``mergeseq``, ``step``, ``parts``, ``reveal``/``revealsym``
.mmod  ``mergemodel``, ``signature``, ``node``, ``s`` lines
.tmod  ``twinmodel``, ``signature``, ``node``, ``z`` lines
.cwe   prefix s-expressions, optional ``signature``/``labels``
=====  ==========================================================

Serializers sort everything so that output is byte-stable.  Parsers raise
:class:`ParseError` with the 1-based line and column of the offending token.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .cliquewidth import (Add, AddSym, CliqueExpression, Create, Relabel, Union, labels_used,
                          symbols_used)
from .errors import InvalidInput, MergeWidthError, ParseError
from .model import ORDER_SYMBOL, MergeModel
from .ranked import RankedMergeModel
from .sequence import MergeSequence, Step
from .structures import BinaryStructure, Signature
from .treeorder import TreeOrder
from .twin import TwinModel

_TOKEN = re.compile(r"[{}()]|[^\s{}()#]+|#")
_NO_PARENT = "_"

KINDS = ("bst", "gr", "mseq", "mmod", "tmod", "cwe")


class _Tok(str):
    """A token that remembers where it came from."""

    line: int
    column: int

    def __new__(cls, text, line, column):
        tok = super().__new__(cls, text)
        tok.line, tok.column = line, column
        return tok


def _lines(text: str):
    """Non-empty lines as lists of tokens, comments removed."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = []
        for m in _TOKEN.finditer(raw):
            if m.group() == "#":
                break
            toks.append(_Tok(m.group(), lineno, m.start() + 1))
        if toks:
            yield toks


class _Reader:
    def __init__(self, text, path=None):
        self.path = path
        self.lines = list(_lines(text))
        self.last = (1, 1)

    def error(self, message, tok=None):
        if tok is None:
            line, column = self.last
        else:
            line, column = tok.line, tok.column
        return ParseError(message, line, column, self.path)

    def expect_header(self, keyword, arity=1):
        if not self.lines:
            raise ParseError(f"empty input, expected {keyword!r}", 1, 1, self.path)
        toks = self.lines.pop(0)
        if toks[0] != keyword:
            raise self.error(f"expected {keyword!r}, found {toks[0]!r}", toks[0])
        self.need(toks, 1 + arity)
        return toks

    def need(self, toks, count, exact=True):
        self.last = (toks[-1].line, toks[-1].column + len(toks[-1]))
        if len(toks) < count:
            raise self.error(f"{toks[0]!r} needs {count - 1} argument(s)")
        if exact and len(toks) > count:
            raise self.error(f"unexpected token {toks[count]!r}", toks[count])


def _int(reader, tok, what="integer"):
    try:
        return int(tok)
    except ValueError:
        raise reader.error(f"expected {what}, found {tok!r}", tok) from None


def _rational(reader, tok):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise reader.error(f"expected a rational p/q, found {tok!r}", tok) from None


def _symbols(reader, toks):
    names = []
    for tok in toks[1:]:
        name = str(tok)
        if "/" in name:
            name, _, arity = name.partition("/")
            if arity != "2":
                raise reader.error(f"only binary symbols are supported, got {tok!r}", tok)
        if name in names:
            raise reader.error(f"duplicate symbol {name!r}", tok)
        names.append(name)
    try:
        return Signature(tuple(names))
    except InvalidInput as exc:
        raise reader.error(str(exc), toks[0]) from None


def _fmt_rational(q: Fraction) -> str:
    return str(Fraction(q))


# -- structures ---------------------------------------------------------------

def parse_structure(text: str, path=None) -> BinaryStructure:
    rd = _Reader(text, path)
    name = str(rd.expect_header("structure")[1])
    sig = None
    elements = None
    relations = {}
    for toks in rd.lines:
        head = toks[0]
        if head == "signature":
            if sig is not None:
                raise rd.error("signature given twice", head)
            sig = _symbols(rd, toks)
            relations = {z: set() for z in sig}
        elif head == "elements":
            if elements is not None:
                raise rd.error("elements given twice", head)
            elements = [str(t) for t in toks[1:]]
            if not elements:
                raise rd.error("elements needs at least one name", head)
            dup = {e for e in elements if elements.count(e) > 1}
            if dup:
                raise rd.error(f"duplicate elements {sorted(dup)}", head)
            members = set(elements)
        elif head == "rel":
            rd.need(toks, 4)
            if sig is None or elements is None:
                raise rd.error("rel before signature and elements", head)
            z, u, v = toks[1:]
            if z not in sig:
                raise rd.error(f"undeclared symbol {z!r}", z)
            for tok in (u, v):
                if tok not in members:
                    raise rd.error(f"unknown element {tok!r}", tok)
            relations[str(z)].add((str(u), str(v)))
        else:
            raise rd.error(f"unknown directive {head!r}", head)
    if sig is None:
        sig = Signature(())
    if elements is None:
        raise rd.error("missing elements line")
    return BinaryStructure(sig, elements, relations, name=name)


def format_structure(s: BinaryStructure) -> str:
    out = [f"structure {s.name}"]
    out.append(" ".join(["signature", *s.signature.symbols]).rstrip())
    out.append(" ".join(["elements", *sorted(s.universe)]))
    for z in s.signature:
        for u, v in sorted(s.relations[z]):
            out.append(f"rel {z} {u} {v}")
    return "\n".join(out) + "\n"


def parse_graph(text: str, path=None, name="G") -> BinaryStructure:
    """DIMACS ``p edge n m`` / ``e u v``; vertices are the strings 1..n."""
    rd = _Reader(text, path)
    rd.lines = [t for t in rd.lines if t[0] != "c"]
    head = rd.expect_header("p", arity=3)
    if head[1] != "edge":
        raise rd.error(f"expected 'edge', found {head[1]!r}", head[1])
    n = _int(rd, head[2], "vertex count")
    m = _int(rd, head[3], "edge count")
    if n < 1:
        raise rd.error("a graph needs at least one vertex", head[2])
    edges = set()
    count = 0
    for toks in rd.lines:
        if toks[0] != "e":
            raise rd.error(f"expected 'e', found {toks[0]!r}", toks[0])
        rd.need(toks, 3)
        u, v = (_int(rd, t, "vertex") for t in toks[1:])
        for t, x in zip(toks[1:], (u, v)):
            if not 1 <= x <= n:
                raise rd.error(f"vertex {x} outside 1..{n}", t)
        if u == v:
            raise rd.error(f"loop on vertex {u}", toks[1])
        edges.update({(str(u), str(v)), (str(v), str(u))})
        count += 1
    if count != m:
        raise rd.error(f"header announces {m} edges, found {count}")
    vertices = [str(k) for k in range(1, n + 1)]
    return BinaryStructure(Signature(("E",)), vertices, {"E": edges}, name=name)


def format_graph(g: BinaryStructure) -> str:
    """DIMACS output for an undirected graph on vertices named 1..n."""
    n = len(g.universe)
    if set(g.universe) != {str(k) for k in range(1, n + 1)}:
        raise InvalidInput("DIMACS output needs vertices named 1..n")
    edges = sorted({tuple(sorted((int(u), int(v)))) for u, v in g.relations["E"]})
    out = [f"p edge {n} {len(edges)}"] + [f"e {u} {v}" for u, v in edges]
    return "\n".join(out) + "\n"


# -- merge sequences ----------------------------------------------------------

def parse_sequence(text: str, path=None) -> MergeSequence:
    rd = _Reader(text, path)
    ref = str(rd.expect_header("mergeseq")[1])
    steps = []
    current = None
    for toks in rd.lines:
        head = toks[0]
        if head == "step":
            rd.need(toks, 2)
            i = _int(rd, toks[1], "step index")
            if i != len(steps) + 1:
                raise rd.error(f"expected step {len(steps) + 1}, found {i}", toks[1])
            current = {"parts": None, "revealed": set(), "at": head}
            steps.append(current)
        elif current is None:
            raise rd.error(f"{head!r} outside a step", head)
        elif head == "parts":
            if current["parts"] is not None:
                raise rd.error("parts given twice in one step", head)
            current["parts"] = _braced(rd, toks[1:])
        elif head in ("reveal", "revealsym"):
            rd.need(toks, 3)
            u, v = str(toks[1]), str(toks[2])
            if u == v:
                raise rd.error("a revealed pair needs two distinct elements", toks[1])
            current["revealed"].add((u, v))
            if head == "revealsym":
                current["revealed"].add((v, u))
        else:
            raise rd.error(f"unknown directive {head!r}", head)
    if not steps:
        raise rd.error("a merge sequence needs at least one step")
    for s in steps:
        if s["parts"] is None:
            raise rd.error("step without a parts line", s["at"])
    return MergeSequence(ref, [Step(tuple(s["parts"]), s["revealed"]) for s in steps])


def _braced(rd, toks):
    parts, cur, opened = [], None, None
    for tok in toks:
        if tok == "{":
            if cur is not None:
                raise rd.error("nested '{'", tok)
            cur, opened = [], tok
        elif tok == "}":
            if cur is None:
                raise rd.error("unmatched '}'", tok)
            parts.append(frozenset(cur))
            cur = None
        elif tok in ("(", ")"):
            raise rd.error(f"unexpected {tok!r}", tok)
        else:
            if cur is None:
                raise rd.error(f"element {tok!r} outside braces", tok)
            cur.append(str(tok))
    if cur is not None:
        raise rd.error("unclosed '{'", opened)
    return parts


def format_sequence(seq: MergeSequence) -> str:
    out = [f"mergeseq {seq.structure_ref}"]
    for i, step in enumerate(seq.steps, 1):
        out.append(f"step {i}")
        parts = sorted(sorted(p) for p in step.partition)
        out.append("parts " + " ".join("{ " + " ".join(p) + " }" for p in parts))
        for u, v in sorted(step.revealed):
            if (v, u) in step.revealed:
                if u < v:
                    out.append(f"revealsym {u} {v}")
            else:
                out.append(f"reveal {u} {v}")
    return "\n".join(out) + "\n"


# -- tree-ordered models --------------------------------------------------------

def _parse_tree_file(text, path, header, tuple_kw, alpha):
    rd = _Reader(text, path)
    name = str(rd.expect_header(header)[1])
    sig = None
    nodes, parent_tok, intervals = [], {}, {}
    tuples = []
    for toks in rd.lines:
        head = toks[0]
        if head == "signature":
            if sig is not None:
                raise rd.error("signature given twice", head)
            sig = _symbols(rd, toks)
        elif head == "node":
            rd.need(toks, 4, exact=False)
            if toks[2] != "parent":
                raise rd.error(f"expected 'parent', found {toks[2]!r}", toks[2])
            x = str(toks[1])
            if x == _NO_PARENT:
                raise rd.error(f"{_NO_PARENT!r} cannot name a node", toks[1])
            if x in parent_tok:
                raise rd.error(f"node {x!r} declared twice", toks[1])
            nodes.append(x)
            parent_tok[x] = toks[3]
            if len(toks) > 4:
                if toks[4] != "interval":
                    raise rd.error(f"expected 'interval', found {toks[4]!r}", toks[4])
                rd.need(toks, 7)
                intervals[x] = (_rational(rd, toks[5]), _rational(rd, toks[6]))
        elif head == tuple_kw:
            width = 5 if alpha else 4
            rd.need(toks, width)
            tuples.append(toks)
        else:
            raise rd.error(f"unknown directive {head!r}", head)
    if sig is None:
        raise rd.error("missing signature line")
    if not nodes:
        raise rd.error("a model needs at least one node")
    parent = {}
    for x in nodes:
        p = parent_tok[x]
        if p == _NO_PARENT:
            continue
        if p not in parent_tok:
            raise rd.error(f"unknown parent {p!r}", p)
        parent[x] = str(p)
    roots = [x for x in nodes if x not in parent]
    if len(roots) != 1:
        raise rd.error(f"exactly one node needs parent '_', found {len(roots)}")
    if intervals and len(intervals) != len(nodes):
        missing = next(x for x in nodes if x not in intervals)
        raise rd.error(f"intervals must be given for all nodes or none; {missing!r} has none")
    out = {}
    for toks in tuples:
        z = toks[1]
        if z not in sig:
            raise rd.error(f"undeclared symbol {z!r}", z)
        key = str(z)
        if alpha:
            if toks[2] not in ("0", "1"):
                raise rd.error(f"alpha must be 0 or 1, found {toks[2]!r}", toks[2])
            key = (key, int(toks[2]))
        x, y = toks[-2:]
        for tok in (x, y):
            if tok not in parent_tok:
                raise rd.error(f"unknown node {tok!r}", tok)
        out.setdefault(key, set()).add((str(x), str(y)))
    return rd, name, sig, TreeOrder(nodes, parent), out, intervals


def parse_model(text: str, path=None) -> MergeModel | RankedMergeModel:
    """A merge-model, ranked when every node line carries an interval."""
    _, name, sig, order, tuples, intervals = _parse_tree_file(
        text, path, "mergemodel", "s", alpha=True)
    model = MergeModel(sig, order, tuples, name=name)
    return RankedMergeModel(model, intervals) if intervals else model


def parse_twin(text: str, path=None) -> TwinModel:
    rd, name, sig, order, tuples, intervals = _parse_tree_file(
        text, path, "twinmodel", "z", alpha=False)
    if intervals:
        raise rd.error("twin-models carry no intervals")
    if ORDER_SYMBOL in sig:
        where = next((tok for toks in rd.lines if toks[0] == "signature"
                      for tok in toks[1:] if tok == ORDER_SYMBOL), None)
        raise rd.error(f"symbol {ORDER_SYMBOL!r} is reserved for the tree order", where)
    return TwinModel(sig, order, tuples, name=name)


def _node_lines(order: TreeOrder, ranking=None):
    out = []
    for x in sorted(order.nodes):
        line = f"node {x} parent {order.parent.get(x, _NO_PARENT)}"
        if ranking is not None:
            lo, hi = ranking[x]
            line += f" interval {_fmt_rational(lo)} {_fmt_rational(hi)}"
        out.append(line)
    return out


def format_model(m: MergeModel | RankedMergeModel) -> str:
    ranking = None
    if isinstance(m, RankedMergeModel):
        m, ranking = m.model, m.ranking
    out = [f"mergemodel {m.name}", " ".join(["signature", *m.base_signature.symbols])]
    out += _node_lines(m.order, ranking)
    for z in m.base_signature:
        for alpha in (0, 1):
            for x, y in sorted(m.s_tuples[(z, alpha)]):
                out.append(f"s {z} {alpha} {x} {y}")
    return "\n".join(out) + "\n"


def format_twin(t: TwinModel) -> str:
    out = [f"twinmodel {t.name}", " ".join(["signature", *t.base_signature.symbols])]
    out += _node_lines(t.order)
    for r in t.base_signature:
        for x, y in sorted(t.z_tuples[r]):
            out.append(f"z {r} {x} {y}")
    return "\n".join(out) + "\n"


# -- clique expressions -----------------------------------------------------------

_ARGS = {"v": ("int", "name"), "u": ("expr", "expr"), "add": ("sym", "int", "int", "expr"),
         "sadd": ("sym", "int", "int", "expr"), "rel": ("int", "int", "expr")}


def parse_cliqueexpr(text: str, path=None) -> CliqueExpression:
    rd = _Reader(text, path)
    sig = None
    labels = 0
    body = []
    for toks in rd.lines:
        if not body and toks[0] == "signature":
            if sig is not None:
                raise rd.error("signature given twice", toks[0])
            sig = _symbols(rd, toks)
        elif not body and toks[0] == "labels":
            rd.need(toks, 2)
            labels = _int(rd, toks[1], "label count")
            if labels < 1:
                raise rd.error("label count must be positive", toks[1])
        else:
            body.extend(toks)
    if not body:
        raise rd.error("missing expression")
    term, rest = _sexpr(rd, body, sig)
    if rest < len(body):
        raise rd.error(f"trailing token {body[rest]!r}", body[rest])
    if sig is None:
        sig = Signature(tuple(sorted(symbols_used(term))))
    if labels and max(labels_used(term)) > labels:
        raise rd.error(f"expression uses labels above the declared {labels}")
    try:
        return CliqueExpression(term, sig, label_count=labels)
    except InvalidInput as exc:
        raise rd.error(str(exc)) from None


def _sexpr(rd, toks, sig):
    """Parse one expression starting at toks[0]; iterative to allow deep terms."""
    # frames: [head token, kind, collected args]
    stack = []
    pos = 0
    while True:
        if pos >= len(toks):
            raise rd.error("unexpected end of expression")
        tok = toks[pos]
        if tok != "(":
            raise rd.error(f"expected '(', found {tok!r}", tok)
        if pos + 1 >= len(toks):
            raise rd.error("unexpected end of expression")
        head = toks[pos + 1]
        if head not in _ARGS:
            raise rd.error(f"unknown operation {head!r}", head)
        frame = [head, list(_ARGS[head]), []]
        pos += 2
        while True:
            arity = frame[1]
            if not arity:
                if pos >= len(toks):
                    raise rd.error(f"missing ')' for {frame[0]!r}")
                if toks[pos] != ")":
                    raise rd.error(f"too many arguments for {frame[0]!r}", toks[pos])
                pos += 1
                node = _build(rd, frame, sig)
                if not stack:
                    return node, pos
                frame = stack.pop()
                frame[2].append(node)
                continue
            kind = arity.pop(0)
            if pos >= len(toks):
                raise rd.error(f"missing arguments for {frame[0]!r}")
            tok = toks[pos]
            if kind == "expr":
                stack.append(frame)
                break
            if tok in ("(", ")", "{", "}"):
                raise rd.error(f"expected an atom, found {tok!r}", tok)
            frame[2].append(_int(rd, tok, "label") if kind == "int" else tok)
            pos += 1


def _build(rd, frame, sig):
    head, _, args = frame
    if head == "v":
        return Create(args[0], str(args[1]))
    if head == "u":
        return Union(args[0], args[1])
    if head == "rel":
        return Relabel(args[0], args[1], args[2])
    if sig is not None and args[0] not in sig:
        raise rd.error(f"undeclared symbol {args[0]!r}", args[0])
    cls = Add if head == "add" else AddSym
    return cls(str(args[0]), args[1], args[2], args[3])


def format_cliqueexpr(e: CliqueExpression) -> str:
    out = [" ".join(["signature", *e.signature.symbols]), f"labels {e.label_count}"]
    out.append(_term_text(e.term))
    return "\n".join(out) + "\n"


def _term_text(term) -> str:
    # post-order without recursion
    done = {}
    stack = [(term, False)]
    while stack:
        node, ready = stack.pop()
        if isinstance(node, Create):
            done[id(node)] = f"(v {node.label} {node.name})"
            continue
        kids = [node.left, node.right] if isinstance(node, Union) else [node.child]
        if not ready:
            stack.append((node, True))
            stack.extend((k, False) for k in reversed(kids))
            continue
        inner = [done[id(k)] for k in kids]
        if isinstance(node, Union):
            done[id(node)] = f"(u {inner[0]} {inner[1]})"
        elif isinstance(node, Relabel):
            done[id(node)] = f"(rel {node.i} {node.j} {inner[0]})"
        else:
            op = "add" if isinstance(node, Add) else "sadd"
            done[id(node)] = f"({op} {node.symbol} {node.i} {node.j} {inner[0]})"
    return done[id(term)]


# -- dispatch by header -------------------------------------------------------------

_HEADERS = {"structure": "bst", "p": "gr", "c": "gr", "mergeseq": "mseq",
            "mergemodel": "mmod", "twinmodel": "tmod", "signature": "cwe",
            "labels": "cwe", "(": "cwe"}


def detect_kind(text: str, path=None) -> str:
    for toks in _lines(text):
        kind = _HEADERS.get(toks[0])
        if kind is None:
            raise ParseError(f"cannot infer the file kind from {toks[0]!r}",
                             toks[0].line, toks[0].column, path)
        return kind
    raise ParseError("empty input", 1, 1, path)


_PARSERS = {"bst": parse_structure, "mseq": parse_sequence, "mmod": parse_model,
            "tmod": parse_twin, "cwe": parse_cliqueexpr}


def parse_text(text: str, kind: str | None = None, path=None, name=None):
    kind = kind or detect_kind(text, path)
    if kind == "gr":
        return parse_graph(text, path, name=name or "G")
    try:
        return _PARSERS[kind](text, path)
    except ParseError:
        raise
    except MergeWidthError as exc:
        # semantic problems found while building the object still point at the file
        raise ParseError(str(exc), path=path) from exc


def load(path, kind: str | None = None):
    """Read ``path`` and return ``(kind, object)``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    kind = kind or detect_kind(text, path)
    return kind, parse_text(text, kind, path, name=path.stem)


def format_any(obj) -> str:
    if isinstance(obj, BinaryStructure):
        return format_structure(obj)
    if isinstance(obj, MergeSequence):
        return format_sequence(obj)
    if isinstance(obj, (MergeModel, RankedMergeModel)):
        return format_model(obj)
    if isinstance(obj, TwinModel):
        return format_twin(obj)
    if isinstance(obj, CliqueExpression):
        return format_cliqueexpr(obj)
    raise InvalidInput(f"no file format for {type(obj).__name__}")


def dump(obj, path) -> None:
    Path(path).write_text(format_any(obj), encoding="utf-8")
