"""Reading and writing formulae (s-expressions) and finite structures."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .logic import (
    And, Atom, Eq, FiniteStructure, Formula, HO4Atom, Implies, Not, Or,
    QuantFO, QuantHO4P, QuantSO, QuantTOP, RelationType, Schema, SOAtom,
    SORTS, Span, StructureError, TOAtom,
)


class ParseError(ValueError):
    def __init__(self, message: str, span: Optional[Span] = None):
        loc = f" at bytes {span.start}-{span.end}" if span else ""
        super().__init__(message + loc)
        self.message = message
        self.span = span


# ---------------------------------------------------------------------------
# s-expressions


@dataclass
class _Tok:
    text: str
    span: Span


@dataclass
class _List:
    items: list
    span: Span


_TOKEN = re.compile(rb"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _read_sexpr(text: str):
    data = text.encode("utf-8")
    stack = [[]]
    opens = []
    pos = 0
    while pos < len(data):
        m = _TOKEN.match(data, pos)
        if m is None:  # pragma: no cover - the pattern matches every byte
            raise ParseError("unreadable input", Span(pos, pos + 1))
        tok = m.group()
        start, pos = m.start(), m.end()
        if tok[:1].isspace() or tok[:1] == b";":
            continue
        if tok == b"(":
            stack.append([])
            opens.append(start)
        elif tok == b")":
            if not opens:
                raise ParseError("unbalanced ')'", Span(start, pos))
            items = stack.pop()
            stack[-1].append(_List(items, Span(opens.pop(), pos)))
        else:
            try:
                s = tok.decode("utf-8")
            except UnicodeDecodeError:
                raise ParseError("invalid utf-8 in token", Span(start, pos)) from None
            stack[-1].append(_Tok(s, Span(start, pos)))
    if opens:
        raise ParseError("unbalanced '('", Span(opens[-1], opens[-1] + 1))
    top = stack[0]
    if len(top) != 1:
        if not top:
            raise ParseError("empty input", Span(0, len(data)))
        raise ParseError("trailing input after formula", top[1].span)
    return top[0]


# ---------------------------------------------------------------------------
# formulae

_KEYWORDS = {
    "and", "or", "not", "implies", "eq", "exists1", "forall1", "exists2", "forall2",
    "exists3p", "forall3p", "exists4p", "forall4p", "atom", "atom2", "atom3", "atom4",
    "schema",
}


def parse_formula(text: str) -> Formula:
    """Parse one formula; raises ParseError with a byte span on bad input."""
    return _formula(_read_sexpr(text))


def _formula(x) -> Formula:
    if isinstance(x, _Tok):
        raise ParseError(f"expected a formula, found token {x.text!r}", x.span)
    if not x.items or not isinstance(x.items[0], _Tok):
        raise ParseError("formula must start with an operator", x.span)
    head, args, sp = x.items[0].text, x.items[1:], x.span
    if head in ("and", "or"):
        parts = tuple(_formula(a) for a in args)
        return (And if head == "and" else Or)(parts, sp)
    if head == "not":
        _nargs(x, 1)
        return Not(_formula(args[0]), sp)
    if head == "implies":
        _nargs(x, 2)
        return Implies(_formula(args[0]), _formula(args[1]), sp)
    if head == "eq":
        _nargs(x, 2)
        return Eq(_name(args[0]), _name(args[1]), sp)
    if head in ("atom", "atom2", "atom3", "atom4"):
        if not args:
            raise ParseError(f"{head} needs a relation name", sp)
        name = _name(args[0])
        rest = tuple(_name(a) for a in args[1:])
        cls = {"atom": Atom, "atom2": SOAtom, "atom3": TOAtom, "atom4": HO4Atom}[head]
        return cls(name, rest, sp)
    if head in ("exists1", "forall1"):
        _nargs(x, 2)
        binders = args[0]
        if not isinstance(binders, _List) or not binders.items:
            raise ParseError("expected a nonempty variable list", binders.span)
        body = _formula(args[1])
        q = head[:-1]
        for b in reversed(binders.items):
            var, sort = _sorted_var(b)
            body = QuantFO(q, var, body, sort, sp)
        return body
    if head in ("exists2", "forall2"):
        _nargs(x, 2)
        b = _binder(args[0], 2)
        name, spec = _name(b[0]), b[1]
        if isinstance(spec, _Tok):
            sorts = ("in",) * _posint(spec)
        else:
            sorts = tuple(_sort(s) for s in spec.items)
            if not sorts:
                raise ParseError("SO variable needs arity >= 1", spec.span)
        return QuantSO(head[:-1], name, sorts, _formula(args[1]), sp)
    if head in ("exists3p", "forall3p"):
        _nargs(x, 2)
        b = _binder(args[0], 3)
        rt = _to_type(b[1])
        return QuantTOP(head[:-2], _name(b[0]), rt, _posint(b[2]), _formula(args[1]), sp)
    if head in ("exists4p", "forall4p"):
        _nargs(x, 2)
        b = _binder(args[0], 3)
        spec = b[1]
        if not isinstance(spec, _List) or not spec.items:
            raise ParseError("expected a list of TO types", spec.span)
        comps = tuple(_to_type(c) for c in spec.items)
        rt = RelationType(4, comps)
        return QuantHO4P(head[:-2], _name(b[0]), rt, _posint(b[2]), _formula(args[1]), sp)
    if head == "schema":
        return _schema(x)
    raise ParseError(f"unknown operator {head!r}", x.items[0].span)


def _nargs(x, k):
    if len(x.items) - 1 != k:
        raise ParseError(f"{x.items[0].text} takes {k} argument(s), got {len(x.items) - 1}", x.span)


def _binder(b, k):
    if not isinstance(b, _List) or len(b.items) != k:
        raise ParseError(f"malformed binder (expected {k} items)", b.span)
    return b.items


def _name(t) -> str:
    if not isinstance(t, _Tok):
        raise ParseError("expected a name", t.span)
    if t.text in _KEYWORDS or ":" in t.text:
        raise ParseError(f"invalid name {t.text!r}", t.span)
    return t.text


def _sorted_var(t):
    if not isinstance(t, _Tok):
        raise ParseError("expected a variable", t.span)
    name, _, sort = t.text.partition(":")
    if _ and sort not in SORTS:
        raise ParseError(f"unknown sort {sort!r}", t.span)
    if not name or name in _KEYWORDS:
        raise ParseError(f"invalid variable {t.text!r}", t.span)
    return name, (sort or "in")


def _sort(t) -> str:
    if not isinstance(t, _Tok) or t.text not in SORTS:
        raise ParseError("expected a sort (in, cur, next)", t.span)
    return t.text


def _posint(t) -> int:
    if not isinstance(t, _Tok) or not t.text.isdigit() or int(t.text) < 1:
        raise ParseError("expected a positive integer", t.span)
    return int(t.text)


def _natural(t) -> int:
    if not isinstance(t, _Tok) or not t.text.isdigit():
        raise ParseError("expected an integer", t.span)
    return int(t.text)


def _to_type(t) -> RelationType:
    if not isinstance(t, _List) or not t.items:
        raise ParseError("expected a TO type such as (1 2)", t.span)
    return RelationType.to(*(_posint(a) for a in t.items))


def _schema(x):
    fields = {}
    for item in x.items[1:]:
        if not isinstance(item, _List) or len(item.items) != 2 or not isinstance(item.items[0], _Tok):
            raise ParseError("malformed schema field", item.span)
        key = item.items[0].text
        if key in fields:
            raise ParseError(f"duplicate schema field {key}", item.span)
        fields[key] = item
    need = ("sig", "d", "t", "first", "last", "step")
    for k in need:
        if k not in fields:
            raise ParseError(f"schema lacks field {k}", x.span)
    extra = set(fields) - set(need)
    if extra:
        raise ParseError(f"unknown schema field {sorted(extra)[0]}", fields[sorted(extra)[0]].span)
    sig = fields["sig"].items[1]
    if not isinstance(sig, _List) or not sig.items:
        raise ParseError("sig expects a list of arities", sig.span)
    return Schema(
        tuple(_posint(a) for a in sig.items),
        _posint(fields["d"].items[1]),
        _posint(fields["t"].items[1]),
        _formula(fields["first"].items[1]),
        _formula(fields["last"].items[1]),
        _formula(fields["step"].items[1]),
        x.span,
    )


def print_formula(f: Formula, pretty: bool = False) -> str:
    """Canonical text; parse_formula(print_formula(f)) == f."""
    out: list = []
    _emit(f, out, 0 if pretty else None)
    return "".join(out)


def _type_text(rt: RelationType) -> str:
    if rt.order == 3:
        return "(" + " ".join(map(str, rt.components)) + ")"
    return "(" + " ".join(_type_text(c) for c in rt.components) + ")"


def _emit(f, out, indent):
    def sub(g):
        if indent is None:
            out.append(" ")
            _emit(g, out, None)
        else:
            out.append("\n" + "  " * (indent + 1))
            _emit(g, out, indent + 1)

    if isinstance(f, Atom):
        out.append("(atom " + " ".join((f.symbol,) + f.args) + ")")
    elif isinstance(f, SOAtom):
        out.append("(atom2 " + " ".join((f.var,) + f.args) + ")")
    elif isinstance(f, TOAtom):
        out.append("(atom3 " + " ".join((f.var,) + f.args) + ")")
    elif isinstance(f, HO4Atom):
        out.append("(atom4 " + " ".join((f.var,) + f.args) + ")")
    elif isinstance(f, Eq):
        out.append(f"(eq {f.left} {f.right})")
    elif isinstance(f, (And, Or, Not, Implies)):
        head = {And: "and", Or: "or", Not: "not", Implies: "implies"}[type(f)]
        kids = {And: lambda: f.parts, Or: lambda: f.parts,
                Not: lambda: (f.body,), Implies: lambda: (f.left, f.right)}[type(f)]()
        out.append("(" + head)
        if indent is not None and all(_is_leaf(k) for k in kids) and len(kids) <= 3:
            for k in kids:
                out.append(" ")
                _emit(k, out, None)
        else:
            for k in kids:
                sub(k)
        out.append(")")
    elif isinstance(f, QuantFO):
        names = []
        g = f
        while isinstance(g, QuantFO) and g.quant == f.quant and g.sort == f.sort:
            names.append(g.var if g.sort == "in" else f"{g.var}:{g.sort}")
            g = g.body
        out.append(f"({f.quant}1 (" + " ".join(names) + ")")
        sub(g)
        out.append(")")
    elif isinstance(f, QuantSO):
        if all(s == "in" for s in f.sorts):
            spec = str(len(f.sorts))
        else:
            spec = "(" + " ".join(f.sorts) + ")"
        out.append(f"({f.quant}2 ({f.var} {spec})")
        sub(f.body)
        out.append(")")
    elif isinstance(f, QuantTOP):
        out.append(f"({f.quant}3p ({f.var} {_type_text(f.rtype)} {f.degree})")
        sub(f.body)
        out.append(")")
    elif isinstance(f, QuantHO4P):
        out.append(f"({f.quant}4p ({f.var} {_type_text(f.rtype)} {f.degree})")
        sub(f.body)
        out.append(")")
    elif isinstance(f, Schema):
        out.append("(schema (sig (" + " ".join(map(str, f.sig)) + f")) (d {f.d}) (t {f.t})")
        for key, g in (("first", f.first), ("last", f.last), ("step", f.step)):
            if indent is None:
                out.append(f" ({key} ")
                _emit(g, out, None)
            else:
                out.append("\n" + "  " * (indent + 1) + f"({key}")
                out.append("\n" + "  " * (indent + 2))
                _emit(g, out, indent + 2)
            out.append(")")
        out.append(")")
    else:
        raise TypeError(f"cannot print {type(f).__name__}")


def _is_leaf(f):
    return isinstance(f, (Atom, SOAtom, TOAtom, HO4Atom, Eq))


# ---------------------------------------------------------------------------
# structures


def parse_structure(text: str) -> FiniteStructure:
    """Line format: `domain n`, then `relation NAME arity k` blocks of tuples."""
    n = None
    rels: dict = {}
    arities: dict = {}
    current = None
    offset = 0
    for lineno, raw in enumerate(text.splitlines(keepends=True), 1):
        start = offset
        offset += len(raw.encode("utf-8"))
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        span = Span(start, offset)
        words = line.split()
        if words[0] == "domain":
            if n is not None:
                raise ParseError(f"line {lineno}: duplicate domain line", span)
            if len(words) != 2 or not words[1].isdigit() or int(words[1]) < 1:
                raise ParseError(f"line {lineno}: expected `domain <n>` with n >= 1", span)
            n = int(words[1])
        elif words[0] == "relation":
            if n is None:
                raise ParseError(f"line {lineno}: relation before domain", span)
            if len(words) != 4 or words[2] != "arity" or not words[3].isdigit() or int(words[3]) < 1:
                raise ParseError(f"line {lineno}: expected `relation NAME arity k`", span)
            name = words[1]
            if name in rels:
                raise ParseError(f"line {lineno}: relation {name} declared twice", span)
            rels[name] = set()
            arities[name] = int(words[3])
            current = name
        else:
            if current is None:
                raise ParseError(f"line {lineno}: tuple outside a relation block", span)
            try:
                tup = tuple(int(w) for w in words)
            except ValueError:
                raise ParseError(f"line {lineno}: tuple entries must be integers", span) from None
            if len(tup) != arities[current]:
                raise ParseError(f"line {lineno}: {current} has arity {arities[current]}", span)
            if any(not 0 <= a < n for a in tup):
                raise ParseError(f"line {lineno}: element out of range 0..{n - 1}", span)
            rels[current].add(tup)
    if n is None:
        raise ParseError("missing domain line")
    try:
        return FiniteStructure.build(n, rels, arities)
    except StructureError as e:  # pragma: no cover - checked above
        raise ParseError(str(e)) from None


def print_structure(s: FiniteStructure) -> str:
    lines = [f"domain {s.n}"]
    for name in sorted(s.arities):
        lines.append(f"relation {name} arity {s.arities[name]}")
        for tup in sorted(s.relations.get(name, ())):
            lines.append(" ".join(map(str, tup)))
    return "\n".join(lines) + "\n"


def read_formula(path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read())


def read_structure(path) -> FiniteStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())
