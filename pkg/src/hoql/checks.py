"""Well-formedness checking for formulae of every supported fragment."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .logic import (
    And, Atom, Eq, Formula, HO4Atom, Implies, Not, Or, QuantFO, QuantHO4P,
    QuantSO, QuantTOP, RelationType, Schema, SOAtom, Span, TOAtom, SORTS,
    stage_symbol,
)


@dataclass(frozen=True)
class TypingReport:
    ok: bool
    message: str = ""
    span: Optional[Span] = None

    def __bool__(self):
        return self.ok


class _Violation(Exception):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.message = message
        self.node = node


# scope entries: ("fo", sort) | ("so", sorts) | ("to", rtype) | ("ho4", rtype)
_KIND_NAME = {"fo": "FO", "so": "SO", "to": "TO", "ho4": "HO4"}


def check_well_formed(formula: Formula, vocabulary: Mapping[str, int],
                      free: Optional[Mapping[str, object]] = None) -> TypingReport:
    """Check arities, widths, binding and sort discipline.

    `free` optionally declares free variables: value 1 (or a sort name) for
    an element variable, a RelationType for relation variables.
    """
    scope = {}
    for name, spec in (free or {}).items():
        scope[name] = _entry(spec)
    try:
        _check(formula, dict(vocabulary), scope, None)
    except _Violation as v:
        span = getattr(v.node, "span", None)
        return TypingReport(False, v.message, span)
    return TypingReport(True)


def _entry(spec):
    if spec == 1:
        return ("fo", "in")
    if isinstance(spec, str):
        return ("fo", spec)
    if isinstance(spec, RelationType):
        if spec.order == 2:
            return ("so", ("in",) * spec.arity)
        return ("to" if spec.order == 3 else "ho4", spec)
    if isinstance(spec, tuple):
        return ("so", spec)
    raise TypeError(f"cannot declare free variable with {spec!r}")


def _lookup(scope, name, kind, node):
    ent = scope.get(name)
    if ent is None:
        raise _Violation(f"unbound {_KIND_NAME[kind]} variable {name}", node)
    if ent[0] != kind:
        raise _Violation(f"{name} is a {_KIND_NAME[ent[0]]} variable, expected {_KIND_NAME[kind]}", node)
    return ent[1]


def _allowed_sorts(mode):
    if mode is None:
        return ("in",)
    if mode == "step":
        return SORTS
    return ("in", "cur")


def _check(f, vocab, scope, mode):
    if isinstance(f, Atom):
        st = stage_symbol(f.symbol)
        if st is not None and mode is not None:
            sort, k = st
            sig = vocab["__sig__"]
            if sort not in _allowed_sorts(mode):
                raise _Violation(f"{f.symbol} not available here", f)
            if not 1 <= k <= len(sig):
                raise _Violation(f"no stage relation {f.symbol}", f)
            want = (sort,) * sig[k - 1]
        else:
            if f.symbol not in vocab or f.symbol == "__sig__":
                raise _Violation(f"unknown relation symbol {f.symbol}", f)
            want = ("in",) * vocab[f.symbol]
        if len(f.args) != len(want):
            raise _Violation(f"arity mismatch for {f.symbol}: expected {len(want)}, got {len(f.args)}", f)
        for a, s in zip(f.args, want):
            got = _lookup(scope, a, "fo", f)
            if got != s:
                raise _Violation(f"sort mismatch: {a} has sort {got}, expected {s}", f)
    elif isinstance(f, Eq):
        s1 = _lookup(scope, f.left, "fo", f)
        s2 = _lookup(scope, f.right, "fo", f)
        if s1 != s2:
            raise _Violation(f"sort mismatch in equality {f.left} = {f.right}", f)
    elif isinstance(f, SOAtom):
        sorts = _lookup(scope, f.var, "so", f)
        if len(f.args) != len(sorts):
            raise _Violation(f"arity mismatch for {f.var}: expected {len(sorts)}, got {len(f.args)}", f)
        for a, s in zip(f.args, sorts):
            got = _lookup(scope, a, "fo", f)
            if got != s:
                raise _Violation(f"sort mismatch: {a} has sort {got}, expected {s}", f)
    elif isinstance(f, TOAtom):
        if mode is not None:
            raise _Violation("TO atoms are not allowed inside schema bodies", f)
        rt = _lookup(scope, f.var, "to", f)
        if len(f.args) != rt.width:
            raise _Violation(f"width mismatch for {f.var}: expected {rt.width}, got {len(f.args)}", f)
        for a, r in zip(f.args, rt.components):
            sorts = _lookup(scope, a, "so", f)
            if len(sorts) != r:
                raise _Violation(f"arity mismatch: {a} has arity {len(sorts)}, {f.var} expects {r}", f)
    elif isinstance(f, HO4Atom):
        if mode is not None:
            raise _Violation("HO4 atoms are not allowed inside schema bodies", f)
        rt = _lookup(scope, f.var, "ho4", f)
        if len(f.args) != rt.width:
            raise _Violation(f"width mismatch for {f.var}: expected {rt.width}, got {len(f.args)}", f)
        for a, tau in zip(f.args, rt.components):
            got = _lookup(scope, a, "to", f)
            if got != tau:
                raise _Violation(f"type mismatch: {a} has type {got}, {f.var} expects {tau}", f)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            _check(p, vocab, scope, mode)
    elif isinstance(f, Not):
        _check(f.body, vocab, scope, mode)
    elif isinstance(f, Implies):
        _check(f.left, vocab, scope, mode)
        _check(f.right, vocab, scope, mode)
    elif isinstance(f, QuantFO):
        _quant(f)
        if f.sort not in _allowed_sorts(mode):
            raise _Violation(f"sort {f.sort} not available here", f)
        _check(f.body, vocab, {**scope, f.var: ("fo", f.sort)}, mode)
    elif isinstance(f, QuantSO):
        _quant(f)
        if not f.sorts:
            raise _Violation("SO variable needs arity >= 1", f)
        for s in f.sorts:
            if s not in _allowed_sorts(mode):
                raise _Violation(f"sort {s} not available here", f)
        _check(f.body, vocab, {**scope, f.var: ("so", tuple(f.sorts))}, mode)
    elif isinstance(f, QuantTOP):
        _quant(f)
        if mode is not None:
            raise _Violation("TO quantifiers are not allowed inside schema bodies", f)
        if f.rtype.order != 3:
            raise _Violation("bounded TO quantifier needs an order-3 type", f)
        _degree(f)
        _check(f.body, vocab, {**scope, f.var: ("to", f.rtype)}, mode)
    elif isinstance(f, QuantHO4P):
        _quant(f)
        if mode is not None:
            raise _Violation("HO4 quantifiers are not allowed inside schema bodies", f)
        if f.rtype.order != 4:
            raise _Violation("bounded HO4 quantifier needs an order-4 type", f)
        if not f.rtype.is_uniform():
            raise _Violation(f"mixed widths in HO4 type {f.rtype}", f)
        arities = {r for c in f.rtype.components for r in c.components}
        if len(arities) != 1:
            raise _Violation(f"mixed SO arities in HO4 type {f.rtype}", f)
        _degree(f)
        _check(f.body, vocab, {**scope, f.var: ("ho4", f.rtype)}, mode)
    elif isinstance(f, Schema):
        if mode is not None:
            raise _Violation("nested schema", f)
        if not f.sig or any(not isinstance(a, int) or a < 1 for a in f.sig):
            raise _Violation("schema signature needs positive arities", f)
        if f.d < 1 or f.t < 1:
            raise _Violation("schema degree and stage width must be >= 1", f)
        inner = {**vocab, "__sig__": tuple(f.sig)}
        # schema bodies are closed apart from stage relations
        _check(f.first, inner, {}, "first")
        _check(f.last, inner, {}, "last")
        _check(f.step, inner, {}, "step")
    else:
        raise _Violation(f"unknown node {type(f).__name__}", f)


def _quant(f):
    if f.quant not in ("exists", "forall"):
        raise _Violation(f"bad quantifier {f.quant}", f)


def _degree(f):
    if not isinstance(f.degree, int) or f.degree < 1:
        raise _Violation("degree must be >= 1", f)


def require_well_formed(formula, vocabulary, free=None):
    rep = check_well_formed(formula, vocabulary, free)
    if not rep.ok:
        raise TypeError(rep.message)
    return formula
