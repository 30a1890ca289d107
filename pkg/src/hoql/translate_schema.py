"""Stage-sequence schemas to SO.

A run of stages is encoded by SO relations over the input domain:

    C    (d+t)-tuples used as stage elements
    E_k  the k-th stage relation, over elements of C
    ST   d-tuples naming the stages, EST the successor edges between them
    R    R(x̄, ū): element ū belongs to stage x̄
    SB   SB(x̄, ū, w̄): an injection of the elements of stage x̄ into t-tuples,
         which keeps every stage within n^t elements

Stage bodies are relativized: a cur element variable becomes a (d+t)-tuple
ū guarded by C(ū) ∧ R(x̄, ū), and CUR.k atoms become E_k atoms (next
likewise with ȳ).
"""
from __future__ import annotations

from typing import Optional

from .logic import (
    And, Atom, Eq, Formula, HO4Atom, Implies, Not, Or, QuantFO, QuantHO4P,
    QuantSO, QuantTOP, Schema, SOAtom, TOAtom, TRUE, conj, exists1, forall1,
    implies, neg, stage_symbol, tuple_eq, walk,
)
from .naming import Namer
from .prenex import FragmentError

MUTATIONS = (
    "schema-drop-stage-guard",
    "schema-drop-left-total",
    "schema-drop-stage-bound",
    "schema-swap-first-last",
    "schema-reverse-pred",
)


class _Names:
    def __init__(self, namer, sig):
        self.C = namer.fresh("_C")
        self.E = [namer.fresh(f"_E{k}") for k in range(1, len(sig) + 1)]
        self.ST = namer.fresh("_ST")
        self.EST = namer.fresh("_EST")
        self.R = namer.fresh("_R")
        self.SB = namer.fresh("_SB")


# ---------------------------------------------------------------------------
# order helpers over d-tuples


def _no_pred(nm, N, d, x):
    z = nm.fo("z", d)
    return neg(exists1(z, SOAtom(N.EST, z + x)))


def _no_succ(nm, N, d, x):
    z = nm.fo("z", d)
    return neg(exists1(z, SOAtom(N.EST, x + z)))


def _first(nm, N, d, x):
    return conj(SOAtom(N.ST, x), _no_pred(nm, N, d, x))


def _last(nm, N, d, x):
    return conj(SOAtom(N.ST, x), _no_succ(nm, N, d, x))


def _pred(N, x, y):
    return SOAtom(N.EST, x + y)


def _unique(nm, d, is_end):
    x, x2 = nm.fo("x", d), nm.fo("x", d)
    return exists1(x, conj(is_end(x), forall1(x2, implies(is_end(x2), tuple_eq(x2, x)))))


def _linear(nm, N, d):
    x, y, y2, x2 = nm.fo("x", d), nm.fo("y", d), nm.fo("y", d), nm.fo("x", d)
    covered = forall1(x + y, implies(SOAtom(N.EST, x + y), conj(SOAtom(N.ST, x), SOAtom(N.ST, y))))
    irreflexive = forall1(x, neg(SOAtom(N.EST, x + x)))
    functional = forall1(x + y + y2, implies(conj(SOAtom(N.EST, x + y), SOAtom(N.EST, x + y2)), tuple_eq(y, y2)))
    injective = forall1(x + x2 + y, implies(conj(SOAtom(N.EST, x + y), SOAtom(N.EST, x2 + y)), tuple_eq(x, x2)))
    source = _unique(nm, d, lambda v: _first(nm, N, d, v))
    sink = _unique(nm, d, lambda v: _last(nm, N, d, v))
    return conj(covered, irreflexive, functional, injective, source, sink)


def _subset(nm, N, d, t):
    x, u = nm.fo("x", d), nm.fo("u", d + t)
    return forall1(x + u, implies(SOAtom(N.R, x + u), conj(SOAtom(N.ST, x), SOAtom(N.C, u))))


def _left_total(nm, N, d, t):
    x, u = nm.fo("x", d), nm.fo("u", d + t)
    return forall1(x, implies(SOAtom(N.ST, x), exists1(u, SOAtom(N.R, x + u))))


def _stage_bound(nm, N, d, t):
    x, u, u2, w = nm.fo("x", d), nm.fo("u", d + t), nm.fo("u", d + t), nm.fo("w", t)
    member = lambda v: conj(SOAtom(N.C, v), SOAtom(N.R, x + v))  # noqa: E731
    total = forall1(x + u, implies(conj(SOAtom(N.ST, x), member(u)), exists1(w, SOAtom(N.SB, x + u + w))))
    injective = forall1(x + u + u2 + w, implies(
        conj(member(u), member(u2), SOAtom(N.SB, x + u + w), SOAtom(N.SB, x + u2 + w)), tuple_eq(u, u2)))
    return conj(total, injective)


def build_order_helpers(d: int, t: int = 1) -> dict:
    """The order and membership shorthands over the default relation names.

    First/Last have free element variables _x1.._xd; Pred also _y1.._yd.
    """
    if d < 1 or t < 1:
        raise ValueError("d and t must be >= 1")
    N = _Names(Namer(), ())
    nm = Namer()
    x = tuple(f"_x{i}" for i in range(1, d + 1))
    y = tuple(f"_y{i}" for i in range(1, d + 1))
    nm.used.update(x + y)
    nm.counter.update({"_x": d, "_y": d})
    return {
        "Linear": _linear(nm, N, d),
        "First": _first(nm, N, d, x),
        "Last": _last(nm, N, d, x),
        "Pred": _pred(N, x, y),
        "LeftTotal": _left_total(nm, N, d, t),
        "Subset": _subset(nm, N, d, t),
    }


# ---------------------------------------------------------------------------
# relativization of stage bodies


class _Rel:
    def __init__(self, nm, N, node, x, y, mutation):
        self.nm, self.N, self.node = nm, N, node
        self.w = node.d + node.t
        self.stage = {"cur": x, "next": y}
        self.mutation = mutation

    def guard(self, sort, u):
        if self.mutation == "schema-drop-stage-guard":
            return SOAtom(self.N.C, u)
        return conj(SOAtom(self.N.C, u), SOAtom(self.N.R, self.stage[sort] + u))

    def expand(self, env, a):
        return env.get(a, (a,))

    def go(self, f, env) -> Formula:
        if isinstance(f, Atom):
            st = stage_symbol(f.symbol)
            if st is None:
                return f
            kind, k = st
            args = tuple(v for a in f.args for v in self.expand(env, a))
            guards = []
            if self.mutation != "schema-drop-stage-guard":
                guards = [SOAtom(self.N.R, self.stage[kind] + self.expand(env, a)) for a in f.args]
            return conj(SOAtom(self.N.E[k - 1], args), *guards)
        if isinstance(f, Eq):
            return tuple_eq(self.expand(env, f.left), self.expand(env, f.right))
        if isinstance(f, SOAtom):
            return SOAtom(f.var, tuple(v for a in f.args for v in self.expand(env, a)))
        if isinstance(f, Not):
            return Not(self.go(f.body, env))
        if isinstance(f, And):
            return And(tuple(self.go(p, env) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(self.go(p, env) for p in f.parts))
        if isinstance(f, Implies):
            return Implies(self.go(f.left, env), self.go(f.right, env))
        if isinstance(f, QuantFO):
            if f.sort == "in":
                inner = {k: v for k, v in env.items() if k != f.var}
                return QuantFO(f.quant, f.var, self.go(f.body, inner))
            u = self.nm.fo("c", self.w)
            body = self.go(f.body, {**env, f.var: u})
            if f.quant == "exists":
                return exists1(u, conj(self.guard(f.sort, u), body))
            return forall1(u, implies(self.guard(f.sort, u), body))
        if isinstance(f, QuantSO):
            ar = sum(1 if s == "in" else self.w for s in f.sorts)
            return QuantSO(f.quant, f.var, ("in",) * ar, self.go(f.body, env))
        if isinstance(f, (TOAtom, HO4Atom, QuantTOP, QuantHO4P, Schema)):
            raise FragmentError(f"{type(f).__name__} inside a schema body")
        raise TypeError(f"unknown node {type(f).__name__}")


def _check_placeholders(node: Schema):
    for part in (node.first, node.last, node.step):
        for g in walk(part):
            if isinstance(g, Atom):
                st = stage_symbol(g.symbol)
                if st is None:
                    continue
                k = st[1]
                if not 1 <= k <= len(node.sig):
                    raise ValueError(f"{g.symbol} is outside the signature")
                if len(g.args) != node.sig[k - 1]:
                    raise ValueError(f"{g.symbol} used with {len(g.args)} arguments, declared {node.sig[k - 1]}")


def _translate_node(node: Schema, namer: Namer, mutation: Optional[str]) -> Formula:
    _check_placeholders(node)
    d, t = node.d, node.t
    N = _Names(namer, node.sig)
    nm = namer
    x, y = nm.fo("x", d), nm.fo("y", d)
    rel = _Rel(nm, N, node, x, y, mutation)
    a_first = rel.go(node.first, {})
    a_last = rel.go(node.last, {})
    phi = rel.go(node.step, {})
    is_first, is_last = _first(nm, N, d, x), _last(nm, N, d, x)
    if mutation == "schema-swap-first-last":
        is_first, is_last = is_last, is_first
    pred = _pred(N, y, x) if mutation == "schema-reverse-pred" else _pred(N, x, y)
    main = forall1(x + y, conj(
        implies(is_first, a_first),
        implies(is_last, a_last),
        implies(conj(SOAtom(N.ST, x), SOAtom(N.ST, y), pred), phi),
    ))
    body = conj(
        _linear(nm, N, d),
        _subset(nm, N, d, t),
        TRUE if mutation == "schema-drop-left-total" else _left_total(nm, N, d, t),
        TRUE if mutation == "schema-drop-stage-bound" else _stage_bound(nm, N, d, t),
        main,
    )
    w = d + t
    tables = [(N.C, w)] + [(e, a * w) for e, a in zip(N.E, node.sig)]
    tables += [(N.ST, d), (N.EST, 2 * d), (N.R, d + w), (N.SB, d + w + t)]
    for name, ar in reversed(tables):
        body = QuantSO("exists", name, ("in",) * ar, body)
    return body


def schema_tables(node: Schema) -> list:
    """(name, arity) of the leading existential block, in emission order."""
    f = translate_schema(node)
    out = []
    while isinstance(f, QuantSO) and f.quant == "exists":
        out.append((f.var, f.arity))
        f = f.body
    return out[: len(node.sig) + 6]


def translate_schema(f: Formula, mutation: Optional[str] = None) -> Formula:
    """Translate a schema node, or every schema node inside a formula."""
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation}")
    if not any(isinstance(g, Schema) for g in walk(f)):
        raise FragmentError("no schema node to translate")
    namer = Namer.for_formula(f)

    def go(g):
        if isinstance(g, Schema):
            return _translate_node(g, namer, mutation)
        if isinstance(g, (TOAtom, HO4Atom, QuantTOP, QuantHO4P)):
            raise FragmentError(f"{type(g).__name__} outside the schema fragment")
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, And):
            return And(tuple(go(p) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(go(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, QuantFO):
            return QuantFO(g.quant, g.var, go(g.body), g.sort)
        if isinstance(g, QuantSO):
            return QuantSO(g.quant, g.var, g.sorts, go(g.body))
        return g

    return go(f)
