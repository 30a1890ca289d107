"""HO^{4,P} to SO translation over the normalized encoding.

A fourth-order variable Q of uniform width s is represented by a small
relational database with d-tuple identifiers:

    X4_{ω3}(x3t, x̄3)   tuples of Q with empty pattern ω3, naming their TO components
    REL3(x3, x2t)       the SO tuples of each TO relation
    T2_{ω2}(x2t, x̄2)    SO tuples with empty pattern ω2, naming their SO components
    REL2(x2, ē)         the element tuples of each SO relation

Third-order variables use the two-table form X3_{ω2}(y, ȳ), REL2(y2, ē).
All SO components must share one arity r.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .logic import (
    And, Atom, Eq, Formula, HO4Atom, Implies, Not, Or, QuantFO, QuantHO4P,
    QuantSO, QuantTOP, Schema, SOAtom, TOAtom, TRUE, conj, disj, enumerate_patterns,
    exists1, forall1, implies, neg, tuple_eq, walk,
)
from .naming import Namer, rel2_table, rel3_table, t2_table, x3_table, x4_table
from .prenex import FragmentError

MUTATIONS = (
    "ho4-drop-key-uniqueness",
    "ho4-drop-pattern-uniqueness",
    "ho4-drop-converse",
    "ho4-swap-guards",
    "ho4-drop-to-key-uniqueness",
)


def _chunks(xs, d):
    return [tuple(xs[i:i + d]) for i in range(0, len(xs), d)]


def _so_arity(rt) -> int:
    comps = rt.components if rt.order == 3 else [r for c in rt.components for r in c.components]
    if len(set(comps)) != 1:
        raise FragmentError(f"normalized encodings need one SO arity throughout, got type {rt}")
    return comps[0]


@dataclass
class ToBinding:
    base: str
    rtype: object
    degree: int
    x3: dict   # EmptyPattern -> (name, arity)
    rel2: tuple

    @property
    def r(self):
        return _so_arity(self.rtype)


@dataclass
class Ho4Binding:
    base: str
    rtype: object
    degree: int
    x4: dict
    rel3: tuple
    t2: dict
    rel2: tuple

    @property
    def s(self):
        return self.rtype.width

    @property
    def r(self):
        return _so_arity(self.rtype)


def bind_to(base, rtype, d) -> ToBinding:
    r = _so_arity(rtype)
    x3 = {om: (x3_table(base, om), d + d * len(om.complement)) for om in enumerate_patterns(rtype.width)}
    return ToBinding(base, rtype, d, x3, (rel2_table(base), d + r))


def bind_ho4(base, rtype, d) -> Ho4Binding:
    if not rtype.is_uniform():
        raise FragmentError(f"HO4 type {rtype} is not of uniform width")
    r = _so_arity(rtype)
    pats = enumerate_patterns(rtype.width)
    return Ho4Binding(
        base, rtype, d,
        {om: (x4_table(base, om), d + d * len(om.complement)) for om in pats},
        (rel3_table(base), 2 * d),
        {om: (t2_table(base, om), d + d * len(om.complement)) for om in pats},
        (rel2_table(base), d + r),
    )


@dataclass
class Ho4Context:
    namer: Namer
    mutation: Optional[str] = None
    scope: dict = field(default_factory=dict)

    def extended(self, var, binding):
        return Ho4Context(self.namer, self.mutation, {**self.scope, var: binding})

    def without(self, var):
        return Ho4Context(self.namer, self.mutation, {k: v for k, v in self.scope.items() if k != var})

    @classmethod
    def for_variables(cls, variables, mutation=None, used=()):
        """variables: {name: (rtype, degree)} with order-3 or order-4 types."""
        nm = Namer(set(used) | set(variables))
        ctx = cls(nm, mutation)
        for v, (rt, d) in variables.items():
            base = nm.fresh("_" + v)
            ctx = ctx.extended(v, bind_ho4(base, rt, d) if rt.order == 4 else bind_to(base, rt, d))
        return ctx


# ---------------------------------------------------------------------------
# shared pieces


def _same_so(nm, rel_a, a, rel_b, b, r):
    """The SO relation with id a in rel_a equals the one with id b in rel_b."""
    e = nm.fo("e", r)
    return conj(forall1(e, implies(SOAtom(rel_a, a + e), SOAtom(rel_b, b + e))),
                forall1(e, implies(SOAtom(rel_b, b + e), SOAtom(rel_a, a + e))))


def _equals_var(nm, rel, a, X, r):
    e = nm.fo("e", r)
    return conj(forall1(e, implies(SOAtom(rel, a + e), SOAtom(X, e))),
                forall1(e, implies(SOAtom(X, e), SOAtom(rel, a + e))))


def _so_empty(nm, X, r):
    e = nm.fo("e", r)
    return neg(exists1(e, SOAtom(X, e)))


def _to_empty(nm, b: ToBinding):
    parts = []
    for name, ar in b.x3.values():
        v = nm.fo("y", ar)
        parts.append(neg(exists1(v, SOAtom(name, v))))
    return conj(*parts)


def _pattern_unique(nm, d, tables):
    """An identifier has rows in at most one of the pattern tables."""
    z = nm.fo("z", d)
    items = list(tables.items())
    clauses = []
    for om, (t, ar) in items:
        f = nm.fo("f", ar - d)
        others = []
        for om2, (t2, ar2) in items:
            if om2 != om:
                f2 = nm.fo("f", ar2 - d)
                others.append(forall1(f2, neg(SOAtom(t2, z + f2))))
        clauses.append(forall1(f, implies(SOAtom(t, z + f), conj(*others))))
    return forall1(z, conj(*clauses))


def _key_unique(nm, d, tables):
    parts = []
    for om, (t, ar) in tables.items():
        if ar == d:
            continue
        z, f, f2 = nm.fo("z", d), nm.fo("f", ar - d), nm.fo("f", ar - d)
        parts.append(forall1(z + f + f2, implies(conj(SOAtom(t, z + f), SOAtom(t, z + f2)), tuple_eq(f, f2))))
    return conj(*parts)


def _children_exist(nm, d, tables, child, child_ar):
    """Every id named in a row of `tables` has a row in `child`."""
    parts = []
    for om, (t, ar) in tables.items():
        if ar == d:
            continue
        z, f = nm.fo("z", d), nm.fo("f", ar - d)
        kids = _chunks(f, d)
        need = []
        for k in kids:
            w = nm.fo("w", child_ar - d)
            need.append(exists1(w, SOAtom(child, k + w)))
        parts.append(forall1(z + f, implies(SOAtom(t, z + f), conj(*need))))
    return conj(*parts)


def _referenced(nm, d, child, child_ar, tables):
    """Every id keying a row of `child` is named in some row of `tables`."""
    a, w = nm.fo("a", d), nm.fo("w", child_ar - d)
    options = []
    for om, (t, ar) in tables.items():
        if ar == d:
            continue
        z, f = nm.fo("z", d), nm.fo("f", ar - d)
        options.append(exists1(z + f, conj(SOAtom(t, z + f), disj(*(tuple_eq(a, k) for k in _chunks(f, d))))))
    return forall1(a + w, implies(SOAtom(child, a + w), disj(*options)))


# ---------------------------------------------------------------------------
# third-order variables (two-table form)


def to_constraints(nm, b: ToBinding, mutation=None) -> Formula:
    rel2, rel2_ar = b.rel2
    key = TRUE if mutation == "ho4-drop-to-key-uniqueness" else _key_unique(nm, b.degree, b.x3)
    return conj(
        _pattern_unique(nm, b.degree, b.x3),
        key,
        _children_exist(nm, b.degree, b.x3, rel2, rel2_ar),
        _referenced(nm, b.degree, rel2, rel2_ar, b.x3),
    )


def to_tables(b: ToBinding) -> list:
    return list(b.x3.values()) + [b.rel2]


def translate_to_atom(atom: TOAtom, ctx: Ho4Context) -> Formula:
    b = ctx.scope.get(atom.var)
    if not isinstance(b, ToBinding):
        raise KeyError(f"TO variable {atom.var} not in context")
    if len(atom.args) != b.rtype.width:
        raise ValueError(f"width mismatch for {atom.var}")
    nm, d, r = ctx.namer, b.degree, b.r
    rel2 = b.rel2[0]
    out = []
    for om, (t, ar) in b.x3.items():
        guards = [_so_empty(nm, atom.args[i - 1], r) for i in om.omega]
        guards += [neg(_so_empty(nm, atom.args[j - 1], r)) for j in om.complement]
        y, ys = nm.fo("y", d), nm.fo("y", ar - d)
        same = [_equals_var(nm, rel2, k, atom.args[j - 1], r) for j, k in zip(om.complement, _chunks(ys, d))]
        out.append(conj(*guards, exists1(y + ys, conj(SOAtom(t, y + ys), *same))))
    return disj(*out)


# ---------------------------------------------------------------------------
# fourth-order variables


def integrity_axioms(nm, b: Ho4Binding, mutation=None) -> list:
    """The eight referential-integrity groups, in order."""
    d = b.degree
    rel3, rel3_ar = b.rel3
    rel2, rel2_ar = b.rel2
    g1 = TRUE if mutation == "ho4-drop-key-uniqueness" else _key_unique(nm, d, b.x4)
    g2 = _children_exist(nm, d, b.x4, rel3, rel3_ar)
    g3 = _referenced(nm, d, rel3, rel3_ar, b.x4)
    a, w = nm.fo("a", d), nm.fo("w", d)
    options = []
    for om, (t, ar) in b.t2.items():
        g = nm.fo("g", ar - d)
        options.append(exists1(g, SOAtom(t, w + g)))
    g4 = forall1(a + w, implies(SOAtom(rel3, a + w), disj(*options)))
    g5 = _children_exist(nm, d, b.t2, rel2, rel2_ar)
    g6 = _referenced(nm, d, rel2, rel2_ar, b.t2)
    g7 = _key_unique(nm, d, b.t2)
    parts = []
    for om, (t, ar) in b.t2.items():
        z, f, a2 = nm.fo("z", d), nm.fo("f", ar - d), nm.fo("a", d)
        parts.append(forall1(z + f, implies(SOAtom(t, z + f), exists1(a2, SOAtom(rel3, a2 + z)))))
    g8 = conj(*parts)
    return [g1, g2, g3, g4, g5, g6, g7, g8]


def ho4_constraints(nm, b: Ho4Binding, mutation=None) -> Formula:
    """Integrity (eight groups) and pattern uniqueness at both levels."""
    u3 = TRUE if mutation == "ho4-drop-pattern-uniqueness" else _pattern_unique(nm, b.degree, b.x4)
    u2 = _pattern_unique(nm, b.degree, b.t2)
    return And((And(tuple(integrity_axioms(nm, b, mutation))), u3, u2))


def ho4_tables(b: Ho4Binding) -> list:
    return list(b.x4.values()) + [b.rel3] + list(b.t2.values()) + [b.rel2]


def _same_to(ctx, Q: Ho4Binding, x3, Y: ToBinding) -> Formula:
    """TO relation x3 of Q equals the TO variable Y, level by level."""
    nm, d, r = ctx.namer, Q.degree, Q.r
    rel3 = Q.rel3[0]
    parts = []
    for om, (t2, t2_ar) in Q.t2.items():
        y_tab, y_ar = Y.x3[om]
        y, ys = nm.fo("y", Y.degree), nm.fo("y", y_ar - Y.degree)
        xt, xs = nm.fo("x", d), nm.fo("x", t2_ar - d)
        same = lambda: [_same_so(nm, Y.rel2[0], a, Q.rel2[0], c, r)  # noqa: E731
                        for a, c in zip(_chunks(ys, Y.degree), _chunks(xs, d))]
        part1 = forall1(y + ys, implies(SOAtom(y_tab, y + ys), exists1(
            xt + xs, conj(SOAtom(rel3, x3 + xt), SOAtom(t2, xt + xs), *same()))))
        part2 = forall1(xt + xs, implies(conj(SOAtom(rel3, x3 + xt), SOAtom(t2, xt + xs)), exists1(
            y + ys, conj(SOAtom(y_tab, y + ys), *same()))))
        if ctx.mutation == "ho4-drop-converse":
            part2 = TRUE
        parts.append(conj(part1, part2))
    return conj(*parts)


def translate_ho4_atom(atom: HO4Atom, ctx: Ho4Context) -> Formula:
    Q = ctx.scope.get(atom.var)
    if not isinstance(Q, Ho4Binding):
        raise KeyError(f"HO4 variable {atom.var} not in context")
    if len(atom.args) != Q.s:
        raise ValueError(f"width mismatch for {atom.var}")
    Ys = []
    for a in atom.args:
        Y = ctx.scope.get(a)
        if not isinstance(Y, ToBinding):
            raise KeyError(f"TO variable {a} not in context")
        Ys.append(Y)
    nm, d = ctx.namer, Q.degree
    rel3 = Q.rel3[0]
    out = []
    for om, (t, ar) in Q.x4.items():
        empty_pos, full_pos = om.omega, om.complement
        if ctx.mutation == "ho4-swap-guards":
            empty_pos, full_pos = full_pos, empty_pos
        guards = [_to_empty(nm, Ys[i - 1]) for i in empty_pos] + [neg(_to_empty(nm, Ys[j - 1])) for j in full_pos]
        z, xs = nm.fo("x", d), nm.fo("x", ar - d)
        kids = _chunks(xs, d)
        zt = [nm.fo("x", d) for _ in kids]
        body = conj(SOAtom(t, z + xs),
                    *(SOAtom(rel3, k + w) for k, w in zip(kids, zt)),
                    *(_same_to(ctx, Q, k, Ys[j - 1]) for k, j in zip(kids, om.complement)))
        out.append(conj(*guards, exists1(z + xs + tuple(v for w in zt for v in w), body)))
    return disj(*out)


def _quantify(tables, body):
    for name, ar in reversed(tables):
        body = QuantSO("exists", name, ("in",) * ar, body)
    return body


def translate_ho4_exists(node: QuantHO4P, ctx: Ho4Context, negate_body=False) -> Formula:
    b = bind_ho4(ctx.namer.fresh("_" + node.var), node.rtype, node.degree)
    body = _tr(node.body, ctx.extended(node.var, b))
    if negate_body:
        body = neg(body)
    return _quantify(ho4_tables(b), conj(ho4_constraints(ctx.namer, b, ctx.mutation), body))


def _to_exists(node: QuantTOP, ctx: Ho4Context, negate_body=False) -> Formula:
    b = bind_to(ctx.namer.fresh("_" + node.var), node.rtype, node.degree)
    body = _tr(node.body, ctx.extended(node.var, b))
    if negate_body:
        body = neg(body)
    return _quantify(to_tables(b), conj(to_constraints(ctx.namer, b, ctx.mutation), body))


def _tr(f, ctx) -> Formula:
    if isinstance(f, (Atom, Eq, SOAtom)):
        return f
    if isinstance(f, TOAtom):
        return translate_to_atom(f, ctx)
    if isinstance(f, HO4Atom):
        return translate_ho4_atom(f, ctx)
    if isinstance(f, Not):
        return Not(_tr(f.body, ctx))
    if isinstance(f, And):
        return And(tuple(_tr(p, ctx) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_tr(p, ctx) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_tr(f.left, ctx), _tr(f.right, ctx))
    if isinstance(f, QuantFO):
        return QuantFO(f.quant, f.var, _tr(f.body, ctx), f.sort)
    if isinstance(f, QuantSO):
        return QuantSO(f.quant, f.var, f.sorts, _tr(f.body, ctx.without(f.var)))
    if isinstance(f, QuantTOP):
        if f.quant == "exists":
            return _to_exists(f, ctx)
        return Not(_to_exists(f, ctx, negate_body=True))
    if isinstance(f, QuantHO4P):
        if f.quant == "exists":
            return translate_ho4_exists(f, ctx)
        return Not(translate_ho4_exists(f, ctx, negate_body=True))
    if isinstance(f, Schema):
        raise FragmentError("schema nodes are outside HO^{4,P}")
    raise TypeError(f"unknown node {type(f).__name__}")


def translate_ho4(formula: Formula, mutation: Optional[str] = None) -> Formula:
    """SO formula equivalent to an HO^{4,P} formula, up to identifier capacity.

    Identifiers at every level have width d, so a downward bounded Q whose
    TO components together use more than n^d distinct SO tuples (or SO
    relations) has no encoding; such witnesses are invisible to the
    translated formula.
    """
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation}")
    for g in walk(formula):
        if isinstance(g, Schema):
            raise FragmentError("schema nodes are outside HO^{4,P}")
    return _tr(formula, Ho4Context(Namer.for_formula(formula), mutation))


def encoding_constraints(rtype, d, base="_Q", mutation=None):
    """(formula, {table: arity}) for the constraints on one encoded variable;
    the table names are free SO variables of the formula."""
    nm = Namer({base})
    if rtype.order == 4:
        b = bind_ho4(base, rtype, d)
        return ho4_constraints(nm, b, mutation), dict(ho4_tables(b))
    b = bind_to(base, rtype, d)
    return to_constraints(nm, b, mutation), dict(to_tables(b))
