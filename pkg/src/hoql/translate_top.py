"""TO^P to SO translation with the flat identifier encoding.

A TO variable C of type (r_1..r_s) and degree d becomes one SO relation per
empty pattern ω, of arity d + sum of r_j over the nonempty positions.  A row
(z̄, ȳ_1..) says tuple z̄ of C has the listed rows in its nonempty components.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .logic import (
    And, Atom, Eq, Formula, HO4Atom, Implies, Not, Or, QuantFO, QuantHO4P,
    QuantSO, QuantTOP, Schema, SOAtom, TOAtom, TRUE, children, conj, disj,
    enumerate_patterns, exists1, forall1, implies, neg, tuple_eq, walk,
)
from .naming import ArityReport, Namer, flat_table, ne_table
from .prenex import FragmentError

# Mutations deliberately break one ingredient; used by the harness to show
# that the equivalence checks are sensitive.
MUTATIONS = (
    "top-drop-disjointness",
    "top-drop-converse",
    "top-drop-rows-subset",
    "top-swap-guards",
    "top-drop-guards",
)

DEFAULT_MAX_NODES = 3_000_000


class TranslationTooLarge(RuntimeError):
    """The emitted formula would be too large to build in memory."""

    def __init__(self, estimate, report):
        super().__init__(f"translation would have about {estimate} nodes")
        self.estimate = estimate
        self.report = report


@dataclass
class TopBinding:
    base: str
    rtype: object
    degree: int
    tables: dict  # EmptyPattern -> (name, arity); empty when ne=True
    ne_name: Optional[str] = None


@dataclass
class TranslationContext:
    namer: Namer
    ne: bool = False
    mutation: Optional[str] = None
    scope: dict = field(default_factory=dict)

    def bind(self, var, rtype, degree) -> TopBinding:
        base = self.namer.fresh("_" + var)
        tables = {}
        ne_name = None
        if self.ne:
            ne_name = ne_table(base)
        else:
            for om in enumerate_patterns(rtype.width):
                ar = degree + sum(rtype.components[j - 1] for j in om.complement)
                tables[om] = (flat_table(base, om), ar)
        return TopBinding(base, rtype, degree, tables, ne_name)

    def extended(self, var, binding) -> "TranslationContext":
        return TranslationContext(self.namer, self.ne, self.mutation, {**self.scope, var: binding})

    @classmethod
    def for_variables(cls, variables, ne=False, mutation=None, used=()):
        """Context with TO variables {name: (rtype, degree)} in scope."""
        ctx = cls(Namer(set(used) | set(variables)), ne, mutation)
        for v, (rt, d) in variables.items():
            ctx = ctx.extended(v, ctx.bind(v, rt, d))
        return ctx


def _total(rt) -> int:
    return sum(rt.components)


def _empty(namer, X, r) -> Formula:
    ys = namer.fo("y", r)
    return neg(exists1(ys, SOAtom(X, ys)))


def _membership(ctx, table, d, comps) -> Formula:
    """Some identifier v̄ whose rows in `table` are exactly the product of comps.

    comps: list of (SO variable, arity) for the nonempty components.
    """
    nm = ctx.namer
    v = nm.fo("v", d)
    if not comps:
        # all components empty: the product is the single empty row
        return exists1(v, SOAtom(table, v))
    f = [nm.fo("f", r) for _, r in comps]
    u = nm.fo("u", d)
    g = [nm.fo("g", r) for _, r in comps]
    flat_f = tuple(a for t in f for a in t)
    flat_g = tuple(a for t in g for a in t)
    in_product = conj(*(SOAtom(X, gi) for (X, _), gi in zip(comps, g)))
    rows_subset = forall1(u + flat_g, implies(conj(tuple_eq(u, v), SOAtom(table, u + flat_g)), in_product))
    converse = forall1(flat_g, implies(in_product, exists1(u, conj(tuple_eq(u, v), SOAtom(table, u + flat_g)))))
    if ctx.mutation == "top-drop-converse":
        converse = TRUE
    if ctx.mutation == "top-drop-rows-subset":
        rows_subset = TRUE
    return exists1(v + flat_f, conj(SOAtom(table, v + flat_f), rows_subset, converse))


def translate_atom(atom: TOAtom, ctx: TranslationContext) -> Formula:
    """One disjunct per empty pattern: guards on the arguments, then an
    identifier whose rows are the product of the nonempty arguments."""
    if ctx.ne:
        return translate_atom_ne(atom, ctx)
    b = ctx.scope.get(atom.var)
    if b is None:
        raise KeyError(f"TO variable {atom.var} not in context")
    rt = b.rtype
    if len(atom.args) != rt.width:
        raise ValueError(f"width mismatch for {atom.var}: {len(atom.args)} arguments, type {rt}")
    ar = list(rt.components)
    out = []
    for om, (table, _) in b.tables.items():
        empty_pos, full_pos = om.omega, om.complement
        if ctx.mutation == "top-swap-guards":
            empty_pos, full_pos = full_pos, empty_pos
        guards = [_empty(ctx.namer, atom.args[i - 1], ar[i - 1]) for i in empty_pos]
        guards += [neg(_empty(ctx.namer, atom.args[j - 1], ar[j - 1])) for j in full_pos]
        if ctx.mutation == "top-drop-guards":
            guards = []
        comps = [(atom.args[j - 1], ar[j - 1]) for j in om.complement]
        out.append(conj(*guards, _membership(ctx, table, b.degree, comps)))
    return disj(*out)


def translate_atom_ne(atom: TOAtom, ctx: TranslationContext) -> Formula:
    """Variant for relations without empty components: one table, no guards."""
    b = ctx.scope.get(atom.var)
    if b is None:
        raise KeyError(f"TO variable {atom.var} not in context")
    ar = list(b.rtype.components)
    table = b.ne_name or ne_table(b.base)
    return _membership(ctx, table, b.degree, list(zip(atom.args, ar)))


def disjointness(ctx, binding) -> Formula:
    """No identifier has rows in two different pattern tables."""
    nm = ctx.namer
    z = nm.fo("z", binding.degree)
    clauses = []
    items = list(binding.tables.items())
    for om, (t, ar) in items:
        f = nm.fo("f", ar - binding.degree)
        others = []
        for om2, (t2, ar2) in items:
            if om2 == om:
                continue
            f2 = nm.fo("f", ar2 - binding.degree)
            others.append(forall1(f2, neg(SOAtom(t2, z + f2))))
        clauses.append(forall1(f, implies(SOAtom(t, z + f), conj(*others))))
    return forall1(z, conj(*clauses))


def _quantify_tables(binding, body) -> Formula:
    if binding.ne_name is not None:
        tables = [(binding.ne_name, binding.degree + _total(binding.rtype))]
    else:
        tables = list(binding.tables.values())
    for name, ar in reversed(tables):
        body = QuantSO("exists", name, ("in",) * ar, body)
    return body


def translate_exists(node: QuantTOP, ctx: TranslationContext, body_is_negated=False) -> Formula:
    b = ctx.bind(node.var, node.rtype, node.degree)
    inner = ctx.extended(node.var, b)
    body = _tr(node.body, inner)
    if body_is_negated:
        body = neg(body)
    if ctx.ne or ctx.mutation == "top-drop-disjointness":
        return _quantify_tables(b, body)
    return _quantify_tables(b, conj(disjointness(inner, b), body))


def _tr(f, ctx) -> Formula:
    if isinstance(f, (Atom, Eq, SOAtom)):
        return f
    if isinstance(f, TOAtom):
        return translate_atom(f, ctx)
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
        scope = {k: v for k, v in ctx.scope.items() if k != f.var}
        return QuantSO(f.quant, f.var, f.sorts, _tr(f.body, TranslationContext(ctx.namer, ctx.ne, ctx.mutation, scope)))
    if isinstance(f, QuantTOP):
        if f.quant == "exists":
            return translate_exists(f, ctx)
        # forall C phi  ==  not exists C not phi
        return Not(translate_exists(f, ctx, body_is_negated=True))
    if isinstance(f, (HO4Atom, QuantHO4P, Schema)):
        raise FragmentError(f"{type(f).__name__} is outside TO^P")
    raise TypeError(f"unknown node {type(f).__name__}")


# ---------------------------------------------------------------------------
# size planning


def _atom_cost(rt, d):
    s = rt.width
    r = _total(rt)
    return (2 ** s) * (6 * s + 4 * (d + r) + 12)


def estimate_size(f: Formula, ne: bool = False) -> int:
    """Rough node count of translate_top(f), computed without emitting it."""
    scope = {}

    def go(g, scope):
        if isinstance(g, TOAtom):
            rt, d = scope[g.var]
            return _atom_cost(rt, d) if not ne else 4 * (d + _total(rt)) + 10
        if isinstance(g, QuantTOP):
            s = g.rtype.width
            disj_cost = 0 if ne else (4 ** s) * (g.degree + _total(g.rtype) + 3)
            return 2 ** s + disj_cost + go(g.body, {**scope, g.var: (g.rtype, g.degree)})
        if isinstance(g, (QuantFO, QuantSO, Not)):
            return 1 + go(g.body, scope)
        if isinstance(g, (And, Or)):
            return 1 + sum(go(p, scope) for p in g.parts)
        if isinstance(g, Implies):
            return 1 + go(g.left, scope) + go(g.right, scope)
        return 1

    return go(f, scope)


def planned_arity_report(f: Formula, ne: bool = False) -> ArityReport:
    """Arity report of translate_top(f), read off the binders alone."""
    namer = Namer.for_formula(f)
    rep = ArityReport()

    def go(g):
        if isinstance(g, QuantTOP):
            base = namer.fresh("_" + g.var)
            if ne:
                rep.add(ne_table(base), g.degree + _total(g.rtype))
            else:
                # same names and arities as bind(), without building patterns
                comps = g.rtype.components
                full = g.degree + sum(comps)
                pos = [str(j) for j in range(1, len(comps) + 1)]
                head = f"{base}.e.o"
                for k in range(len(comps) + 1):
                    names = map("-".join, itertools.combinations(pos, k))
                    sizes = map(sum, itertools.combinations(comps, k))
                    rep.tables.update((head + nm, full - sz) for nm, sz in zip(names, sizes))
        elif isinstance(g, QuantSO):
            rep.add(g.var, g.arity)
        for c in children(g):
            go(c)

    go(f)
    return rep


def translate_top(formula: Formula, ne: bool = False, mutation: Optional[str] = None,
                  max_nodes: Optional[int] = DEFAULT_MAX_NODES) -> Formula:
    """SO formula equivalent to a TO^P formula.

    Raises TranslationTooLarge (carrying the planned arity report) when the
    estimated size exceeds max_nodes.
    """
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation}")
    for g in walk(formula):
        if isinstance(g, (HO4Atom, QuantHO4P, Schema)):
            raise FragmentError(f"{type(g).__name__} is outside TO^P")
    if max_nodes is not None:
        est = estimate_size(formula, ne)
        if est > max_nodes:
            raise TranslationTooLarge(est, planned_arity_report(formula, ne))
    ctx = TranslationContext(Namer.for_formula(formula), ne, mutation)
    return _tr(formula, ctx)
