"""Model checking of SO, TO^P, HO^{4,P} and schema formulae on finite structures.

Higher-order quantifiers are decided by enumerating candidate witnesses.  SO
quantifiers whose candidate space is large are handed to the symbolic engine
when the subtree allows it (strategy "auto"); strategy "enumerate" never does.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .logic import (
    And, Atom, Eq, FiniteStructure, Formula, HO4Atom, HORelation, Implies,
    Not, Or, QuantFO, QuantHO4P, QuantSO, QuantTOP, RelationType, Schema,
    SOAtom, TOAtom, walk,
)
from .symbolic import BudgetExceeded, SymbolicEngine, symbolic_capable

__all__ = [
    "BudgetExceeded", "EvalBudget", "evaluate", "enum_so_relations",
    "enum_relations", "enum_bounded_ho_relations", "count_bounded",
    "find_witness",
]


@dataclass(frozen=True)
class EvalBudget:
    """Resource caps for one evaluation.

    max_candidates bounds the candidate space of any single enumerated
    quantifier node (and the stages explored for a schema node).
    """
    max_candidates: int = 200_000
    time_limit: Optional[float] = None
    max_bdd_nodes: Optional[int] = 20_000_000
    enum_threshold: int = 256

    def deadline(self):
        return None if self.time_limit is None else time.monotonic() + self.time_limit


DEFAULT_BUDGET = EvalBudget()


# ---------------------------------------------------------------------------
# candidate enumeration


def enum_relations(positions) -> Iterator[frozenset]:
    """All subsets of `positions`, in binary-counting order."""
    positions = list(positions)
    for mask in range(1 << len(positions)):
        yield frozenset(p for i, p in enumerate(positions) if mask >> i & 1)


def enum_so_relations(n: int, arity: int, max_positions: int = 16) -> Iterator[frozenset]:
    """All 2^(n^arity) relations of the given arity over range(n)."""
    if n ** arity > max_positions:
        raise BudgetExceeded(f"{n}^{arity} tuple positions exceed the cap {max_positions}")
    return enum_relations(itertools.product(range(n), repeat=arity))


def _universe(n, rtype, d):
    if rtype.order == 2:
        return list(enum_relations(itertools.product(range(n), repeat=rtype.arity)))
    if rtype.order == 3:
        comps = [list(enum_relations(itertools.product(range(n), repeat=r))) for r in rtype.components]
        return list(itertools.product(*comps))
    comps = [list(_bounded(n, c, d)) for c in rtype.components]
    return list(itertools.product(*comps))


def _bounded(n, rtype, d):
    members = _universe(n, rtype, d)
    bound = n ** d
    for k in range(min(bound, len(members)) + 1):
        for combo in itertools.combinations(members, k):
            yield frozenset(combo)


def count_bounded(n: int, rtype: RelationType, d: int) -> int:
    """Size of the candidate space of a bounded quantifier."""
    if rtype.order == 3:
        u = 1
        for r in rtype.components:
            u *= 2 ** (n ** r)
    elif rtype.order == 4:
        u = 1
        for c in rtype.components:
            u *= count_bounded(n, c, d)
    else:
        raise ValueError("bounded quantifiers are order 3 or 4")
    return sum(math.comb(u, k) for k in range(min(n ** d, u) + 1))


def enum_bounded_ho_relations(n: int, rtype: RelationType, d: int) -> Iterator[frozenset]:
    """Rank-3 relations with at most n^d tuples, or downward bounded rank-4
    relations, in a fixed deterministic order (by size, then lexicographic)."""
    if rtype.order not in (3, 4):
        raise ValueError("bounded quantifiers are order 3 or 4")
    return _bounded(n, rtype, d)


# ---------------------------------------------------------------------------
# evaluation


class _Ctx:
    def __init__(self, structure, budget, strategy, domains=None, extra=None):
        self.structure = structure
        self.budget = budget
        self.strategy = strategy
        self.deadline = budget.deadline()
        self.domains = {"in": structure.n, **(domains or {})}
        self.relations = {**structure.relations, **(extra or {})}
        self._engine = None
        self._ticks = 0

    def engine(self):
        if self._engine is None:
            self._engine = SymbolicEngine(self.domains, self.relations, self.budget, self.deadline)
        return self._engine

    def tick(self):
        self._ticks += 1
        if self._ticks & 4095 == 0 and self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("time limit exceeded")


def _unwrap(v):
    return v.tuples if isinstance(v, HORelation) else v


def evaluate(structure: FiniteStructure, formula: Formula, valuation: Optional[Mapping] = None,
             budget: Optional[EvalBudget] = None, strategy: str = "auto",
             domains: Optional[Mapping[str, int]] = None,
             relations: Optional[Mapping[str, frozenset]] = None) -> bool:
    """Truth value of `formula` in `structure` under `valuation`.

    `domains` and `relations` add sorted domains and stage relations, used
    when checking schema bodies against a concrete stage.
    """
    if strategy not in ("auto", "enumerate", "symbolic"):
        raise ValueError(f"unknown strategy {strategy}")
    ctx = _Ctx(structure, budget or DEFAULT_BUDGET, strategy, domains, relations)
    env = {k: _unwrap(v) for k, v in (valuation or {}).items()}
    if strategy == "symbolic" and symbolic_capable(formula):
        return ctx.engine().truth(formula, env)
    return _ev(formula, env, ctx)


def _positions(ctx, sorts):
    return list(itertools.product(*(range(ctx.domains[s]) for s in sorts)))


def _ev(f, env, ctx) -> bool:
    ctx.tick()
    if isinstance(f, Atom):
        return tuple(env[a] for a in f.args) in ctx.relations[f.symbol]
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, SOAtom):
        return tuple(env[a] for a in f.args) in env[f.var]
    if isinstance(f, (TOAtom, HO4Atom)):
        return tuple(env[a] for a in f.args) in env[f.var]
    if isinstance(f, Not):
        return not _ev(f.body, env, ctx)
    if isinstance(f, And):
        return all(_ev(p, env, ctx) for p in f.parts)
    if isinstance(f, Or):
        return any(_ev(p, env, ctx) for p in f.parts)
    if isinstance(f, Implies):
        return (not _ev(f.left, env, ctx)) or _ev(f.right, env, ctx)
    if isinstance(f, QuantFO):
        dom = range(ctx.domains[f.sort])
        if f.quant == "exists":
            return any(_ev(f.body, {**env, f.var: e}, ctx) for e in dom)
        return all(_ev(f.body, {**env, f.var: e}, ctx) for e in dom)
    if isinstance(f, QuantSO):
        positions = _positions(ctx, f.sorts)
        space = 2 ** len(positions)
        if ctx.strategy != "enumerate" and symbolic_capable(f) \
                and _subtree_bits(f, ctx.domains) > ctx.budget.enum_threshold.bit_length() - 1:
            return ctx.engine().truth(f, env)
        if space > ctx.budget.max_candidates:
            raise BudgetExceeded(f"SO quantifier over {space} candidates")
        return _quantify(f, enum_relations(positions), env, ctx)
    if isinstance(f, (QuantTOP, QuantHO4P)):
        space = count_bounded(ctx.domains["in"], f.rtype, f.degree)
        if space > ctx.budget.max_candidates:
            raise BudgetExceeded(f"bounded quantifier over {space} candidates")
        return _quantify(f, enum_bounded_ho_relations(ctx.domains["in"], f.rtype, f.degree), env, ctx)
    if isinstance(f, Schema):
        from .stages import eval_schema
        return eval_schema(ctx.structure, f, ctx.budget)
    raise TypeError(f"unknown node {type(f).__name__}")


def _subtree_bits(f, domains, _cache={}):
    """Membership bits of all SO quantifiers in the subtree: enumerating the
    outer ones would re-run everything below once per candidate."""
    key = (id(f), tuple(sorted(domains.items())))
    hit = _cache.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    total = 0
    for g in walk(f):
        if isinstance(g, QuantSO):
            k = 1
            for srt in g.sorts:
                k *= domains[srt]
            total += k
    if len(_cache) > 100000:
        _cache.clear()
    _cache[key] = (f, total)
    return total


def _quantify(f, candidates, env, ctx):
    if f.quant == "exists":
        return any(_ev(f.body, {**env, f.var: c}, ctx) for c in candidates)
    return all(_ev(f.body, {**env, f.var: c}, ctx) for c in candidates)


def find_witness(structure: FiniteStructure, formula: Formula, budget: Optional[EvalBudget] = None):
    """For a sentence starting with an existential higher-order quantifier,
    return the first candidate making the body true, or None."""
    if not isinstance(formula, (QuantSO, QuantTOP, QuantHO4P)) or formula.quant != "exists":
        raise ValueError("find_witness needs a leading existential higher-order quantifier")
    ctx = _Ctx(structure, budget or DEFAULT_BUDGET, "auto")
    if isinstance(formula, QuantSO):
        cands = enum_relations(_positions(ctx, formula.sorts))
    else:
        cands = enum_bounded_ho_relations(structure.n, formula.rtype, formula.degree)
    for c in cands:
        if _ev(formula.body, {formula.var: c}, ctx):
            return c
    return None
