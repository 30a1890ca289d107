"""Semantics of the stage-sequence schema.

A schema holds in A when there is a sequence of stages G_1..G_m with
m <= n^d, each stage of size at most n^t, G_1 satisfying `first`, G_m
satisfying `last`, and each consecutive pair satisfying `step`.  Successor
stages are produced from a BDD over the NEXT relation bits and explored
depth-first, with stages memoised up to isomorphism.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .logic import FiniteStructure, QuantSO, Schema, cur_symbol, next_symbol
from .symbolic import BudgetExceeded, SymbolicEngine


@dataclass(frozen=True)
class Stage:
    size: int
    rels: tuple  # one frozenset per signature entry

    def as_structure(self, sig) -> FiniteStructure:
        return FiniteStructure(
            self.size,
            {cur_symbol(k + 1): r for k, r in enumerate(self.rels)},
            {cur_symbol(k + 1): a for k, a in enumerate(sig)},
        )


# ---------------------------------------------------------------------------
# canonical forms by individualisation and refinement


def _refine(stage, colors):
    k = stage.size
    while True:
        sig = [[c] for c in colors]
        for ri, rel in enumerate(stage.rels):
            for tup in rel:
                ctup = tuple(colors[a] for a in tup)
                for p, a in enumerate(tup):
                    sig[a].append((ri, p, ctup))
        keys = [(s[0], tuple(sorted(s[1:]))) for s in sig]
        order = {key: i for i, key in enumerate(sorted(set(keys)))}
        new = [order[keys[v]] for v in range(k)]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(stage: Stage):
    """Isomorphism-invariant key; equal keys iff the stages are isomorphic."""
    best = [None]

    def search(colors):
        colors = _refine(stage, colors)
        if len(set(colors)) == stage.size:
            enc = tuple(tuple(sorted(tuple(colors[a] for a in t) for t in rel)) for rel in stage.rels)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, m in counts.items() if m > 1)
        for v in range(stage.size):
            if colors[v] == target:
                # individualise v: it keeps the cell colour, the rest move up
                shifted = [2 * c + (1 if (c == target and u != v) else 0) for u, c in enumerate(colors)]
                search(shifted)

    search([0] * stage.size)
    return stage.size, best[0]


# ---------------------------------------------------------------------------
# stage generation


class _Search:
    def __init__(self, structure, node: Schema, budget):
        from .evaluator import DEFAULT_BUDGET
        self.A = structure
        self.node = node
        self.budget = budget or DEFAULT_BUDGET
        self.deadline = self.budget.deadline()
        self.max_len = structure.n ** node.d
        self.max_size = structure.n ** node.t
        self.generated = 0

    def _count(self):
        self.generated += 1
        if self.generated > self.budget.max_candidates:
            raise BudgetExceeded(f"more than {self.budget.max_candidates} stages explored")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("time limit exceeded")

    def _engine(self, domains, relations):
        return SymbolicEngine({"in": self.A.n, **domains}, {**self.A.relations, **relations},
                              self.budget, self.deadline)

    def _generate(self, formula, domains, concrete, sym_prefix, sym_sort, relname) -> Iterator[Stage]:
        """Models of `formula` for a symbolic stage of every admissible size."""
        sig = self.node.sig
        for k in range(1, self.max_size + 1):
            eng = self._engine({**domains, sym_sort: k}, concrete)
            u, rels = _compile_broken(eng, formula, sig, sym_prefix, sym_sort, relname, k)
            for model in eng.models(u, rels):
                self._count()
                yield Stage(k, model)
            eng.close()

    def first_stages(self) -> Iterator[Stage]:
        return self._generate(self.node.first, {}, {}, "c", "cur", cur_symbol)

    def successors(self, stage: Stage) -> Iterator[Stage]:
        cur = {cur_symbol(j + 1): r for j, r in enumerate(stage.rels)}
        return self._generate(self.node.step, {"cur": stage.size}, cur, "n", "next", next_symbol)

    def is_last(self, stage: Stage) -> bool:
        cur = {cur_symbol(j + 1): r for j, r in enumerate(stage.rels)}
        return self._engine({"cur": stage.size}, cur).truth(self.node.last)

    def is_first(self, stage: Stage) -> bool:
        cur = {cur_symbol(j + 1): r for j, r in enumerate(stage.rels)}
        return self._engine({"cur": stage.size}, cur).truth(self.node.first)

    def is_step(self, a: Stage, b: Stage) -> bool:
        rel = {cur_symbol(j + 1): r for j, r in enumerate(a.rels)}
        rel.update({next_symbol(j + 1): r for j, r in enumerate(b.rels)})
        return self._engine({"cur": a.size, "next": b.size}, rel).truth(self.node.step)

    # depth-first search, memoising the smallest depth at which a class was seen
    def dfs(self) -> Optional[list]:
        best = {}
        last_cache = {}

        def last(stage, key):
            if key not in last_cache:
                last_cache[key] = self.is_last(stage)
            return last_cache[key]

        def visit(stage, depth, key):
            if last(stage, key):
                return [stage]
            if depth >= self.max_len:
                return None
            for nxt in self.successors(stage):
                nkey = canonical_form(nxt)
                if best.get(nkey, self.max_len + 1) <= depth + 1:
                    continue
                best[nkey] = depth + 1
                path = visit(nxt, depth + 1, nkey)
                if path is not None:
                    return [stage] + path
            return None

        for s0 in self.first_stages():
            key = canonical_form(s0)
            if best.get(key, self.max_len + 1) <= 1:
                continue
            best[key] = 1
            path = visit(s0, 1, key)
            if path is not None:
                return path
        return None

    def bfs(self) -> bool:
        layer = {}
        for s0 in self.first_stages():
            layer.setdefault(canonical_form(s0), s0)
        seen = set(layer)
        for depth in range(1, self.max_len + 1):
            if any(self.is_last(s) for s in layer.values()):
                return True
            if depth == self.max_len:
                break
            nxt = {}
            for s in layer.values():
                for t in self.successors(s):
                    key = canonical_form(t)
                    if key not in seen:
                        seen.add(key)
                        nxt[key] = t
            if not nxt:
                break
            layer = nxt
        return False


def eval_schema(structure: FiniteStructure, node: Schema, budget=None) -> bool:
    return _Search(structure, node, budget).dfs() is not None


def schema_witness(structure: FiniteStructure, node: Schema, budget=None) -> Optional[list]:
    """A stage sequence witnessing the schema, or None."""
    return _Search(structure, node, budget).dfs()


def eval_schema_bfs(structure: FiniteStructure, node: Schema, budget=None) -> bool:
    """Breadth-first reachability over isomorphism classes of stages.

    Note: BFS tracks first-visit depth only, which is the shortest, so the
    length bound is handled exactly.
    """
    return _Search(structure, node, budget).bfs()


def check_stage_sequence(structure: FiniteStructure, node: Schema, stages: list) -> bool:
    """Direct check that a given list of stages witnesses the schema."""
    s = _Search(structure, node, None)
    if not stages or len(stages) > s.max_len:
        return False
    if any(st.size > s.max_size or st.size < 1 for st in stages):
        return False
    return (s.is_first(stages[0]) and s.is_last(stages[-1])
            and all(s.is_step(a, b) for a, b in zip(stages, stages[1:])))


# ---------------------------------------------------------------------------
# symmetry breaking
#
# The models of a stage formula are closed under relabelling the generated
# stage's domain, and so is the joint set of (leading SO witnesses, stage).
# Requiring the joint bit vector to be lexicographically no larger than its
# image under each adjacent transposition keeps at least one member of every
# isomorphism class (the lex-least one), while cutting most labellings early.


def _lex_le(bdd, xs, ys):
    le = bdd.true
    for x, y in zip(reversed(xs), reversed(ys)):
        if x == y:
            continue
        le = (~x & y) | (((x & y) | (~x & ~y)) & le)
    return le


def _compile_broken(eng, formula, sig, prefix, sort, relname, k):
    """BDD over the stage relation bits; returns (bdd, stage SymRels).

    Witness bits are declared before stage bits so that the BDD variable
    order agrees with the significance order of the lex comparisons.
    """
    body, wits = formula, []
    while isinstance(body, QuantSO) and body.quant == "exists":
        wits.append(body)
        body = body.body
    env = {}
    wrels = []
    for i, q in enumerate(wits):
        r = eng.relation(f"w{i}", q.sorts, eager=True)
        env[q.var] = r
        wrels.append((q.sorts, r))
    stage_rels = [eng.relation(f"{prefix}{j}", (sort,) * a) for j, a in enumerate(sig)]
    eng.relations.update({relname(j + 1): r for j, r in enumerate(stage_rels)})
    bdd = eng.bdd
    vec = []  # (sorts, tuple, relation)
    for sorts, r in wrels:
        vec.extend((sorts, t, r) for t in r.positions())
    for r in stage_rels:
        sorts = (sort,) * len(r.sizes)
        vec.extend((sorts, t, r) for t in r.positions())
    xs = [r.bit(t) for _, t, r in vec]
    acc = bdd.true
    for i in range(k - 1):
        swap = {i: i + 1, i + 1: i}
        ys = []
        for sorts, t, r in vec:
            t2 = tuple(swap.get(a, a) if s == sort else a for s, a in zip(sorts, t))
            ys.append(r.bit(t2))
        acc &= _lex_le(bdd, xs, ys)
    acc = eng.conjoin(acc, body, env)
    if acc == bdd.false:
        return acc, stage_rels
    qvars = set()
    for _, r in wrels:
        qvars.update(r.bits.values())
    return (bdd.exist(qvars, acc) if qvars else acc), stage_rels
