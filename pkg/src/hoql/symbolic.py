"""BDD-backed evaluation of SO formulae.

First-order quantifiers are grounded over the finite domain; every atom of an
SO variable over a concrete tuple becomes one BDD variable, and SO
quantifiers become existential/universal abstraction.  This replaces the
2^(n^k) candidate enumeration for each SO quantifier with one symbolic pass,
and gives the same truth value.
"""
from __future__ import annotations

import itertools
import time

from dd import cudd

from .logic import (
    And, Atom, Eq, HO4Atom, Implies, Not, Or, QuantFO, QuantHO4P, QuantSO,
    QuantTOP, Schema, SOAtom, TOAtom, free_names,
)


class BudgetExceeded(RuntimeError):
    pass


class SymRel:
    """An SO relation whose membership bits are BDD variables."""

    __slots__ = ("engine", "prefix", "sizes", "bits")

    def __init__(self, engine, prefix, sizes, eager=False):
        self.engine = engine
        self.prefix = prefix
        self.sizes = tuple(sizes)
        self.bits = {}
        if eager:
            for tup in self.positions():
                self.bit(tup)

    def positions(self):
        return itertools.product(*(range(k) for k in self.sizes))

    def bit(self, tup):
        name = self.bits.get(tup)
        if name is None:
            name = self.prefix + "." + ".".join(map(str, tup))
            self.engine.declare(name)
            self.bits[tup] = name
        return self.engine.bdd.var(name)

    def equals(self, value):
        """BDD for 'this relation equals the concrete set value'."""
        bdd = self.engine.bdd
        u = bdd.true
        for tup in self.positions():
            b = self.bit(tup)
            u &= b if tup in value else ~b
            if u == bdd.false:
                break
        return u

    def decode(self, model):
        return frozenset(t for t, name in self.bits.items() if model.get(name))


class SymbolicEngine:
    """Compile formulae to BDDs under fixed domain sizes per sort.

    `relations` maps vocabulary/stage symbols to frozensets or SymRels.
    Environment values are ints (elements), frozensets (concrete relations)
    or SymRels.
    """

    def __init__(self, domains, relations, budget=None, deadline=None):
        self.bdd = cudd.BDD()
        self.bdd.configure(reordering=True)
        self.domains = dict(domains)
        self.relations = dict(relations)
        self.budget = budget
        self.deadline = deadline
        self._declared = set()
        self._serial = {}
        self._memo = {}
        self._free = {}
        self._ticks = 0
        self._max_nodes = getattr(budget, "max_bdd_nodes", None)

    def close(self):
        """Drop cached BDD references so the manager can be released cleanly."""
        self._memo.clear()
        self.relations.clear()

    def declare(self, name):
        if name not in self._declared:
            self.bdd.declare(name)
            self._declared.add(name)

    def relation(self, prefix, sorts, eager=True):
        return SymRel(self, prefix, [self.domains[s] for s in sorts], eager)

    def _freevars(self, f):
        hit = self._free.get(id(f))
        if hit is None or hit[0] is not f:
            hit = (f, tuple(sorted(free_names(f))))
            self._free[id(f)] = hit
        return hit[1]

    def _tick(self):
        self._ticks += 1
        if self._ticks & 1023 == 0:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise BudgetExceeded("time limit exceeded")
            if self._max_nodes is not None and len(self.bdd) > self._max_nodes:
                raise BudgetExceeded("BDD node limit exceeded")

    def truth(self, f, env=None) -> bool:
        u = self.compile(f, env or {})
        if u == self.bdd.true:
            return True
        if u == self.bdd.false:
            return False
        raise ValueError("formula still depends on symbolic relations")

    def compile(self, f, env):
        self._tick()
        names = self._freevars(f)
        try:
            key = (id(f), tuple(env[x] for x in names))
        except KeyError as e:
            raise KeyError(f"unbound variable {e.args[0]}") from None
        hit = self._memo.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        u = self._compile(f, env)
        self._memo[key] = (f, u)
        return u

    def conjoin(self, acc, f, env):
        """acc AND f, pushing universally quantified conjuncts instance by
        instance into the accumulator so it keeps pruning the intermediates."""
        if acc == self.bdd.false:
            return acc
        if isinstance(f, And):
            for p in f.parts:
                acc = self.conjoin(acc, p, env)
                if acc == self.bdd.false:
                    break
            return acc
        if isinstance(f, QuantFO) and f.quant == "forall":
            self._tick()
            for e in range(self.domains[f.sort]):
                acc = self.conjoin(acc, f.body, {**env, f.var: e})
                if acc == self.bdd.false:
                    break
            return acc
        if acc != self.bdd.true:
            # acc & (a | b) == (acc & a) | (acc & b): keeps every branch pruned
            if isinstance(f, Or):
                out = self.bdd.false
                for p in f.parts:
                    out |= self.conjoin(acc, p, env)
                    if out == acc:
                        break
                return out
            if isinstance(f, QuantFO):
                self._tick()
                out = self.bdd.false
                for e in range(self.domains[f.sort]):
                    out |= self.conjoin(acc, f.body, {**env, f.var: e})
                    if out == acc:
                        break
                return out
        return acc & self.compile(f, env)

    def __del__(self):
        try:
            self._memo.clear()
            self.relations.clear()
        except Exception:  # pragma: no cover - interpreter shutdown
            pass

    def _const(self, b):
        return self.bdd.true if b else self.bdd.false

    def _compile(self, f, env):
        bdd = self.bdd
        if isinstance(f, Atom):
            rel = self.relations[f.symbol]
            tup = tuple(env[a] for a in f.args)
            if isinstance(rel, SymRel):
                return rel.bit(tup)
            return self._const(tup in rel)
        if isinstance(f, SOAtom):
            rel = env[f.var]
            tup = tuple(env[a] for a in f.args)
            if isinstance(rel, SymRel):
                return rel.bit(tup)
            return self._const(tup in rel)
        if isinstance(f, Eq):
            return self._const(env[f.left] == env[f.right])
        if isinstance(f, TOAtom):
            value = env[f.var]
            args = [env[a] for a in f.args]
            if isinstance(value, SymRel):
                raise TypeError("TO values must be concrete in symbolic evaluation")
            u = bdd.false
            for member in value:
                term = bdd.true
                for a, s in zip(args, member):
                    term &= a.equals(s) if isinstance(a, SymRel) else self._const(a == s)
                    if term == bdd.false:
                        break
                u |= term
                if u == bdd.true:
                    break
            return u
        if isinstance(f, HO4Atom):
            return self._const(tuple(env[a] for a in f.args) in env[f.var])
        if isinstance(f, Not):
            return ~self.compile(f.body, env)
        if isinstance(f, And):
            return self.conjoin(bdd.true, f, env)
        if isinstance(f, Or):
            u = bdd.false
            for p in f.parts:
                u |= self.compile(p, env)
                if u == bdd.true:
                    break
            return u
        if isinstance(f, Implies):
            a = self.compile(f.left, env)
            if a == bdd.false:
                return bdd.true
            return ~a | self.compile(f.right, env)
        if isinstance(f, QuantFO):
            ex = f.quant == "exists"
            u = bdd.false if ex else bdd.true
            for e in range(self.domains[f.sort]):
                v = self.compile(f.body, {**env, f.var: e})
                if ex:
                    u |= v
                    if u == bdd.true:
                        break
                else:
                    u &= v
                    if u == bdd.false:
                        break
            return u
        if isinstance(f, QuantSO):
            serial = self._serial.setdefault(id(f), len(self._serial))
            rel = self.relation(f"q{serial}", f.sorts, eager=False)
            body = self.compile(f.body, {**env, f.var: rel})
            qvars = set(rel.bits.values())
            if not qvars:
                return body
            if f.quant == "exists":
                return bdd.exist(qvars, body)
            return bdd.forall(qvars, body)
        if isinstance(f, (QuantTOP, QuantHO4P, Schema)):
            raise TypeError(f"{type(f).__name__} is outside the symbolic fragment")
        raise TypeError(f"unknown node {type(f).__name__}")

    def models(self, u, rels):
        """Iterate assignments of the given SymRels satisfying u."""
        care = set()
        for r in rels:
            care.update(r.bits.values())
        for m in self.bdd.pick_iter(u, care_vars=care):
            yield tuple(r.decode(m) for r in rels)

    def count(self, u, rels):
        nvars = sum(len(r.bits) for r in rels)
        return int(self.bdd.count(u, nvars=nvars)) if nvars else (1 if u == self.bdd.true else 0)


def symbolic_capable(f, _cache={}) -> bool:
    """True when the subtree has no TO/HO4 quantifiers and no schema nodes."""
    from .logic import walk
    hit = _cache.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1]
    ok = not any(isinstance(g, (QuantTOP, QuantHO4P, Schema)) for g in walk(f))
    if len(_cache) > 200000:
        _cache.clear()
    _cache[id(f)] = (f, ok)
    return ok
