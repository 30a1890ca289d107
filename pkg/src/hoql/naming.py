"""Fresh names and encoding-table names shared by translators and encoders.

Names starting with an underscore are reserved for generated symbols.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .logic import (
    Atom, Formula, HO4Atom, QuantFO, QuantHO4P, QuantSO, QuantTOP, Schema,
    SOAtom, TOAtom, Eq, walk, EmptyPattern,
)


class Namer:
    """Hands out names that do not clash with any name in the input."""

    def __init__(self, used=()):
        self.used = set(used)
        self.counter = {}

    @classmethod
    def for_formula(cls, f: Formula) -> "Namer":
        return cls(names_in(f))

    def fresh(self, base: str) -> str:
        if base not in self.used:
            self.used.add(base)
            return base
        while True:
            k = self.counter.get(base, 1) + 1
            self.counter[base] = k
            cand = f"{base}~{k}"
            if cand not in self.used:
                self.used.add(cand)
                return cand

    def fo(self, prefix: str, k: int = 1) -> tuple:
        """k fresh element variables."""
        out = []
        for _ in range(k):
            n = self.counter.get("_" + prefix, 0) + 1
            self.counter["_" + prefix] = n
            cand = f"_{prefix}{n}"
            while cand in self.used:
                n += 1
                self.counter["_" + prefix] = n
                cand = f"_{prefix}{n}"
            self.used.add(cand)
            out.append(cand)
        return tuple(out)


def names_in(f: Formula) -> set:
    out = set()
    for g in walk(f):
        if isinstance(g, Atom):
            out.update(g.args)
        elif isinstance(g, Eq):
            out.update((g.left, g.right))
        elif isinstance(g, (SOAtom, TOAtom, HO4Atom)):
            out.add(g.var)
            out.update(g.args)
        elif isinstance(g, (QuantFO, QuantSO, QuantTOP, QuantHO4P)):
            out.add(g.var)
    return out


def flat_table(base: str, omega: EmptyPattern) -> str:
    return f"{base}.e.{omega.tag}"


def ne_table(base: str) -> str:
    return f"{base}.ne"


def x4_table(base: str, omega: EmptyPattern) -> str:
    return f"{base}.x4.{omega.tag}"


def rel3_table(base: str) -> str:
    return f"{base}.rel3"


def t2_table(base: str, omega: EmptyPattern) -> str:
    return f"{base}.t2.{omega.tag}"


def rel2_table(base: str) -> str:
    return f"{base}.rel2"


def x3_table(base: str, omega: EmptyPattern) -> str:
    return f"{base}.x3.{omega.tag}"


@dataclass
class ArityReport:
    """Quantified SO relation variables and their arities."""
    tables: dict = field(default_factory=dict)

    @property
    def max_arity(self) -> int:
        return max(self.tables.values(), default=0)

    def add(self, name, arity):
        self.tables[name] = max(arity, self.tables.get(name, 0))

    def render(self) -> str:
        lines = [f"max arity {self.max_arity}", f"{len(self.tables)} quantified relation variables"]
        width = max((len(k) for k in self.tables), default=0)
        for k, v in self.tables.items():
            lines.append(f"  {k.ljust(width)}  {v}")
        return "\n".join(lines) + "\n"


def arity_report(f: Formula) -> ArityReport:
    """Arity of every quantified SO variable of an SO formula."""
    rep = ArityReport()
    for g in walk(f):
        if isinstance(g, (QuantTOP, QuantHO4P, Schema)):
            raise ValueError("arity reports are defined for SO formulae")
        if isinstance(g, QuantSO):
            rep.add(g.var, g.arity)
    return rep
