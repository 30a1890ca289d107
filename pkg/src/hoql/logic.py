"""Core data model: relation types, formula AST, structures and higher-order values.

Formulae are immutable dataclass trees.  Source spans are carried for error
reporting but never take part in equality.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

SORTS = ("in", "cur", "next")


@dataclass(frozen=True)
class Span:
    start: int
    end: int


# ---------------------------------------------------------------------------
# relation types


@dataclass(frozen=True)
class RelationType:
    """Type of a relation variable.

    order 2: components = (arity,)
    order 3: components = (r_1, ..., r_s), the SO arities of each position
    order 4: components = (tau_1, ..., tau_s), each an order-3 type
    """

    order: int
    components: tuple

    def __post_init__(self):
        if self.order == 2:
            if len(self.components) != 1 or not _posint(self.components[0]):
                raise ValueError(f"bad SO type {self.components!r}")
        elif self.order == 3:
            if not self.components or not all(_posint(r) for r in self.components):
                raise ValueError(f"bad TO type {self.components!r}")
        elif self.order == 4:
            if not self.components or not all(
                isinstance(c, RelationType) and c.order == 3 for c in self.components
            ):
                raise ValueError(f"bad HO4 type {self.components!r}")
        else:
            raise ValueError(f"unsupported order {self.order}")

    @classmethod
    def so(cls, arity: int) -> "RelationType":
        return cls(2, (arity,))

    @classmethod
    def to(cls, *arities: int) -> "RelationType":
        return cls(3, tuple(arities))

    @classmethod
    def ho4(cls, *types: "RelationType | tuple") -> "RelationType":
        return cls(4, tuple(t if isinstance(t, RelationType) else cls.to(*t) for t in types))

    @property
    def width(self) -> int:
        return len(self.components)

    @property
    def arity(self) -> int:
        if self.order != 2:
            raise ValueError("only SO types have an arity")
        return self.components[0]

    def is_uniform(self) -> bool:
        """Uniform width at every level, the shape required for HO4 encodings."""
        if self.order != 4:
            return True
        s = self.width
        return all(c.width == s for c in self.components)

    def __str__(self) -> str:
        if self.order == 2:
            return str(self.components[0])
        if self.order == 3:
            return "(" + " ".join(map(str, self.components)) + ")"
        return "(" + "".join(str(c) for c in self.components) + ")"


def _posint(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 1


# ---------------------------------------------------------------------------
# formula AST


class Formula:
    """Marker base class for AST nodes."""

    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return Not(self)


_NOSPAN = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Atom(Formula):
    """Vocabulary atom; also used for stage relations CUR.k / NEXT.k."""
    symbol: str
    args: tuple
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class SOAtom(Formula):
    var: str
    args: tuple
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class TOAtom(Formula):
    var: str
    args: tuple  # names of SO variables
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class HO4Atom(Formula):
    var: str
    args: tuple  # names of TO variables
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class And(Formula):
    parts: tuple
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class QuantFO(Formula):
    quant: str  # "exists" | "forall"
    var: str
    body: Formula
    sort: str = "in"
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class QuantSO(Formula):
    quant: str
    var: str
    sorts: tuple  # one sort per argument position; len == arity
    body: Formula
    span: Optional[Span] = field(**_NOSPAN)

    @property
    def arity(self) -> int:
        return len(self.sorts)

    @property
    def rtype(self) -> RelationType:
        return RelationType.so(len(self.sorts))


@dataclass(frozen=True)
class QuantTOP(Formula):
    """Bounded third-order quantifier: at most n^degree tuples."""
    quant: str
    var: str
    rtype: RelationType
    degree: int
    body: Formula
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class QuantHO4P(Formula):
    """Downward bounded fourth-order quantifier."""
    quant: str
    var: str
    rtype: RelationType
    degree: int
    body: Formula
    span: Optional[Span] = field(**_NOSPAN)


@dataclass(frozen=True)
class Schema(Formula):
    """Stage-sequence schema over a signature of stage relation arities."""
    sig: tuple
    d: int
    t: int
    first: Formula
    last: Formula
    step: Formula
    span: Optional[Span] = field(**_NOSPAN)

    @property
    def width(self) -> int:
        return len(self.sig)


TRUE = And(())
FALSE = Or(())

QUANTS = ("exists", "forall")
HIGHER = (QuantSO, QuantTOP, QuantHO4P)


def dual(q: str) -> str:
    return "forall" if q == "exists" else "exists"


def cur_symbol(k: int) -> str:
    return f"CUR.{k}"


def next_symbol(k: int) -> str:
    return f"NEXT.{k}"


def stage_symbol(name: str) -> Optional[tuple]:
    """('cur'|'next', k) for CUR.k / NEXT.k, else None."""
    for prefix, sort in (("CUR.", "cur"), ("NEXT.", "next")):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return sort, int(name[len(prefix):])
    return None


# small builders used throughout the translators


def conj(*parts: Formula) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif p == FALSE:
            return FALSE
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        elif p == TRUE:
            return TRUE
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.body
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    if a == TRUE:
        return b
    if b == TRUE or a == FALSE:
        return TRUE
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def exists1(names: Iterable[str], body: Formula, sort: str = "in") -> Formula:
    for v in reversed(list(names)):
        body = QuantFO("exists", v, body, sort)
    return body


def forall1(names: Iterable[str], body: Formula, sort: str = "in") -> Formula:
    for v in reversed(list(names)):
        body = QuantFO("forall", v, body, sort)
    return body


def tuple_eq(xs, ys) -> Formula:
    return conj(*(Eq(a, b) for a, b in zip(xs, ys))) if xs else TRUE


def children(f: Formula) -> tuple:
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, (QuantFO, QuantSO, QuantTOP, QuantHO4P)):
        return (f.body,)
    if isinstance(f, Schema):
        return (f.first, f.last, f.step)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def is_pure_so(f: Formula) -> bool:
    return not any(isinstance(g, (TOAtom, HO4Atom, QuantTOP, QuantHO4P, Schema)) for g in walk(f))


def free_names(f: Formula) -> frozenset:
    """Free variable names of any order (vocabulary symbols excluded)."""
    memo: dict = {}
    return _free(f, memo)


def _free(f, memo) -> frozenset:
    key = id(f)
    hit = memo.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if isinstance(f, Atom):
        out = frozenset(f.args)
    elif isinstance(f, Eq):
        out = frozenset((f.left, f.right))
    elif isinstance(f, (SOAtom, TOAtom, HO4Atom)):
        out = frozenset((f.var,) + tuple(f.args))
    elif isinstance(f, (QuantFO, QuantSO, QuantTOP, QuantHO4P)):
        out = _free(f.body, memo) - {f.var}
    elif isinstance(f, Schema):
        out = frozenset()
    else:
        out = frozenset().union(*(_free(c, memo) for c in children(f))) if children(f) else frozenset()
    memo[key] = (f, out)
    return out


# ---------------------------------------------------------------------------
# empty patterns


@dataclass(frozen=True, order=True)
class EmptyPattern:
    """Set of 1-based component positions that are empty."""
    omega: tuple
    width: int

    @property
    def complement(self) -> tuple:
        return tuple(j for j in range(1, self.width + 1) if j not in self.omega)

    @property
    def tag(self) -> str:
        return "o" + "-".join(map(str, self.omega))

    def __str__(self):
        return "{" + ",".join(map(str, self.omega)) + "}"


def enumerate_patterns(s: int) -> list:
    """All 2^s empty patterns, by size and then lexicographically."""
    if s < 1:
        raise ValueError("pattern width must be >= 1")
    out = []
    for k in range(s + 1):
        out.extend(EmptyPattern(c, s) for c in itertools.combinations(range(1, s + 1), k))
    return out


def pattern_of(components) -> EmptyPattern:
    """Empty pattern of a tuple of relations."""
    return EmptyPattern(tuple(j + 1 for j, c in enumerate(components) if not c), len(components))


# ---------------------------------------------------------------------------
# structures and relation values


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteStructure:
    """Domain {0..n-1} with named relations (sets of int tuples)."""
    n: int
    relations: Mapping[str, frozenset]
    arities: Mapping[str, int]

    def __post_init__(self):
        if self.n < 1:
            raise StructureError("domain must be nonempty")
        for name, rel in self.relations.items():
            k = self.arities[name]
            for tup in rel:
                if len(tup) != k:
                    raise StructureError(f"{name}: tuple {tup} has wrong arity")
                if any(not 0 <= a < self.n for a in tup):
                    raise StructureError(f"{name}: element out of range in {tup}")

    @classmethod
    def build(cls, n: int, rels: Mapping[str, Iterable], arities: Optional[Mapping[str, int]] = None):
        frozen = {k: frozenset(tuple(t) for t in v) for k, v in rels.items()}
        ar = dict(arities or {})
        for k, v in frozen.items():
            if k not in ar:
                if not v:
                    raise StructureError(f"arity of empty relation {k} unknown")
                ar[k] = len(next(iter(v)))
        return cls(n, frozen, ar)

    @property
    def vocabulary(self) -> dict:
        return dict(self.arities)

    def __getitem__(self, name):
        return self.relations[name]

    def __hash__(self):
        return hash((self.n, tuple(sorted((k, v) for k, v in self.relations.items()))))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteStructure)
            and self.n == other.n
            and dict(self.relations) == dict(other.relations)
            and dict(self.arities) == dict(other.arities)
        )


@dataclass(frozen=True)
class HORelation:
    """A relation of rank 2, 3 or 4 together with its type.

    rank 2: set of int tuples
    rank 3: set of tuples of rank-2 values (frozensets)
    rank 4: set of tuples of rank-3 values
    """
    rank: int
    rtype: RelationType
    tuples: frozenset

    def __post_init__(self):
        if self.rank != self.rtype.order:
            raise ValueError("rank and type order differ")

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)


def so_value(tuples) -> frozenset:
    return frozenset(tuple(t) for t in tuples)


def rel_key(v):
    """Canonical sort key for any relation value."""
    if isinstance(v, frozenset):
        return (1, tuple(sorted(rel_key(t) for t in v)))
    if isinstance(v, tuple):
        return (0, tuple(rel_key(a) for a in v))
    return v


def all_tuples(n: int, k: int) -> list:
    return list(itertools.product(range(n), repeat=k))


def id_tuple(i: int, d: int, n: int) -> tuple:
    """i-th d-tuple over range(n) in lexicographic order."""
    out = []
    for _ in range(d):
        i, r = divmod(i, n)
        out.append(r)
    if i:
        raise OverflowError("identifier space exhausted")
    return tuple(reversed(out))
