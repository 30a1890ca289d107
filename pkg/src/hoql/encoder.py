"""Identifier encodings of rank-3 and rank-4 relations as SO tables.

Flat: one table per empty pattern, rows = identifier + product of the
nonempty components.  Normalized: a small relational database with one
table per level (tuples, TO relations, SO tuples, SO relations) linked by
d-tuple identifiers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .logic import (
    FiniteStructure, HORelation, RelationType, enumerate_patterns,
    id_tuple, pattern_of, rel_key,
)
from .naming import flat_table, rel2_table, rel3_table, t2_table, x3_table, x4_table


class EncodingError(ValueError):
    """Tables that do not describe a relation, or a relation too big to encode."""


class CapacityError(EncodingError):
    """More objects at some level than there are d-tuple identifiers."""


def _ids(objects, d, n, what):
    objs = sorted(set(objects), key=rel_key)
    if len(objs) > n ** d:
        raise CapacityError(f"{len(objs)} {what} but only {n ** d} identifiers of width {d}")
    return {o: id_tuple(i, d, n) for i, o in enumerate(objs)}


def _by_id(rows, d):
    out = {}
    for r in rows:
        out.setdefault(r[:d], []).append(r[d:])
    return out


# ---------------------------------------------------------------------------
# flat encoding of rank-3 relations


@dataclass(frozen=True)
class FlatEncoding:
    rtype: RelationType
    degree: int
    n: int
    tables: tuple  # ((EmptyPattern, frozenset of rows), ...) in pattern order

    def table(self, omega) -> frozenset:
        return dict(self.tables)[omega]

    def valuation(self, base: str) -> dict:
        return {flat_table(base, om): rows for om, rows in self.tables}

    def arities(self, base: str) -> dict:
        rt, d = self.rtype, self.degree
        return {flat_table(base, om): d + sum(rt.components[j - 1] for j in om.complement)
                for om, _ in self.tables}


def encode_flat(R: HORelation, d: int, n: int) -> FlatEncoding:
    if R.rank != 3:
        raise ValueError("encode_flat takes a rank-3 relation")
    ids = _ids(R.tuples, d, n, "tuples")
    tables = {om: set() for om in enumerate_patterns(R.rtype.width)}
    for member, ident in ids.items():
        om = pattern_of(member)
        comps = [sorted(member[j - 1]) for j in om.complement]
        for rows in itertools.product(*comps):
            tables[om].add(ident + tuple(a for row in rows for a in row))
    return FlatEncoding(R.rtype, d, n, tuple((om, frozenset(t)) for om, t in tables.items()))


def flat_from_valuation(valuation: Mapping, base: str, rtype: RelationType, d: int, n: int) -> FlatEncoding:
    return FlatEncoding(rtype, d, n, tuple(
        (om, frozenset(valuation.get(flat_table(base, om), ()))) for om in enumerate_patterns(rtype.width)))


def _split(rest, arities):
    out, i = [], 0
    for a in arities:
        out.append(rest[i:i + a])
        i += a
    return out


def decode_flat(e: FlatEncoding) -> HORelation:
    rt, d = e.rtype, e.degree
    owner = {}
    members = set()
    for om, rows in e.tables:
        ar = [rt.components[j - 1] for j in om.complement]
        for ident, rests in _by_id(rows, d).items():
            if ident in owner:
                raise EncodingError(f"identifier {ident} occurs under patterns {owner[ident]} and {om}")
            owner[ident] = om
            parts = [_split(r, ar) for r in rests]
            comps = [frozenset(p[k] for p in parts) for k in range(len(ar))]
            if len(set(rests)) != _prod(len(c) for c in comps):
                raise EncodingError(f"rows of identifier {ident} are not a cross product")
            member = [frozenset()] * rt.width
            for j, c in zip(om.complement, comps):
                member[j - 1] = c
            members.add(tuple(member))
    return HORelation(3, rt, frozenset(members))


def _prod(xs):
    p = 1
    for x in xs:
        p *= x
    return p


# ---------------------------------------------------------------------------
# normalized encodings


def _uniform_so_arity(rt: RelationType) -> int:
    comps = rt.components if rt.order == 3 else [r for c in rt.components for r in c.components]
    if len(set(comps)) != 1:
        raise ValueError(f"normalized encodings need one SO arity throughout, got type {rt}")
    return comps[0]


@dataclass(frozen=True)
class NormalizedEncoding3:
    """Two-table form of a rank-3 relation: X_{ω2} rows (tuple id, SO ids) and REL2."""
    rtype: RelationType
    degree: int
    n: int
    x3: tuple  # ((EmptyPattern, rows), ...)
    rel2: frozenset

    def valuation(self, base: str) -> dict:
        out = {x3_table(base, om): rows for om, rows in self.x3}
        out[rel2_table(base)] = self.rel2
        return out


@dataclass(frozen=True)
class NormalizedEncoding:
    rtype: RelationType
    degree: int
    n: int
    x4: tuple  # ((EmptyPattern over TO positions, rows), ...)
    rel3: frozenset
    t2: tuple  # ((EmptyPattern over SO positions, rows), ...)
    rel2: frozenset

    def valuation(self, base: str) -> dict:
        out = {x4_table(base, om): rows for om, rows in self.x4}
        out[rel3_table(base)] = self.rel3
        out.update({t2_table(base, om): rows for om, rows in self.t2})
        out[rel2_table(base)] = self.rel2
        return out


def _rel2(so_ids):
    return frozenset(ident + tup for rel, ident in so_ids.items() for tup in rel)


def _pattern_rows(objects, ids, child_ids, s):
    tables = {om: set() for om in enumerate_patterns(s)}
    for obj, ident in ids.items():
        om = pattern_of(obj)
        tables[om].add(ident + tuple(a for j in om.complement for a in child_ids[obj[j - 1]]))
    return tuple((om, frozenset(t)) for om, t in tables.items())


def encode_normalized3(R: HORelation, d: int, n: int) -> NormalizedEncoding3:
    if R.rank != 3:
        raise ValueError("encode_normalized3 takes a rank-3 relation")
    _uniform_so_arity(R.rtype)
    so_rels = {c for m in R.tuples for c in m if c}
    so_ids = _ids(so_rels, d, n, "SO relations")
    tup_ids = _ids(R.tuples, d, n, "tuples")
    x3 = _pattern_rows(R.tuples, tup_ids, so_ids, R.rtype.width)
    return NormalizedEncoding3(R.rtype, d, n, x3, _rel2(so_ids))


def encode_normalized(Q: HORelation, d: int, n: int) -> NormalizedEncoding:
    """Normalized tables for a downward bounded rank-4 relation.

    Raises CapacityError when some level has more distinct objects than
    there are width-d identifiers; this can happen even for downward
    bounded relations, since the bounds limit each TO relation but not the
    number of distinct SO tuples or SO relations across them.
    """
    if Q.rank != 4:
        raise ValueError("encode_normalized takes a rank-4 relation")
    rt = Q.rtype
    if not rt.is_uniform():
        raise ValueError(f"normalized encodings need uniform width, got type {rt}")
    _uniform_so_arity(rt)
    s = rt.width
    bound = n ** d
    to_rels = {c for m in Q.tuples for c in m if c}
    for c in to_rels:
        if len(c) > bound:
            raise EncodingError(f"a TO component has {len(c)} > {bound} tuples")
    so_tuples = {t for c in to_rels for t in c}
    so_rels = {r for t in so_tuples for r in t if r}
    so_ids = _ids(so_rels, d, n, "SO relations")
    t2_ids = _ids(so_tuples, d, n, "SO tuples")
    x3_ids = _ids(to_rels, d, n, "TO relations")
    x3t_ids = _ids(Q.tuples, d, n, "tuples")
    x4 = _pattern_rows(Q.tuples, x3t_ids, x3_ids, s)
    t2 = _pattern_rows(so_tuples, t2_ids, so_ids, s)
    rel3 = frozenset(x3_ids[c] + t2_ids[t] for c in to_rels for t in c)
    return NormalizedEncoding(rt, d, n, x4, rel3, t2, _rel2(so_ids))


def normalized_from_valuation(valuation: Mapping, base: str, rtype: RelationType, d: int, n: int):
    pats = enumerate_patterns(rtype.width)
    get = lambda name: frozenset(valuation.get(name, ()))  # noqa: E731
    return NormalizedEncoding(
        rtype, d, n,
        tuple((om, get(x4_table(base, om))) for om in pats),
        get(rel3_table(base)),
        tuple((om, get(t2_table(base, om))) for om in pats),
        get(rel2_table(base)),
    )


def normalized3_from_valuation(valuation: Mapping, base: str, rtype: RelationType, d: int, n: int):
    pats = enumerate_patterns(rtype.width)
    return NormalizedEncoding3(
        rtype, d, n,
        tuple((om, frozenset(valuation.get(x3_table(base, om), ()))) for om in pats),
        frozenset(valuation.get(rel2_table(base), ())),
    )


def _keyed(tables, d, what):
    """Map id -> (pattern, child ids), checking key and pattern uniqueness."""
    out = {}
    for om, rows in tables:
        for r in rows:
            ident, rest = r[:d], r[d:]
            kids = tuple(rest[i:i + d] for i in range(0, len(rest), d))
            prev = out.get(ident)
            if prev is not None:
                if prev[0] != om:
                    raise EncodingError(f"{what} identifier {ident} occurs under two patterns")
                if prev[1] != kids:
                    raise EncodingError(f"{what} identifier {ident} keys two distinct rows")
            out[ident] = (om, kids)
    return out


def _so_relations(rel2, d):
    out = {}
    for r in rel2:
        out.setdefault(r[:d], set()).add(r[d:])
    return {k: frozenset(v) for k, v in out.items()}


def _assemble(om, kids, s, lookup, what):
    member = [frozenset()] * s
    for j, k in zip(om.complement, kids):
        if k not in lookup:
            raise EncodingError(f"{what} identifier {k} is referenced but has no rows")
        member[j - 1] = lookup[k]
    return tuple(member)


def decode_normalized3(e: NormalizedEncoding3) -> HORelation:
    d, s = e.degree, e.rtype.width
    rows = _keyed(e.x3, d, "tuple")
    so = _so_relations(e.rel2, d)
    used = {k for _, kids in rows.values() for k in kids}
    if set(so) - used:
        raise EncodingError("an SO relation identifier in REL2 is never referenced")
    members = {_assemble(om, kids, s, so, "SO relation") for om, kids in rows.values()}
    return HORelation(3, e.rtype, frozenset(members))


def decode_normalized(e: NormalizedEncoding) -> HORelation:
    """Inverse of encode_normalized; validates referential integrity."""
    d, s = e.degree, e.rtype.width
    tuples4 = _keyed(e.x4, d, "tuple")                      # key uniqueness at the top
    tuples2 = _keyed(e.t2, d, "SO tuple")                   # key uniqueness for SO tuples
    so = _so_relations(e.rel2, d)
    to_rows = {}
    for r in e.rel3:
        to_rows.setdefault(r[:d], set()).add(r[d:])
    referenced3 = {k for _, kids in tuples4.values() for k in kids}
    for k in referenced3:
        if k not in to_rows:
            raise EncodingError(f"TO relation identifier {k} is referenced but absent from REL3")
    if set(to_rows) - referenced3:
        raise EncodingError("a REL3 entry is not referenced by any tuple")
    referenced2t = set()
    for ts in to_rows.values():
        referenced2t |= ts
    for t in referenced2t:
        if t not in tuples2:
            raise EncodingError(f"SO tuple identifier {t} is absent from every TUPLES2 table")
    if set(tuples2) - referenced2t:
        raise EncodingError("a TUPLES2 row is not referenced from REL3")
    referenced2 = {k for _, kids in tuples2.values() for k in kids}
    for k in referenced2:
        if k not in so:
            raise EncodingError(f"SO relation identifier {k} is absent from REL2")
    if set(so) - referenced2:
        raise EncodingError("a REL2 relation is not referenced")
    so_tuple = {t: _assemble(om, kids, s, so, "SO relation") for t, (om, kids) in tuples2.items()}
    to_rel = {k: frozenset(so_tuple[t] for t in ts) for k, ts in to_rows.items()}
    members = {_assemble(om, kids, s, to_rel, "TO relation") for om, kids in tuples4.values()}
    return HORelation(4, e.rtype, frozenset(members))


# ---------------------------------------------------------------------------
# structure-format views


def as_structure(valuation: Mapping, arities: Mapping, n: int) -> FiniteStructure:
    """Tables as named relations, for printing through textio."""
    return FiniteStructure.build(n, {k: valuation[k] for k in arities}, dict(arities))


def flat_table_arities(base, rtype, d) -> dict:
    return {flat_table(base, om): d + sum(rtype.components[j - 1] for j in om.complement)
            for om in enumerate_patterns(rtype.width)}


def normalized_table_arities(base, rtype, d) -> dict:
    s = rtype.width
    r = _uniform_so_arity(rtype)
    pats = enumerate_patterns(s)
    out = {x4_table(base, om): d + d * len(om.complement) for om in pats}
    out[rel3_table(base)] = 2 * d
    out.update({t2_table(base, om): d + d * len(om.complement) for om in pats})
    out[rel2_table(base)] = d + r
    return out


def normalized3_table_arities(base, rtype, d) -> dict:
    r = _uniform_so_arity(rtype)
    out = {x3_table(base, om): d + d * len(om.complement) for om in enumerate_patterns(rtype.width)}
    out[rel2_table(base)] = d + r
    return out


__all__ = [
    "EncodingError", "CapacityError", "FlatEncoding", "NormalizedEncoding", "NormalizedEncoding3",
    "encode_flat", "decode_flat", "encode_normalized", "decode_normalized",
    "encode_normalized3", "decode_normalized3", "flat_from_valuation",
    "normalized_from_valuation", "normalized3_from_valuation", "as_structure",
    "flat_table_arities", "normalized_table_arities", "normalized3_table_arities",
]
