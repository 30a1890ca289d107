"""Prenex normal form and quantifier-alternation counting for SO formulae."""
from __future__ import annotations

from .logic import (
    And, Formula, Implies, Not, Or, QuantFO, QuantHO4P, QuantSO, QuantTOP,
    Schema, dual, free_names, is_pure_so, walk,
)


class FragmentError(ValueError):
    """Formula falls outside the fragment an operation accepts."""


_QUANT_NODES = (QuantFO, QuantSO, QuantTOP, QuantHO4P)


def rename_apart(f: Formula) -> Formula:
    """Give every binder a distinct name that is also distinct from free names."""
    used = set(free_names(f))
    counter = [0]

    def fresh(base):
        while True:
            counter[0] += 1
            cand = f"{base}_{counter[0]}"
            if cand not in used:
                used.add(cand)
                return cand

    def go(g, ren):
        if isinstance(g, _QUANT_NODES):
            new = g.var if g.var not in used else fresh(g.var)
            used.add(new)
            body = go(g.body, {**ren, g.var: new})
            return _rebuild_quant(g, new, body)
        return _rename_leaf(g, ren, go)

    return go(f, {})


def _rename_leaf(g, ren, go):
    from .logic import Atom, Eq, HO4Atom, SOAtom, TOAtom
    r = lambda x: ren.get(x, x)
    if isinstance(g, Atom):
        return Atom(g.symbol, tuple(map(r, g.args)), g.span)
    if isinstance(g, Eq):
        return Eq(r(g.left), r(g.right), g.span)
    if isinstance(g, (SOAtom, TOAtom, HO4Atom)):
        return type(g)(r(g.var), tuple(map(r, g.args)), g.span)
    if isinstance(g, And):
        return And(tuple(go(p, ren) for p in g.parts), g.span)
    if isinstance(g, Or):
        return Or(tuple(go(p, ren) for p in g.parts), g.span)
    if isinstance(g, Not):
        return Not(go(g.body, ren), g.span)
    if isinstance(g, Implies):
        return Implies(go(g.left, ren), go(g.right, ren), g.span)
    if isinstance(g, Schema):
        return g
    raise TypeError(type(g).__name__)


def _rebuild_quant(g, var, body, quant=None):
    q = quant or g.quant
    if isinstance(g, QuantFO):
        return QuantFO(q, var, body, g.sort, g.span)
    if isinstance(g, QuantSO):
        return QuantSO(q, var, g.sorts, body, g.span)
    return type(g)(q, var, g.rtype, g.degree, body, g.span)


def _is_so(entry) -> bool:
    return not isinstance(entry, QuantFO)


def _flip(prefix):
    return [_rebuild_quant(q, q.var, None, dual(q.quant)) for q in prefix]


def _blocks(prefix):
    """Split a prefix into blocks keyed by higher-order polarity (None = FO lead-in)."""
    out = []
    for q in prefix:
        pol = q.quant if _is_so(q) else None
        if pol is None:
            if out:
                out[-1][1].append(q)
            else:
                out.append([None, [q]])
        elif out and out[-1][0] == pol:
            out[-1][1].append(q)
        elif out and out[-1][0] is None and len(out) == 1:
            out[-1][0] = pol
            out[-1][1].append(q)
        else:
            out.append([pol, [q]])
    return out


def _merge(p1, p2):
    """Interleave two independent prefixes keeping each one's internal order,
    greedily minimising higher-order alternations."""
    a, b = _blocks(p1), _blocks(p2)
    out, last = [], None
    while a or b:
        if not a or not b:
            rest = a or b
            out.extend(q for blk in rest for q in blk[1])
            break
        if a[0][0] is None or a[0][0] == last:
            blk = a.pop(0)
        elif b[0][0] is None or b[0][0] == last:
            blk = b.pop(0)
        elif a[0][0] == b[0][0]:
            blk = a.pop(0)
        else:
            blk = a.pop(0) if len(a) >= len(b) else b.pop(0)
        if blk[0] is not None:
            last = blk[0]
        out.extend(blk[1])
    return out


def _pnf(f):
    if isinstance(f, _QUANT_NODES):
        pre, mat = _pnf(f.body)
        return [f] + pre, mat
    if isinstance(f, Not):
        pre, mat = _pnf(f.body)
        return _flip(pre), Not(mat)
    if isinstance(f, (And, Or)):
        pre, mats = [], []
        for p in f.parts:
            pp, m = _pnf(p)
            pre = _merge(pre, pp)
            mats.append(m)
        return pre, type(f)(tuple(mats))
    if isinstance(f, Implies):
        pa, ma = _pnf(f.left)
        pb, mb = _pnf(f.right)
        return _merge(_flip(pa), pb), Implies(ma, mb)
    return [], f


def prenex_normal_form(f: Formula) -> Formula:
    """Equivalent prenex SO formula; bound variables may be renamed."""
    if not is_pure_so(f):
        raise FragmentError("prenex normal form is defined for SO formulae only")
    pre, mat = _pnf(rename_apart(f))
    for q in reversed(pre):
        mat = _rebuild_quant(q, q.var, mat)
    return mat


def split_prefix(f: Formula):
    prefix = []
    while isinstance(f, _QUANT_NODES):
        prefix.append(f)
        f = f.body
    if any(isinstance(g, _QUANT_NODES) for g in walk(f)):
        raise FragmentError("formula is not in prenex form")
    return prefix, f


def alternation_count(f: Formula) -> int:
    """Number of higher-order quantifier blocks in a prenex formula."""
    prefix, _ = split_prefix(f)
    count, last = 0, None
    for q in prefix:
        if _is_so(q) and q.quant != last:
            count += 1
            last = q.quant
    return count


def prefix_class(f: Formula) -> str:
    """'Sigma<n>', 'Pi<n>' or 'FO' for a prenex formula."""
    prefix, _ = split_prefix(f)
    n = alternation_count(f)
    if n == 0:
        return "FO"
    lead = next(q.quant for q in prefix if _is_so(q))
    return ("Sigma" if lead == "exists" else "Pi") + str(n)


def is_prenex(f: Formula) -> bool:
    try:
        split_prefix(f)
    except FragmentError:
        return False
    return True
