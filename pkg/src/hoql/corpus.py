"""Corpus formulae and structures: hypercubes, Formula-Value words, micro schemas.

Formulae are assembled here with small builders; the checked-in text files
under data/ are generated from them (`python -m hoql.corpus --write`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .logic import (
    Atom, Eq, FiniteStructure, Formula, QuantFO, QuantSO, QuantTOP, RelationType,
    Schema, SOAtom, TOAtom, conj, disj, iff, implies, neg, TRUE,
)

DATA = Path(__file__).with_name("data")


# ---------------------------------------------------------------------------
# builders


def A(sym, *args):
    return Atom(sym, tuple(args))


def S(var, *args):
    return SOAtom(var, tuple(args))


def T3(var, *args):
    return TOAtom(var, tuple(args))


def ex(names, body, sort="in"):
    for v in reversed(names.split() if isinstance(names, str) else names):
        body = QuantFO("exists", v, body, sort)
    return body


def fa(names, body, sort="in"):
    for v in reversed(names.split() if isinstance(names, str) else names):
        body = QuantFO("forall", v, body, sort)
    return body


def ex2(var, sorts, body):
    return QuantSO("exists", var, tuple(sorts), body)


def fa2(var, sorts, body):
    return QuantSO("forall", var, tuple(sorts), body)


def neq(a, b):
    return neg(Eq(a, b))


def function(F, dom, cod, u="fu", w="fw", w2="fw2"):
    """F (dom x cod) is a total function."""
    return fa(u, ex(w, conj(S(F, u, w), fa(w2, implies(S(F, u, w2), Eq(w2, w)), cod)), cod), dom)


def injective(F, dom, cod, u="iu", v="iv", w="iw"):
    return fa(f"{u} {v}", fa(w, implies(conj(S(F, u, w), S(F, v, w)), Eq(u, v)), cod), dom)


def surjective(F, dom, cod, u="su", w="sw"):
    return fa(w, ex(u, S(F, u, w), dom), cod)


def bijection(F, dom, cod):
    return conj(function(F, dom, cod), injective(F, dom, cod), surjective(F, dom, cod))


# ---------------------------------------------------------------------------
# structures


def hypercube(k: int) -> FiniteStructure:
    n = 2 ** k
    edges = {(x, y) for x in range(n) for y in range(n) if bin(x ^ y).count("1") == 1}
    return FiniteStructure.build(n, {"E": edges}, {"E": 2})


def graph(n, edges, name="E") -> FiniteStructure:
    sym = set()
    for a, b in edges:
        sym.add((a, b))
        sym.add((b, a))
    return FiniteStructure.build(n, {name: sym}, {name: 2})


def complete_graph(n):
    return graph(n, itertools.combinations(range(n), 2))


def path_graph(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


# Formula-Value words
FV_LABELS = ("P_lp", "P_rp", "P_and", "P_or", "P_not", "P_F", "P_T")
FV_CHARS = {"(": "P_lp", ")": "P_rp", "∧": "P_and", "&": "P_and", "∨": "P_or", "|": "P_or",
            "¬": "P_not", "~": "P_not", "!": "P_not", "F": "P_F", "T": "P_T"}
FV_VOCAB = {"<=": 2, **{p: 1 for p in FV_LABELS}}


def word_model(word: str) -> FiniteStructure:
    """Positions 0..n-1 with a reflexive linear order `<=` and one label each."""
    chars = [c for c in word if not c.isspace()]
    if not chars:
        raise ValueError("empty word")
    rels = {p: set() for p in FV_LABELS}
    for i, c in enumerate(chars):
        if c not in FV_CHARS:
            raise ValueError(f"no label for character {c!r}")
        rels[FV_CHARS[c]].add((i,))
    n = len(chars)
    rels["<="] = {(i, j) for i in range(n) for j in range(n) if i <= j}
    return FiniteStructure.build(n, rels, FV_VOCAB)


def formula_value(word: str) -> bool:
    """Reference evaluator for fully bracketed Boolean words."""
    toks = [c for c in word if not c.isspace()]
    pos = [0]

    def term():
        c = toks[pos[0]]
        pos[0] += 1
        if c == "T":
            return True
        if c == "F":
            return False
        if c in "¬~!":
            return not term()
        if c == "(":
            a = term()
            op = toks[pos[0]]
            if op == ")":
                pos[0] += 1
                return a
            pos[0] += 1
            b = term()
            if toks[pos[0]] != ")":
                raise ValueError("unbalanced word")
            pos[0] += 1
            return (a and b) if op in "∧&" else (a or b)
        raise ValueError(f"unexpected {c!r}")

    v = term()
    if pos[0] != len(toks):
        raise ValueError("trailing symbols")
    return v


# ---------------------------------------------------------------------------
# hypercube schema: stages double, starting from K_2, ending isomorphic to the input

_E1 = "CUR.1"
_N1 = "NEXT.1"


def _iso_to_input(edge_sym="E"):
    return ex2("F", ("cur", "in"), conj(
        bijection("F", "cur", "in"),
        fa("u v", fa("x y", implies(conj(S("F", "u", "x"), S("F", "v", "y")),
                                     iff(A(_E1, "u", "v"), A(edge_sym, "x", "y")))), "cur"),
    ))


def hypercube_schema() -> Schema:
    first = conj(
        ex("a b", conj(neq("a", "b"), fa("z", disj(Eq("z", "a"), Eq("z", "b")), "cur")), "cur"),
        fa("u v", iff(A(_E1, "u", "v"), neq("u", "v")), "cur"),
    )
    last = _iso_to_input()

    def copy_edges(F, G):
        return fa("u v", fa("w1 w2", implies(conj(S(F, "u", "w1"), S(G, "v", "w2")),
                                              iff(A(_N1, "w1", "w2"), A(_E1, "u", "v"))), "next"), "cur")

    matching = fa("u v", fa("w1 w2", implies(
        conj(S("F1", "u", "w1"), S("F2", "v", "w2")),
        conj(iff(A(_N1, "w1", "w2"), Eq("u", "v")), iff(A(_N1, "w2", "w1"), Eq("u", "v")))), "next"), "cur")
    partition = fa("w", iff(ex("u", S("F1", "u", "w"), "cur"), neg(ex("u", S("F2", "u", "w"), "cur"))), "next")
    step = ex2("F1", ("cur", "next"), ex2("F2", ("cur", "next"), conj(
        function("F1", "cur", "next"), injective("F1", "cur", "next"),
        function("F2", "cur", "next"), injective("F2", "cur", "next"),
        partition, copy_edges("F1", "F1"), copy_edges("F2", "F2"), matching,
    )))
    return Schema((2,), 1, 1, first, last, step)


# ---------------------------------------------------------------------------
# Formula-Value schema: stages are words, each step rewrites one redex
#   ~c -> value,  (c & c) -> value,  (c | c) -> value,  (c) -> c
# and the run must end at the one-letter word T.

FV_SIG = (2, 1, 1, 1, 1, 1, 1, 1)
_LEQ, _LP, _RP, _AND, _OR, _NOT, _F, _T = range(1, 9)
_PI = ("<=",) + FV_LABELS


def _cur(k, *a):
    return A(f"CUR.{k}", *a)


def _nxt(k, *a):
    return A(f"NEXT.{k}", *a)


def _succ(a, b):
    return conj(_cur(_LEQ, a, b), neq(a, b),
                fa("z", implies(conj(_cur(_LEQ, a, "z"), _cur(_LEQ, "z", b)),
                                disj(Eq("z", a), Eq("z", b))), "cur"))


def _const(a):
    return disj(_cur(_F, a), _cur(_T, a))


def _result(true_when):
    """The image of the kept position k carries exactly the result label."""
    others = [neg(_nxt(p, "w")) for p in (_LP, _RP, _AND, _OR, _NOT)]
    return fa("w", implies(S("M", "k", "w"), conj(
        iff(_nxt(_T, "w"), true_when), iff(_nxt(_F, "w"), neg(true_when)), *others)), "next")


def _deleted(*names):
    return fa("u", iff(ex("w", S("M", "u", "w"), "next"), neg(disj(*(Eq("u", x) for x in names)))), "cur")


def formula_value_schema() -> Schema:
    first = ex2("F", ("cur", "in"), conj(
        bijection("F", "cur", "in"),
        fa("u v", fa("x y", implies(conj(S("F", "u", "x"), S("F", "v", "y")),
                                     iff(_cur(_LEQ, "u", "v"), A("<=", "x", "y")))), "cur"),
        fa("u", fa("x", implies(S("F", "u", "x"),
                                 conj(*(iff(_cur(p, "u"), A(_PI[p - 1], "x")) for p in range(2, 9))))), "cur"),
    ))
    last = ex("a", conj(fa("z", Eq("z", "a"), "cur"), _cur(_T, "a")), "cur")

    common = conj(
        fa("u", fa("w w2", implies(conj(S("M", "u", "w"), S("M", "u", "w2")), Eq("w", "w2")), "next"), "cur"),
        fa("u v", fa("w", implies(conj(S("M", "u", "w"), S("M", "v", "w")), Eq("u", "v")), "next"), "cur"),
        fa("w", ex("u", S("M", "u", "w"), "cur"), "next"),
        fa("u v", fa("w w2", implies(conj(S("M", "u", "w"), S("M", "v", "w2")),
                                      iff(_cur(_LEQ, "u", "v"), _nxt(_LEQ, "w", "w2"))), "next"), "cur"),
    )
    keep_labels = fa("u", fa("w", implies(conj(S("M", "u", "w"), neq("u", "k")),
                                          conj(*(iff(_cur(p, "u"), _nxt(p, "w")) for p in range(2, 9)))), "next"), "cur")
    r_not = ex("a", conj(_succ("a", "k"), _cur(_NOT, "a"), _const("k"), _deleted("a"), _result(_cur(_F, "k"))), "cur")

    def binary(op, value):
        return ex("l o c r", conj(
            _succ("l", "k"), _succ("k", "o"), _succ("o", "c"), _succ("c", "r"),
            _cur(_LP, "l"), _cur(op, "o"), _cur(_RP, "r"), _const("k"), _const("c"),
            _deleted("l", "o", "c", "r"), _result(value)), "cur")

    r_and = binary(_AND, conj(_cur(_T, "k"), _cur(_T, "c")))
    r_or = binary(_OR, disj(_cur(_T, "k"), _cur(_T, "c")))
    r_par = ex("l r", conj(_succ("l", "k"), _succ("k", "r"), _cur(_LP, "l"), _cur(_RP, "r"), _const("k"),
                           _deleted("l", "r"), _result(_cur(_T, "k"))), "cur")
    step = ex2("M", ("cur", "next"), conj(
        common, ex("k", conj(keep_labels, disj(r_not, r_and, r_or, r_par)), "cur")))
    return Schema(FV_SIG, 1, 1, first, last, step)


# ---------------------------------------------------------------------------
# TO^P renderings: a stage is a tuple (V, S_1..S_s) of SO relations over the
# input domain (V its elements), C collects the stages and O links each stage
# to its predecessor.  Both corpus schemas change the stage size strictly at
# every step, so backward O-chains cannot cycle and must end at a first stage.


def _stage_vars(prefix, sig):
    return (f"{prefix}V",) + tuple(f"{prefix}{k}" for k in range(1, len(sig) + 1))


def _relativize_stage(f, cur, nxt):
    """Replace CUR/NEXT atoms by stage relations and bound cur/next variables
    by membership in the stage domains."""
    from .logic import And, Implies, Not, Or, stage_symbol
    doms = {"cur": cur[0] if cur else None, "next": nxt[0] if nxt else None}

    def go(g):
        if isinstance(g, Atom):
            st = stage_symbol(g.symbol)
            if st is None:
                return g
            kind, k = st
            return S((cur if kind == "cur" else nxt)[k], *g.args)
        if isinstance(g, QuantFO):
            body = go(g.body)
            if g.sort == "in":
                return QuantFO(g.quant, g.var, body)
            guard = S(doms[g.sort], g.var)
            if g.quant == "exists":
                return QuantFO("exists", g.var, conj(guard, body))
            return QuantFO("forall", g.var, implies(guard, body))
        if isinstance(g, QuantSO):
            return QuantSO(g.quant, g.var, ("in",) * len(g.sorts), go(g.body))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, And):
            return And(tuple(go(p) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(go(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        return g

    return go(f)


def _ex2_all(names, arities, body, quant="exists"):
    for v, a in reversed(list(zip(names, arities))):
        body = QuantSO(quant, v, ("in",) * a, body)
    return body


def schema_as_top(schema: Schema) -> "QuantTOP":
    """TO^P sentence equivalent (on the corpus) to a t=1 schema."""
    if schema.t != 1:
        raise ValueError("stage-chain renderings need t = 1")
    sig = schema.sig
    ar = (1,) + tuple(sig)
    G, H = _stage_vars("g", sig), _stage_vars("h", sig)
    ctype = RelationType.to(*ar)
    otype = RelationType.to(*(ar + ar))

    def wf(st):
        parts = []
        for rel, a in zip(st[1:], sig):
            xs = [f"wf{i}" for i in range(1, a + 1)]
            parts.append(fa(xs, implies(S(rel, *xs), conj(*(S(st[0], x) for x in xs)))))
        return conj(*parts)

    linked = _ex2_all(G + H, ar + ar, implies(T3("O", *(H + G)), conj(T3("C", *H), T3("C", *G))), "forall")
    chain = _ex2_all(G, ar, implies(T3("C", *G), conj(
        wf(G),
        disj(_relativize_stage(schema.first, G, None),
             _ex2_all(H, ar, conj(T3("O", *(H + G)), _relativize_stage(schema.step, H, G)))),
    )), "forall")
    final = _ex2_all(G, ar, conj(T3("C", *G), _relativize_stage(schema.last, G, None)))
    return QuantTOP("exists", "C", ctype, schema.d, QuantTOP("exists", "O", otype, 2 * schema.d,
                                                             conj(linked, chain, final)))


def hypercube_top():
    return schema_as_top(hypercube_schema())


def formula_value_top():
    return schema_as_top(formula_value_schema())


# ---------------------------------------------------------------------------
# micro schemas: one unary stage relation, d = t = 1, input vocabulary {P:1}

MICRO_VOCAB = {"P": 1}


def _exactly(k, sort="cur"):
    names = [f"e{i}" for i in range(k)]
    distinct = conj(*(neq(a, b) for a, b in itertools.combinations(names, 2)))
    return ex(names, conj(distinct, fa("z", disj(*(Eq("z", a) for a in names)), sort)), sort)


def _at_least(k, sort="cur"):
    names = [f"e{i}" for i in range(k)]
    return ex(names, conj(*(neq(a, b) for a, b in itertools.combinations(names, 2))), sort)


def _labelled_copy():
    """The stage is (dom, P) up to isomorphism."""
    return ex2("F", ("cur", "in"), conj(
        bijection("F", "cur", "in"),
        fa("u", fa("x", implies(S("F", "u", "x"), iff(_cur(1, "u"), A("P", "x")))), "cur")))


def _grow():
    return ex2("G", ("cur", "next"), conj(function("G", "cur", "next"), injective("G", "cur", "next"),
                                          neg(surjective("G", "cur", "next"))))


def _shrink_keep():
    return ex2("G", ("next", "cur"), conj(
        function("G", "next", "cur"), injective("G", "next", "cur"), neg(surjective("G", "next", "cur")),
        fa("w", fa("u", implies(S("G", "w", "u"), iff(_nxt(1, "w"), _cur(1, "u"))), "cur"), "next")))


def micro_schemas() -> dict:
    one_p = conj(_exactly(1), ex("z", _cur(1, "z"), "cur"))
    return {
        "grow": Schema((1,), 1, 1, _exactly(1), _exactly(2), _grow()),
        "too-big": Schema((1,), 1, 1, _at_least(3), TRUE, TRUE),
        "empty-first": Schema((1,), 1, 1, fa("z", disj(), "cur"), TRUE, TRUE),
        "fill-labels": Schema((1,), 1, 1, _labelled_copy(), fa("z", _cur(1, "z"), "cur"),
                              ex2("G", ("cur", "next"), conj(
                                  bijection("G", "cur", "next"),
                                  fa("u", fa("w", implies(conj(S("G", "u", "w"), _cur(1, "u")), _nxt(1, "w")), "next"),
                                     "cur")))),
        "shrink-to-p": Schema((1,), 1, 1, _labelled_copy(), one_p, _shrink_keep()),
    }


# ---------------------------------------------------------------------------
# corpus items and the data directory


def _hypercube_oracle(g: FiniteStructure) -> bool:
    """Brute-force isomorphism test against Q_k for n = 2^k (small n only)."""
    n = g.n
    k = n.bit_length() - 1
    if n < 2 or 1 << k != n:
        return False
    edges = {frozenset(e) for e in g["E"] if e[0] != e[1]}
    if len(edges) * 2 != len(g["E"]) or any((b, a) not in g["E"] for a, b in g["E"]):
        return False
    cube = {frozenset(e) for e in hypercube(k)["E"]}
    if len(edges) != len(cube):
        return False
    for perm in itertools.permutations(range(n)):
        if all(frozenset(perm[v] for v in e) in cube for e in edges):
            return True
    return False


@dataclass
class CorpusItem:
    """A corpus formula with labelled structures and expected verdicts.

    `oracle` names the independent check the expectations were computed
    with; `expected` maps structure name to verdict.
    """
    name: str
    formula: Formula
    structures: dict
    expected: dict
    oracle: str
    top: Optional[Formula] = None

    @property
    def positives(self):
        return [k for k, v in self.expected.items() if v]

    @property
    def negatives(self):
        return [k for k, v in self.expected.items() if not v]


HYPERCUBE_STRUCTURES = {
    "Q1": lambda: hypercube(1), "Q2": lambda: hypercube(2), "Q3": lambda: hypercube(3),
    "K3": lambda: complete_graph(3), "P3": lambda: path_graph(3), "C6": lambda: cycle_graph(6),
}
FV_WORDS = {"T": "T", "T-and-not-F": "(T∧(¬F))", "paren-T": "((T))", "F": "F", "T-and-F": "(T∧F)"}


def corpus_items() -> dict:
    hs = {k: f() for k, f in HYPERCUBE_STRUCTURES.items()}
    fs = {k: word_model(w) for k, w in FV_WORDS.items()}
    return {
        "hypercube": CorpusItem("hypercube", hypercube_schema(), hs,
                                {k: _hypercube_oracle(s) for k, s in hs.items()},
                                "brute-force isomorphism with Q_k", hypercube_top()),
        "formula-value": CorpusItem("formula-value", formula_value_schema(), fs,
                                    {k: formula_value(w) for k, w in FV_WORDS.items()},
                                    "recursive-descent Boolean evaluation", formula_value_top()),
    }


def data_files() -> dict:
    """{relative path: text} for everything under data/."""
    from .textio import print_formula, print_structure
    out = {}
    for name, item in corpus_items().items():
        out[f"{name}.schema"] = print_formula(item.formula, pretty=True)
        out[f"{name}.top"] = print_formula(item.top, pretty=True)
        for sname, s in item.structures.items():
            out[f"structures/{name}/{sname}.struct"] = print_structure(s)
        out[f"{name}.expected"] = "".join(f"{k} {str(v).lower()}\n" for k, v in item.expected.items())
    for name, sch in micro_schemas().items():
        out[f"micro/{name}.schema"] = print_formula(sch, pretty=True)
    return out


def write_data(root: Path = DATA) -> list:
    written = []
    for rel, text in data_files().items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
        written.append(p)
    return written


def load_item(name: str, root: Path = DATA) -> CorpusItem:
    """Corpus item read back from the data directory."""
    from .textio import read_formula, read_structure
    expected = {}
    for line in (root / f"{name}.expected").read_text(encoding="utf-8").splitlines():
        if line.strip():
            k, v = line.split()
            expected[k] = v == "true"
    structures = {k: read_structure(root / "structures" / name / f"{k}.struct") for k in expected}
    return CorpusItem(name, read_formula(root / f"{name}.schema"), structures, expected,
                      "stored", read_formula(root / f"{name}.top"))


if __name__ == "__main__":
    import sys
    if sys.argv[1:] == ["--write"]:
        for p in write_data():
            print(p)
    else:
        print("usage: python -m hoql.corpus --write", file=sys.stderr)
        sys.exit(2)
