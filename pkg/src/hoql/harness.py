"""Equivalence testing: structures, random formulae, dual evaluation, witnesses.

Translations are checked against the evaluator on every structure in a
family (dual evaluation), or, where the SO side is too large to decide, by
checking a witness assignment for its leading existential block.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

from .encoder import encode_flat
from .evaluator import (
    BudgetExceeded, EvalBudget, count_bounded, evaluate, find_witness,
)
from .logic import (
    And, Eq, FiniteStructure, Formula, HO4Atom, HORelation, Implies, Not, Or,
    QuantFO, QuantHO4P, QuantSO, QuantTOP, RelationType, Schema, SOAtom, TOAtom,
    Atom, conj, disj, enumerate_patterns, id_tuple, implies, neg,
)
from .translate_ho4 import translate_ho4
from .translate_schema import translate_schema
from .naming import names_in
from .translate_top import TranslationContext, _tr as _tr_top, disjointness, translate_top

# ---------------------------------------------------------------------------
# structures


def count_structures(vocabulary: Mapping[str, int], n: int) -> int:
    return math.prod(2 ** (n ** a) for a in vocabulary.values())


def enumerate_structures(vocabulary: Mapping[str, int], max_n: int, min_n: int = 1,
                         cap: int = 1 << 20) -> Iterator[FiniteStructure]:
    """Every labelled structure with min_n <= n <= max_n, in a fixed order."""
    names = sorted(vocabulary)
    for n in range(min_n, max_n + 1):
        total = count_structures(vocabulary, n)
        if total > cap:
            raise BudgetExceeded(f"{total} structures of size {n} exceed the cap {cap}")
        spaces = []
        for name in names:
            pos = list(itertools.product(range(n), repeat=vocabulary[name]))
            spaces.append([frozenset(p for i, p in enumerate(pos) if m >> i & 1) for m in range(1 << len(pos))])
        for rels in itertools.product(*spaces):
            yield FiniteStructure(n, dict(zip(names, rels)), {k: vocabulary[k] for k in names})


# ---------------------------------------------------------------------------
# random formulae


@dataclass(frozen=True)
class TopFamily:
    max_width: int = 2
    max_arity: int = 2
    degree: int = 1
    max_to: int = 2
    fo_depth: int = 2
    vocabulary: tuple = (("P", 1), ("E", 2))
    max_n: int = 2
    max_cost: float = 2e6


@dataclass(frozen=True)
class Ho4Family:
    degree: int = 1
    fo_depth: int = 2
    vocabulary: tuple = (("P", 1),)
    max_n: int = 2
    max_cost: float = 2e6


def _eval_cost(f, n, d_scope=None) -> float:
    """Rough count of evaluator steps for plain enumeration at size n."""
    if isinstance(f, (QuantTOP, QuantHO4P)):
        return count_bounded(n, f.rtype, f.degree) * (1 + _eval_cost(f.body, n))
    if isinstance(f, QuantSO):
        return 2 ** (n ** f.arity) * (1 + _eval_cost(f.body, n))
    if isinstance(f, QuantFO):
        return n * (1 + _eval_cost(f.body, n))
    if isinstance(f, (And, Or)):
        return 1 + sum(_eval_cost(p, n) for p in f.parts)
    if isinstance(f, Not):
        return 1 + _eval_cost(f.body, n)
    if isinstance(f, Implies):
        return 1 + _eval_cost(f.left, n) + _eval_cost(f.right, n)
    return 1


class _Gen:
    def __init__(self, rng, vocabulary, fo_depth):
        self.rng = rng
        self.vocab = list(vocabulary)
        self.fo_depth = fo_depth
        self.k = 0

    def fresh(self, prefix):
        self.k += 1
        return f"{prefix}{self.k}"

    def literal(self, fo, so):
        """An atom over the FO variables in scope, possibly negated."""
        rng = self.rng
        options = []
        for X, a in so:
            if len(fo) >= 1:
                options.append(lambda X=X, a=a: SOAtom(X, tuple(rng.choice(fo) for _ in range(a))))
        for P, a in self.vocab:
            if fo:
                options.append(lambda P=P, a=a: Atom(P, tuple(rng.choice(fo) for _ in range(a))))
        if len(fo) >= 2:
            options.append(lambda: Eq(*rng.sample(fo, 2)))
        if not options:
            return rng.choice([conj(), disj()])
        g = rng.choice(options)()
        return neg(g) if rng.random() < 0.35 else g

    def fo_formula(self, fo, so, depth):
        """FO formula with at most `depth` nested quantifiers below the scope."""
        rng = self.rng
        r = rng.random()
        if depth > 0 and (not fo or r < 0.55):
            v = self.fresh("x")
            q = rng.choice(("exists", "forall"))
            return QuantFO(q, v, self.fo_formula(fo + [v], so, depth - 1))
        if r < 0.8 or not fo:
            return self.literal(fo, so) if fo else self.rng.choice([conj(), disj()])
        a, b = self.literal(fo, so), self.literal(fo, so)
        return rng.choice((conj, disj))(a, b)


def _top_block(gen, to_vars, so_scope):
    """SO quantifiers over arguments for one TO atom, with an FO side condition."""
    rng = gen.rng
    C, rt = rng.choice(to_vars)
    xs = [(gen.fresh("X"), a) for a in rt.components]
    atom = TOAtom(C, tuple(x for x, _ in xs))
    same = [v for v in to_vars if v[1] == rt and v[0] != C]
    if same and rng.random() < 0.4:
        D = rng.choice(same)[0]
        atom = rng.choice((conj, disj))(atom, neg(TOAtom(D, atom.args)))
    if rng.random() < 0.3:
        atom = neg(atom)
    side = gen.fo_formula([], so_scope + xs, gen.fo_depth)
    q = rng.choice(("exists", "forall"))
    body = conj(atom, side) if q == "exists" else implies(side, atom)
    for x, a in reversed(xs):
        body = QuantSO(q, x, ("in",) * a, body)
    return body


def _combine(gen, parts):
    rng = gen.rng
    f = parts[0]
    for p in parts[1:]:
        f = rng.choice((conj, disj, implies))(f, p)
    return f


def _random_type(rng, fam):
    w = rng.randint(1, fam.max_width)
    return RelationType.to(*(rng.randint(1, fam.max_arity) for _ in range(w)))


def _gen_top(rng, fam: TopFamily):
    gen = _Gen(rng, fam.vocabulary, fam.fo_depth)
    k = rng.randint(1, fam.max_to) if fam.max_to else 0
    if k == 0:
        return gen.fo_formula([], [], fam.fo_depth)
    quants = [(rng.choice(("exists", "forall")), f"C{i + 1}", _random_type(rng, fam)) for i in range(k)]

    def build(i, scope):
        if i == len(quants):
            parts = [_top_block(gen, scope, []) for _ in range(rng.randint(1, 2))]
            return _combine(gen, parts)
        q, C, rt = quants[i]
        inner = build(i + 1, scope + [(C, rt)])
        if i > 0 and rng.random() < 0.4:
            # leave some atoms of outer variables outside the inner quantifier
            inner = _combine(gen, [_top_block(gen, scope, []), QuantTOP(q, C, rt, fam.degree, inner)])
            return inner
        return QuantTOP(q, C, rt, fam.degree, inner)

    f = build(0, [])
    return f


def random_top_formula(seed: int, family: TopFamily = TopFamily()) -> Formula:
    """A closed TO^P sentence of the family, reproducible from the seed.

    Candidates whose plain evaluation at max_n would exceed max_cost steps
    are redrawn from the same generator stream.
    """
    rng = random.Random(seed)
    for _ in range(10_000):
        f = _gen_top(rng, family)
        if _eval_cost(f, family.max_n) <= family.max_cost:
            return f
    raise RuntimeError("no formula under the cost cap")


def random_prenex_top(seed: int, blocks: int, family: TopFamily = TopFamily()) -> Formula:
    """Prenex TO^P sentence whose higher-order prefix has `blocks` blocks,
    starting existentially, followed by FO quantifiers and a matrix."""
    rng = random.Random(seed)
    gen = _Gen(rng, family.vocabulary, family.fo_depth)
    prefix = []  # (kind, quant, var, type)
    to_vars, so_vars = [], []
    for b in range(blocks):
        q = "exists" if b % 2 == 0 else "forall"
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.5 or (b == blocks - 1 and not to_vars):
                rt = _random_type(rng, family)
                v = f"C{len(to_vars) + 1}"
                prefix.append(("to", q, v, rt))
                to_vars.append((v, rt))
            else:
                a = rng.randint(1, family.max_arity)
                v = f"X{len(so_vars) + 1}"
                prefix.append(("so", q, v, a))
                so_vars.append((v, a))
    # every TO atom needs SO arguments of matching arity: add them to the last block
    need = {}
    for _, rt in to_vars:
        for a in rt.components:
            need[a] = need.get(a, 0)
    last_q = prefix[-1][1]
    for a in sorted(need):
        if not any(sa == a for _, sa in so_vars):
            v = f"X{len(so_vars) + 1}"
            prefix.append(("so", last_q, v, a))
            so_vars.append((v, a))
    fo = [gen.fresh("x") for _ in range(rng.randint(0, family.fo_depth))]
    lits = []
    for _ in range(rng.randint(2, 4)):
        if to_vars and rng.random() < 0.6:
            C, rt = rng.choice(to_vars)
            args = tuple(rng.choice([v for v, a in so_vars if a == r]) for r in rt.components)
            lit = TOAtom(C, args)
            lits.append(neg(lit) if rng.random() < 0.3 else lit)
        else:
            lits.append(gen.literal(fo, so_vars) if fo else TOAtom(*_any_to_atom(rng, to_vars, so_vars)))
    matrix = _combine(gen, lits)
    for v in reversed(fo):
        matrix = QuantFO(rng.choice(("exists", "forall")), v, matrix)
    for kind, q, v, t in reversed(prefix):
        if kind == "to":
            matrix = QuantTOP(q, v, t, family.degree, matrix)
        else:
            matrix = QuantSO(q, v, ("in",) * t, matrix)
    return matrix


def _any_to_atom(rng, to_vars, so_vars):
    C, rt = rng.choice(to_vars)
    return C, tuple(rng.choice([v for v, a in so_vars if a == r]) for r in rt.components)


def _gen_ho4(rng, fam: Ho4Family):
    """s = 1, SO arity 1: one HO4 quantifier over type ((1)), at most one TO
    quantifier of type (1), SO arguments and FO side conditions."""
    gen = _Gen(rng, fam.vocabulary, fam.fo_depth)
    ho4 = RelationType.ho4((1,))
    to1 = RelationType.to(1)
    q4 = rng.choice(("exists", "forall"))
    use_to = rng.random() < 0.85

    def to_part():
        # conditions on C through its members
        return _top_block(gen, [("C", to1)], [])

    def q_part():
        lit = HO4Atom("Q", ("C",))
        return neg(lit) if rng.random() < 0.3 else lit

    if use_to:
        q3 = rng.choice(("exists", "forall"))
        parts = [q_part()] + [to_part() for _ in range(rng.randint(1, 2))]
        rng.shuffle(parts)
        inner = QuantTOP(q3, "C", to1, fam.degree, _combine(gen, parts))
        if rng.random() < 0.3:
            inner = _combine(gen, [inner, gen.fo_formula([], [], fam.fo_depth)])
    else:
        inner = gen.fo_formula([], [], fam.fo_depth)
    return QuantHO4P(q4, "Q", ho4, fam.degree, inner)


def random_ho4_formula(seed: int, family: Ho4Family = Ho4Family()) -> Formula:
    rng = random.Random(seed)
    for _ in range(10_000):
        f = _gen_ho4(rng, family)
        if _eval_cost(f, family.max_n) <= family.max_cost:
            return f
    raise RuntimeError("no formula under the cost cap")


def random_formula(family, seed: int) -> Formula:
    if isinstance(family, Ho4Family):
        return random_ho4_formula(seed, family)
    return random_top_formula(seed, family)


# ---------------------------------------------------------------------------
# dual evaluation


@dataclass
class Verdict:
    index: int
    structure: FiniteStructure
    status: str  # agree | disagree | budget-exceeded
    original: Optional[bool] = None
    translated: Optional[bool] = None
    detail: str = ""


@dataclass
class EquivalenceReport:
    formula_id: str
    verdicts: list = field(default_factory=list)
    wall: float = 0.0

    def _count(self, status):
        return sum(v.status == status for v in self.verdicts)

    @property
    def agree(self):
        return self._count("agree")

    @property
    def disagree(self):
        return self._count("disagree")

    @property
    def budget(self):
        return self._count("budget-exceeded")

    @property
    def ok(self):
        return self.disagree == 0 and self.budget == 0

    def disagreements(self):
        return [v for v in self.verdicts if v.status == "disagree"]

    def summary(self) -> dict:
        return {"formula": self.formula_id, "structures": len(self.verdicts), "agree": self.agree,
                "disagree": self.disagree, "budget_exceeded": self.budget, "seconds": round(self.wall, 3)}

    def render(self) -> str:
        from .textio import print_structure
        lines = [f"{self.formula_id}: {len(self.verdicts)} structures, {self.agree} agree, "
                 f"{self.disagree} disagree, {self.budget} budget-exceeded"]
        for v in self.verdicts:
            if v.status == "disagree":
                lines.append(f"  disagree on structure {v.index}: original {v.original}, translated {v.translated}")
                lines.extend("    " + ln for ln in print_structure(v.structure).splitlines())
            elif v.status == "budget-exceeded":
                lines.append(f"  budget exceeded on structure {v.index}: {v.detail}")
        return "\n".join(lines) + "\n"


def check_equivalence(original: Formula, translated: Formula, structures: Iterable[FiniteStructure],
                      budget: Optional[EvalBudget] = None, formula_id: str = "") -> EquivalenceReport:
    """Evaluate both formulae on every structure and record each verdict."""
    t0 = time.monotonic()
    rep = EquivalenceReport(formula_id)
    for i, A in enumerate(structures):
        try:
            a = evaluate(A, original, budget=budget)
            b = evaluate(A, translated, budget=budget)
        except BudgetExceeded as e:
            rep.verdicts.append(Verdict(i, A, "budget-exceeded", detail=str(e)))
            continue
        rep.verdicts.append(Verdict(i, A, "agree" if a == b else "disagree", a, b))
    rep.wall = time.monotonic() - t0
    return rep


def leading_block(f: Formula):
    """(variables with arities, body) of the outermost existential SO block."""
    block = []
    while isinstance(f, QuantSO) and f.quant == "exists":
        block.append((f.var, f.arity))
        f = f.body
    return block, f


def check_witness(translated: Formula, assignment: Mapping[str, frozenset], structure: FiniteStructure,
                  budget: Optional[EvalBudget] = None) -> bool:
    """Truth of the translated formula's body with its leading existential
    block fixed to `assignment` (inner quantifiers are still decided)."""
    block, body = leading_block(translated)
    names = {v for v, _ in block}
    if set(assignment) != names:
        missing, extra = names - set(assignment), set(assignment) - names
        raise ValueError(f"assignment does not match the leading block (missing {sorted(missing)}, "
                         f"extra {sorted(extra)})")
    for v, a in block:
        for t in assignment[v]:
            if len(t) != a or any(not 0 <= e < structure.n for e in t):
                raise ValueError(f"bad tuple {t} for {v} of arity {a}")
    return evaluate(structure, body, {k: frozenset(v) for k, v in assignment.items()}, budget=budget)


def schema_witness_assignment(translated: Formula, node: Schema, stages: list, n: int) -> dict:
    """Tables for the leading block of translate_schema(node) describing a
    stage sequence: stage i gets identifier id_i and its element e becomes
    the tuple id_i + id(e)."""
    block, _ = leading_block(translated)
    s = len(node.sig)
    names = [v for v, _ in block[: s + 6]]
    C, Es, ST, EST, R, SB = names[0], names[1:1 + s], names[1 + s], names[2 + s], names[3 + s], names[4 + s]
    d, t = node.d, node.t
    val = {C: set(), ST: set(), EST: set(), R: set(), SB: set(), **{e: set() for e in Es}}
    if len(stages) > n ** d:
        raise ValueError("more stages than identifiers")
    ids = [id_tuple(i, d, n) for i in range(len(stages))]
    for i, st in enumerate(stages):
        elem = [ids[i] + id_tuple(e, t, n) for e in range(st.size)]
        val[ST].add(ids[i])
        if i + 1 < len(stages):
            val[EST].add(ids[i] + ids[i + 1])
        for e, u in enumerate(elem):
            val[C].add(u)
            val[R].add(ids[i] + u)
            val[SB].add(ids[i] + u + id_tuple(e, t, n))
        for k, rel in enumerate(st.rels):
            for tup in rel:
                val[Es[k]].add(tuple(x for a in tup for x in elem[a]))
    return {k: frozenset(v) for k, v in val.items()}


def certify_schema(structure: FiniteStructure, node: Schema, budget: Optional[EvalBudget] = None,
                   translated: Optional[Formula] = None):
    """(schema verdict, witness check result or None when there is no run)."""
    from .stages import schema_witness
    stages = schema_witness(structure, node, budget)
    if stages is None:
        return False, None
    so = translated if translated is not None else translate_schema(node)
    assignment = schema_witness_assignment(so, node, stages, structure.n)
    return True, check_witness(so, assignment, structure, budget)


def top_witness_assignment(translated: Formula, witness: HORelation, d: int, n: int) -> dict:
    """encode_flat of a witness for the leading TO quantifier, named like the
    leading pattern tables of translate_top."""
    block, _ = leading_block(translated)
    pats = enumerate_patterns(witness.rtype.width)
    enc = dict(encode_flat(witness, d, n).tables)
    return {v: enc[om] for (v, _), om in zip(block[: len(pats)], pats)}


def top_witness_coherent(formula: QuantTOP, structure: FiniteStructure, budget=None) -> Optional[bool]:
    """If the evaluator finds a witness for the leading ∃ TO quantifier,
    check that its flat encoding satisfies the translated body."""
    w = find_witness(structure, formula, budget)
    if w is None:
        return None
    so = translate_top(formula)
    R = HORelation(3, formula.rtype, frozenset(w))
    return check_witness(so, top_witness_assignment(so, R, formula.degree, structure.n), structure, budget)



def top_chain_witness_check(formula: Formula, witnesses: Mapping[str, HORelation], structure: FiniteStructure,
                            budget: Optional[EvalBudget] = None) -> bool:
    """Fix every leading ∃ TO quantifier of `formula` to the flat encoding of
    its witness and evaluate the emitted disjointness constraints and body."""
    chain, f = [], formula
    while isinstance(f, QuantTOP) and f.quant == "exists":
        chain.append(f)
        f = f.body
    if set(witnesses) != {q.var for q in chain}:
        raise ValueError(f"witnesses for {sorted(witnesses)} but the leading block binds "
                         f"{[q.var for q in chain]}")
    ctx = TranslationContext.for_variables({q.var: (q.rtype, q.degree) for q in chain}, used=names_in(formula))
    body = _tr_top(f, ctx)
    valuation = {}
    for q in chain:
        b = ctx.scope[q.var]
        valuation.update(encode_flat(witnesses[q.var], q.degree, structure.n).valuation(b.base))
    constraints = [disjointness(ctx, ctx.scope[q.var]) for q in chain]
    return evaluate(structure, conj(*constraints, body), valuation, budget=budget)


def stage_chain_witness(node: Schema, stages: list) -> dict:
    """C and O witnesses for schema_as_top(node) from a stage sequence: each
    stage becomes (domain, relations...) over the input elements."""
    ctype = RelationType.to(1, *node.sig)
    tuples = [(frozenset((e,) for e in range(st.size)),) + tuple(st.rels) for st in stages]
    C = HORelation(3, ctype, frozenset(tuples))
    O = HORelation(3, RelationType.to(*(ctype.components * 2)),
                   frozenset(a + b for a, b in zip(tuples, tuples[1:])))
    return {"C": C, "O": O}

# ---------------------------------------------------------------------------
# translators and the mutation catalogue


TRANSLATORS: dict = {
    "top": translate_top,
    "schema": translate_schema,
    "ho4": translate_ho4,
}


def translate(mode: str, f: Formula, mutation: Optional[str] = None, **kw) -> Formula:
    if mode not in TRANSLATORS:
        raise ValueError(f"unknown mode {mode}")
    return TRANSLATORS[mode](f, mutation=mutation, **kw)


@dataclass(frozen=True)
class Mutation:
    name: str
    mode: str
    description: str
    probes: tuple  # (formula builder or text, vocabulary, max_n)


def _p(text):
    from .textio import parse_formula
    return lambda: parse_formula(text)


def _micro(name):
    from .corpus import micro_schemas
    return lambda: micro_schemas()[name]


_NONEMPTY1 = "(exists1 (e) (atom2 {X} e))"
_EMPTY1 = "(not (exists1 (e) (atom2 {X} e)))"

_TOP_TWO_KINDS = _p(
    "(exists3p (C (1) 1) (and (exists2 (X 1) (and (atom3 C X) " + _EMPTY1.format(X="X") + "))"
    " (exists2 (Y 1) (and (atom3 C Y) " + _NONEMPTY1.format(X="Y") + "))))")
_TOP_ALL_NONEMPTY = _p(
    "(exists3p (C (1) 1) (forall2 (X 1) (and (implies (atom3 C X) " + _NONEMPTY1.format(X="X") + ")"
    " (implies " + _NONEMPTY1.format(X="X") + " (atom3 C X)))))")
_TOP_SEPARATE = _p(
    "(exists3p (C (1) 1) (exists2 (X 1) (exists2 (Y 1) (and (atom3 C X) (not (atom3 C Y)) "
    + _NONEMPTY1.format(X="X") + " " + _NONEMPTY1.format(X="Y") + "))))")
_TOP_EMPTY_NOT_ALL = _p(
    "(exists3p (C (1) 1) (and (exists2 (X 1) (and (atom3 C X) " + _EMPTY1.format(X="X") + "))"
    " (exists2 (Y 1) (and (not (atom3 C Y)) " + _NONEMPTY1.format(X="Y") + "))))")

_SO_NE = "(exists1 (e) (atom2 {X} e))"
_TO_EMPTY = "(forall2 (Z 1) (not (atom3 {C} Z)))"
_TO_NE = "(exists2 (Z 1) (atom3 {C} Z))"
_TO_DIFF = "(exists2 (Z 1) (or (and (atom3 {C} Z) (not (atom3 {D} Z))) (and (atom3 {D} Z) (not (atom3 {C} Z)))))"
_TO_TWO = ("(exists2 (Z 1) (exists2 (Z2 1) (and (atom3 {C} Z) (atom3 {C} Z2) "
           "(exists1 (e) (or (and (atom2 Z e) (not (atom2 Z2 e))) (and (atom2 Z2 e) (not (atom2 Z e))))))))")

_HO4_EMPTY_AND_NONEMPTY = _p(
    "(exists4p (Q ((1)) 1) (and (exists3p (C (1) 1) (and (atom4 Q C) " + _TO_EMPTY.format(C="C") + "))"
    " (exists3p (D (1) 1) (and (atom4 Q D) " + _TO_NE.format(C="D") + "))))")
_HO4_THREE = _p(
    "(exists4p (Q ((1)) 1) (and (exists3p (C (1) 1) (and (atom4 Q C) " + _TO_EMPTY.format(C="C") + "))"
    " (exists3p (D (1) 1) (exists3p (E (1) 1) (and (atom4 Q D) (atom4 Q E) "
    + _TO_NE.format(C="D") + " " + _TO_NE.format(C="E") + " " + _TO_DIFF.format(C="D", D="E") + ")))))")
_HO4_ONLY_PAIRS = _p(
    "(exists4p (Q ((1)) 1) (and (exists3p (C (1) 1) (and (atom4 Q C) " + _TO_TWO.format(C="C") + "))"
    " (forall3p (D (1) 1) (implies (atom4 Q D) " + _TO_TWO.format(C="D") + "))))")
_HO4_SOME_NOT_ALL = _p(
    "(exists4p (Q ((1)) 1) (exists3p (C (1) 1) (exists3p (D (1) 1) (and (atom4 Q C) (not (atom4 Q D)) "
    + _TO_NE.format(C="C") + " " + _TO_NE.format(C="D") + "))))")
_HO4_TO_THREE = _p(
    "(exists3p (C (1) 1) (and (exists2 (X 1) (and (atom3 C X) (not " + _SO_NE.format(X="X") + ")))"
    " (exists2 (X 1) (exists2 (Y 1) (and (atom3 C X) (atom3 C Y) " + _SO_NE.format(X="X") + " "
    + _SO_NE.format(X="Y") + " (exists1 (e) (and (atom2 X e) (not (atom2 Y e)))))))))")

_NONE = ()
_P1 = (("P", 1),)

MUTATION_CATALOGUE = (
    Mutation("top-drop-disjointness", "top", "pattern tables may share an identifier",
             ((_TOP_TWO_KINDS, _NONE, 1),)),
    Mutation("top-drop-converse", "top", "atoms accept arguments that only contain the rows",
             ((_TOP_ALL_NONEMPTY, _NONE, 2),)),
    Mutation("top-drop-rows-subset", "top", "atoms accept arguments contained in the rows",
             ((_TOP_ALL_NONEMPTY, _NONE, 2),)),
    Mutation("top-swap-guards", "top", "emptiness guards use the complement pattern",
             ((_TOP_SEPARATE, _NONE, 2),)),
    Mutation("top-drop-guards", "top", "no emptiness guards in atoms",
             ((_TOP_EMPTY_NOT_ALL, _NONE, 1),)),
    Mutation("schema-drop-stage-guard", "schema", "stage quantifiers range over all of C",
             ((_micro("grow"), _P1, 2),)),
    Mutation("schema-drop-left-total", "schema", "stages may be empty",
             ((_micro("empty-first"), _P1, 1),)),
    Mutation("schema-drop-stage-bound", "schema", "stages may exceed n^t elements",
             ((_micro("too-big"), _P1, 2),)),
    Mutation("schema-swap-first-last", "schema", "first and last conditions exchanged",
             ((_micro("grow"), _P1, 2),)),
    Mutation("schema-reverse-pred", "schema", "steps read against the stage order",
             ((_micro("grow"), _P1, 2),)),
    Mutation("ho4-drop-key-uniqueness", "ho4", "a tuple identifier may key several rows",
             ((_HO4_THREE, _NONE, 2),)),
    Mutation("ho4-drop-pattern-uniqueness", "ho4", "a tuple identifier may appear under two patterns",
             ((_HO4_EMPTY_AND_NONEMPTY, _NONE, 1),)),
    Mutation("ho4-drop-converse", "ho4", "TO components only need to be contained in the encoded ones",
             ((_HO4_ONLY_PAIRS, _NONE, 2),)),
    Mutation("ho4-swap-guards", "ho4", "emptiness guards use the complement pattern",
             ((_HO4_SOME_NOT_ALL, _NONE, 1),)),
    Mutation("ho4-drop-to-key-uniqueness", "ho4", "a TO tuple identifier may key several rows",
             ((_HO4_TO_THREE, _NONE, 2),)),
)


def detect_mutation(m: Mutation, budget: Optional[EvalBudget] = None):
    """(detected, reports): dual evaluation of each probe, original formula
    against the mutated translation, on all structures up to its size."""
    reports = []
    for build, vocab, max_n in m.probes:
        f = build()
        so = translate(m.mode, f, mutation=m.name)
        rep = check_equivalence(f, so, enumerate_structures(dict(vocab), max_n), budget, formula_id=m.name)
        reports.append(rep)
        if rep.disagree:
            return True, reports
    return False, reports
