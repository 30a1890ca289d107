import math

import pytest

from hoql.corpus import corpus_items, hypercube, hypercube_schema, complete_graph, word_model, formula_value_schema
from hoql.evaluator import (
    EvalBudget, count_bounded, enum_bounded_ho_relations, enum_so_relations, evaluate, find_witness,
)
from hoql.harness import Ho4Family, TopFamily, enumerate_structures, random_ho4_formula, random_top_formula
from hoql.logic import FiniteStructure, Not, QuantHO4P, QuantTOP, RelationType, dual
from hoql.stages import Stage, canonical_form, check_stage_sequence, eval_schema, eval_schema_bfs, schema_witness
from hoql.symbolic import BudgetExceeded
from hoql.textio import parse_formula

P = parse_formula

SYM = "(forall1 (x y) (implies (atom E x y) (atom E y x)))"
LOOPFREE = "(forall1 (x) (not (atom E x x)))"


def test_k2_undirected_loop_free(k2):
    assert evaluate(k2, P(f"(and {SYM} {LOOPFREE})"))
    loop = FiniteStructure.build(1, {"E": {(0, 0)}})
    assert not evaluate(loop, P(LOOPFREE))


def test_empty_to_relation_is_a_candidate():
    f = P("(exists3p (C (1) 1) (forall2 (X 1) (not (atom3 C X))))")
    for n in (1, 2, 3):
        assert evaluate(FiniteStructure.build(n, {}), f)


def test_first_witness():
    A = FiniteStructure.build(2, {})
    f = P("(exists3p (C (1) 1) (exists2 (X 1) (and (atom3 C X) (forall1 (x) (atom2 X x)))))")
    assert evaluate(A, f)
    full = frozenset({(0,), (1,)})
    assert find_witness(A, f) == frozenset({(full,)})


def test_degree_bounds_the_candidates():
    # three distinct unary relations cannot fit in a degree-1 TO relation on n = 2
    def differ(a, b):
        return (f"(exists1 (x) (or (and (atom2 {a} x) (not (atom2 {b} x)))"
                f" (and (atom2 {b} x) (not (atom2 {a} x)))))")
    body = ("(exists2 (X 1) (exists2 (Y 1) (exists2 (Z 1) (and (atom3 C X) (atom3 C Y) (atom3 C Z) "
            + differ("X", "Y") + " " + differ("X", "Z") + " " + differ("Y", "Z") + "))))")
    A = FiniteStructure.build(2, {})
    assert not evaluate(A, P(f"(exists3p (C (1) 1) {body})"))
    assert evaluate(A, P(f"(exists3p (C (1) 2) {body})"))


class TestEnumeration:
    def test_so_small(self):
        assert list(enum_so_relations(2, 1)) == [frozenset(), frozenset({(0,)}), frozenset({(1,)}),
                                                 frozenset({(0,), (1,)})]
        assert len(list(enum_so_relations(1, 2))) == 2
        assert len(list(enum_so_relations(2, 2))) == 16

    def test_so_cap(self):
        with pytest.raises(BudgetExceeded):
            enum_so_relations(3, 3)

    @pytest.mark.parametrize("n,rt,d,expected", [
        (2, RelationType.to(1), 1, 11),
        (2, RelationType.to(1, 2), 1, 2081),
        (1, RelationType.to(1), 1, 3),
        (2, RelationType.to(1), 3, 16),
    ])
    def test_bounded_counts(self, n, rt, d, expected):
        cands = list(enum_bounded_ho_relations(n, rt, d))
        assert len(cands) == expected == count_bounded(n, rt, d)
        assert len(set(cands)) == len(cands)
        assert all(len(c) <= n ** d for c in cands)

    def test_bounded_binomials(self):
        u = 4 * 16
        assert count_bounded(2, RelationType.to(1, 2), 1) == sum(math.comb(u, k) for k in range(3))

    def test_downward_rank4(self):
        q = RelationType.ho4((1,))
        cands = list(enum_bounded_ho_relations(2, q, 1))
        assert all(len(m) <= 2 for c in cands for (m,) in c)
        assert len(cands) == count_bounded(2, q, 1) == 1 + 11 + math.comb(11, 2)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            list(enum_bounded_ho_relations(2, RelationType.so(1), 1))


class TestProperties:
    def _pairs(self):
        fam = TopFamily(max_to=1)
        structs = list(enumerate_structures(dict(fam.vocabulary), 1))
        for seed in range(12):
            yield random_top_formula(seed, fam), structs

    def test_duality(self):
        for f, structs in self._pairs():
            if isinstance(f, QuantTOP):
                g = Not(QuantTOP(dual(f.quant), f.var, f.rtype, f.degree, Not(f.body)))
                for A in structs:
                    assert evaluate(A, f) == evaluate(A, g)

    def test_monotone_in_degree(self):
        for f, structs in self._pairs():
            if isinstance(f, QuantTOP) and f.quant == "exists":
                g = QuantTOP("exists", f.var, f.rtype, f.degree + 1, f.body)
                for A in structs:
                    if evaluate(A, f):
                        assert evaluate(A, g)

    def test_definitional_expansion(self):
        # ∃C φ is the disjunction of φ over the bounded candidates, computed here
        # through explicit valuations rather than the quantifier node
        for f, structs in self._pairs():
            if isinstance(f, QuantTOP) and f.quant == "exists":
                for A in structs:
                    want = any(evaluate(A, f.body, {f.var: c})
                               for c in enum_bounded_ho_relations(A.n, f.rtype, f.degree))
                    assert evaluate(A, f) == want

    def test_strategies_agree(self):
        fam = TopFamily(max_to=1, fo_depth=1)
        from hoql.translate_top import translate_top
        for seed in range(8):
            so = translate_top(random_top_formula(seed, fam))
            for A in enumerate_structures(dict(fam.vocabulary), 1):
                assert evaluate(A, so, strategy="enumerate") == evaluate(A, so, strategy="symbolic")

    def test_ho4_rank4_expansion(self):
        fam = Ho4Family()
        seen = 0
        for seed in range(30):
            f = random_ho4_formula(seed, fam)
            if not (isinstance(f, QuantHO4P) and f.quant == "exists"):
                continue
            seen += 1
            for A in enumerate_structures(dict(fam.vocabulary), 1):
                want = any(evaluate(A, f.body, {f.var: c})
                           for c in enum_bounded_ho_relations(A.n, f.rtype, f.degree))
                assert evaluate(A, f) == want
        assert seen


class TestSchema:
    def test_hypercube(self):
        node = hypercube_schema()
        assert eval_schema(hypercube(2), node)
        assert not eval_schema(complete_graph(3), node)

    def test_formula_value_t_in_zero_steps(self):
        stages = schema_witness(word_model("T"), formula_value_schema())
        assert stages is not None and len(stages) == 1

    def test_witness_is_checkable(self):
        node = hypercube_schema()
        for k in (1, 2):
            stages = schema_witness(hypercube(k), node)
            assert check_stage_sequence(hypercube(k), node, stages)
            assert [s.size for s in stages] == [2 ** j for j in range(1, k + 1)]

    def test_bfs_agrees_on_corpus(self):
        for item in corpus_items().values():
            for A in item.structures.values():
                if A.n <= 6:
                    assert eval_schema(A, item.formula) == eval_schema_bfs(A, item.formula)

    def test_canonical_form_is_isomorphism_invariant(self):
        a = Stage(3, (frozenset({(0, 1), (1, 2)}),))
        b = Stage(3, (frozenset({(2, 1), (1, 0)}),))
        c = Stage(3, (frozenset({(0, 1), (0, 2)}),))
        assert canonical_form(a) == canonical_form(b)
        assert canonical_form(a) != canonical_form(c)


class TestBudget:
    def test_candidates(self):
        with pytest.raises(BudgetExceeded):
            eval_schema(hypercube(3), hypercube_schema(), EvalBudget(max_candidates=2))

    def test_time(self):
        f = P("(exists2 (X 2) (exists2 (Y 2) (exists2 (Z 2) (forall1 (x y) (and (implies (atom2 X x y) (atom2 Y y x))"
              " (implies (atom2 Y x y) (atom2 Z x y)) (not (atom2 Z x x)) (atom2 X x y))))))")
        A = FiniteStructure.build(3, {})
        with pytest.raises(BudgetExceeded):
            evaluate(A, f, budget=EvalBudget(time_limit=1e-4), strategy="enumerate")

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            evaluate(FiniteStructure.build(1, {}), P("(forall1 (x) (eq x x))"), strategy="guess")
