import itertools

import pytest

from hoql.checks import check_well_formed, require_well_formed
from hoql.corpus import corpus_items, micro_schemas, MICRO_VOCAB
from hoql.evaluator import evaluate
from hoql.harness import TopFamily, enumerate_structures, random_top_formula
from hoql.logic import (
    EmptyPattern, FiniteStructure, HORelation, RelationType, StructureError,
    enumerate_patterns, is_pure_so, pattern_of,
)
from hoql.prenex import (
    FragmentError, alternation_count, is_prenex, prefix_class, prenex_normal_form, rename_apart,
)
from hoql.textio import parse_formula, print_formula
from hoql.translate_schema import translate_schema


def P(text):
    return parse_formula(text)


class TestRelationType:
    def test_orders(self):
        assert RelationType.so(2).arity == 2
        t = RelationType.to(1, 2)
        assert t.order == 3 and t.width == 2 and t.components == (1, 2)
        q = RelationType.ho4((1, 1), (1, 2))
        assert q.order == 4 and q.width == 2 and q.is_uniform()

    @pytest.mark.parametrize("bad", [lambda: RelationType.so(0), lambda: RelationType.to(),
                                     lambda: RelationType.to(1, 0)])
    def test_rejects_bad_arities(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_ho4_needs_uniform_component_widths(self):
        assert not RelationType.ho4((1,), (1, 1)).is_uniform()
        f = P("(exists4p (Q ((1) (1 1)) 1) (forall1 (x) (eq x x)))")
        assert not check_well_formed(f, {})

    def test_arity_only_for_so(self):
        with pytest.raises((AttributeError, TypeError, ValueError)):
            RelationType.to(1).arity


class TestPatterns:
    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_count_and_complements(self, s):
        pats = enumerate_patterns(s)
        assert len(pats) == 2 ** s
        assert len(set(pats)) == len(pats)
        for p in pats:
            assert set(p.omega) | set(p.complement) == set(range(1, s + 1))
            assert not set(p.omega) & set(p.complement)

    def test_small_orders(self):
        assert [p.omega for p in enumerate_patterns(1)] == [(), (1,)]
        assert [p.omega for p in enumerate_patterns(2)] == [(), (1,), (2,), (1, 2)]

    def test_zero_width(self):
        with pytest.raises(ValueError):
            enumerate_patterns(0)

    def test_pattern_of(self):
        e, x = frozenset(), frozenset({(0,)})
        assert pattern_of((e, x, e)) == EmptyPattern((1, 3), 3)


class TestStructures:
    def test_out_of_range(self):
        with pytest.raises(StructureError):
            FiniteStructure.build(2, {"E": {(0, 2)}})

    def test_wrong_arity(self):
        with pytest.raises(StructureError):
            FiniteStructure.build(2, {"E": {(0, 1), (1,)}}, {"E": 2})

    def test_empty_domain(self):
        with pytest.raises(StructureError):
            FiniteStructure.build(0, {})

    def test_horelation_rank(self):
        with pytest.raises(ValueError):
            HORelation(4, RelationType.to(1), frozenset())


class TestWellFormed:
    def test_unbound_so(self):
        rep = check_well_formed(P("(exists3p (C (1 2) 1) (atom3 C X Y))"), {})
        assert not rep.ok and rep.message == "unbound SO variable X"
        assert rep.span is not None

    def test_closed_fo(self):
        assert check_well_formed(P("(forall1 (x) (exists1 (y) (atom E x y)))"), {"E": 2})

    def test_width_mismatch(self):
        f = P("(exists3p (C (1 2) 1) (exists2 (X 1) (exists2 (Y 2) (exists2 (Z 1) (atom3 C X Y Z)))))")
        rep = check_well_formed(f, {})
        assert not rep.ok and "width mismatch" in rep.message

    def test_arity_mismatch_in_to_atom(self):
        rep = check_well_formed(P("(exists3p (C (2) 1) (exists2 (X 1) (atom3 C X)))"), {})
        assert not rep.ok

    def test_to_atom_needs_so_arguments(self):
        rep = check_well_formed(P("(exists3p (C (1) 1) (exists3p (D (1) 1) (atom3 C D)))"), {})
        assert not rep.ok

    def test_unknown_symbol(self):
        assert not check_well_formed(P("(exists1 (x) (atom E x x))"), {})

    def test_require(self):
        with pytest.raises(TypeError):
            require_well_formed(P("(atom E x x)"), {"E": 2})

    def test_corpus_and_translations_are_well_formed(self):
        for item in corpus_items().values():
            vocab = item.structures[next(iter(item.structures))].vocabulary
            assert check_well_formed(item.formula, vocab)
            assert check_well_formed(item.top, vocab)
            so = translate_schema(item.formula)
            assert is_pure_so(so)
            assert check_well_formed(so, vocab)
        for sch in micro_schemas().values():
            assert check_well_formed(sch, MICRO_VOCAB)
            assert check_well_formed(translate_schema(sch), MICRO_VOCAB)


class TestPrenex:
    def test_conjunction_of_blocks(self):
        f = P("(and (exists2 (X 1) (exists1 (x) (atom2 X x))) (exists2 (Y 1) (forall1 (y) (atom2 Y y))))")
        g = prenex_normal_form(f)
        assert is_prenex(g)
        assert print_formula(g).startswith("(exists2 (X 1)")
        assert alternation_count(g) == 1

    def test_negation_duality(self):
        g = prenex_normal_form(P("(not (exists2 (X 1) (exists1 (x) (atom2 X x))))"))
        assert print_formula(g) == "(forall2 (X 1) (forall1 (x) (not (atom2 X x))))"

    def test_prenex_input_unchanged(self):
        f = P("(exists2 (X 1) (forall1 (x) (atom2 X x)))")
        assert prenex_normal_form(f) == f

    def test_counts(self):
        assert alternation_count(P("(exists2 (X 1) (exists2 (Y 1) (exists1 (x) (atom2 X x))))")) == 1
        f = P("(exists2 (X 1) (forall2 (Y 1) (exists2 (Z 1) (forall1 (x) (atom2 X x)))))")
        assert alternation_count(f) == 3 and prefix_class(f) == "Sigma3"
        assert alternation_count(P("(forall1 (x) (atom E x x))")) == 0
        assert prefix_class(P("(forall2 (X 1) (exists1 (x) (atom2 X x)))")) == "Pi1"

    def test_non_prenex_rejected(self):
        with pytest.raises(FragmentError):
            alternation_count(P("(and (exists2 (X 1) (exists1 (x) (atom2 X x))) (forall1 (y) (eq y y)))"))

    def test_non_so_rejected(self):
        with pytest.raises(FragmentError):
            prenex_normal_form(P("(exists3p (C (1) 1) (exists2 (X 1) (atom3 C X)))"))

    def test_equivalence_on_random_so(self):
        # the SO translations of small TO^P formulae are a convenient source of
        # deeply nested SO formulae
        from hoql.translate_top import translate_top
        fam = TopFamily(max_to=1, fo_depth=1)
        structs = list(enumerate_structures(dict(fam.vocabulary), 1))
        for seed in range(6):
            so = translate_top(random_top_formula(seed, fam))
            g = prenex_normal_form(so)
            assert is_prenex(g)
            for A in structs:
                assert evaluate(A, so) == evaluate(A, g)

    def test_renaming_invariance(self):
        from hoql.translate_top import translate_top
        for seed in range(10):
            so = translate_top(random_top_formula(seed))
            assert alternation_count(prenex_normal_form(so)) == \
                alternation_count(prenex_normal_form(rename_apart(so)))

    def test_pnf_truth_on_so_sentences(self):
        fs = ["(or (forall2 (X 1) (exists1 (x) (atom2 X x))) (exists2 (Y 1) (forall1 (y) (atom2 Y y))))",
              "(implies (exists2 (X 1) (forall1 (x) (atom2 X x))) (forall2 (Y 1) (exists1 (y) (atom2 Y y))))",
              "(not (and (exists1 (x) (atom P x)) (forall2 (X 1) (exists1 (y) (and (implies (atom2 X y) (atom P y)) (implies (atom P y) (atom2 X y)))))))"]
        for t in fs:
            f = P(t)
            g = prenex_normal_form(f)
            for n, m in itertools.product((1, 2), range(4)):
                A = FiniteStructure.build(n, {"P": {(i,) for i in range(n) if m >> i & 1}}, {"P": 1})
                assert evaluate(A, f) == evaluate(A, g)
