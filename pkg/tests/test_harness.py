import pytest

from hoql.checks import check_well_formed
from hoql.corpus import hypercube, hypercube_schema
from hoql.evaluator import BudgetExceeded, EvalBudget
from hoql.harness import (
    MUTATION_CATALOGUE, Ho4Family, TopFamily, check_equivalence, check_witness, count_structures,
    detect_mutation, enumerate_structures, random_formula, random_ho4_formula, random_prenex_top,
    random_top_formula, schema_witness_assignment, translate,
)
from hoql.logic import QuantHO4P, QuantSO, QuantTOP, free_names, walk
from hoql.prenex import alternation_count, prefix_class, prenex_normal_form
from hoql.stages import schema_witness
from hoql.textio import parse_formula, print_formula
from hoql.translate_schema import translate_schema
from hoql.translate_top import translate_top


class TestStructures:
    def test_counts(self):
        assert len(list(enumerate_structures({"E": 2}, 1))) == 2
        assert len(list(enumerate_structures({"E": 2}, 2, min_n=2))) == 16
        assert len(list(enumerate_structures({"P": 1, "Q": 1}, 2, min_n=2))) == 16
        assert len(list(enumerate_structures({}, 3))) == 3
        assert count_structures({"P": 1, "E": 2}, 2) == 64

    def test_distinct_and_ordered(self):
        a = list(enumerate_structures({"P": 1, "E": 2}, 2))
        b = list(enumerate_structures({"P": 1, "E": 2}, 2))
        assert a == b and len(set(a)) == len(a) == 2 * 2 + 64

    def test_cap(self):
        with pytest.raises(BudgetExceeded):
            list(enumerate_structures({"E": 2}, 3, cap=100))


class TestRandomFormulae:
    def test_deterministic(self):
        assert random_top_formula(5) == random_top_formula(5)
        assert random_ho4_formula(5) == random_ho4_formula(5)
        assert random_prenex_top(5, 2) == random_prenex_top(5, 2)
        assert random_top_formula(5) != random_top_formula(6)

    def test_top_family_well_formed(self):
        fam = TopFamily()
        vocab = dict(fam.vocabulary)
        for seed in range(1000):
            f = random_top_formula(seed, fam)
            assert check_well_formed(f, vocab), print_formula(f)
            assert not free_names(f) - set(vocab)
            tos = [g for g in walk(f) if isinstance(g, QuantTOP)]
            assert len(tos) <= fam.max_to
            assert all(g.rtype.width <= fam.max_width and g.degree == fam.degree for g in tos)

    def test_ho4_family_well_formed(self):
        fam = Ho4Family()
        for seed in range(300):
            f = random_ho4_formula(seed, fam)
            assert check_well_formed(f, dict(fam.vocabulary)), print_formula(f)
            assert any(isinstance(g, QuantHO4P) for g in walk(f))

    def test_prenex_block_count(self):
        for seed in range(100):
            for blocks in (1, 2):
                f = random_prenex_top(seed, blocks)
                assert check_well_formed(f, dict(TopFamily().vocabulary))
                quants = []
                while isinstance(f, (QuantTOP, QuantSO)):
                    if not quants or quants[-1] != f.quant:
                        quants.append(f.quant)
                    f = f.body
                assert quants == ["exists", "forall"][:blocks]
                assert prefix_class(prenex_normal_form(translate_top(random_prenex_top(seed, blocks))))[:5] \
                    in ("Sigma", "FO")

    def test_dispatch(self):
        assert random_formula(Ho4Family(), 3) == random_ho4_formula(3)
        assert random_formula(TopFamily(), 3) == random_top_formula(3)

    def test_text_round_trip(self):
        for seed in range(100):
            f = random_top_formula(seed)
            assert parse_formula(print_formula(f)) == f


class TestEquivalence:
    def test_report_counts(self):
        f = parse_formula("(exists1 (x) (atom P x))")
        rep = check_equivalence(f, f, enumerate_structures({"P": 1}, 2), formula_id="same")
        assert rep.ok and rep.agree == 6
        assert rep.summary()["structures"] == 6
        g = parse_formula("(forall1 (x) (atom P x))")
        rep = check_equivalence(f, g, enumerate_structures({"P": 1}, 2), formula_id="diff")
        assert rep.disagree == 2 and not rep.ok
        assert "disagree on structure" in rep.render()

    def test_budget_recorded(self):
        f = parse_formula("(exists3p (C (1) 1) (forall2 (X 1) (not (atom3 C X))))")
        rep = check_equivalence(f, f, enumerate_structures({}, 2), EvalBudget(max_candidates=2))
        assert rep.budget >= 1 and not rep.ok
        assert "budget exceeded" in rep.render()

    def test_family_sample(self):
        fam = TopFamily()
        for seed in range(4):
            f = random_top_formula(seed, fam)
            rep = check_equivalence(f, translate_top(f), enumerate_structures(dict(fam.vocabulary), 2))
            assert rep.ok, rep.render()


class TestWitness:
    def test_schema_witness_accepted(self):
        node = hypercube_schema()
        so = translate_schema(node)
        A = hypercube(1)
        asg = schema_witness_assignment(so, node, schema_witness(A, node), A.n)
        assert check_witness(so, asg, A)

    def test_bad_tuple(self):
        node = hypercube_schema()
        so = translate_schema(node)
        A = hypercube(1)
        asg = schema_witness_assignment(so, node, schema_witness(A, node), A.n)
        C = next(iter(asg))
        asg[C] = asg[C] | {(5, 5)}
        with pytest.raises(ValueError):
            check_witness(so, asg, A)

    def test_extra_name(self):
        so = translate_schema(hypercube_schema())
        with pytest.raises(ValueError):
            check_witness(so, {"nope": frozenset()}, hypercube(1))


class TestMutations:
    def test_catalogue_shape(self):
        names = [m.name for m in MUTATION_CATALOGUE]
        assert len(names) == len(set(names)) >= 9
        assert {m.mode for m in MUTATION_CATALOGUE} == {"top", "schema", "ho4"}
        assert all(max_n <= 2 for m in MUTATION_CATALOGUE for _, _, max_n in m.probes)

    @pytest.mark.parametrize("m", MUTATION_CATALOGUE, ids=lambda m: m.name)
    def test_probe_agrees_without_mutation(self, m):
        for build, vocab, max_n in m.probes:
            f = build()
            rep = check_equivalence(f, translate(m.mode, f), enumerate_structures(dict(vocab), max_n))
            assert rep.ok, rep.render()

    @pytest.mark.parametrize("m", MUTATION_CATALOGUE, ids=lambda m: m.name)
    def test_detected(self, m):
        detected, reports = detect_mutation(m)
        assert detected, "".join(r.render() for r in reports)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            translate("fo", parse_formula("(forall1 (x) (eq x x))"))


def test_alternation_sample():
    for seed in range(20):
        for n in (1, 2):
            so = prenex_normal_form(translate_top(random_prenex_top(seed, n)))
            assert alternation_count(so) <= n
