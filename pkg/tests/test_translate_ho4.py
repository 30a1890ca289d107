import itertools
import random

import pytest

from hoql.encoder import (
    CapacityError, EncodingError, decode_normalized, encode_normalized, normalized_from_valuation,
)
from hoql.evaluator import enum_bounded_ho_relations, evaluate
from hoql.harness import Ho4Family, check_equivalence, enumerate_structures, random_ho4_formula
from hoql.logic import FiniteStructure, HORelation, RelationType, free_names, is_pure_so
from hoql.naming import arity_report
from hoql.prenex import FragmentError
from hoql.textio import parse_formula
from hoql.translate_ho4 import (
    Ho4Context, bind_ho4, encoding_constraints, integrity_axioms, translate_ho4,
)
from hoql.translate_top import translate_top

from randrel import random_rank4, rng

Q1 = RelationType.ho4((1,))
EMPTY1 = FiniteStructure.build(1, {}, {})
EMPTY2 = FiniteStructure.build(2, {}, {})

_TWO = ("(exists2 (Z 1) (exists2 (Z2 1) (and (atom3 {C} Z) (atom3 {C} Z2) "
        "(exists1 (e) (or (and (atom2 Z e) (not (atom2 Z2 e))) (and (atom2 Z2 e) (not (atom2 Z e))))))))")


def _valid(val, n):
    try:
        decode_normalized(normalized_from_valuation(val, "_Q", Q1, 1, n))
        return True
    except EncodingError:
        return False


def test_tables_for_width_one():
    f = parse_formula("(exists4p (Q ((1)) 1) (exists3p (C (1) 1) (atom4 Q C)))")
    rep = arity_report(translate_ho4(f))
    assert rep.tables == {
        "_Q.x4.o": 2, "_Q.x4.o1": 1, "_Q.rel3": 2, "_Q.t2.o": 2, "_Q.t2.o1": 1, "_Q.rel2": 2,
        "_C.x3.o": 2, "_C.x3.o1": 1, "_C.rel2": 2,
    }
    assert rep.max_arity == 2


def test_width_two_table_arities():
    _, ar = encoding_constraints(RelationType.ho4((1, 1), (1, 1)), 1)
    assert len(ar) == 2 * 4 + 2
    assert ar["_Q.x4.o"] == 3 and ar["_Q.x4.o1-2"] == 1 and ar["_Q.rel2"] == 2


def test_eight_integrity_groups():
    b = bind_ho4("_Q", Q1, 1)
    groups = integrity_axioms(Ho4Context.for_variables({}).namer, b)
    assert len(groups) == 8
    assert all(not free_names(g) - {"_Q.x4.o", "_Q.x4.o1", "_Q.rel3", "_Q.t2.o", "_Q.t2.o1", "_Q.rel2"}
               for g in groups)


def test_non_uniform_rejected():
    f = parse_formula("(exists4p (Q ((1) (1)) 1) (exists3p (C (1) 1) (exists3p (D (1) 1) (atom4 Q C D))))")
    with pytest.raises(FragmentError):
        translate_ho4(f)


def test_mixed_so_arity_rejected():
    f = parse_formula("(exists4p (Q ((1 2) (1 2)) 1) (exists3p (C (1 2) 1) (atom4 Q C C)))")
    with pytest.raises(FragmentError):
        translate_ho4(f)


def test_schema_rejected():
    from hoql.corpus import hypercube_schema
    with pytest.raises(FragmentError):
        translate_ho4(hypercube_schema())


def test_fo_and_so_unchanged():
    for text in ("(forall1 (x) (exists1 (y) (atom E x y)))",
                 "(exists2 (X 1) (forall1 (x) (atom2 X x)))"):
        f = parse_formula(text)
        assert translate_ho4(f) == f


def test_top_only_formula_agrees_with_flat_translation():
    f = parse_formula("(exists3p (C (1) 1) (exists2 (X 1) (and (atom3 C X) (exists1 (x) (atom2 X x)))))")
    for A in (EMPTY1, EMPTY2):
        assert evaluate(A, translate_ho4(f)) == evaluate(A, translate_top(f)) == evaluate(A, f)


def test_output_pure_and_closed():
    for seed in range(30):
        so = translate_ho4(random_ho4_formula(seed))
        assert is_pure_so(so) and not free_names(so) - {"P"}


def test_encodings_satisfy_integrity():
    phi, ar = encoding_constraints(Q1, 1)
    r = rng(11)
    done = 0
    while done < 500:
        n = r.randint(1, 2)
        try:
            e = encode_normalized(random_rank4(r, n, Q1, 1), 1, n)
        except CapacityError:
            continue
        assert evaluate(FiniteStructure.build(n, {}, {}), phi, dict(e.valuation("_Q")))
        done += 1


def test_dangling_reference_falsifies_integrity():
    phi, _ = encoding_constraints(Q1, 1)
    Q = HORelation(4, Q1, frozenset({(frozenset({(frozenset({(0,)}),)}),)}))
    val = dict(encode_normalized(Q, 1, 2).valuation("_Q"))
    assert evaluate(EMPTY2, phi, val)
    val["_Q.rel3"] = val["_Q.rel3"] | {(0, 1)}
    assert not evaluate(EMPTY2, phi, val)


def test_integrity_matches_decoder_exhaustive_n1():
    phi, ar = encoding_constraints(Q1, 1)
    names = list(ar)
    spaces = [[frozenset(s) for k in range(2) for s in itertools.combinations([(0,) * ar[t]], k)] for t in names]
    seen = 0
    for choice in itertools.product(*spaces):
        val = dict(zip(names, choice))
        assert evaluate(EMPTY1, phi, val) == _valid(val, 1)
        seen += 1
    assert seen == 64


def test_integrity_matches_decoder_random_n2():
    phi, ar = encoding_constraints(Q1, 1)
    rels = list(enum_bounded_ho_relations(2, Q1, 1))
    pos = {k: list(itertools.product(range(2), repeat=a)) for k, a in ar.items()}
    r = random.Random(0)
    valid = 0
    for i in range(600):
        if i % 2 == 0:
            try:
                val = dict(encode_normalized(HORelation(4, Q1, r.choice(rels)), 1, 2).valuation("_Q"))
            except CapacityError:
                val = {k: frozenset() for k in ar}
            if i % 4 == 0:
                k = r.choice(list(ar))
                val[k] = val[k] ^ {r.choice(pos[k])}
        else:
            val = {k: frozenset(t for t in pos[k] if r.random() < 0.3) for k in ar}
        ok = _valid(val, 2)
        valid += ok
        assert evaluate(EMPTY2, phi, val) == ok
    assert 0 < valid < 600


def test_micro_equivalence_random_family():
    fam = Ho4Family()
    for seed in range(40):
        f = random_ho4_formula(seed, fam)
        rep = check_equivalence(f, translate_ho4(f), enumerate_structures(dict(fam.vocabulary), 2))
        assert rep.ok, rep.render()


def test_identifier_capacity_limit():
    # two disjoint TO relations with two SO members each need four SO
    # relation identifiers; width-1 identifiers over two elements give two
    f = parse_formula(
        "(exists4p (Q ((1)) 1) (exists3p (C (1) 1) (exists3p (D (1) 1) (and (atom4 Q C) (atom4 Q D) "
        + _TWO.format(C="C") + " " + _TWO.format(C="D")
        + " (forall2 (Z 1) (not (and (atom3 C Z) (atom3 D Z))))))))")
    assert evaluate(EMPTY2, f)
    assert not evaluate(EMPTY2, translate_ho4(f))


def test_unknown_mutation():
    with pytest.raises(ValueError):
        translate_ho4(parse_formula("(forall1 (x) (eq x x))"), mutation="nope")
