"""Acceptance checks, one per criterion, each printing a PASS/FAIL line.

Run alone with `pytest tests/test_acceptance.py -v -s` or as a script.
"""
import itertools
import random
import sys
import time

from hoql.corpus import (
    formula_value_schema, formula_value_top, hypercube, hypercube_schema, hypercube_top,
    micro_schemas, corpus_items, word_model,
)
from hoql.encoder import (
    CapacityError, EncodingError, decode_flat, decode_normalized, encode_flat, encode_normalized,
    normalized_from_valuation,
)
from hoql.evaluator import enum_bounded_ho_relations, evaluate
from hoql.harness import (
    MUTATION_CATALOGUE, Ho4Family, TopFamily, certify_schema, check_equivalence, detect_mutation,
    enumerate_structures, random_ho4_formula, random_prenex_top, random_top_formula,
)
from hoql.logic import FiniteStructure, HORelation, QuantTOP, RelationType, enumerate_patterns, walk
from hoql.naming import arity_report
from hoql.prenex import alternation_count, prenex_normal_form
from hoql.stages import eval_schema
from hoql.translate_ho4 import encoding_constraints, translate_ho4
from hoql.translate_schema import translate_schema
from hoql.translate_top import TranslationTooLarge, translate_top

from randrel import random_ho4_type, random_rank3, random_rank4, random_to_type

RESULTS = []


def _run(number, title, limit, check):
    t0 = time.monotonic()
    try:
        ok, detail = check()
    except Exception as e:  # a crash is a failure of the criterion, reported as such
        ok, detail = False, f"{type(e).__name__}: {e}"
    wall = time.monotonic() - t0
    if wall > limit:
        ok, detail = False, f"{detail}; took {wall:.1f}s, limit {limit}s"
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}; {wall:.1f}s]"
    RESULTS.append(line)
    print("\n" + line, file=sys.__stdout__, flush=True)
    return ok, line


# ---------------------------------------------------------------------------


def c1_arities():
    top_h = arity_report(translate_top(hypercube_top())).max_arity
    try:
        top_fv = arity_report(translate_top(formula_value_top())).max_arity
    except TranslationTooLarge as e:
        top_fv = e.report.max_arity
    sch_h = arity_report(translate_schema(hypercube_schema())).max_arity
    sch_fv = arity_report(translate_schema(formula_value_schema())).max_arity
    got = (top_h, top_fv, sch_h, sch_fv)
    return got == (8, 22, 4, 4), f"top {top_h}/{top_fv}, schema {sch_h}/{sch_fv}"


def c2_patterns():
    sizes = [len(enumerate_patterns(s)) for s in (1, 2, 3)]
    distinct = all(len(set(enumerate_patterns(s))) == 2 ** s for s in (1, 2, 3))
    return sizes == [2, 4, 8] and distinct, f"sizes {sizes}"


def c3_round_trips():
    r = random.Random(7)
    flat = 0
    while flat < 1000:
        n = r.randint(1, 3)
        R = random_rank3(r, n, random_to_type(r, max_width=2, max_arity=2), 1)
        if decode_flat(encode_flat(R, 1, n)) != R:
            return False, f"flat round trip failed on {R}"
        flat += 1
    norm = skipped = 0
    while norm < 1000:
        n = r.randint(1, 3)
        Q = random_rank4(r, n, random_ho4_type(r, max_width=2, max_arity=2), 1)
        try:
            e = encode_normalized(Q, 1, n)
        except CapacityError:
            skipped += 1
            continue
        if decode_normalized(e) != Q:
            return False, f"normalized round trip failed on {Q}"
        norm += 1
    return True, f"{flat} flat, {norm} normalized exact ({skipped} over identifier capacity skipped)"


def c4_top_collapse():
    fam = TopFamily()
    assert fam.max_width <= 2 and fam.max_arity <= 2 and fam.degree == 1
    assert fam.max_to <= 2 and fam.fo_depth <= 2 and fam.max_n <= 2
    structures = list(enumerate_structures(dict(fam.vocabulary), 2))
    pairs = disagree = over = 0
    for seed in range(8):
        f = random_top_formula(seed, fam)
        assert sum(isinstance(g, QuantTOP) for g in walk(f)) <= 2
        rep = check_equivalence(f, translate_top(f), structures)
        pairs += len(rep.verdicts)
        disagree += rep.disagree
        over += rep.budget
    ok = pairs >= 200 and disagree == 0 and over == 0
    return ok, f"{pairs} pairs, {disagree} disagree, {over} budget-exceeded"


def c5_schema_collapse():
    vocab = {"P": 1}
    micro = 0
    for name, node in micro_schemas().items():
        assert len(node.sig) == 1 and node.sig[0] == 1 and node.d == node.t == 1
        so = translate_schema(node)
        for A in enumerate_structures(vocab, 2):
            if eval_schema(A, node) != evaluate(A, so):
                return False, f"micro {name} disagrees on {A}"
            micro += 1
    certs = []
    for node, structures in ((hypercube_schema(), {"Q1": hypercube(1), "Q2": hypercube(2)}),
                             (formula_value_schema(), {"T": word_model("T"),
                                                       "(T∧(¬F))": word_model("(T∧(¬F))")})):
        so = translate_schema(node)
        for name, A in structures.items():
            verdict, cert = certify_schema(A, node, translated=so)
            if not (verdict and cert):
                return False, f"witness for {name}: verdict {verdict}, certificate {cert}"
            certs.append(name)
    return True, f"{micro} micro pairs agree, witnesses certified on {', '.join(certs)}"


def c6_eval_schema():
    items = corpus_items()
    want = {"hypercube": {"Q1": True, "Q2": True, "Q3": True, "K3": False, "P3": False, "C6": False},
            "formula-value": {"T": True, "T-and-not-F": True, "paren-T": True, "F": False, "T-and-F": False}}
    wrong = []
    for name, expected in want.items():
        item = items[name]
        for sname, v in expected.items():
            if eval_schema(item.structures[sname], item.formula) != v:
                wrong.append(f"{name}/{sname}")
    return not wrong, f"{sum(map(len, want.values()))} verdicts" + (f", wrong: {wrong}" if wrong else " correct")


def c7_ho4_collapse():
    fam = Ho4Family()
    assert fam.degree == 1 and fam.max_n <= 2
    structures = list(enumerate_structures(dict(fam.vocabulary), 2))
    formulas = pairs = 0
    for seed in range(100):
        f = random_ho4_formula(seed, fam)
        rep = check_equivalence(f, translate_ho4(f), structures)
        if not rep.ok:
            return False, f"seed {seed}: {rep.disagree} disagree, {rep.budget} budget-exceeded"
        formulas += 1
        pairs += len(rep.verdicts)
    q = RelationType.ho4((1,))
    phi, ar = encoding_constraints(q, 1)
    names = list(ar)

    def valid(val, n):
        try:
            decode_normalized(normalized_from_valuation(val, "_Q", q, 1, n))
            return True
        except EncodingError:
            return False

    A1 = FiniteStructure.build(1, {}, {})
    spaces = [[frozenset(), frozenset({(0,) * ar[t]})] for t in names]
    exhaustive = 0
    for choice in itertools.product(*spaces):
        val = dict(zip(names, choice))
        if evaluate(A1, phi, val) != valid(val, 1):
            return False, f"integrity and decoder differ on {val}"
        exhaustive += 1
    A2 = FiniteStructure.build(2, {}, {})
    rels = list(enum_bounded_ho_relations(2, q, 1))
    pos = {k: list(itertools.product(range(2), repeat=a)) for k, a in ar.items()}
    r = random.Random(1)
    sampled = 0
    for i in range(400):
        if i % 2 == 0:
            try:
                val = dict(encode_normalized(HORelation(4, q, r.choice(rels)), 1, 2).valuation("_Q"))
            except CapacityError:
                val = {k: frozenset() for k in ar}
            if i % 4 == 0:
                k = r.choice(names)
                val[k] = val[k] ^ {r.choice(pos[k])}
        else:
            val = {k: frozenset(t for t in pos[k] if r.random() < 0.3) for k in ar}
        if evaluate(A2, phi, val) != valid(val, 2):
            return False, f"integrity and decoder differ on {val}"
        sampled += 1
    return True, (f"{formulas} formulae x {len(structures)} structures agree; integrity = decoder on "
                  f"{exhaustive} exhaustive (n=1) and {sampled} sampled (n=2) valuations")


def c8_alternation():
    checked = 0
    for n in (1, 2):
        for seed in range(30):
            f = random_prenex_top(seed, n)
            k = alternation_count(prenex_normal_form(translate_top(f)))
            if k > n:
                return False, f"seed {seed}, n={n}: {k} alternations"
            checked += 1
    return checked >= 50, f"{checked} formulae within bound"


def c9_mutations():
    detected = [m.name for m in MUTATION_CATALOGUE if detect_mutation(m)[0]]
    missed = [m.name for m in MUTATION_CATALOGUE if m.name not in detected]
    return len(detected) >= 9, f"{len(detected)}/{len(MUTATION_CATALOGUE)} detected" + (
        f", missed {missed}" if missed else "")


CRITERIA = [
    (1, "arity goldens", 1.0, c1_arities),
    (2, "pattern enumeration sizes", 1.0, c2_patterns),
    (3, "encode/decode round trips", 30.0, c3_round_trips),
    (4, "TO^P collapse on the random family", 600.0, c4_top_collapse),
    (5, "schema collapse: micro and witness certification", 600.0, c5_schema_collapse),
    (6, "eval_schema corpus verdicts", 120.0, c6_eval_schema),
    (7, "HO4 collapse and integrity", 1200.0, c7_ho4_collapse),
    (8, "alternation preserved", 120.0, c8_alternation),
    (9, "mutation catalogue detected", 900.0, c9_mutations),
]


def _test(number):
    _, title, limit, check = CRITERIA[number - 1]
    ok, line = _run(number, title, limit, check)
    assert ok, line


def test_criterion_1():
    _test(1)


def test_criterion_2():
    _test(2)


def test_criterion_3():
    _test(3)


def test_criterion_4():
    _test(4)


def test_criterion_5():
    _test(5)


def test_criterion_6():
    _test(6)


def test_criterion_7():
    _test(7)


def test_criterion_8():
    _test(8)


def test_criterion_9():
    _test(9)


if __name__ == "__main__":
    failed = sum(not _run(*c)[0] for c in CRITERIA)
    sys.exit(1 if failed else 0)
