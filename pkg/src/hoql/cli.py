"""Command-line front end.

    hoql parse FILE                 print the formula back in canonical text
    hoql typecheck FILE             check arities, binding and sorts
    hoql translate FILE --mode M    emit the SO translation and its arity report
    hoql eval FILE STRUCTURE        print true / false / budget-exceeded
    hoql check [FILE] --mode M      compare a formula with its translation
    hoql corpus list|show|write     the shipped corpus

Exit codes: 0 ok, 1 parse error, 2 type error, 3 wrong fragment,
4 budget exceeded, 5 disagreement found.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import corpus as corpus_mod
from .checks import check_well_formed
from .evaluator import EvalBudget, evaluate
from .harness import (
    TopFamily, Ho4Family, certify_schema, check_equivalence, enumerate_structures,
    random_ho4_formula, random_top_formula, translate,
)
from .logic import Atom, Formula, stage_symbol, walk
from .naming import arity_report
from .prenex import FragmentError
from .stages import eval_schema
from .symbolic import BudgetExceeded
from .textio import ParseError, parse_formula, parse_structure, print_formula
from .translate_top import TranslationTooLarge

EXIT_OK, EXIT_PARSE, EXIT_TYPE, EXIT_FRAGMENT, EXIT_BUDGET, EXIT_DISAGREE = range(6)
BUDGET_ENV = "HOQL_BUDGET_CANDIDATES"


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise CliError(EXIT_PARSE, f"{path}: no such file")
    return p.read_text(encoding="utf-8")


def _load_formula(path) -> Formula:
    try:
        return parse_formula(_read(path))
    except ParseError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}") from None


def _load_structure(path):
    try:
        return parse_structure(_read(path))
    except (ParseError, ValueError) as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}") from None


def infer_vocabulary(f: Formula) -> dict:
    """Input symbols with the arity of their first use."""
    vocab = {}
    for g in walk(f):
        if isinstance(g, Atom) and stage_symbol(g.symbol) is None:
            vocab.setdefault(g.symbol, len(g.args))
    return vocab


def _typecheck(f: Formula, vocab: Optional[dict] = None):
    vocab = infer_vocabulary(f) if vocab is None else vocab
    rep = check_well_formed(f, vocab)
    if not rep.ok:
        raise CliError(EXIT_TYPE, f"type error: {rep.message}")
    return vocab


def _budget(args) -> EvalBudget:
    cand = args.budget_candidates
    if cand is None and os.environ.get(BUDGET_ENV):
        try:
            cand = int(os.environ[BUDGET_ENV])
        except ValueError:
            raise CliError(EXIT_TYPE, f"{BUDGET_ENV} must be an integer") from None
    kw = {}
    if cand is not None:
        if cand <= 0:
            raise CliError(EXIT_TYPE, "budgets must be positive")
        kw["max_candidates"] = cand
    if args.budget_seconds is not None:
        if args.budget_seconds <= 0:
            raise CliError(EXIT_TYPE, "budgets must be positive")
        kw["time_limit"] = args.budget_seconds
    return EvalBudget(**kw)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _translate(f: Formula, mode: str, ne=False, mutation=None) -> Formula:
    kw = {"ne": True} if ne and mode == "top" else {}
    try:
        return translate(mode, f, mutation, **kw)
    except FragmentError as e:
        raise CliError(EXIT_FRAGMENT, f"fragment error: {e}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    f = _load_formula(args.formula)
    _emit(print_formula(f, pretty=args.pretty) + "\n", args.out)
    return EXIT_OK


def cmd_typecheck(args) -> int:
    f = _load_formula(args.formula)
    vocab = _typecheck(f)
    print("well-formed; vocabulary " + (", ".join(f"{k}/{v}" for k, v in sorted(vocab.items())) or "empty"))
    return EXIT_OK


def cmd_translate(args) -> int:
    f = _load_formula(args.formula)
    _typecheck(f)
    try:
        so = _translate(f, args.mode, args.ne, args.mutation)
    except TranslationTooLarge as e:
        # too large to materialise: report the planned tables only
        _emit(f"; translation not emitted: about {e.estimate} nodes\n"
              + "".join(f"; {ln}\n" for ln in e.report.render().splitlines()), args.out)
        return EXIT_OK
    rep = arity_report(so)
    _emit(print_formula(so, pretty=args.pretty) + "\n"
          + "".join(f"; {ln}\n" for ln in rep.render().splitlines()), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    f = _load_formula(args.formula)
    A = _load_structure(args.structure)
    _typecheck(f, A.vocabulary)
    try:
        v = evaluate(A, f, budget=_budget(args))
    except BudgetExceeded:
        print("budget-exceeded")
        return EXIT_BUDGET
    print("true" if v else "false")
    return EXIT_OK


def _report_exit(rep) -> int:
    if rep.disagree:
        return EXIT_DISAGREE
    if rep.budget:
        return EXIT_BUDGET
    return EXIT_OK


def _check_corpus(args, budget) -> int:
    items = corpus_mod.corpus_items()
    if args.corpus not in items:
        raise CliError(EXIT_TYPE, f"unknown corpus item {args.corpus}; have {', '.join(items)}")
    item = items[args.corpus]
    node = item.formula
    so = _translate(node, "schema", mutation=args.mutation)
    bad = over = 0
    for name, A in item.structures.items():
        want = item.expected[name]
        try:
            if args.witness:
                got, cert = certify_schema(A, node, budget, so)
            else:
                got, cert = eval_schema(A, node, budget), None
                if args.max_n is None or A.n <= args.max_n:
                    cert = evaluate(A, so, budget=budget) == got
        except BudgetExceeded:
            print(f"{name}: budget-exceeded")
            over += 1
            continue
        ok = got == want and cert is not False
        bad += not ok
        extra = "" if cert is None else (" witness " if args.witness else " translation ") + (
            "agrees" if cert else "disagrees")
        print(f"{name}: expected {str(want).lower()}, schema {str(got).lower()}{extra}"
              f"{'' if ok else '  MISMATCH'}")
    print(f"{item.name}: {len(item.structures)} structures, {bad} mismatches, {over} budget-exceeded")
    return EXIT_DISAGREE if bad else (EXIT_BUDGET if over else EXIT_OK)


def _check_mutation_probes(args, budget) -> int:
    """Run the probes catalogued for a mutation against the mutated translator."""
    from .harness import MUTATION_CATALOGUE
    by_name = {m.name: m for m in MUTATION_CATALOGUE}
    if args.mutation not in by_name:
        raise CliError(EXIT_TYPE, f"unknown mutation {args.mutation}; have {', '.join(by_name)}")
    m = by_name[args.mutation]
    worst = EXIT_OK
    for i, (build, vocab, max_n) in enumerate(m.probes):
        f = build()
        print(print_formula(f))
        so = _translate(f, m.mode, mutation=m.name)
        rep = check_equivalence(f, so, enumerate_structures(dict(vocab), max_n), budget,
                                f"{m.name} probe {i}")
        sys.stdout.write(rep.render())
        worst = max(worst, _report_exit(rep))
    return worst


def cmd_check(args) -> int:
    budget = _budget(args)
    if args.corpus:
        return _check_corpus(args, budget)
    if args.mutation and not args.formula:
        return _check_mutation_probes(args, budget)
    max_n = args.max_n if args.max_n is not None else 2
    if args.formula:
        f = _load_formula(args.formula)
        vocab = _typecheck(f)
        fid = args.formula
    else:
        if args.mode == "top":
            fam = TopFamily()
            f = random_top_formula(args.seed, fam)
        elif args.mode == "ho4":
            fam = Ho4Family()
            f = random_ho4_formula(args.seed, fam)
        else:
            raise CliError(EXIT_TYPE, "random formulae exist for modes top and ho4; give a file or --corpus")
        vocab = dict(fam.vocabulary)
        fid = f"seed {args.seed} ({args.mode})"
        print(print_formula(f))
    so = _translate(f, args.mode, args.ne, args.mutation)
    rep = check_equivalence(f, so, enumerate_structures(vocab, max_n), budget, fid)
    sys.stdout.write(rep.render())
    if args.summary:
        Path(args.summary).write_text(json.dumps(rep.summary(), indent=2) + "\n", encoding="utf-8")
    return _report_exit(rep)


def cmd_corpus(args) -> int:
    items = corpus_mod.corpus_items()
    if args.action == "list":
        for name, item in items.items():
            exp = " ".join(f"{k}={str(v).lower()}" for k, v in item.expected.items())
            print(f"{name}: {exp}  (oracle: {item.oracle})")
        for name in corpus_mod.micro_schemas():
            print(f"micro/{name}")
        return EXIT_OK
    if args.action == "write":
        root = Path(args.out) if args.out else corpus_mod.DATA
        for p in corpus_mod.write_data(root):
            print(p)
        return EXIT_OK
    # show
    name = args.name
    files = corpus_mod.data_files()
    for key in (name, f"{name}.schema", f"micro/{name}.schema"):
        if key in files:
            sys.stdout.write(files[key])
            return EXIT_OK
    raise CliError(EXIT_TYPE, f"no corpus file {name}; try `hoql corpus list`")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoql", description="Higher-order logic to SO workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def budget_flags(sp):
        sp.add_argument("--budget-candidates", type=int, default=None,
                        help=f"max candidates per quantifier (default from ${BUDGET_ENV})")
        sp.add_argument("--budget-seconds", type=float, default=None, help="wall-clock limit per evaluation")

    sp = sub.add_parser("parse", help="parse and print a formula")
    sp.add_argument("formula")
    sp.add_argument("--pretty", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("typecheck", help="check well-formedness")
    sp.add_argument("formula")
    sp.set_defaults(func=cmd_typecheck)

    modes = ("top", "schema", "ho4")
    sp = sub.add_parser("translate", help="translate to SO")
    sp.add_argument("formula")
    sp.add_argument("--mode", choices=modes, required=True)
    sp.add_argument("--ne", action="store_true", help="assume no empty components (top mode)")
    sp.add_argument("--mutation", help="apply a catalogued translator mutation")
    sp.add_argument("--pretty", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("eval", help="evaluate a formula on a structure")
    sp.add_argument("formula")
    sp.add_argument("structure")
    budget_flags(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("check", help="compare a formula with its translation")
    sp.add_argument("formula", nargs="?")
    sp.add_argument("--mode", choices=modes, default="top")
    sp.add_argument("--max-n", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--corpus", help="corpus item name (schema mode)")
    sp.add_argument("--witness", action="store_true", help="certify corpus positives by witness")
    sp.add_argument("--ne", action="store_true")
    sp.add_argument("--mutation")
    sp.add_argument("--summary", help="write a JSON summary here")
    budget_flags(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("corpus", help="list, show or write the corpus")
    sp.add_argument("action", choices=("list", "show", "write"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "corpus" and args.action == "show" and not args.name:
        print("corpus show needs a name", file=sys.stderr)
        return EXIT_TYPE
    if args.command == "check" and args.max_n is not None and args.max_n < 1:
        print("--max-n must be >= 1", file=sys.stderr)
        return EXIT_TYPE
    try:
        return args.func(args)
    except CliError as e:
        print(e, file=sys.stderr)
        return e.code
    except BrokenPipeError:
        # output piped into head and friends
        sys.stderr.close()
        return EXIT_OK
    except ValueError as e:
        # mutation names, malformed inputs detected past parsing
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
