import json
import subprocess
import sys

import pytest

from hoql.cli import (
    EXIT_BUDGET, EXIT_DISAGREE, EXIT_FRAGMENT, EXIT_OK, EXIT_PARSE, EXIT_TYPE, infer_vocabulary, main,
)
from hoql.corpus import DATA
from hoql.textio import parse_formula

HC = str(DATA / "hypercube.schema")
HC_TOP = str(DATA / "hypercube.top")
FV_TOP = str(DATA / "formula-value.top")
Q2 = str(DATA / "structures/hypercube/Q2.struct")
Q3 = str(DATA / "structures/hypercube/Q3.struct")
K3 = str(DATA / "structures/hypercube/K3.struct")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def w(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return w


def test_parse_round_trip(capsys, write):
    p = write("f.hoql", "(forall1 (x)   (exists1 (y) (atom E x y)))")
    code, out, _ = run(capsys, "parse", p)
    assert code == EXIT_OK and parse_formula(out) == parse_formula("(forall1 (x) (exists1 (y) (atom E x y)))")


def test_parse_error(capsys, write):
    code, _, err = run(capsys, "parse", write("bad.hoql", "(forall1 (x) (atom E x"))
    assert code == EXIT_PARSE and "bad.hoql" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "parse", str(tmp_path / "absent"))
    assert code == EXIT_PARSE and "no such file" in err


def test_typecheck(capsys, write):
    code, out, _ = run(capsys, "typecheck", HC)
    assert code == EXIT_OK and "E/2" in out
    code, _, err = run(capsys, "typecheck", write("t.hoql", "(exists2 (X 1) (atom2 X y))"))
    assert code == EXIT_TYPE and "type error" in err


def test_translate_top_arity(capsys):
    code, out, _ = run(capsys, "translate", HC_TOP, "--mode", "top")
    assert code == EXIT_OK and "; max arity 8" in out
    code, out, _ = run(capsys, "translate", FV_TOP, "--mode", "top")
    assert code == EXIT_OK and "not emitted" in out and "; max arity 22" in out


def test_translate_schema(capsys, tmp_path):
    out_file = tmp_path / "so.hoql"
    code, _, _ = run(capsys, "translate", HC, "--mode", "schema", "--out", str(out_file))
    text = out_file.read_text(encoding="utf-8")
    assert code == EXIT_OK and "; max arity 4" in text
    parse_formula("\n".join(ln for ln in text.splitlines() if not ln.startswith(";")))


def test_translate_wrong_fragment(capsys):
    code, _, err = run(capsys, "translate", HC, "--mode", "top")
    assert code == EXIT_FRAGMENT and "fragment" in err


def test_translate_unknown_mutation(capsys):
    code, _, _ = run(capsys, "translate", HC, "--mode", "schema", "--mutation", "nope")
    assert code == EXIT_TYPE


def test_eval(capsys):
    assert run(capsys, "eval", HC, Q2)[:2] == (EXIT_OK, "true\n")
    assert run(capsys, "eval", HC, K3)[:2] == (EXIT_OK, "false\n")


def test_eval_budget(capsys, monkeypatch):
    assert run(capsys, "eval", HC, Q3, "--budget-candidates", "2")[:2] == (EXIT_BUDGET, "budget-exceeded\n")
    monkeypatch.setenv("HOQL_BUDGET_CANDIDATES", "2")
    assert run(capsys, "eval", HC, Q3)[0] == EXIT_BUDGET
    monkeypatch.setenv("HOQL_BUDGET_CANDIDATES", "many")
    assert run(capsys, "eval", HC, Q3)[0] == EXIT_TYPE


def test_eval_bad_budget(capsys):
    assert run(capsys, "eval", HC, Q2, "--budget-candidates", "0")[0] == EXIT_TYPE


def test_check_random_seed(capsys, tmp_path):
    summary = tmp_path / "s.json"
    code, out, _ = run(capsys, "check", "--mode", "top", "--seed", "0", "--summary", str(summary))
    data = json.loads(summary.read_text())
    assert code == EXIT_OK and data["disagree"] == 0 and data["agree"] == data["structures"] > 0
    assert "0 disagree" in out


def test_check_file(capsys, write):
    p = write("f.hoql", "(exists3p (C (1) 1) (exists2 (X 1) (and (atom3 C X) (exists1 (x) (atom2 X x)))))")
    code, out, _ = run(capsys, "check", p, "--mode", "top")
    assert code == EXIT_OK and "0 disagree" in out


def test_check_mutation_detected(capsys):
    code, out, _ = run(capsys, "check", "--mutation", "top-drop-disjointness")
    assert code == EXIT_DISAGREE and "disagree on structure" in out


def test_check_corpus(capsys):
    code, out, _ = run(capsys, "check", "--corpus", "hypercube", "--max-n", "2")
    assert code == EXIT_OK and "0 mismatches" in out and "translation agrees" in out


def test_check_unknown_corpus(capsys):
    assert run(capsys, "check", "--corpus", "nope")[0] == EXIT_TYPE


def test_check_schema_needs_file(capsys):
    assert run(capsys, "check", "--mode", "schema")[0] == EXIT_TYPE


def test_usage_errors(capsys):
    assert run(capsys, "check", "--max-n", "0")[0] == EXIT_TYPE
    assert run(capsys, "corpus", "show")[0] == EXIT_TYPE
    with pytest.raises(SystemExit) as e:
        main(["translate", HC])
    assert e.value.code == 2


def test_corpus_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "corpus", "list")
    assert code == EXIT_OK and "hypercube: Q1=true" in out and "micro/grow" in out
    code, out, _ = run(capsys, "corpus", "show", "hypercube")
    assert code == EXIT_OK and parse_formula(out) == parse_formula(open(HC, encoding="utf-8").read())
    assert run(capsys, "corpus", "show", "grow")[0] == EXIT_OK
    assert run(capsys, "corpus", "show", "nope")[0] == EXIT_TYPE
    code, out, _ = run(capsys, "corpus", "write", "--out", str(tmp_path))
    assert code == EXIT_OK and (tmp_path / "hypercube.schema").exists()


def test_infer_vocabulary():
    f = parse_formula("(exists1 (x) (and (atom P x) (atom E x x)))")
    assert infer_vocabulary(f) == {"P": 1, "E": 2}


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hoql", "eval", HC, Q2], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "true\n"
