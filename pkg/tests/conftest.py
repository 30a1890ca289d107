import sys

import pytest

from hoql.logic import FiniteStructure


def unary_structures(max_n=2, name="P"):
    out = []
    for n in range(1, max_n + 1):
        for m in range(2 ** n):
            out.append(FiniteStructure.build(n, {name: {(i,) for i in range(n) if m >> i & 1}}, {name: 1}))
    return out


@pytest.fixture
def k2():
    return FiniteStructure.build(2, {"E": {(0, 1), (1, 0)}}, {"E": 2})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
