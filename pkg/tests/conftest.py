import sys

import pytest

from memfuzzy.compiler import compile_rows
from memfuzzy.crossbar import CrossbarArray
from memfuzzy.programming import program_matrix

from twosets import TWO_SET_GRID, TWO_SET_SPEC_TEXT, SET_A, SET_B


@pytest.fixture(scope="session")
def two_set_targets():
    return compile_rows([SET_A, SET_B], TWO_SET_GRID)


@pytest.fixture(scope="session")
def two_set_programmed(two_set_targets):
    array, report = program_matrix(CrossbarArray(2, TWO_SET_GRID.n), two_set_targets)
    return array, report


@pytest.fixture
def two_set_spec_file(tmp_path):
    path = tmp_path / "two_sets.spec"
    path.write_text(TWO_SET_SPEC_TEXT)
    return path


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
