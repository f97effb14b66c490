import pathlib

import pytest

from capsal.wordnet import apply_edits, parse_edit_script, parse_wordnet

_ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion with a summary line"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        name = marker.args[0] if marker.args else item.name
        _ACCEPTANCE_RESULTS.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        status = {"passed": "PASS", "skipped": "SKIP"}.get(outcome, "FAIL")
        terminalreporter.write_line(f"[{status}] {name}")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
MINI_WN = FIXTURES / "mini_wordnet"
DEFAULT_EDITS = (
    pathlib.Path(__file__).parents[1] / "src" / "capsal" / "data" / "ontology_edits.txt"
)


def parse_mini_tree():
    return parse_wordnet(
        MINI_WN / "index.noun", MINI_WN / "data.noun", MINI_WN / "noun.exc"
    )


@pytest.fixture()
def mini_tree():
    return parse_mini_tree()


@pytest.fixture()
def edited_tree():
    tree = parse_mini_tree()
    return apply_edits(tree, parse_edit_script(DEFAULT_EDITS))
