import json
from pathlib import Path

import pytest

from jitterlab import RunCollection

AC_RESULTS = {}


def write_jsonl(path: Path, rows) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


def table1_collections():
    """The two runs of each architecture from the introduction's worked example.

    100 examples, all gold "pos". A wrong prediction is "neg".
    """
    gold = ["pos"] * 100

    def run(wrong):
        return ["neg" if k + 1 in wrong else "pos" for k in range(100)]

    bilstm = RunCollection.from_lists(
        gold, [run(range(91, 96)), run(range(97, 101))], ["M1", "M2"], alphabet=["pos", "neg"]
    )
    textcnn = RunCollection.from_lists(
        gold, [run(range(91, 96)), run(range(91, 95))], ["M1", "M2"], alphabet=["pos", "neg"]
    )
    return bilstm, textcnn


@pytest.fixture
def jsonl(tmp_path):
    def _write(name, rows):
        return write_jsonl(tmp_path / name, rows)
    return _write


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    AC_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in AC_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
