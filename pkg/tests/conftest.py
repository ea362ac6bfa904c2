from __future__ import annotations

import pytest

from droneplan.corpus import CorpusSpec, generate_corpus

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(11, 12, CorpusSpec(n_sites=4, n_stations=3))


@pytest.fixture
def verdict(request):
    """Record one acceptance line: verdict(number, ok, detail)."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number: int, ok: bool, detail: str) -> None:
        lines[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
