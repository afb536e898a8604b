from __future__ import annotations

import pytest


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    # structure tables persist to disk; keep test runs away from the user's cache
    mp = pytest.MonkeyPatch()
    mp.setenv("WBR_CACHE_DIR", str(tmp_path_factory.mktemp("wbr-cache")))
    yield
    mp.undo()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
