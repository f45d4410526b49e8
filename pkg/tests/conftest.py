import functools

import pytest

from plagrange.search import min_lagrange


@functools.lru_cache(maxsize=None)
def _solve(p: int):
    return min_lagrange(p)


@pytest.fixture(scope="session")
def solve():
    """Cached ``min_lagrange`` so several tests can share one search."""
    return _solve


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
