import numpy as np
import pytest

from dymond.temporal_graph import TemporalGraph


@pytest.fixture
def triangle_graph():
    """One triangle persisting over two snapshots."""
    es = [[(0, 1), (0, 2), (1, 2)]] * 2
    return TemporalGraph.from_edge_sets(es, labels=range(3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k} ({title}): {detail}")
