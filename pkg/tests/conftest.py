import numpy as np
import pytest

from rainbowlab.core import ColoredHypergraph


def graph(n, edges, colors=None, c=None):
    """Graph from 0-based edge pairs; colours default to all distinct."""
    return ColoredHypergraph.from_edge_list(n, edges, colors, k=2, c=c)


def cycle_graph(n, colors=None):
    return graph(n, [(i, (i + 1) % n) for i in range(n)], colors)


def complete_graph(n, color=None):
    edges = [(a, b) for b in range(n) for a in range(b)]
    colors = None if color is None else [color] * len(edges)
    return graph(n, edges, colors, c=None if color is None else color + 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts, printed together at the end of the run
ACCEPTANCE = []


@pytest.fixture
def verdict():
    def record(label, ok, detail=""):
        line = f"{label:<4} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
