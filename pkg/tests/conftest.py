import numpy as np
import pytest
from hypothesis import settings

from polyconsensus import generate_rgg, path_graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def path3():
    return path_graph(3)


@pytest.fixture(scope="session")
def rgg50():
    return generate_rgg(50, 0)


def brute_edges(positions, radius):
    """Reference edge set by a double loop."""
    n = len(positions)
    out = set()
    for i in range(n):
        for j in range(i + 1, n):
            if np.hypot(*(positions[i] - positions[j])) < radius:
                out.add((i, j))
    return out


def bfs_reachable(n, edges):
    adj = {i: set() for i in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for v in adj[u] - seen:
            seen.add(v)
            stack.append(v)
    return seen


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
