import numpy as np
import pytest

from netdiff.graph import Graph


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """Hub 0 with n-1 leaves."""
    return Graph(n, [(0, i) for i in range(1, n)])


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def star4():
    return star_graph(4)


@pytest.fixture
def path4():
    return path_graph(4)
