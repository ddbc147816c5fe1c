import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from hybrid_betti.graph import Graph

ACCEPTANCE_LINES: dict[int, str] = {}


def gnp(n: int, p: float, seed: int) -> Graph:
    return Graph.from_edges(nx.gnp_random_graph(n, p, seed=seed).edges(), n=n)


def complete(n: int) -> Graph:
    return Graph.from_edges(itertools.combinations(range(n), 2), n=n)


def cycle(n: int) -> Graph:
    return Graph.from_edges(((i, (i + 1) % n) for i in range(n)), n=n)


def disjoint_union(*graphs: Graph) -> Graph:
    edges, off = [], 0
    for g in graphs:
        edges += [(u + off, v + off) for u, v in g.edges]
        off += g.n
    return Graph.from_edges(edges, n=off)


@st.composite
def graphs(draw, min_n=0, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges([e for e, keep in zip(pairs, mask) if keep], n=n)


def dense_boundary(faces, simplices) -> np.ndarray:
    """Independent boundary assembly by dictionary lookup (no ranking tricks)."""
    index = {f: i for i, f in enumerate(faces)}
    m = np.zeros((len(faces), len(simplices)), dtype=np.int64)
    for j, s in enumerate(simplices):
        for i in range(len(s)):
            m[index[s[:i] + s[i + 1 :]], j] = (-1) ** i
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
