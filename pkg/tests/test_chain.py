import itertools
import math

import numpy as np
import pytest
from conftest import complete, cycle, dense_boundary, disjoint_union, gnp, graphs
from hypothesis import given, settings

from hybrid_betti.chain import (
    ChainError,
    betti_numbers,
    boundary_matrix,
    combinatorial_laplacian,
    exact_betti,
    exact_kernel_dim,
    exact_rank,
    gram_operator,
    parse_boundary_text,
    svd_rank,
)
from hybrid_betti.cliques import build_simplex_sets
from hybrid_betti.graph import Graph
from hybrid_betti.readers import load_graph
from hybrid_betti.simplex import colex_unrank


def column_by_face(m, j):
    return {colex_unrank(row, m.r): sign for row, sign in m.column(j).items()}


def test_edge_and_triangle_columns():
    tri = build_simplex_sets(load_graph("fixture:triangle"), 2)
    m1 = boundary_matrix(tri[1])
    assert column_by_face(m1, 0) == {(0,): -1, (1,): 1}
    m2 = boundary_matrix(tri[2])
    assert column_by_face(m2, 0) == {(1, 2): 1, (0, 2): -1, (0, 1): 1}
    assert math.isclose(math.sqrt(m1.frobenius_norm_sq()), math.sqrt(6))


def test_shape_follows_all_potential_faces():
    sets = build_simplex_sets(load_graph("fixture:octahedron"), 2)
    assert boundary_matrix(sets[2]).shape == (math.comb(6, 2), 8)
    assert boundary_matrix(sets[0]).shape == (0, 6)


def test_text_round_trip():
    sets = build_simplex_sets(load_graph("fixture:octahedron"), 2)
    m = boundary_matrix(sets[2])
    back = parse_boundary_text(m.to_text(), sets[2])
    assert (back.csc != m.csc).nnz == 0


def test_gram_examples():
    tri = build_simplex_sets(load_graph("fixture:triangle"), 1)
    op = gram_operator(boundary_matrix(tri[1]))
    assert op.matrix.shape == (3, 3) and np.all(np.diag(op.matrix) == 2)
    assert op.normalization == 6
    edge = build_simplex_sets(Graph.from_edges([(0, 1)]), 1)
    op1 = gram_operator(boundary_matrix(edge[1]))
    assert op1.matrix.tolist() == [[2.0]] and op1.normalized.tolist() == [[1.0]]
    c4 = build_simplex_sets(cycle(4), 2)
    assert gram_operator(boundary_matrix(c4[2])).dim == 0


def test_laplacian_examples():
    tri = build_simplex_sets(load_graph("fixture:triangle"), 2)
    lap0 = combinatorial_laplacian(boundary_matrix(tri[0]), boundary_matrix(tri[1]))
    assert lap0.tolist() == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    c4 = build_simplex_sets(cycle(4), 2)
    lap1 = combinatorial_laplacian(boundary_matrix(c4[1]), boundary_matrix(c4[2]))
    assert 4 - exact_rank(lap1) == 1
    iso = build_simplex_sets(Graph.empty(3), 1)
    assert not combinatorial_laplacian(boundary_matrix(iso[0]), boundary_matrix(iso[1])).any()
    with pytest.raises(ChainError):
        combinatorial_laplacian(boundary_matrix(tri[0]), boundary_matrix(tri[2]))


def test_kernel_examples():
    assert exact_kernel_dim(boundary_matrix(build_simplex_sets(cycle(4), 1)[1])) == 1
    assert exact_kernel_dim(boundary_matrix(build_simplex_sets(load_graph("fixture:tree"), 1)[1])) == 0
    assert exact_kernel_dim(boundary_matrix(build_simplex_sets(load_graph("fixture:octahedron"), 2)[2])) == 1


def test_betti_examples():
    assert betti_numbers(cycle(4)) == [1, 1]
    assert exact_betti(load_graph("fixture:triangle"), 1) == 0
    assert betti_numbers(load_graph("fixture:octahedron")) == [1, 0, 1]
    assert betti_numbers(disjoint_union(cycle(5), cycle(6), complete(4)), 2) == [3, 2, 0]
    with pytest.raises(ChainError):
        exact_betti(cycle(4), -1)


def test_exact_rank_matches_numpy_on_dependent_integer_matrix():
    rng = np.random.default_rng(0)
    a = rng.integers(-9, 10, size=(30, 30))
    a[:, -1] = a[:, 0] + 2 * a[:, 1]
    assert exact_rank(a) == np.linalg.matrix_rank(a) == 29


def test_exact_rank_rejects_fractions():
    with pytest.raises(ChainError):
        exact_rank(np.array([[0.5]]))


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=11))
def test_boundary_matches_independent_assembly_and_chain_property(g):
    sets = build_simplex_sets(g, 4)
    for r in range(1, 5):
        if not len(sets[r]):
            continue
        m = boundary_matrix(sets[r])
        # compare against dictionary-based assembly over the full face list
        faces = sorted(itertools.combinations(range(g.n), r), key=lambda t: t[::-1])
        want = dense_boundary(faces, list(sets[r]))
        assert np.array_equal(m.csc.toarray(), want)
        assert all(np.diff(m.csc.indptr) == r + 1)
        assert m.frobenius_norm_sq() == (r + 1) * len(sets[r])
    for r in range(1, 4):
        if len(sets[r + 1]) and len(sets[r]):
            up = boundary_matrix(sets[r + 1]).restrict_rows(sets[r])
            down = boundary_matrix(sets[r]).csc
            assert not (down @ up).toarray().any()


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=10))
def test_rank_nullity_euler_and_laplacian(g):
    sets = build_simplex_sets(g, g.n)
    top = max((s.r for s in sets if len(s)), default=-1)
    betti = [exact_betti(g, r, sets=sets) for r in range(top + 1)]
    chi = sum((-1) ** r * len(sets[r]) for r in range(top + 1))
    assert chi == sum((-1) ** r * b for r, b in enumerate(betti))
    for r in range(1, top + 1):
        m = boundary_matrix(sets[r])
        assert exact_rank(m) == svd_rank(m)
        assert exact_rank(m) + exact_kernel_dim(m) == len(sets[r])


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=10))
def test_gram_is_normalised_psd_with_matching_kernel(g):
    sets = build_simplex_sets(g, 3)
    for r in range(4):
        if not len(sets[r]):
            continue
        m = boundary_matrix(sets[r])
        op = gram_operator(m)
        w = np.linalg.eigvalsh(op.normalized)
        assert w.min() > -1e-12 and w.max() <= 1 + 1e-12
        assert np.allclose(op.matrix, op.matrix.T)
        assert exact_kernel_dim(m) == int(np.sum(w < 1e-9))


def test_betti_of_components_is_additive():
    a, b = gnp(9, 0.5, 3), gnp(8, 0.4, 4)
    u = disjoint_union(a, b)
    for r in range(3):
        assert exact_betti(u, r) == exact_betti(a, r) + exact_betti(b, r)
