import numpy as np
import pytest
from conftest import gnp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hybrid_betti.block_encoding import (
    TOL,
    BlockEncodingError,
    compose_lcu,
    compose_product,
    compose_tensor,
    dilate,
    encode_gram,
    identity_encoding,
    scale,
    verify_action,
)
from hybrid_betti.chain import boundary_matrix, exact_kernel_dim, gram_operator
from hybrid_betti.cliques import build_simplex_sets
from hybrid_betti.graph import Graph
from hybrid_betti.readers import load_graph


def triangle_gram():
    return encode_gram(boundary_matrix(build_simplex_sets(load_graph("fixture:triangle"), 1)[1]))


def assert_valid(be):
    assert be.unitarity_defect() < TOL
    assert be.block_defect() < TOL


def random_contraction(rng, d, complex_=False):
    a = rng.normal(size=(d, d)) + (1j * rng.normal(size=(d, d)) if complex_ else 0)
    return a / (np.linalg.norm(a, 2) * 1.01)


def test_dilate_identity_and_scalar():
    be = dilate(np.eye(2))
    assert_valid(be)
    assert np.allclose(be.block, np.eye(2))
    assert_valid(dilate([[1.0]]))


def test_dilate_rejects_expansions():
    with pytest.raises(BlockEncodingError, match="1.5"):
        dilate(np.diag([1.5, 0.2]))


def test_dilate_complex(rng):
    assert_valid(dilate(random_contraction(rng, 5, complex_=True)))


def test_verify_action_examples(rng):
    phi = rng.normal(size=3)
    phi /= np.linalg.norm(phi)
    res, orth = verify_action(identity_encoding(3), phi)
    assert res == 0 and orth == 0
    uniform = np.ones(3) / np.sqrt(3)
    res, orth = verify_action(triangle_gram(), uniform)
    assert res < 1e-10 and orth < 1e-10
    prod = compose_product(triangle_gram(), triangle_gram())
    res, orth = verify_action(prod, phi)
    assert res < 1e-9 and orth < 1e-9
    with pytest.raises(BlockEncodingError):
        verify_action(triangle_gram(), np.ones(3))


def test_composition_examples():
    ident = identity_encoding(3)
    p = compose_product(ident, ident)
    assert_valid(p)
    assert np.allclose(p.block, np.eye(3))
    a = triangle_gram()
    lcu = compose_lcu([a, a], [1, 1])
    assert_valid(lcu)
    assert np.allclose(lcu.block, a.encoded)
    sq = compose_product(a, a)
    assert_valid(sq)
    assert np.allclose(sq.block, a.encoded @ a.encoded)


def test_identity_leaves_encodings_unchanged():
    a = triangle_gram()
    for be in (compose_product(identity_encoding(3), a), compose_product(a, identity_encoding(3))):
        assert np.allclose(be.block, a.encoded, atol=1e-12)


def test_lcu_signs_and_mixed_ancillas(rng):
    a = dilate(random_contraction(rng, 3))
    b = compose_product(dilate(random_contraction(rng, 3)), dilate(random_contraction(rng, 3)))
    c = dilate(random_contraction(rng, 3))
    lcu = compose_lcu([a, b, c], [1, -1, 1])
    assert_valid(lcu)
    assert np.allclose(lcu.block, (a.encoded - b.encoded + c.encoded) / 3)
    assert lcu.subnormalization == 3
    with pytest.raises(BlockEncodingError):
        compose_lcu([a], [2])


def test_tensor_and_scale(rng):
    a, b = dilate(random_contraction(rng, 2)), dilate(random_contraction(rng, 3))
    t = compose_tensor([a, b])
    assert_valid(t)
    assert np.allclose(t.block, np.kron(a.encoded, b.encoded))
    s = scale(a, 4.0)
    assert_valid(s)
    assert np.allclose(s.block, a.encoded / 4)
    with pytest.raises(BlockEncodingError):
        scale(a, 1.0)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)), st.floats(1.01, 10))
def test_random_contractions_dilate_and_compose(a, p):
    norm = np.linalg.norm(a, 2)
    if norm > 1:
        a = a / norm
    be = dilate(a)
    assert_valid(be)
    assert_valid(scale(be, p))
    assert_valid(compose_product(be, be))


def test_encode_gram_examples():
    single = encode_gram(boundary_matrix(build_simplex_sets(Graph.from_edges([(0, 1)]), 1)[1]))
    assert np.allclose(single.encoded, [[1.0]])
    tri = triangle_gram()
    assert np.linalg.norm(tri.encoded, 2) <= 1 + 1e-12
    assert tri.metadata["sparsity"] == 2
    octa = encode_gram(boundary_matrix(build_simplex_sets(load_graph("fixture:octahedron"), 2)[2]))
    assert_valid(octa)
    assert int(np.sum(np.linalg.eigvalsh(octa.encoded) < 1e-9)) == 1
    empty = encode_gram(boundary_matrix(build_simplex_sets(load_graph("fixture:c4"), 2)[2]))
    assert empty.dim == 0


@pytest.mark.parametrize("seed", range(6))
def test_encode_gram_preserves_kernel(seed):
    g = gnp(10, 0.5, seed)
    for r, s in enumerate(build_simplex_sets(g, 3)):
        if len(s):
            m = boundary_matrix(s)
            be = encode_gram(m)
            assert_valid(be)
            assert be.subnormalization == gram_operator(m).normalization
            assert int(np.sum(np.linalg.eigvalsh(be.encoded) < 1e-9)) == exact_kernel_dim(m)
