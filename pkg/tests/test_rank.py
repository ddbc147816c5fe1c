import warnings

import numpy as np
import pytest
from conftest import cycle, gnp
from hypothesis import given, settings
from hypothesis import strategies as st

from hybrid_betti.chain import boundary_matrix, exact_betti, gram_operator
from hybrid_betti.cliques import build_simplex_sets
from hybrid_betti.graph import Graph
from hybrid_betti.rank import (
    DenseOperator,
    EstimationError,
    RankEstimatorConfig,
    apply_filter,
    default_degree,
    estimate_betti,
    estimate_betti_from_sets,
    estimate_kernel_fraction,
    filter_values,
    hutchinson_samples,
    is_under_resolved,
    plan_probes,
    plan_probes_multiplicative,
    rademacher_probe,
    step_coefficients,
)
from hybrid_betti.readers import load_graph


def test_plan_probes_examples():
    assert plan_probes(0.1, 0.05) == 185
    assert plan_probes(0.05, 0.1) == 600
    with pytest.raises(EstimationError):
        plan_probes(1.0, 0.1)


@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.floats(0.001, 0.05))
def test_plan_probes_monotone(eps, eta, step):
    assert plan_probes(min(eps + step, 0.99), eta) <= plan_probes(eps, eta)
    assert plan_probes(eps, min(eta + step, 0.99)) <= plan_probes(eps, eta)


def test_plan_probes_multiplicative_examples():
    assert plan_probes_multiplicative(0.5, 0.1, 4, 1) == plan_probes(0.125, 0.1) == 96
    assert plan_probes_multiplicative(0.3, 0.1, 7, 7) == plan_probes(0.3, 0.1)
    with pytest.raises(EstimationError):
        plan_probes_multiplicative(0.5, 0.1, 4, 0)


def test_config_validation():
    for bad in (dict(epsilon=0), dict(eta=1), dict(threshold=0), dict(degree=0), dict(probes=0)):
        with pytest.raises(EstimationError):
            RankEstimatorConfig(**bad)


def test_filter_separates_zero_from_threshold():
    theta = 0.01
    deg = default_degree(theta, 0.05)
    c = step_coefficients(theta, deg)
    assert not is_under_resolved(theta, deg)
    assert abs(filter_values(0.0, c) - 1) < 0.01
    xs = np.linspace(theta, 1, 500)
    assert np.max(np.abs(filter_values(xs, c))) < 0.01
    assert is_under_resolved(theta, 5)


def test_apply_filter_matches_spectral_evaluation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(12, 12)))
    lam = rng.random(12)
    a = (q * lam) @ q.T
    c = step_coefficients(0.2, 40)
    want = (q * filter_values(lam, c)) @ q.T
    z = rng.normal(size=(12, 3))
    assert np.allclose(apply_filter(lambda x: a @ x, c, z), want @ z)


def test_probes_depend_only_on_seed_stream_index():
    a = rademacher_probe(3, 1, 7, 50)
    assert np.array_equal(a, rademacher_probe(3, 1, 7, 50))
    assert not np.array_equal(a, rademacher_probe(3, 0, 7, 50))
    assert set(np.unique(a)) <= {-1.0, 1.0}


def test_parallel_probes_identical_to_serial(rng):
    a = np.diag(rng.random(30))
    c = step_coefficients(0.1, 30)
    s = hutchinson_samples(lambda x: a @ x, c, 30, 1200, seed=2)
    p = hutchinson_samples(lambda x: a @ x, c, 30, 1200, seed=2, workers=3)
    assert np.array_equal(s, p)


def test_hutchinson_is_unbiased(rng):
    q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
    a = (q * rng.random(10)) @ q.T
    c = step_coefficients(0.3, 20)
    samples = hutchinson_samples(lambda x: a @ x, c, 10, 20000, seed=9)
    trace = np.trace((q * filter_values(np.linalg.eigvalsh(a), c)) @ q.T)
    se = samples.std(ddof=1) / np.sqrt(len(samples))
    assert abs(samples.mean() - trace) < 3 * se


def test_kernel_fraction_examples():
    zero = estimate_kernel_fraction(DenseOperator(np.zeros((8, 8))), RankEstimatorConfig(threshold=0.25))
    assert zero.value == pytest.approx(1.0, abs=1e-9) and zero.stderr == pytest.approx(0, abs=1e-12)
    one = estimate_kernel_fraction(DenseOperator(np.eye(8)), RankEstimatorConfig(threshold=0.25))
    assert one.value < 0.02
    with pytest.raises(EstimationError):
        estimate_kernel_fraction(DenseOperator(2 * np.eye(3)), RankEstimatorConfig(threshold=0.25))


def test_kernel_fraction_on_the_diagonal_example():
    a = np.diag([0.5] * 30 + [0.0] * 70)
    hits = 0
    for seed in range(20):
        est = estimate_kernel_fraction(DenseOperator(a), RankEstimatorConfig(threshold=0.25, seed=seed))
        hits += 0.65 <= est.value <= 0.75
    assert hits >= 18


def test_exact_mode_agrees_with_oracle():
    for seed in range(15):
        g = gnp(12, 0.45, seed)
        sets = build_simplex_sets(g, 4)
        for r in range(3):
            if len(sets[r]):
                est = estimate_betti_from_sets(sets, r, mode="exact")
                assert est.normalized == pytest.approx(exact_betti(g, r, sets=sets) / len(sets[r]), abs=1e-9)


def test_betti_examples():
    c4 = estimate_betti(cycle(4), 1, mode="exact")
    assert (c4.normalized, c4.absolute) == (pytest.approx(0.25), pytest.approx(1.0))
    tri = estimate_betti(load_graph("fixture:triangle"), 1, mode="exact")
    assert tri.normalized == pytest.approx(0.0, abs=1e-12)
    assert tri.components == pytest.approx((1 / 3, 0.0, -1 / 3))
    with pytest.raises(EstimationError, match="no 2-simplices"):
        estimate_betti(cycle(4), 2)


def test_octahedron_stochastic_within_epsilon():
    g = load_graph("fixture:octahedron")
    hits = sum(abs(estimate_betti(g, 2, RankEstimatorConfig(seed=s)).normalized - 1 / 8) <= 0.05 for s in range(10))
    assert hits >= 9


def test_stochastic_estimate_is_deterministic_and_serialisable():
    g = gnp(14, 0.4, 1)
    a = estimate_betti(g, 1, RankEstimatorConfig(seed=5))
    b = estimate_betti(g, 1, RankEstimatorConfig(seed=5))
    assert a.to_json() == b.to_json()
    assert a.normalized == pytest.approx(sum(a.components))
    assert 0 <= a.kernel_fraction_r <= 1 and 0 <= a.kernel_fraction_up <= 1


def test_small_gap_is_flagged():
    # a long path has Gram eigenvalues far below the default threshold
    g = Graph.from_edges([(i, i + 1) for i in range(30)])
    op = gram_operator(boundary_matrix(build_simplex_sets(g, 1)[1]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = estimate_kernel_fraction(op, RankEstimatorConfig(probes=50))
    assert est.gap_below_threshold
    assert any("below threshold" in str(w.message) for w in caught)
