import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlets.cliques import candidate_basis
from graphlets.core import CliqueBasis, GraphletModel, RateMatrix, WeightedNetwork, rate_matrix, total_weight
from graphlets.em import (
    CoverageError,
    EmConfig,
    EmResult,
    EmState,
    PoissonDeconvolution,
    em_step,
    fit,
    log_likelihood,
    prune,
    truncate_to_accuracy,
    truncate_to_count,
)
from graphlets.synth import SynthConfig, sample_model, sample_network


def _state(y, basis, mu):
    return EmState(np.asarray(mu, dtype=float), basis.pair_counts.astype(float))


def test_config_validation():
    for bad in ({"epsilon": 0}, {"max_iters": 0}, {"prune_fraction": 1.0}, {"prune_fraction": -0.1}):
        with pytest.raises(ValueError):
            EmConfig(**bad)


def test_single_clique_one_step(triangle):
    basis = CliqueBasis(3, ((0, 1, 2),))
    out = em_step(triangle, basis, _state(triangle, basis, [7.0]))
    assert out.mu[0] == pytest.approx(2.0, rel=1e-15)
    assert out.iteration == 1 and len(out.loglik_trace) == 1


def test_fit_triangle(triangle):
    result = fit(triangle, CliqueBasis(3, ((0, 1, 2),)))
    assert result.converged
    assert result.model.mu[0] == pytest.approx(2.0, rel=1e-12)


def test_fit_two_cliques(two_clique_model):
    y = rate_matrix(two_clique_model).to_network()
    basis, _ = candidate_basis(y)
    result = fit(y, basis)
    est = dict(zip(result.model.basis.cliques, result.model.mu))
    assert est[(0, 1, 2)] == pytest.approx(1.0, rel=1e-6)
    assert est[(2, 3)] == pytest.approx(3.0, rel=1e-6)


def test_clique_without_positive_edges_goes_to_zero(triangle):
    y = WeightedNetwork(5, dict(triangle.edges))
    result = fit(y, CliqueBasis(5, ((0, 1, 2), (3, 4))))
    assert result.model.mu[1] == 0.0
    assert result.model.mu[0] == pytest.approx(2.0)


def test_fixed_point_is_stable(triangle):
    basis = CliqueBasis(3, ((0, 1, 2),))
    out = em_step(triangle, basis, _state(triangle, basis, [2.0]))
    assert abs(out.mu[0] - 2.0) <= 1e-15


def test_disjoint_cliques_decouple():
    y = WeightedNetwork.from_edges(5, [(0, 1, 4), (0, 2, 1), (1, 2, 1), (3, 4, 5)])
    basis = CliqueBasis(5, ((0, 1, 2), (3, 4)))
    out = em_step(y, basis, _state(y, basis, [1.0, 1.0]))
    assert out.mu[0] == pytest.approx(2 * 6 / 6)
    assert out.mu[1] == pytest.approx(2 * 5 / 2)


def test_log_likelihood_examples(triangle):
    model = GraphletModel(CliqueBasis(3, ((0, 1, 2),)), [2.0])
    assert log_likelihood(triangle, model) == pytest.approx(6 * (2 * math.log(2) - 2))
    # pairs with rate but no observed weight contribute only their rate
    y = WeightedNetwork(3, {(0, 1): 1})
    assert log_likelihood(y, GraphletModel(CliqueBasis(3, ((0, 1, 2),)), [1.0])) == pytest.approx(-6.0)
    doubled = GraphletModel(model.basis, [4.0])
    assert log_likelihood(triangle, doubled) < log_likelihood(triangle, model)


def test_errors(triangle):
    with pytest.raises(CoverageError, match="uncovered positive edge"):
        fit(triangle, CliqueBasis(3, ((0, 1),)))
    with pytest.raises(ValueError, match="no positive edges"):
        fit(WeightedNetwork(3, {}), CliqueBasis(3, ((0, 1),)))
    with pytest.raises(CoverageError):
        log_likelihood(triangle, GraphletModel(CliqueBasis(3, ((0, 1),)), [1.0]))
    basis = CliqueBasis(3, ((0, 1, 2),))
    with pytest.raises(ZeroDivisionError, match="zero denominator"):
        em_step(triangle, basis, _state(triangle, basis, [0.0]))


def test_fit_accepts_rate_matrix(two_clique_model):
    lam = rate_matrix(two_clique_model)
    result = fit(lam, two_clique_model.basis)
    np.testing.assert_allclose(result.model.mu, [1.0, 3.0], rtol=1e-9)


def test_prune_keeps_both_true_cliques(two_clique_model):
    y = rate_matrix(two_clique_model).to_network()
    basis, _ = candidate_basis(y)
    model, refit = prune(y, fit(y, basis))
    assert model.k == 2 and refit is not None and refit.converged


def test_prune_removes_redundant_intersection():
    truth = GraphletModel(CliqueBasis(4, ((0, 1, 2), (1, 2, 3))), [2.0, 3.0])
    y = rate_matrix(truth).to_network()
    basis = CliqueBasis(4, ((0, 1, 2), (1, 2, 3), (1, 2)))
    model, _ = prune(y, fit(y, basis))
    assert set(model.basis.cliques) == {(0, 1, 2), (1, 2, 3)}
    np.testing.assert_allclose(sorted(model.mu), [2.0, 3.0], rtol=1e-6)


def test_prune_fraction_zero_only_drops_exact_zeros():
    basis = CliqueBasis(5, ((0, 1, 2), (3, 4), (0, 1)))
    result = EmResult(GraphletModel(basis, [2.0, 0.0, 1e-12]), True, 1, 0.0)
    y = WeightedNetwork.from_edges(5, [(0, 1, 2), (0, 2, 2), (1, 2, 2)])
    model, refit = prune(y, result, EmConfig(prune_fraction=0.0, refit_after_prune=False))
    assert refit is None
    assert model.basis.cliques == ((0, 1, 2), (0, 1))


def test_prune_protects_sole_cover():
    # the small clique is the only cover of edge (3, 4); dropping it would
    # leave a positive observation with zero rate
    y = WeightedNetwork.from_edges(5, [(0, 1, 1000), (0, 2, 1000), (1, 2, 1000), (3, 4, 1)])
    result = fit(y, CliqueBasis(5, ((0, 1, 2), (3, 4))))
    model, _ = prune(y, result, EmConfig(prune_fraction=0.01))
    assert model.k == 2


def test_prune_everything_zero_raises(triangle):
    result = EmResult(GraphletModel(CliqueBasis(3, ((0, 1, 2),)), [0.0]), True, 1, 0.0)
    with pytest.raises(ValueError, match="all coefficients pruned"):
        prune(triangle, result)


def _masses_663():
    return GraphletModel(CliqueBasis(9, ((0, 1, 2), (3, 4, 5), (6, 7, 8))), [2.0, 2.0, 1.0])


def test_truncate_examples():
    m = _masses_663()
    full = truncate_to_accuracy(m, 1.0)
    assert full.k_tilde == 3 and full.achieved_accuracy == 1.0 and full.excluded == ()
    empty = truncate_to_accuracy(m, 0.0)
    assert empty.k_tilde == 0 and empty.achieved_accuracy == 0.0
    eighty = truncate_to_accuracy(m, 0.8)
    assert eighty.k_tilde == 2 and eighty.achieved_accuracy == pytest.approx(0.8)
    assert eighty.excluded == (2,)
    assert eighty.reconstruction_error == pytest.approx(0.2)
    assert truncate_to_count(m, 3).achieved_accuracy == 1.0
    assert truncate_to_count(m, 0).achieved_accuracy == 0.0
    assert truncate_to_count(m, 1).achieved_accuracy == pytest.approx(0.4)
    with pytest.raises(ValueError):
        truncate_to_count(m, 4)
    with pytest.raises(ValueError):
        truncate_to_accuracy(m, 1.5)


def test_truncate_tie_break_prefers_larger_clique():
    m = GraphletModel(CliqueBasis(6, ((0, 1), (2, 3, 4, 5))), [2.0, 1.0])
    assert truncate_to_count(m, 1).model.basis.cliques == ((2, 3, 4, 5),)


@st.composite
def positive_models(draw):
    n = draw(st.integers(3, 9))
    cliques = draw(st.lists(st.frozensets(st.integers(0, n - 1), min_size=2, max_size=5), min_size=1, max_size=6, unique=True))
    mu = draw(st.lists(st.floats(0.01, 50), min_size=len(cliques), max_size=len(cliques)))
    return GraphletModel(CliqueBasis(n, tuple(tuple(c) for c in cliques)), mu)


@given(positive_models(), st.floats(0, 1))
def test_truncate_to_accuracy_is_shortest_sufficient_prefix(model, target):
    approx = truncate_to_accuracy(model, target)
    assert approx.achieved_accuracy >= target - 1e-12
    assert approx.k_tilde + len(approx.excluded) == model.k
    if approx.k_tilde > 0:
        assert truncate_to_count(model, approx.k_tilde - 1).achieved_accuracy < target - 1e-12


@given(positive_models(), st.integers(0, 2**31 - 1), st.booleans())
def test_em_invariants_on_random_networks(model, seed, accelerate):
    y = sample_network(model, seed)
    if not y.edges:
        return
    basis, _ = candidate_basis(y)
    total = total_weight(y)
    traces = []

    def check(state):
        assert np.all(state.mu >= 0)
        assert abs(float(np.dot(state.mu, state.t_k)) - total) <= 1e-9 * total
        traces.append(list(state.loglik_trace))

    result = fit(y, basis, EmConfig(max_iters=300, accelerate=accelerate), callback=check)
    trace = traces[-1]
    assert np.all(np.diff(trace) >= -1e-12 * max(1.0, abs(trace[0])))
    assert result.iterations <= 300


def test_monotone_plain_em_absolute_slack():
    model = sample_model(SynthConfig(n=20, lambda_k=6, bernoulli_p=0.2, seed=4))
    y = sample_network(model, 5)
    basis, _ = candidate_basis(y)
    result = fit(y, basis, EmConfig(max_iters=200, accelerate=False))
    assert np.all(np.diff(result.loglik_trace) >= -1e-12)


def test_fit_is_deterministic():
    model = sample_model(SynthConfig(n=30, lambda_k=10, bernoulli_p=0.1, seed=11))
    y = sample_network(model, 12)
    basis, _ = candidate_basis(y)
    a = fit(y, basis)
    b = fit(y, basis)
    assert np.array_equal(a.model.mu, b.model.mu)
    assert a.loglik_trace == b.loglik_trace


def test_accelerated_and_plain_reach_same_optimum():
    model = sample_model(SynthConfig(n=25, lambda_k=6, bernoulli_p=0.15, seed=2))
    y = sample_network(model, 3)
    basis, _ = candidate_basis(y)
    fast = fit(y, basis)
    slow = fit(y, basis, EmConfig(accelerate=False, max_iters=100_000, epsilon=1e-10))
    assert fast.final_loglik == pytest.approx(slow.final_loglik, abs=1e-6 * abs(slow.final_loglik))


def test_incidence_counts(two_clique_model):
    y = rate_matrix(two_clique_model).to_network()
    problem = PoissonDeconvolution(y, CliqueBasis(4, ((0, 1, 2), (2, 3), (1, 2))))
    assert problem.uncovered_edges() == []
    assert sorted(problem.cover_count.tolist()) == [1, 1, 1, 2]


def test_init_validation(triangle):
    with pytest.raises(ValueError):
        fit(triangle, CliqueBasis(3, ((0, 1, 2),)), init=[0.0])
    result = fit(triangle, CliqueBasis(3, ((0, 1, 2),)), init=[5.0])
    assert result.model.mu[0] == pytest.approx(2.0)


def test_rate_matrix_observation_is_not_rounded():
    lam = RateMatrix(3, {(0, 1): 0.5, (0, 2): 0.5, (1, 2): 0.5})
    assert fit(lam, CliqueBasis(3, ((0, 1, 2),))).model.mu[0] == pytest.approx(0.5)


def test_trace_matches_direct_evaluation():
    model = sample_model(SynthConfig(n=40, lambda_k=15, bernoulli_p=0.1, seed=9))
    y = sample_network(model, 10)
    basis, _ = candidate_basis(y)
    seen = []
    config = EmConfig(max_iters=500, accelerate=False)
    result = fit(y, basis, config, callback=lambda s: seen.append(s.mu.copy()))
    # without acceleration the iterate updated at step i + 1 is the output of step i
    previous = [PoissonDeconvolution(y, basis).loglik(problem_mu) for problem_mu in seen[:-1]]
    np.testing.assert_allclose(result.loglik_trace[1:], previous, rtol=1e-12)
