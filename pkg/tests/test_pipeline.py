import pytest

from graphlets.core import rate_matrix
from graphlets.em import EmConfig
from graphlets.pipeline import decompose


def test_decompose_two_cliques(two_clique_model):
    d = decompose(rate_matrix(two_clique_model).to_network())
    assert d.candidates.k == 2 and d.model.k == 2
    assert d.converged and d.approx is None
    assert d.iterations == d.fit.iterations + (d.refit.iterations if d.refit else 0)
    assert d.seconds == pytest.approx(d.candidate_seconds + d.em_seconds)
    assert d.sweep.q == 2


def test_decompose_with_target(two_clique_model):
    d = decompose(rate_matrix(two_clique_model), target_accuracy=0.5)
    assert d.approx.k_tilde == 1
    assert d.approx.model.basis.cliques == ((2, 3),)


def test_callback_sees_fit_and_refit(two_clique_model):
    y = rate_matrix(two_clique_model).to_network()
    calls = []
    d = decompose(y, EmConfig(), callback=lambda s: calls.append(s.iteration))
    assert len(calls) == d.iterations


def test_empty_network_rejected():
    from graphlets.core import WeightedNetwork

    with pytest.raises(ValueError, match="empty network"):
        decompose(WeightedNetwork(3, {}))
