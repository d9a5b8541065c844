import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlets.core import (
    CliqueBasis,
    GraphletModel,
    RateMatrix,
    WeightedNetwork,
    network_power,
    rate_matrix,
    tau_norm,
    total_weight,
)


@st.composite
def models(draw, max_n=8, max_k=5):
    n = draw(st.integers(2, max_n))
    cliques = draw(
        st.lists(st.frozensets(st.integers(0, n - 1), min_size=2, max_size=n), max_size=max_k, unique=True)
    )
    mu = draw(st.lists(st.floats(0, 10), min_size=len(cliques), max_size=len(cliques)))
    return GraphletModel(CliqueBasis(n, tuple(tuple(c) for c in cliques)), np.array(mu))


def test_network_rejects_bad_entries():
    with pytest.raises(ValueError):
        WeightedNetwork(3, {(1, 0): 1})
    with pytest.raises(ValueError):
        WeightedNetwork(3, {(0, 1): 0})
    with pytest.raises(ValueError):
        WeightedNetwork(3, {(0, 1): 1.5})
    with pytest.raises(ValueError):
        WeightedNetwork.from_edges(3, [(1, 1, 2)])


def test_from_edges_sums_duplicates_and_reversals():
    y = WeightedNetwork.from_edges(3, [(0, 1, 2), (1, 0, 3), (1, 2, 0)])
    assert dict(y.edges) == {(0, 1): 5}
    assert y[1, 0] == 5 and y[1, 2] == 0 and y[2, 2] == 0
    assert y.node_labels == ("0", "1", "2")


def test_dense_round_trip():
    a = np.array([[0, 1, 0], [1, 0, 4], [0, 4, 0]])
    y = WeightedNetwork.from_dense(a)
    assert np.array_equal(y.to_dense(), a)
    assert np.array_equal(y.to_sparse().toarray(), a)


def test_basis_validation():
    with pytest.raises(ValueError):
        CliqueBasis(3, ((0,),))
    with pytest.raises(ValueError):
        CliqueBasis(3, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        CliqueBasis(3, ((0, 3),))
    with pytest.raises(ValueError):
        GraphletModel(CliqueBasis(3, ((0, 1),)), [-1.0])
    with pytest.raises(ValueError):
        GraphletModel(CliqueBasis(3, ((0, 1),)), [1.0, 2.0])
    b = CliqueBasis(4, ((2, 0, 1), (3, 2)))
    assert b.cliques == ((0, 1, 2), (2, 3))
    assert list(b.pair_counts) == [6, 2]


def test_reduced_drops_exact_zeros():
    m = GraphletModel(CliqueBasis(4, ((0, 1), (2, 3))), [0.0, 1.0])
    assert not m.is_reduced
    r = m.reduced()
    assert r.basis.cliques == ((2, 3),) and r.is_reduced


def test_rate_matrix_single_clique():
    lam = rate_matrix(GraphletModel(CliqueBasis(3, ((0, 1, 2),)), [2.0]))
    assert dict(lam.edges) == {(0, 1): 2.0, (0, 2): 2.0, (1, 2): 2.0}


def test_rate_matrix_two_cliques(two_clique_model):
    lam = rate_matrix(two_clique_model)
    assert lam[0, 1] == 1 and lam[2, 3] == 3 and lam[0, 3] == 0
    assert lam[3, 2] == 3


def test_rate_matrix_empty_basis():
    assert len(rate_matrix(GraphletModel(CliqueBasis(5), []))) == 0


def test_tau_norm_examples():
    assert tau_norm(GraphletModel(CliqueBasis(5, ((0, 1, 2), (3, 4))), [2.0, 3.0])) == 12
    assert tau_norm(GraphletModel(CliqueBasis(3), [])) == 0
    assert tau_norm(GraphletModel(CliqueBasis(4, ((0, 1, 2, 3),)), [0.5])) == 2.0


def test_total_weight_examples(triangle):
    assert total_weight(triangle) == 12
    assert total_weight(WeightedNetwork(3, {})) == 0
    assert total_weight(WeightedNetwork(2, {(0, 1): 5})) == 10


def test_network_power_path():
    y = WeightedNetwork.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    y2 = network_power(y, 2)
    assert dict(y2.edges) == {(0, 2): 1}


def test_network_power_single_edge_is_diagonal():
    assert len(network_power(WeightedNetwork(2, {(0, 1): 3}), 2)) == 0


def test_network_power_identity_and_range(triangle):
    assert dict(network_power(triangle, 1).edges) == dict(triangle.edges)
    assert dict(network_power(network_power(triangle, 1), 1).edges) == dict(triangle.edges)
    for k in (0, 6):
        with pytest.raises(ValueError):
            network_power(triangle, k)


def test_network_power_matches_dense():
    rng = np.random.default_rng(3)
    a = np.triu(rng.integers(0, 3, size=(7, 7)), 1)
    a = a + a.T
    y = WeightedNetwork.from_dense(a)
    for k in range(1, 6):
        expected = np.linalg.matrix_power(a, k)
        np.fill_diagonal(expected, 0)
        assert np.array_equal(network_power(y, k).to_dense(), expected)


def test_rate_matrix_to_network():
    lam = RateMatrix(3, {(0, 1): 2.0, (1, 2): 3.0000000000001})
    assert dict(lam.to_network().edges) == {(0, 1): 2, (1, 2): 3}
    with pytest.raises(ValueError):
        RateMatrix(3, {(0, 1): 2.5}).to_network()


@given(models(), st.data())
def test_rate_matrix_linear_in_mu(model, data):
    mu2 = np.array(data.draw(st.lists(st.floats(0, 10), min_size=model.k, max_size=model.k)))
    a = rate_matrix(model).to_dense()
    b = rate_matrix(GraphletModel(model.basis, mu2)).to_dense()
    c = rate_matrix(GraphletModel(model.basis, model.mu + mu2)).to_dense()
    np.testing.assert_allclose(c, a + b, rtol=1e-12, atol=1e-12)
    t = tau_norm(GraphletModel(model.basis, model.mu + mu2))
    assert t == pytest.approx(tau_norm(model) + tau_norm(GraphletModel(model.basis, mu2)))


@given(models())
def test_rate_matrix_total_mass(model):
    lam = rate_matrix(model)
    assert total_weight(lam) == pytest.approx(float(np.dot(model.mu, model.basis.pair_counts)))


@given(models())
def test_rate_matrix_matches_dense_product(model):
    b = model.basis.indicator_matrix().astype(float)
    dense = b @ np.diag(model.mu) @ b.T
    np.fill_diagonal(dense, 0)
    np.testing.assert_allclose(rate_matrix(model).to_dense(), dense, atol=1e-12)
