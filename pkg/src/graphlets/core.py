"""Network and model types for graphlet decomposition.

All containers are immutable after construction. Nodes are dense integer
indices ``0..n-1``; an optional tuple of string labels maps them back to the
identifiers seen at ingestion. Undirected pairs are always keyed ``(i, j)``
with ``i < j``.

Sums "over pairs" throughout the package run over *ordered* pairs, so an
undirected edge of weight ``w`` contributes ``2 * w``. This is the
convention of ``B W B'`` and is what the EM normalizers assume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

Pair = tuple[int, int]
Clique = tuple[int, ...]

MAX_POWER = 5


def _canonical_pair(i: int, j: int) -> Pair:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))


class _SparseSymmetric:
    """Shared behaviour for the two symmetric sparse containers."""

    n: int
    edges: Mapping[Pair, float]

    def __len__(self) -> int:
        return len(self.edges)

    def __getitem__(self, pair: Pair) -> float:
        i, j = pair
        if i == j:
            return 0
        return self.edges.get(_canonical_pair(i, j), 0)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pairs = sorted(self.edges)
        if not pairs:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0, dtype=self._dtype)
        u, v = np.array(pairs, dtype=np.int64).T
        w = np.array([self.edges[p] for p in pairs], dtype=self._dtype)
        return u, v, w

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(u, v, w)`` arrays sorted lexicographically by ``(u, v)``."""
        return self._arrays

    def to_dense(self) -> np.ndarray:
        u, v, w = self._arrays
        out = np.zeros((self.n, self.n), dtype=self._dtype)
        out[u, v] = w
        out[v, u] = w
        return out

    def to_sparse(self) -> sp.csr_matrix:
        u, v, w = self._arrays
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.concatenate([w, w])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def support(self) -> frozenset[Pair]:
        return frozenset(p for p, w in self.edges.items() if w > 0)

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True, eq=False)
class WeightedNetwork(_SparseSymmetric):
    """Symmetric integer-weighted graph with an empty diagonal.

    Only positive weights are stored. Construct through :meth:`from_edges`
    when the input may contain duplicates or reversed pairs.
    """

    n: int
    edges: Mapping[Pair, int]
    node_labels: tuple[str, ...] = ()

    _dtype = np.int64

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        if not self.node_labels:
            object.__setattr__(self, "node_labels", _default_labels(self.n))
        if len(self.node_labels) != self.n:
            raise ValueError("node_labels must have one entry per node")
        for (i, j), w in self.edges.items():
            if not 0 <= i < j < self.n:
                raise ValueError(f"pair {(i, j)} is not a canonical off-diagonal pair")
            if int(w) != w or w < 1:
                raise ValueError(f"weight of {(i, j)} must be a positive integer, got {w}")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, int]],
        node_labels: Iterable[str] | None = None,
    ) -> "WeightedNetwork":
        """Build from ``(i, j, w)`` triples, summing repeated pairs and dropping zeros."""
        acc: dict[Pair, int] = {}
        for i, j, w in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if int(w) != w or w < 0:
                raise ValueError(f"weight must be a nonnegative integer, got {w}")
            key = _canonical_pair(i, j)
            acc[key] = acc.get(key, 0) + int(w)
        acc = {p: w for p, w in acc.items() if w > 0}
        labels = tuple(node_labels) if node_labels is not None else ()
        return cls(n, acc, labels)

    @classmethod
    def from_dense(cls, y: np.ndarray, node_labels: Iterable[str] | None = None) -> "WeightedNetwork":
        y = np.asarray(y)
        if y.ndim != 2 or y.shape[0] != y.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.array_equal(y, y.T):
            raise ValueError("adjacency matrix must be symmetric")
        if np.any(np.diag(y) != 0):
            raise ValueError("adjacency matrix must have a zero diagonal")
        iu, ju = np.nonzero(np.triu(y, 1))
        return cls.from_edges(y.shape[0], zip(iu, ju, y[iu, ju]), node_labels)

    def binarize(self) -> "WeightedNetwork":
        return WeightedNetwork(self.n, {p: 1 for p in self.edges}, self.node_labels)


@dataclass(frozen=True, eq=False)
class RateMatrix(_SparseSymmetric):
    """Nonnegative real symmetric rates; pairs with rate zero are not stored."""

    n: int
    edges: Mapping[Pair, float]

    _dtype = np.float64

    def __post_init__(self) -> None:
        for (i, j), w in self.edges.items():
            if not 0 <= i < j < self.n:
                raise ValueError(f"pair {(i, j)} is not a canonical off-diagonal pair")
            if not w >= 0:
                raise ValueError(f"rate of {(i, j)} must be nonnegative, got {w}")

    @classmethod
    def from_network(cls, y: WeightedNetwork) -> "RateMatrix":
        return cls(y.n, {p: float(w) for p, w in y.edges.items()})

    def to_network(self, node_labels: Iterable[str] | None = None) -> WeightedNetwork:
        """Convert integer-valued rates (e.g. a noise-free rate matrix) to a network."""
        edges = {}
        for p, w in self.edges.items():
            r = round(w)
            if abs(w - r) > 1e-9 * max(1.0, abs(w)):
                raise ValueError(f"rate {w} at {p} is not integer-valued")
            if r > 0:
                edges[p] = int(r)
        labels = tuple(node_labels) if node_labels is not None else ()
        return WeightedNetwork(self.n, edges, labels)


def _canonical_clique(nodes: Iterable[int]) -> Clique:
    c = tuple(sorted(int(x) for x in nodes))
    if len(set(c)) != len(c):
        raise ValueError(f"clique {c} has repeated nodes")
    return c


@dataclass(frozen=True, eq=False)
class CliqueBasis:
    """Ordered collection of distinct cliques over ``n`` nodes.

    Each clique is a column of the binary basis matrix ``B``; it is stored as
    a sorted tuple of node indices of length at least two.
    """

    n: int
    cliques: tuple[Clique, ...] = ()

    def __post_init__(self) -> None:
        canon = tuple(_canonical_clique(c) for c in self.cliques)
        seen: set[Clique] = set()
        for c in canon:
            if len(c) < 2:
                raise ValueError(f"clique {c} has fewer than two nodes")
            if c[0] < 0 or c[-1] >= self.n:
                raise ValueError(f"clique {c} has nodes outside 0..{self.n - 1}")
            if c in seen:
                raise ValueError(f"duplicate clique {c}")
            seen.add(c)
        object.__setattr__(self, "cliques", canon)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliqueBasis):
            return NotImplemented
        return self.n == other.n and self.cliques == other.cliques

    def __hash__(self) -> int:
        return hash((self.n, self.cliques))

    @property
    def k(self) -> int:
        return len(self.cliques)

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def __getitem__(self, idx: int) -> Clique:
        return self.cliques[idx]

    def clique_size(self, i: int) -> int:
        return len(self.cliques[i])

    @cached_property
    def sizes(self) -> np.ndarray:
        """Clique sizes ``a_k`` as an integer array."""
        return np.array([len(c) for c in self.cliques], dtype=np.int64)

    @cached_property
    def pair_counts(self) -> np.ndarray:
        """Ordered-pair counts ``T_k = a_k (a_k - 1)``."""
        a = self.sizes
        return a * (a - 1)

    def indicator_matrix(self) -> np.ndarray:
        """Dense ``n x k`` binary matrix ``B``."""
        b = np.zeros((self.n, self.k), dtype=np.int8)
        for col, c in enumerate(self.cliques):
            b[list(c), col] = 1
        return b

    def subset(self, indices: Iterable[int]) -> "CliqueBasis":
        return CliqueBasis(self.n, tuple(self.cliques[i] for i in indices))

    def union_pairs(self) -> set[Pair]:
        out: set[Pair] = set()
        for c in self.cliques:
            out.update(combinations(c, 2))
        return out


@dataclass(frozen=True, eq=False)
class GraphletModel:
    """A clique basis with one nonnegative coefficient per clique."""

    basis: CliqueBasis
    mu: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=np.float64).reshape(-1)
        if mu.shape[0] != self.basis.k:
            raise ValueError(f"expected {self.basis.k} coefficients, got {mu.shape[0]}")
        if np.any(~np.isfinite(mu)) or np.any(mu < 0):
            raise ValueError("coefficients must be finite and nonnegative")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def k(self) -> int:
        return self.basis.k

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def is_reduced(self) -> bool:
        return bool(np.all(self.mu > 0))

    def reduced(self) -> "GraphletModel":
        """Drop cliques whose coefficient is exactly zero."""
        keep = np.flatnonzero(self.mu > 0)
        return GraphletModel(self.basis.subset(keep), self.mu[keep])

    def masses(self) -> np.ndarray:
        """Per-clique contribution ``mu_k * a_k`` to the tau-norm."""
        return self.mu * self.basis.sizes


def rate_matrix(model: GraphletModel) -> RateMatrix:
    """Poisson rate matrix ``B diag(mu) B'`` with the diagonal removed.

    Only pairs covered by some clique with positive coefficient are stored.
    """
    rates: dict[Pair, float] = {}
    for c, m in zip(model.basis.cliques, model.mu):
        if m == 0:
            continue
        m = float(m)
        for p in combinations(c, 2):
            rates[p] = rates.get(p, 0.0) + m
    return RateMatrix(model.n, rates)


def tau_norm(model: GraphletModel) -> float:
    """Size-weighted coefficient mass ``sum_k mu_k a_k``."""
    return float(np.sum(model.masses()))


def total_weight(y: WeightedNetwork | RateMatrix) -> float:
    """Sum of weights over ordered pairs, i.e. twice the stored total."""
    total = sum(y.edges.values())
    return 2 * total


def network_power(y: WeightedNetwork, k: int, max_power: int = MAX_POWER) -> WeightedNetwork:
    """k-th matrix power of the adjacency matrix, diagonal zeroed at the end.

    Intermediate products keep their diagonal, so ``Y^2`` counts walks of
    length two including the return walks that feed ``Y^3``.
    """
    if not 1 <= k <= max_power:
        raise ValueError(f"power must be between 1 and {max_power}, got {k}")
    if k == 1:
        return WeightedNetwork(y.n, dict(y.edges), y.node_labels)
    a = y.to_sparse().astype(np.int64)
    out = a
    for _ in range(k - 1):
        out = out @ a
    out = sp.triu(out, k=1).tocoo()
    edges = {(int(i), int(j)): int(w) for i, j, w in zip(out.row, out.col, out.data) if w > 0}
    return WeightedNetwork(y.n, edges, y.node_labels)
