"""Maximal-clique machinery.

Bron-Kerbosch with pivoting enumerates maximal cliques; a descending sweep
over the attained edge weights turns a weighted network into a candidate
basis; and a greedy peeling procedure recovers the decomposition of a
noise-free rate matrix generated by a non-expandable basis.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .core import Clique, CliqueBasis, GraphletModel, Pair, RateMatrix, WeightedNetwork


class ExpandableBasisError(ValueError):
    """Raised when an operation requires a non-expandable basis."""

    def __init__(self, witness: Clique):
        super().__init__(f"basis is expandable: maximal clique {witness} is not a member")
        self.witness = witness


class NoUniqueEdgeError(RuntimeError):
    """A clique of a non-expandable basis has every edge shared with another clique."""


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BinaryGraph:
    """Simple undirected graph stored as per-node neighbour sets."""

    n: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one entry per node")
        for u, nbrs in enumerate(self.adjacency):
            if u in nbrs:
                raise ValueError(f"self-loop at node {u}")
            for v in nbrs:
                if u not in self.adjacency[v]:
                    raise ValueError(f"edge ({u}, {v}) is not symmetric")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Pair]) -> "BinaryGraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in pairs:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            adj[i].add(j)
            adj[j].add(i)
        return cls(n, tuple(frozenset(a) for a in adj))

    @classmethod
    def threshold(cls, y: WeightedNetwork | RateMatrix, t: float) -> "BinaryGraph":
        """The graph of pairs whose weight is at least ``t``."""
        return cls.from_pairs(y.n, (p for p, w in y.edges.items() if w >= t))

    def edges(self) -> list[Pair]:
        return sorted((u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v)


@dataclass(frozen=True)
class ThresholdSweepReport:
    """What the candidate search visited.

    ``cliques_per_threshold[i]`` is the number of candidates first seen at
    ``thresholds_visited[i]``.
    """

    thresholds_visited: tuple[float, ...]
    cliques_per_threshold: tuple[int, ...]

    @property
    def q(self) -> int:
        return len(self.thresholds_visited)


def _degeneracy_order(nodes: Sequence[int], adj: Sequence[set[int] | frozenset[int]]) -> list[int]:
    """Repeatedly remove a minimum-degree vertex (restricted to ``nodes``)."""
    node_set = set(nodes)
    degree = {u: len(adj[u] & node_set) for u in nodes}
    buckets: dict[int, set[int]] = {}
    for u, d in degree.items():
        buckets.setdefault(d, set()).add(u)
    order = []
    removed: set[int] = set()
    d = 0
    for _ in range(len(node_set)):
        d = max(0, d - 1)
        while not buckets.get(d):
            d += 1
        u = min(buckets[d])
        buckets[d].discard(u)
        order.append(u)
        removed.add(u)
        for v in adj[u]:
            if v in node_set and v not in removed:
                dv = degree[v]
                buckets[dv].discard(v)
                degree[v] = dv - 1
                buckets.setdefault(dv - 1, set()).add(v)
    return order


def _bk_pivot(r: list[int], p: set[int], x: set[int], adj, out: list[Clique]) -> None:
    if not p and not x:
        if len(r) >= 2:
            out.append(tuple(sorted(r)))
        return
    pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
    for v in sorted(p - adj[pivot]):
        nv = adj[v]
        r.append(v)
        _bk_pivot(r, p & nv, x & nv, adj, out)
        r.pop()
        p.discard(v)
        x.add(v)


def _maximal_cliques_adj(adj: Sequence[set[int] | frozenset[int]], nodes: Iterable[int]) -> list[Clique]:
    nodes = [u for u in nodes if adj[u]]
    out: list[Clique] = []
    order = _degeneracy_order(nodes, adj)
    position = {u: i for i, u in enumerate(order)}
    for v in order:
        later = {u for u in adj[v] if position.get(u, -1) > position[v]}
        earlier = {u for u in adj[v] if 0 <= position.get(u, -1) < position[v]}
        _bk_pivot([v], later, earlier, adj, out)
    return sorted(set(out))


def maximal_cliques(g: BinaryGraph) -> list[Clique]:
    """All maximal cliques with at least two nodes, sorted lexicographically."""
    return _maximal_cliques_adj(g.adjacency, range(g.n))


def _cliques_through_edge(adj, u: int, v: int) -> list[Clique]:
    """Maximal cliques of the whole graph that contain the edge ``(u, v)``."""
    common = adj[u] & adj[v]
    out: list[Clique] = []
    _bk_pivot([u, v], set(common), set(), adj, out)
    return out


def candidate_basis(y: WeightedNetwork | RateMatrix) -> tuple[CliqueBasis, ThresholdSweepReport]:
    """Union of maximal cliques of ``1(Y >= t)`` over all attained weights ``t``.

    Thresholds are visited from the largest weight down. A maximal clique of
    ``1(Y >= t)`` that is not new at ``t`` must contain an edge of weight
    exactly ``t`` (otherwise it was already maximal one threshold up), so
    after the first level only cliques through the newly added edges are
    enumerated. Candidates appear in discovery order: by threshold, then
    lexicographically.
    """
    if not y.edges:
        raise ValueError("empty network")
    by_weight: dict[float, list[Pair]] = {}
    for p, w in y.edges.items():
        by_weight.setdefault(w, []).append(p)
    thresholds = sorted(by_weight, reverse=True)

    adj: list[set[int]] = [set() for _ in range(y.n)]
    n_edges = 0
    seen: set[Clique] = set()
    found: list[Clique] = []
    counts: list[int] = []
    for t in thresholds:
        new_edges = sorted(by_weight[t])
        for i, j in new_edges:
            adj[i].add(j)
            adj[j].add(i)
        n_edges += len(new_edges)
        if 2 * len(new_edges) >= n_edges:
            # most of the graph is new; one full enumeration beats per-edge searches
            level = _maximal_cliques_adj(adj, range(y.n))
        else:
            level_set: set[Clique] = set()
            for i, j in new_edges:
                level_set.update(_cliques_through_edge(adj, i, j))
            level = sorted(level_set)
        fresh = [c for c in level if c not in seen]
        seen.update(fresh)
        found.extend(fresh)
        counts.append(len(fresh))
    report = ThresholdSweepReport(tuple(thresholds), tuple(counts))
    return CliqueBasis(y.n, tuple(found)), report


def union_graph(basis: CliqueBasis) -> BinaryGraph:
    return BinaryGraph.from_pairs(basis.n, basis.union_pairs())


def is_non_expandable(basis: CliqueBasis) -> tuple[bool, Clique | None]:
    """Check that every maximal clique of the union graph is a basis member.

    Returns ``(True, None)`` or ``(False, witness)`` where ``witness`` is the
    lexicographically first maximal clique missing from the basis.
    """
    members = set(basis.cliques)
    for c in maximal_cliques(union_graph(basis)):
        if c not in members:
            return False, c
    return True, None


def unique_edge_witnesses(basis: CliqueBasis) -> list[tuple[int, Pair]]:
    """For each clique, its smallest edge that no other clique contains."""
    ok, witness = is_non_expandable(basis)
    if not ok:
        raise ExpandableBasisError(witness)
    multiplicity = Counter(p for c in basis.cliques for p in combinations(c, 2))
    out = []
    for idx, c in enumerate(basis.cliques):
        unique = [p for p in combinations(c, 2) if multiplicity[p] == 1]
        if not unique:
            raise NoUniqueEdgeError(f"no unique edge in clique {idx} {c}")
        out.append((idx, unique[0]))
    return out


def exact_decompose(
    lam: RateMatrix | WeightedNetwork,
    rtol: float = 1e-9,
    max_iter: int | None = None,
) -> GraphletModel:
    """Peel a noise-free rate matrix into cliques and coefficients.

    Each round takes the smallest positive residual entry (ties broken by the
    lexicographically smallest pair), picks the largest maximal clique of the
    residual support through that pair, and subtracts the entry from every
    pair of the clique. Residuals within ``rtol * max(lam)`` of zero count as
    zero.
    """
    residual = {p: float(w) for p, w in lam.edges.items() if w > 0}
    if not residual:
        return GraphletModel(CliqueBasis(lam.n), np.zeros(0))
    tol = rtol * max(residual.values())
    if max_iter is None:
        max_iter = len(residual)
    adj: list[set[int]] = [set() for _ in range(lam.n)]
    for i, j in residual:
        adj[i].add(j)
        adj[j].add(i)

    recovered: dict[Clique, float] = {}
    for _ in range(max_iter):
        if not residual:
            break
        (i, j), mu_c = min(residual.items(), key=lambda kv: (kv[1], kv[0]))
        through = _cliques_through_edge(adj, i, j)
        clique = min(through, key=lambda c: (-len(c), c))
        for p in combinations(clique, 2):
            r = residual[p] - mu_c
            if r < -tol:
                raise DecompositionError(f"negative residual {r:.3g} at pair {p}")
            if r <= tol:
                del residual[p]
                adj[p[0]].discard(p[1])
                adj[p[1]].discard(p[0])
            else:
                residual[p] = r
        recovered[clique] = recovered.get(clique, 0.0) + mu_c
    else:
        if residual:
            raise DecompositionError(f"iteration cap exceeded after {max_iter} rounds")

    cliques = tuple(recovered)
    return GraphletModel(CliqueBasis(lam.n, cliques), np.array([recovered[c] for c in cliques]))
