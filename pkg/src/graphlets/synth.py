"""Random graphlet models and Poisson network draws.

Defaults reproduce the weighted-network simulation settings: 50 nodes,
``K ~ Poisson(30)``, coefficients ``Gamma(shape=1, scale=10)`` and basis
entries ``Bernoulli(0.04)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cliques import is_non_expandable
from .core import CliqueBasis, GraphletModel, WeightedNetwork, rate_matrix

_COLUMN_ATTEMPTS = 100


class RejectionCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n: int = 50
    lambda_k: float = 30.0
    gamma_shape: float = 1.0
    gamma_scale: float = 10.0
    bernoulli_p: float = 0.04
    seed: int = 0
    require_nonexpandable: bool = False
    max_rejects: int = 1000

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need at least two nodes")
        if not self.lambda_k > 0:
            raise ValueError("lambda_k must be positive")
        if not (self.gamma_shape > 0 and self.gamma_scale > 0):
            raise ValueError("gamma shape and scale must be positive")
        if not 0 < self.bernoulli_p < 1:
            raise ValueError("bernoulli_p must lie strictly between 0 and 1")
        if self.max_rejects < 0:
            raise ValueError("max_rejects must be nonnegative")


def _sample_basis(rng: np.random.Generator, config: SynthConfig) -> CliqueBasis:
    k = 0
    while k < 1:
        k = int(rng.poisson(config.lambda_k))
    cliques: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(k):
        for _ in range(_COLUMN_ATTEMPTS):
            col = np.flatnonzero(rng.random(config.n) < config.bernoulli_p)
            c = tuple(int(x) for x in col)
            if len(c) >= 2 and c not in seen:
                seen.add(c)
                cliques.append(c)
                break
        # a column that keeps colliding is dropped, so K can shrink in degenerate settings
    return CliqueBasis(config.n, tuple(cliques))


def sample_model(config: SynthConfig) -> GraphletModel:
    """Draw ``K``, the basis ``B`` and coefficients ``mu``; deterministic in ``config.seed``.

    Columns with fewer than two members or duplicating an earlier column are
    redrawn. With ``require_nonexpandable`` whole bases are redrawn until
    the union-graph check passes.
    """
    rng = np.random.default_rng(config.seed)
    for _ in range(config.max_rejects + 1):
        basis = _sample_basis(rng, config)
        if basis.k == 0:
            continue
        if not config.require_nonexpandable or is_non_expandable(basis)[0]:
            mu = rng.gamma(config.gamma_shape, config.gamma_scale, size=basis.k)
            return GraphletModel(basis, mu)
    raise RejectionCapError(f"rejection cap exceeded after {config.max_rejects} redraws")


def sample_network(model: GraphletModel, seed: int, zero_truncated: bool = False) -> WeightedNetwork:
    """One Poisson draw per pair with positive rate; zero draws are not stored.

    With ``zero_truncated`` every covered pair is redrawn until positive.
    """
    rng = np.random.default_rng(seed)
    lam = rate_matrix(model)
    u, v, rates = lam.edge_arrays()
    counts = rng.poisson(rates)
    if zero_truncated:
        zero = counts == 0
        while zero.any():
            counts[zero] = rng.poisson(rates[zero])
            zero = counts == 0
    edges = {(int(i), int(j)): int(c) for i, j, c in zip(u, v, counts) if c > 0}
    return WeightedNetwork(model.n, edges)


def distinct_integer_coefficients(basis: CliqueBasis, seed: int, high: int = 5) -> GraphletModel:
    """Attach distinct integer coefficients from ``1..high`` to a basis.

    Noise-free rate matrices built this way are integer-valued, which is what
    the exact-recovery checks feed to the count-based estimator.
    """
    if basis.k > high:
        raise ValueError(f"cannot draw {basis.k} distinct integers from 1..{high}")
    rng = np.random.default_rng(seed)
    mu = rng.choice(np.arange(1, high + 1), size=basis.k, replace=False).astype(float)
    return GraphletModel(basis, mu)
