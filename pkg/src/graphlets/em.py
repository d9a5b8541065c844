"""Coefficient estimation by Poisson deconvolution (Richardson-Lucy EM).

Given a candidate basis, the coefficients are fitted by EM on the positive
edges only. For each covered pair the E-step splits the observed weight
among the covering cliques in proportion to their current coefficients; the
M-step sums each clique's share over its ordered pairs and divides by the
pair count ``T_k = a_k (a_k - 1)``. The latent split matrices are never
materialized: every positive edge is visited once per iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import CliqueBasis, GraphletModel, WeightedNetwork, total_weight

log = logging.getLogger(__name__)

_TINY = 1e-300


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class EmConfig:
    epsilon: float = 1e-8
    max_iters: int = 10_000
    prune_fraction: float = 1e-6
    refit_after_prune: bool = True
    accelerate: bool = True

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0 <= self.prune_fraction < 1:
            raise ValueError("prune_fraction must lie in [0, 1)")


@dataclass
class EmState:
    mu: np.ndarray
    t_k: np.ndarray
    iteration: int = 0
    loglik_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class EmResult:
    model: GraphletModel
    converged: bool
    iterations: int
    final_loglik: float
    loglik_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class ApproximateModel:
    """A truncated model keeping the ``k_tilde`` largest-mass cliques."""

    model: GraphletModel
    excluded: tuple[int, ...]
    k_tilde: int
    achieved_accuracy: float

    @property
    def reconstruction_error(self) -> float:
        return 1.0 - self.achieved_accuracy


class PoissonDeconvolution:
    """Edge/clique incidence prepared once for repeated EM updates.

    Parameters
    ----------
    y : WeightedNetwork
        Observed counts.
    basis : CliqueBasis
        Candidate cliques. Pairs of a clique that carry no weight in ``y``
        still count towards its ``T_k``.
    """

    def __init__(self, y: WeightedNetwork, basis: CliqueBasis):
        if basis.n != y.n:
            raise ValueError(f"basis has {basis.n} nodes, network has {y.n}")
        u, v, w = y.edge_arrays()
        self.n = y.n
        self.weights = w.astype(np.float64)
        self.t_k = basis.pair_counts.astype(np.float64)
        self.total = float(total_weight(y))
        self.k = basis.k

        keys = u * y.n + v
        edge_idx, clique_idx = [], []
        for k, c in enumerate(basis.cliques):
            c = np.asarray(c, dtype=np.int64)
            iu, ju = np.triu_indices(len(c), 1)
            pk = c[iu] * y.n + c[ju]
            pos = np.searchsorted(keys, pk)
            pos_clip = np.minimum(pos, max(len(keys) - 1, 0))
            hit = (pos < len(keys)) & (keys[pos_clip] == pk) if len(keys) else np.zeros(len(pk), bool)
            edge_idx.append(pos[hit])
            clique_idx.append(np.full(int(hit.sum()), k, dtype=np.int64))
        self.edge_idx = np.concatenate(edge_idx) if edge_idx else np.zeros(0, np.int64)
        self.clique_idx = np.concatenate(clique_idx) if clique_idx else np.zeros(0, np.int64)
        self.cover_count = np.bincount(self.edge_idx, minlength=len(w))
        self._pairs = (u, v)

    def uncovered_edges(self) -> list[tuple[int, int]]:
        u, v = self._pairs
        bad = np.flatnonzero(self.cover_count == 0)
        return [(int(u[e]), int(v[e])) for e in bad]

    def check_coverage(self) -> None:
        bad = self.uncovered_edges()
        if bad:
            raise CoverageError(f"uncovered positive edge {bad[0]}")

    def initial_mu(self) -> np.ndarray:
        return np.full(self.k, self.total / self.t_k.sum()) if self.k else np.zeros(0)

    def rates(self, mu: np.ndarray) -> np.ndarray:
        """Rate on each positive edge under ``mu``."""
        return np.bincount(self.edge_idx, weights=mu[self.clique_idx], minlength=len(self.weights))

    def loglik(self, mu: np.ndarray, lam: np.ndarray | None = None) -> float:
        if lam is None:
            lam = self.rates(mu)
        if np.any(lam <= 0):
            e = int(np.flatnonzero(lam <= 0)[0])
            u, v = self._pairs
            raise CoverageError(f"uncovered positive edge ({u[e]}, {v[e]})")
        return float(2.0 * np.dot(self.weights, np.log(lam)) - np.dot(mu, self.t_k))

    def loglik_change(self, mu_old: np.ndarray, lam_old: np.ndarray, mu_new: np.ndarray) -> float:
        """``loglik(mu_new) - loglik(mu_old)`` computed from the coefficient difference.

        The direct difference of two log-likelihoods loses everything below
        the rounding of the larger one; this form is accurate relative to the
        change itself, which is what a monotonicity check needs near a fixed point.
        """
        d = mu_new - mu_old
        dlam = self.rates(d)
        return float(2.0 * np.dot(self.weights, np.log1p(dlam / lam_old)) - np.dot(d, self.t_k))

    def step(self, mu: np.ndarray, lam: np.ndarray | None = None) -> tuple[np.ndarray, float]:
        """One E+M update. Returns the new coefficients and the log-likelihood of ``mu``."""
        if lam is None:
            lam = self.rates(mu)
        if np.any(lam <= 0):
            e = int(np.flatnonzero(lam <= 0)[0])
            u, v = self._pairs
            raise ZeroDivisionError(f"zero denominator at covered edge ({u[e]}, {v[e]})")
        ratio = self.weights / lam
        ll = float(2.0 * np.dot(self.weights, np.log(lam)) - np.dot(mu, self.t_k))
        share = np.bincount(self.clique_idx, weights=ratio[self.edge_idx], minlength=self.k)
        return mu * (2.0 * share) / self.t_k, ll


def _squarem_cycle(problem: PoissonDeconvolution, state: EmState, update, epsilon: float) -> bool:
    """Two EM updates, a monotone-safeguarded extrapolation, then a third update.

    Two extrapolations are tried from the same three iterates: the usual
    global step length and a per-coordinate one. The per-coordinate step
    matters near a vanishing coefficient: its differences are computed at
    its own (small) scale, so it keeps shrinking geometrically where the
    global step is swamped by round-off from the large coefficients. A trial
    is clipped at zero and accepted only if it does not lower the likelihood
    of the second iterate. Every recorded state is an EM output.

    Convergence is judged on the change over the whole cycle: near a zero
    coefficient single EM steps move too little to be trusted.
    """
    mu0 = state.mu
    update(mu0)
    mu1 = state.mu
    update(mu1)
    mu2 = state.mu
    r = mu1 - mu0
    v = mu2 - 2.0 * mu1 + mu0
    ll2 = problem.loglik(mu2)
    best, best_ll = mu2, ll2

    def consider(alpha) -> bool:
        nonlocal best, best_ll
        trial = np.maximum(mu0 - 2.0 * alpha * r + alpha * alpha * v, 0.0)
        lam = problem.rates(trial)
        if np.all(lam > 0):
            ll = problem.loglik(trial, lam)
            if ll >= best_ll:
                best, best_ll = trial, ll
                return True
        return False

    with np.errstate(divide="ignore", invalid="ignore"):
        per_coord = np.where(np.abs(v) > 0, -np.abs(r) / np.abs(v), -1.0)
    consider(np.minimum(per_coord, -1.0))
    nv = np.linalg.norm(v)
    if nv > 0:
        alpha = min(-np.linalg.norm(r) / nv, -1.0)
        while alpha < -1.0 - 1e-3 and not consider(alpha):
            alpha = (alpha - 1.0) / 2.0
    update(best)
    change = np.linalg.norm(state.mu - mu0) / max(np.linalg.norm(mu0), _TINY)
    return change <= epsilon


def log_likelihood(y: WeightedNetwork, model: GraphletModel) -> float:
    """Poisson log-likelihood over ordered pairs with positive rate, constants dropped.

    >>> from graphlets.core import CliqueBasis
    >>> y = WeightedNetwork.from_edges(3, [(0, 1, 2), (0, 2, 2), (1, 2, 2)])
    >>> round(log_likelihood(y, GraphletModel(CliqueBasis(3, ((0, 1, 2),)), [2.0])), 4)
    -3.6822
    """
    return PoissonDeconvolution(y, model.basis).loglik(model.mu)


def em_step(y: WeightedNetwork, basis: CliqueBasis, state: EmState) -> EmState:
    mu, ll = PoissonDeconvolution(y, basis).step(state.mu)
    return EmState(mu, state.t_k, state.iteration + 1, [*state.loglik_trace, ll])


def fit(
    y: WeightedNetwork,
    basis: CliqueBasis,
    config: EmConfig = EmConfig(),
    *,
    init: Sequence[float] | None = None,
    callback: Callable[[EmState], None] | None = None,
) -> EmResult:
    """Estimate nonnegative coefficients for every clique of ``basis``.

    Iterates until the relative L2 change of the coefficient vector drops to
    ``config.epsilon`` or ``config.max_iters`` updates have been made.
    ``callback`` (if given) sees the state after every update; the state's
    trace holds the log-likelihood of each iterate that was updated.
    """
    if not y.edges:
        raise ValueError("no positive edges")
    problem = PoissonDeconvolution(y, basis)
    problem.check_coverage()
    if init is None:
        mu = problem.initial_mu()
    else:
        mu = np.array(init, dtype=np.float64)
        if mu.shape != (basis.k,) or np.any(mu <= 0):
            raise ValueError("init must hold one positive value per clique")
    state = EmState(mu, problem.t_k, 0, [])
    converged = False

    # the trace starts from a direct evaluation and then accumulates accurate
    # per-update changes, so rounding in |loglik| cannot fake a decrease
    last: dict = {}

    def update(current: np.ndarray) -> bool:
        lam = problem.rates(current)
        new_mu, ll = problem.step(current, lam)
        if last:
            ll = last["ll"] + problem.loglik_change(last["mu"], last["lam"], current)
        last.update(mu=current, lam=lam, ll=ll)
        change = np.linalg.norm(new_mu - current) / max(np.linalg.norm(current), _TINY)
        state.mu = new_mu
        state.iteration += 1
        state.loglik_trace.append(ll)
        if callback is not None:
            callback(state)
        return change <= config.epsilon

    quiet_cycles = 0
    while state.iteration < config.max_iters:
        if not config.accelerate or config.max_iters - state.iteration < 3:
            converged = update(state.mu)
        else:
            # a cycle right after a long jump often rejects both trials and
            # barely moves, so one small cycle alone is not convergence
            quiet_cycles = quiet_cycles + 1 if _squarem_cycle(problem, state, update, config.epsilon) else 0
            converged = quiet_cycles >= 2
        if converged:
            break
    final = problem.loglik(state.mu)
    if not converged:
        log.info("EM stopped at max_iters=%d without converging", config.max_iters)
    return EmResult(
        GraphletModel(basis, state.mu),
        converged,
        state.iteration,
        final,
        tuple(state.loglik_trace),
    )


def prune(
    y: WeightedNetwork,
    result: EmResult,
    config: EmConfig = EmConfig(),
    *,
    callback: Callable[[EmState], None] | None = None,
) -> tuple[GraphletModel, EmResult | None]:
    """Drop cliques carrying a negligible share of the total weight.

    A clique is dropped when ``mu_k * T_k < prune_fraction * total_weight(y)``,
    smallest first, unless it is the last surviving cover of some positive
    edge (dropping it would leave that edge with rate zero). Survivors are
    refitted from their current values when ``refit_after_prune`` is set.

    Returns the reduced model and the refit result (``None`` without refit).
    """
    model = result.model
    basis = model.basis
    mass = model.mu * basis.pair_counts
    cutoff = config.prune_fraction * float(total_weight(y))
    problem = PoissonDeconvolution(y, basis)
    cover = problem.cover_count.copy()
    edges_of = [[] for _ in range(basis.k)]
    for e, k in zip(problem.edge_idx, problem.clique_idx):
        edges_of[k].append(e)

    keep = np.ones(basis.k, dtype=bool)
    for k in sorted(np.flatnonzero(mass < cutoff) if cutoff > 0 else [], key=lambda k: (mass[k], k)):
        if all(cover[e] > 1 for e in edges_of[k]):
            keep[k] = False
            for e in edges_of[k]:
                cover[e] -= 1
    keep &= model.mu > 0
    if not keep.any():
        raise ValueError("all coefficients pruned")
    idx = np.flatnonzero(keep)
    reduced = GraphletModel(basis.subset(idx), model.mu[idx])
    if not config.refit_after_prune:
        return reduced, None
    init = reduced.mu * (problem.total / float(np.dot(reduced.mu, reduced.basis.pair_counts)))
    refit = fit(y, reduced.basis, config, init=init, callback=callback)
    return refit.model.reduced(), refit


def _rank(model: GraphletModel) -> list[int]:
    masses = model.masses()
    sizes = model.basis.sizes
    return sorted(range(model.k), key=lambda k: (-masses[k], -sizes[k], model.basis.cliques[k]))


def _truncate(model: GraphletModel, order: list[int], k_tilde: int) -> ApproximateModel:
    masses = model.masses()
    total = float(masses.sum())
    kept = sorted(order[:k_tilde])
    excluded = tuple(sorted(order[k_tilde:]))
    retained = float(masses[kept].sum()) if kept else 0.0
    accuracy = retained / total if total > 0 else 1.0
    sub = GraphletModel(model.basis.subset(kept), model.mu[kept])
    return ApproximateModel(sub, excluded, k_tilde, min(1.0, accuracy))


def truncate_to_count(model: GraphletModel, k_tilde: int) -> ApproximateModel:
    """Keep the ``k_tilde`` cliques with the largest ``mu_k * a_k``."""
    if not 0 <= k_tilde <= model.k:
        raise ValueError(f"k_tilde must lie in 0..{model.k}, got {k_tilde}")
    return _truncate(model, _rank(model), k_tilde)


def truncate_to_accuracy(model: GraphletModel, target: float) -> ApproximateModel:
    """Shortest mass-ranked prefix whose tau-norm share reaches ``target``."""
    if not 0 <= target <= 1:
        raise ValueError("target accuracy must lie in [0, 1]")
    order = _rank(model)
    masses = model.masses()
    total = float(masses.sum())
    if target <= 1e-12 or total == 0:
        return _truncate(model, order, 0 if target <= 1e-12 else model.k)
    running = 0.0
    for i, k in enumerate(order, start=1):
        running += masses[k]
        if running / total >= target - 1e-12:
            return _truncate(model, order, i)
    return _truncate(model, order, model.k)
