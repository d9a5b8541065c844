"""Simulation protocols shared by the experiment scripts and the acceptance tests.

Each trial is a pure function of its seed. Network noise is drawn from a
seed offset by ``NOISE_OFFSET`` so the model and the draw use separate
streams.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cliques import exact_decompose, is_non_expandable
from .core import GraphletModel, RateMatrix, WeightedNetwork, rate_matrix
from .em import EmConfig, EmState, truncate_to_accuracy, truncate_to_count
from .evaluation import EvalReport, evaluate, match_bases, mu_error, support_error
from .pipeline import decompose
from .synth import SynthConfig, distinct_integer_coefficients, sample_model, sample_network
from .theory import candidate_count_bound

NOISE_OFFSET = 1_000_000
RESEED_STRIDE = 10_000_019


def _relative_match(truth: GraphletModel, estimate: GraphletModel, rtol: float) -> bool:
    est = dict(zip(estimate.basis.cliques, estimate.mu))
    if set(est) != set(truth.basis.cliques):
        return False
    return all(abs(est[c] - m) <= rtol * m for c, m in zip(truth.basis.cliques, truth.mu))


# exact recovery ------------------------------------------------------------

EXACT_SETTINGS = SynthConfig(n=30, lambda_k=4.0, bernoulli_p=0.12, require_nonexpandable=True)


def exact_recovery_model(seed: int, max_k: int = 5, base: SynthConfig = EXACT_SETTINGS) -> GraphletModel:
    """Non-expandable model with at most ``max_k`` cliques and distinct integer coefficients.

    Draws with too many cliques are redrawn from a deterministic reseed.
    """
    s = seed
    while True:
        m = sample_model(SynthConfig(**{**base.__dict__, "seed": s}))
        if m.k <= max_k:
            return distinct_integer_coefficients(m.basis, seed, high=max(5, max_k))
        s += RESEED_STRIDE


def exact_recovery_instance(seed: int) -> tuple[GraphletModel, RateMatrix]:
    truth = exact_recovery_model(seed)
    return truth, rate_matrix(truth)


@dataclass(frozen=True)
class ExactRecoveryOutcome:
    seed: int
    k: int
    k_candidates: int
    candidate_bound: float
    nonexpandable: bool
    candidates_contain_truth: bool
    em_recovered: bool
    exact_recovered: bool
    iterations: int
    seconds: float


def exact_recovery_trial(
    seed: int,
    config: EmConfig = EmConfig(),
    callback: Callable[[EmState], None] | None = None,
) -> ExactRecoveryOutcome:
    t0 = time.perf_counter()
    truth, lam = exact_recovery_instance(seed)
    y = lam.to_network()
    d = decompose(y, config, callback=callback)
    exact = exact_decompose(lam)
    return ExactRecoveryOutcome(
        seed=seed,
        k=truth.k,
        k_candidates=d.candidates.k,
        candidate_bound=candidate_count_bound(truth.k, EXACT_SETTINGS.bernoulli_p, d.sweep.q),
        nonexpandable=is_non_expandable(truth.basis)[0],
        candidates_contain_truth=set(truth.basis.cliques) <= set(d.candidates.cliques),
        em_recovered=_relative_match(truth, d.model, 1e-6),
        exact_recovered=_relative_match(truth, exact, 1e-9),
        iterations=d.iterations,
        seconds=time.perf_counter() - t0,
    )


# weighted-network simulation -------------------------------------------------

WEIGHTED_SETTINGS = SynthConfig(n=50, lambda_k=30.0, gamma_shape=1.0, gamma_scale=10.0, bernoulli_p=0.04)


@dataclass(frozen=True)
class WeightedOutcome:
    seed: int
    k: int
    k_candidates: int
    k_hat: int
    candidate_bound: float
    nonexpandable: bool
    report: EvalReport
    tau_error_full: float
    mu_error_full: float
    k_tilde_085: int
    empirical_curve: tuple[float, ...]
    converged: bool
    seconds: float

    @property
    def k_error(self) -> int:
        return abs(self.k_hat - self.k)

    @property
    def kt_over_kh(self) -> float:
        return self.k_tilde_085 / self.k_hat


def empirical_accuracy_curve(model: GraphletModel) -> tuple[float, ...]:
    """Achieved accuracy for every ``K~ = 0..K`` under the mass ranking."""
    return tuple(truncate_to_count(model, j).achieved_accuracy for j in range(model.k + 1))


def weighted_instance(
    seed: int,
    noisy: bool = False,
    nonexpandable: bool = True,
    settings: SynthConfig = WEIGHTED_SETTINGS,
) -> tuple[GraphletModel, WeightedNetwork | RateMatrix]:
    """Ground truth and the observation to fit: a Poisson draw or the rate matrix itself."""
    truth = sample_model(SynthConfig(**{**settings.__dict__, "seed": seed, "require_nonexpandable": nonexpandable}))
    return truth, (sample_network(truth, seed + NOISE_OFFSET) if noisy else rate_matrix(truth))


def weighted_trial(
    seed: int,
    noisy: bool = False,
    nonexpandable: bool = True,
    settings: SynthConfig = WEIGHTED_SETTINGS,
    config: EmConfig = EmConfig(),
    callback: Callable[[EmState], None] | None = None,
) -> WeightedOutcome:
    """One simulated network: fit, prune, and score at full and 0.85 accuracy."""
    t0 = time.perf_counter()
    truth, y = weighted_instance(seed, noisy, nonexpandable, settings)
    d = decompose(y, config, callback=callback)
    full = truncate_to_accuracy(d.model, 1.0)
    assignment, _, _ = match_bases(truth.basis, full.model.basis)
    return WeightedOutcome(
        seed=seed,
        k=truth.k,
        k_candidates=d.candidates.k,
        k_hat=d.model.k,
        candidate_bound=candidate_count_bound(truth.k, settings.bernoulli_p, d.sweep.q),
        nonexpandable=is_non_expandable(truth.basis)[0],
        report=evaluate(truth, d.model, y),
        tau_error_full=1.0 - full.achieved_accuracy,
        mu_error_full=mu_error(truth.mu, full.model.mu, assignment),
        k_tilde_085=truncate_to_accuracy(d.model, 0.85).k_tilde,
        empirical_curve=empirical_accuracy_curve(d.model),
        converged=d.converged,
        seconds=time.perf_counter() - t0,
    )


def interpolate_empirical(curve: tuple[float, ...], fraction: float) -> float:
    """Empirical accuracy at ``K~ = fraction * K``, linear between integers."""
    k = len(curve) - 1
    return float(np.interp(fraction * k, np.arange(k + 1), curve))


# binary-network simulation --------------------------------------------------

BINARY_SETTINGS = SynthConfig(n=100, lambda_k=12.0, gamma_shape=2.0, gamma_scale=10.0, bernoulli_p=0.1)


@dataclass(frozen=True)
class BinaryOutcome:
    seed: int
    n_edges: int
    k: int
    k_candidates: int
    k_hat: int
    support_error: float
    candidate_bound: float
    nonexpandable: bool
    converged: bool


def binary_instance(seed: int, settings: SynthConfig = BINARY_SETTINGS) -> tuple[GraphletModel, WeightedNetwork]:
    """Ground truth and the binarized Poisson draw."""
    truth = sample_model(SynthConfig(**{**settings.__dict__, "seed": seed}))
    return truth, sample_network(truth, seed + NOISE_OFFSET).binarize()


def binary_trial(
    seed: int,
    settings: SynthConfig = BINARY_SETTINGS,
    config: EmConfig = EmConfig(),
    callback: Callable[[EmState], None] | None = None,
) -> BinaryOutcome:
    """Decompose a binarized Poisson draw and reconstruct its support with every clique."""
    truth, y = binary_instance(seed, settings)
    d = decompose(y, config, callback=callback)
    return BinaryOutcome(
        seed=seed,
        n_edges=len(y),
        k=truth.k,
        k_candidates=d.candidates.k,
        k_hat=d.model.k,
        support_error=support_error(y, rate_matrix(d.model)),
        candidate_bound=candidate_count_bound(truth.k, settings.bernoulli_p, d.sweep.q),
        nonexpandable=is_non_expandable(truth.basis)[0],
        converged=d.converged,
    )


# scaling -------------------------------------------------------------------

SCALING_CLIQUE_SIZE = 5.0
SCALING_MEMBERSHIP = 2.3


def scaling_model(target_edges: int, seed: int) -> GraphletModel:
    """Model whose edge count grows with ``target_edges`` at fixed local density.

    The expected clique size (5) and the expected number of cliques per node
    (2.3) stay fixed while the node count and clique count grow linearly, so
    the average degree and the per-edge cover depth do not change.
    """
    k = target_edges / 12.0
    n = max(10, int(k * SCALING_CLIQUE_SIZE / SCALING_MEMBERSHIP))
    cfg = SynthConfig(n=n, lambda_k=k, bernoulli_p=SCALING_CLIQUE_SIZE / n, seed=seed)
    return sample_model(cfg)


def scaling_network(target_edges: int, seed: int, noisy: bool = False) -> WeightedNetwork | RateMatrix:
    """Noise-free rate matrix (default) or a Poisson draw from :func:`scaling_model`."""
    model = scaling_model(target_edges, seed)
    return sample_network(model, seed + NOISE_OFFSET) if noisy else rate_matrix(model)


def time_decomposition(y: WeightedNetwork | RateMatrix, config: EmConfig = EmConfig()) -> tuple[float, float, float]:
    """Wall-clock seconds for (candidate search, EM, total)."""
    d = decompose(y, config)
    return d.candidate_seconds, d.em_seconds, d.seconds
