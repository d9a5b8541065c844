"""Two-stage decomposition: candidate search, then EM with pruning."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .cliques import ThresholdSweepReport, candidate_basis
from .core import CliqueBasis, GraphletModel, RateMatrix, WeightedNetwork
from .em import ApproximateModel, EmConfig, EmResult, EmState, fit, prune, truncate_to_accuracy


@dataclass(frozen=True)
class Decomposition:
    candidates: CliqueBasis
    sweep: ThresholdSweepReport
    fit: EmResult
    refit: EmResult | None
    model: GraphletModel
    approx: ApproximateModel | None
    candidate_seconds: float
    em_seconds: float

    @property
    def converged(self) -> bool:
        return self.fit.converged and (self.refit is None or self.refit.converged)

    @property
    def iterations(self) -> int:
        return self.fit.iterations + (self.refit.iterations if self.refit is not None else 0)

    @property
    def seconds(self) -> float:
        return self.candidate_seconds + self.em_seconds


def decompose(
    y: WeightedNetwork | RateMatrix,
    config: EmConfig = EmConfig(),
    target_accuracy: float | None = None,
    callback: Callable[[EmState], None] | None = None,
) -> Decomposition:
    """Candidate basis, EM fit, pruning and optional truncation.

    ``callback`` sees every EM update of both the first fit and the refit.
    """
    t0 = time.perf_counter()
    candidates, sweep = candidate_basis(y)
    t1 = time.perf_counter()
    first = fit(y, candidates, config, callback=callback)
    model, refit = prune(y, first, config, callback=callback)
    t2 = time.perf_counter()
    approx = truncate_to_accuracy(model, target_accuracy) if target_accuracy is not None else None
    return Decomposition(candidates, sweep, first, refit, model, approx, t1 - t0, t2 - t1)
