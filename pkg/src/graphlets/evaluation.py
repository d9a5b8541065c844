"""Reconstruction and estimation errors for fitted graphlet models.

Bases are compared column by column after an optimal assignment under
Hamming distance. Columns are binary and identified only up to permutation,
so an exact assignment is the natural matching; orthogonal rotations would
leave the binary class.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import CliqueBasis, GraphletModel, RateMatrix, WeightedNetwork, rate_matrix, tau_norm, total_weight
from .em import ApproximateModel

# (true column, estimated column); None marks a padding column
Assignment = tuple[tuple[int | None, int | None], ...]


@dataclass(frozen=True)
class EvalReport:
    l1_error: float
    tau_error: float
    support_error: float
    basis_error_raw: int
    basis_error_normalized: float
    mu_error: float
    k_error: int

    @classmethod
    def header(cls) -> str:
        return "\t".join(f.name for f in fields(cls))

    def to_row(self, digits: int = 6) -> str:
        out = []
        for f, v in zip(fields(self), astuple(self)):
            out.append(str(int(v)) if f.type == "int" else f"{float(v):.{digits}f}")
        return "\t".join(out)


def l1_error(y: WeightedNetwork, y_hat: RateMatrix) -> float:
    """Entrywise L1 distance over ordered pairs, relative to the total weight of ``y``.

    >>> y = WeightedNetwork(3, {(0, 1): 2, (0, 2): 2, (1, 2): 2})
    >>> l1_error(y, RateMatrix(3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}))
    0.5
    """
    if y.n != y_hat.n:
        raise ValueError("networks have different node counts")
    total = total_weight(y)
    if total == 0:
        raise ValueError("observed network has zero total weight")
    pairs = set(y.edges) | set(y_hat.edges)
    diff = sum(abs(y[p] - y_hat[p]) for p in pairs)
    return 2.0 * diff / total


def tau_error(full: GraphletModel, approx: ApproximateModel) -> float:
    """Share of the tau-norm lost by truncation."""
    del full  # the accuracy is stored on the approximation
    return 1.0 - approx.achieved_accuracy


def tau_gap(truth: GraphletModel, estimate: GraphletModel) -> float:
    """Relative difference in tau-norm between two models of the same network."""
    t = tau_norm(truth)
    if t == 0:
        raise ValueError("true model has zero tau-norm")
    return abs(t - tau_norm(estimate)) / t


def support_error(y: WeightedNetwork, y_hat: RateMatrix) -> float:
    """Disagreement of positivity indicators over the union of both supports.

    Two empty supports give 0.
    """
    if y.n != y_hat.n:
        raise ValueError("networks have different node counts")
    a, b = y.support(), y_hat.support()
    union = a | b
    if not union:
        return 0.0
    return len(a ^ b) / len(union)


def match_bases(b_true: CliqueBasis, b_hat: CliqueBasis) -> tuple[Assignment, int, float]:
    """Optimal one-to-one column matching under Hamming distance.

    The smaller basis is padded with empty columns. Returns the assignment
    sorted by true column (padding last), the total Hamming cost, and that
    cost divided by ``n * max(K, K_hat)``.
    """
    if b_true.n != b_hat.n:
        raise ValueError("bases are over different node sets")
    k = max(b_true.k, b_hat.k)
    if k == 0:
        return (), 0, 0.0
    bt = np.zeros((b_true.n, k), dtype=np.int64)
    bh = np.zeros((b_hat.n, k), dtype=np.int64)
    bt[:, : b_true.k] = b_true.indicator_matrix()
    bh[:, : b_hat.k] = b_hat.indicator_matrix()
    # Hamming distance between binary columns: |a| + |b| - 2 |a & b|
    cost = bt.sum(0)[:, None] + bh.sum(0)[None, :] - 2 * (bt.T @ bh)
    rows, cols = linear_sum_assignment(cost)
    raw = int(cost[rows, cols].sum())
    pairs = sorted(
        ((int(r) if r < b_true.k else None, int(c) if c < b_hat.k else None) for r, c in zip(rows, cols)),
        key=lambda rc: (rc[0] is None, rc[0] if rc[0] is not None else 0, rc[1] if rc[1] is not None else 0),
    )
    pairs = [p for p in pairs if p != (None, None)]
    return tuple(pairs), raw, raw / (b_true.n * k)


def mu_error(mu_true, mu_hat, assignment: Assignment) -> float:
    """Relative L2 error of the coefficients after column matching.

    Unmatched columns are compared against a coefficient of zero.

    >>> mu_error([3.0, 4.0], [3.0, 0.0], ((0, 0), (1, 1)))
    0.8
    """
    mu_true = np.asarray(mu_true, dtype=float)
    mu_hat = np.asarray(mu_hat, dtype=float)
    norm = float(np.linalg.norm(mu_true))
    if norm == 0:
        raise ValueError("true coefficients have zero norm")
    a = np.array([mu_true[i] if i is not None else 0.0 for i, _ in assignment])
    b = np.array([mu_hat[j] if j is not None else 0.0 for _, j in assignment])
    matched_true = {i for i, _ in assignment if i is not None}
    matched_hat = {j for _, j in assignment if j is not None}
    # columns missing from the assignment count as matched to zero
    rest_t = [mu_true[i] for i in range(len(mu_true)) if i not in matched_true]
    rest_h = [mu_hat[j] for j in range(len(mu_hat)) if j not in matched_hat]
    sq = float(np.sum((a - b) ** 2) + np.sum(np.square(rest_t)) + np.sum(np.square(rest_h)))
    return float(np.sqrt(sq)) / norm


def k_error(k_true: int, k_hat: int) -> int:
    return abs(int(k_hat) - int(k_true))


def evaluate(truth: GraphletModel, estimate: GraphletModel, y: WeightedNetwork) -> EvalReport:
    """All metrics for an estimated model against the truth and the observed network."""
    if truth.n != estimate.n or truth.n != y.n:
        raise ValueError("truth, estimate and network have different node counts")
    lam_hat = rate_matrix(estimate)
    assignment, raw, normalized = match_bases(truth.basis, estimate.basis)
    return EvalReport(
        l1_error=l1_error(y, lam_hat),
        tau_error=tau_gap(truth, estimate),
        support_error=support_error(y, lam_hat),
        basis_error_raw=raw,
        basis_error_normalized=normalized,
        mu_error=mu_error(truth.mu, estimate.mu, assignment),
        k_error=k_error(truth.k, estimate.k),
    )
