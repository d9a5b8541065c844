"""Redundancy bounds and the expected accuracy of truncated decompositions.

If the per-clique masses ``mu_k a_k / N`` are iid ``Gamma(alpha, 1)``, the
best ``K~``-term approximation keeps the ``K~`` largest of ``K`` Gamma
variates, and its expected tau-accuracy is the expected sum of the top
``K~`` order statistics divided by the expected total ``alpha K``.

For integer ``alpha`` the survival function of a Gamma variate is
``exp(-x) * sum_{i<alpha} x^i / i!``, so the expected minimum of ``n`` iid
variates is a finite sum over the coefficients ``c_m(alpha, n-1)`` of that
polynomial raised to the power ``n-1``. Expected order statistics of every
rank follow from the minima by an alternating binomial identity. The sums
alternate in sign with binomial-sized terms, so they are evaluated in exact
rational arithmetic and rounded once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) variable in bits, with ``0 log 0 = 0``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p in (0, 1):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def candidate_count_bound(k: int, p: float, q: int) -> float:
    """Upper bound ``Q (2^{K H(p)} + K)`` on the number of candidate cliques."""
    if k < 1 or q < 1:
        raise ValueError("k and q must be at least 1")
    return q * (2.0 ** (k * binary_entropy(p)) + k)


def redundancy_bound(n: int, p: float, c: float, q: int) -> float:
    """Upper bound on candidates per true clique when ``K = c log2 N``.

    The exponent constant is taken equal to ``c``, which makes
    ``N^{c H(p)} = 2^{K H(p)}`` and keeps the bound consistent with
    :func:`candidate_count_bound`.
    """
    if n < 2 or not c > 0 or q < 1:
        raise ValueError("need n >= 2, c > 0 and q >= 1")
    log_n = math.log2(n)
    return q * (1.0 + n ** (c * binary_entropy(p)) / (c * log_n))


def _integer_shape(alpha) -> int:
    if isinstance(alpha, bool) or not float(alpha).is_integer() or alpha < 1:
        raise ValueError(
            f"closed form needs a positive integer shape, got {alpha}; "
            "use the monte_carlo method for non-integer shapes"
        )
    return int(alpha)


@lru_cache(maxsize=None)
def survival_power_coefficients(alpha: int, q: int) -> tuple[Fraction, ...]:
    """Coefficients ``c_m(alpha, q)`` of ``(sum_{i<alpha} x^i / i!)^q``, m = 0..(alpha-1) q."""
    if q == 0:
        return (Fraction(1),)
    base = [Fraction(1, math.factorial(i)) for i in range(alpha)]
    prev = survival_power_coefficients(alpha, q - 1)
    out = [Fraction(0)] * (len(prev) + alpha - 1)
    for m, cm in enumerate(prev):
        for i, b in enumerate(base):
            out[m + i] += cm * b
    return tuple(out)


@lru_cache(maxsize=None)
def expected_minimum(n: int, alpha: int) -> Fraction:
    """Exact ``E[min of n iid Gamma(alpha, 1)]`` for integer ``alpha``."""
    coeffs = survival_power_coefficients(alpha, n - 1)
    total = Fraction(0)
    for m, cm in enumerate(coeffs):
        total += cm * Fraction(math.factorial(alpha + m), n ** (alpha + m + 1))
    return n * total / math.factorial(alpha - 1)


@lru_cache(maxsize=None)
def _order_statistic_means_exact(k: int, alpha: int) -> tuple[Fraction, ...]:
    out = []
    for j in range(1, k + 1):
        s = Fraction(0)
        for i in range(j, k + 1):
            term = math.comb(i - 1, j - 1) * math.comb(k, i) * expected_minimum(i, alpha)
            s += term if (i - j) % 2 == 0 else -term
        out.append(s)
    return tuple(out)


def order_statistic_means(k: int, alpha: int) -> np.ndarray:
    """Expected values of the ``j``-th largest of ``k`` iid ``Gamma(alpha, 1)``, j = 1..k.

    >>> order_statistic_means(3, 1).round(4).tolist()
    [1.8333, 0.8333, 0.3333]
    """
    a = _integer_shape(alpha)
    if k < 1:
        raise ValueError("k must be at least 1")
    return np.array([float(x) for x in _order_statistic_means_exact(k, a)])


def expected_accuracy(k_tilde: int, k: int, alpha: int) -> float:
    """Expected tau-accuracy when keeping the ``k_tilde`` largest of ``k`` masses."""
    a = _integer_shape(alpha)
    if not 0 <= k_tilde <= k:
        raise ValueError(f"k_tilde must lie in 0..{k}")
    if k_tilde == 0:
        return 0.0
    exact = _order_statistic_means_exact(k, a)
    value = float(sum(exact[:k_tilde], Fraction(0)) / (a * k))
    return min(1.0, max(0.0, value))


def _mc_top_shares(k: int, alpha: float, samples: int, seed: int, chunk: int = 100_000):
    """Per-``K~`` sums needed for both Monte-Carlo estimators.

    Chunks get their own child seeds, so the result does not depend on how
    the chunks are scheduled.
    """
    n_chunks = -(-samples // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    s_ratio = np.zeros(k + 1)
    s_ratio2 = np.zeros(k + 1)
    s_top = np.zeros(k + 1)
    s_top2 = np.zeros(k + 1)
    s_tot = s_tot2 = 0.0
    s_top_tot = np.zeros(k + 1)
    done = 0
    for child in children:
        m = min(chunk, samples - done)
        done += m
        x = np.random.default_rng(child).gamma(alpha, 1.0, size=(m, k))
        x = -np.sort(-x, axis=1)
        top = np.zeros((m, k + 1))
        np.cumsum(x, axis=1, out=top[:, 1:])
        tot = top[:, -1].copy()
        ratio = top / tot[:, None]
        ratio[:, -1] = 1.0
        s_ratio += ratio.sum(axis=0)
        s_ratio2 += (ratio * ratio).sum(axis=0)
        s_top += top.sum(axis=0)
        s_top2 += (top * top).sum(axis=0)
        s_top_tot += (top * tot[:, None]).sum(axis=0)
        s_tot += tot.sum()
        s_tot2 += (tot * tot).sum()
    return samples, s_ratio, s_ratio2, s_top, s_top2, s_top_tot, s_tot, s_tot2


MIN_SAMPLES = 10_000


def _mc_estimates(k, alpha, samples, seed, estimator):
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} Monte-Carlo samples, got {samples}")
    if not alpha > 0:
        raise ValueError(f"shape must be positive, got {alpha}")
    n, s_r, s_r2, s_t, s_t2, s_tt, s_tot, s_tot2 = _mc_top_shares(k, alpha, samples, seed)
    if estimator == "ratio":
        mean = s_r / n
        var = np.maximum(s_r2 / n - mean**2, 0.0) * n / (n - 1)
        return mean, np.sqrt(var / n)
    if estimator == "ratio_of_means":
        mt, mtot = s_t / n, s_tot / n
        est = mt / mtot
        # delta method for a ratio of sample means
        var_t = s_t2 / n - mt**2
        var_tot = s_tot2 / n - mtot**2
        cov = s_tt / n - mt * mtot
        var = (var_t - 2 * est * cov + est**2 * var_tot) / mtot**2
        se = np.sqrt(np.maximum(var, 0.0) / n)
        est[-1], se[-1] = 1.0, 0.0
        return est, se
    raise ValueError(f"unknown estimator {estimator!r}")


def expected_accuracy_mc(
    k_tilde: int,
    k: int,
    alpha: float,
    samples: int = 1_000_000,
    seed: int = 0,
    estimator: str = "ratio",
) -> tuple[float, float]:
    """Monte-Carlo estimate and standard error of the top-``k_tilde`` mass share.

    ``estimator="ratio"`` averages the per-replicate share; ``"ratio_of_means"``
    divides the mean top-``k_tilde`` sum by the mean total. For iid Gamma
    masses the normalized vector is independent of the total, so both target
    the same number.
    """
    if not 0 <= k_tilde <= k:
        raise ValueError(f"k_tilde must lie in 0..{k}")
    mean, se = _mc_estimates(k, alpha, samples, seed, estimator)
    return float(mean[k_tilde]), float(se[k_tilde])


@dataclass(frozen=True)
class AccuracyCurve:
    k: int
    alpha: float
    points: tuple[tuple[int, float], ...]
    std_errors: tuple[float, ...] | None = None

    @property
    def tau0(self) -> np.ndarray:
        return np.array([t for _, t in self.points])

    def to_tsv(self, digits: int = 6) -> str:
        header = "# k_tilde\ttau0" + ("\tstd_error" if self.std_errors is not None else "")
        lines = [header]
        for i, (kt, t) in enumerate(self.points):
            row = f"{kt}\t{t:.{digits}f}"
            if self.std_errors is not None:
                row += f"\t{self.std_errors[i]:.{digits}g}"
            lines.append(row)
        return "\n".join(lines) + "\n"


def accuracy_curve(
    k: int,
    alpha: float,
    method: str = "closed_form",
    samples: int = 1_000_000,
    seed: int = 0,
) -> AccuracyCurve:
    """Expected accuracy at every ``K~ = 0..K``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if method == "closed_form":
        a = _integer_shape(alpha)
        exact = _order_statistic_means_exact(k, a)
        running = Fraction(0)
        pts = [(0, 0.0)]
        for j in range(1, k + 1):
            running += exact[j - 1]
            pts.append((j, min(1.0, float(running / (a * k)))))
        return AccuracyCurve(k, a, tuple(pts))
    if method == "monte_carlo":
        mean, se = _mc_estimates(k, alpha, samples, seed, "ratio")
        pts = tuple((j, float(mean[j])) for j in range(k + 1))
        return AccuracyCurve(k, alpha, pts, tuple(float(x) for x in se))
    raise ValueError(f"unknown method {method!r}")


def interpolate_curve(curve: AccuracyCurve, fraction: float) -> float:
    """Curve value at ``K~ = fraction * K``, linear between integer ``K~``."""
    kt = np.array([p[0] for p in curve.points], dtype=float)
    return float(np.interp(fraction * curve.k, kt, curve.tau0))
