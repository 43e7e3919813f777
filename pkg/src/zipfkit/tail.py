"""Empirical tail distributions and Pareto exponent estimation.

Provides the complementary cumulative distribution (CCDF), threshold
selection policies, and the maximum likelihood (Hill-type) estimator of the
power-law exponent for continuous data above a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TailSample:
    """Positive observations together with a tail threshold.

    ``values`` holds the full sample sorted ascending, ``tail_values`` the
    subset with value >= ``x_min``.  Arrays are read-only; construct through
    :func:`make_tail_sample` which enforces the invariants.
    """

    values: np.ndarray
    x_min: float
    tail_values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def tail_n(self) -> int:
        return self.tail_values.size

    @property
    def tail_fraction(self) -> float:
        return self.tail_values.size / self.values.size


@dataclass(frozen=True)
class TailFit:
    """Fitted power-law exponent for the tail of a sample.

    ``std_err`` is the asymptotic MLE standard error alpha / sqrt(tail_n).
    """

    alpha: float
    x_min: float
    tail_n: int
    std_err: float
    tail_fraction: float


def _as_positive_array(values, name: str = "sample") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("non-positive value")
    return arr


def make_tail_sample(values, x_min: float) -> TailSample:
    """Build a TailSample from raw observations and a threshold.

    The threshold may be any positive real; the tail is the inclusive set
    {v : v >= x_min} and must contain at least one observation.
    """
    arr = np.sort(_as_positive_array(values))
    x_min = float(x_min)
    if not np.isfinite(x_min) or x_min <= 0.0:
        raise ValueError("non-positive value")
    tail = arr[np.searchsorted(arr, x_min, side="left"):]
    if tail.size == 0:
        raise ValueError("insufficient tail")
    arr.flags.writeable = False
    tail.flags.writeable = False
    return TailSample(values=arr, x_min=x_min, tail_values=tail)


def ccdf(values) -> np.ndarray:
    """Empirical complementary CDF, Pr(X > x), at each distinct value.

    Returns a (k, 2) array of pairs (x, Pr(X > x)) ordered by ascending x.
    Probabilities are non-increasing and the final pair is exactly zero.
    """
    arr = np.sort(_as_positive_array(values))
    n = arr.size
    xs = np.unique(arr)
    greater = n - np.searchsorted(arr, xs, side="right")
    return np.column_stack((xs, greater / n))


def alpha_mle(tail_values, x_min: float) -> float:
    """Raw MLE of the power-law exponent: n / sum(ln(x_i / x_min)).

    No sample-size validation; callers wanting the checked version use
    :func:`fit_alpha_mle`.
    """
    tail = np.asarray(tail_values, dtype=float)
    log_sum = float(np.sum(np.log(tail / x_min)))
    if log_sum <= 0.0:
        raise ValueError("degenerate tail")
    return tail.size / log_sum


def fit_alpha_mle(sample: TailSample) -> TailFit:
    """Maximum likelihood fit of the tail exponent of ``sample``.

    Ties with the threshold contribute ln(1) = 0 to the likelihood sum.
    Requires at least two tail observations, not all equal to the threshold.
    """
    n = sample.tail_n
    if n < 2:
        raise ValueError("insufficient tail")
    alpha = alpha_mle(sample.tail_values, sample.x_min)
    return TailFit(
        alpha=alpha,
        x_min=sample.x_min,
        tail_n=n,
        std_err=alpha / np.sqrt(n),
        tail_fraction=n / sample.n,
    )


def pareto_cdf(x, x_min: float, alpha: float) -> np.ndarray:
    """CDF of the continuous Pareto, F(x) = 1 - (x_min / x)^alpha, x >= x_min."""
    return 1.0 - (x_min / np.asarray(x, dtype=float)) ** alpha


def pareto_ks_distance(tail_values, x_min: float, alpha: float) -> float:
    """One-sample KS distance between sorted tail data and a fitted Pareto.

    D = max over order statistics of the larger of |i/n - F(x_(i))| and
    |(i-1)/n - F(x_(i))|, the exact supremum over the step function.
    """
    tail = np.asarray(tail_values, dtype=float)
    n = tail.size
    f = pareto_cdf(tail, x_min, alpha)
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(np.max(np.maximum(np.abs(upper - f), np.abs(lower - f))))


def sample_pareto(alpha: float, x_min: float, size: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Inverse-transform Pareto draws: x = x_min * u^(-1/alpha)."""
    u = 1.0 - rng.random(size)  # in (0, 1], avoids division by zero
    return x_min * u ** (-1.0 / alpha)


def _parse_policy(policy: str):
    if policy == "ks-scan":
        return ("ks-scan", None)
    kind, sep, arg = policy.partition(":")
    if sep and kind in ("fixed", "frac"):
        try:
            return (kind, float(arg))
        except ValueError:
            pass
    raise ValueError(f"invalid xmin policy: {policy!r}")


def select_xmin(values, policy: str = "frac:0.02") -> float:
    """Choose the tail threshold under one of three policies.

    Policies are given as strings:

    * ``"fixed:<x>"`` returns x verbatim.
    * ``"frac:<f>"`` returns the smallest order statistic whose inclusive
      tail holds ceil(f * n) observations (the paper-style "top f share").
    * ``"ks-scan"`` scans distinct order statistics leaving at least 10 tail
      points and returns the candidate minimizing the KS distance to its own
      fitted Pareto (Clauset et al. 2009 style), smallest candidate on ties.

    Raises ValueError("insufficient tail") when the resulting tail would
    hold fewer than two observations.
    """
    arr = np.sort(_as_positive_array(values))
    n = arr.size
    kind, arg = _parse_policy(policy)

    if kind == "fixed":
        if not np.isfinite(arg) or arg <= 0.0:
            raise ValueError("non-positive value")
        if n - np.searchsorted(arr, arg, side="left") < 2:
            raise ValueError("insufficient tail")
        return float(arg)

    if kind == "frac":
        if not 0.0 < arg < 1.0:
            raise ValueError(f"tail fraction must be in (0, 1), got {arg}")
        k = int(np.ceil(arg * n))
        if k < 1 or k > n:
            raise ValueError("insufficient tail")
        candidate = float(arr[n - k])
        if n - np.searchsorted(arr, candidate, side="left") < 2:
            raise ValueError("insufficient tail")
        return candidate

    # ks-scan
    distinct = np.unique(arr)
    if distinct.size < 10:
        raise ValueError("insufficient tail")
    log_arr = np.log(arr)
    suffix = np.concatenate((np.cumsum(log_arr[::-1])[::-1], [0.0]))
    best_d = np.inf
    best_x = None
    for x in distinct:
        start = int(np.searchsorted(arr, x, side="left"))
        m = n - start
        if m < 10:
            break
        log_sum = suffix[start] - m * np.log(x)
        if log_sum <= 0.0:
            continue  # all tail values tied with the candidate
        alpha = m / log_sum
        d = pareto_ks_distance(arr[start:], x, alpha)
        if d < best_d:
            best_d = d
            best_x = float(x)
    if best_x is None:
        raise ValueError("insufficient tail")
    return best_x
