"""Tests of the Zipf hypothesis (tail exponent equal to one).

Two tests are provided.  The likelihood ratio test has the closed form
LR = 2 n [ln(alpha) + 1/alpha - 1] inside the Pareto family and is
chi-squared(1) under the null.  The Lagrange multiplier test of Urzua (2000),
here called LMZ, is the score test of uniformity of u_i = x_min / x_i against
the two-parameter Beta family: under a unit-exponent Pareto the u_i are iid
Uniform(0, 1), and departures in either Beta direction signal a violation.
LMZ is asymptotically chi-squared(2); for small tails its critical values
are taken from a Monte Carlo null table, following Urzua's own practice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from ._rng import derived_rng
from .tail import TailFit, TailSample

# Off-diagonal of the per-observation score information: cov(ln u, ln(1-u)).
_SCORE_COV = 1.0 - np.pi ** 2 / 6.0

#: Tail sizes of the published LMZ significance table (Urzua 2000).
URZUA_SIZES = (10, 15, 20, 25, 30, 50, 100, 200)

#: Largest tail size for which the Monte Carlo null table is used.
SMALL_SAMPLE_LIMIT = 200

_NULL_SEED = 58123
_NULL_REPLICATES = 20_000
_CHUNK = 20_000

ASYMPTOTIC_CHI2 = "asymptotic_chi2"
MONTE_CARLO_TABLE = "monte_carlo_table"


@dataclass(frozen=True)
class ZipfReport:
    """Both Zipf-hypothesis test statistics for one tail sample."""

    lr: float
    lmz: float
    lr_p: float
    lmz_p: float
    tail_n: int
    critical_source: str


@dataclass(frozen=True)
class CriticalValueTable:
    """Monte Carlo upper critical values of LMZ, one row per tail size."""

    sizes: tuple[int, ...]
    levels: tuple[float, ...]
    values: np.ndarray  # shape (len(sizes), len(levels))
    replicates: int
    seed: int

    def critical_value(self, size: int, level: float) -> float:
        return float(self.values[self.sizes.index(size), self.levels.index(level)])

    def to_delimited(self, include_asymptotic: bool = True) -> str:
        """Tab-delimited text with columns: n, level, critical value."""
        lines = ["n\tlevel\tcritical_value"]
        for i, n in enumerate(self.sizes):
            for j, level in enumerate(self.levels):
                lines.append(f"{n}\t{level:g}\t{self.values[i, j]:.6g}")
        if include_asymptotic:
            for level in self.levels:
                lines.append(f"inf\t{level:g}\t{stats.chi2.ppf(1.0 - level, 2):.6g}")
        return "\n".join(lines) + "\n"


def lr_statistic(alpha: float, n: int) -> float:
    """Closed form of 2 [l(alpha) - l(1)] under the Pareto likelihood."""
    return 2.0 * n * (np.log(alpha) + 1.0 / alpha - 1.0)


def lr_zipf(tail: TailSample, fit: TailFit) -> tuple[float, float]:
    """Likelihood ratio test of a unit tail exponent.

    Returns (statistic, p_value) with the p-value from chi-squared(1).
    """
    if fit.x_min != tail.x_min:
        raise ValueError("fit/sample mismatch")
    if tail.tail_n < 2:
        raise ValueError("insufficient tail")
    if not np.isfinite(fit.alpha) or fit.alpha <= 0.0:
        raise ValueError("degenerate tail")
    lr = lr_statistic(fit.alpha, tail.tail_n)
    return float(lr), float(stats.chi2.sf(lr, 1))


def _lmz_from_u(u: np.ndarray) -> np.ndarray:
    """LMZ score statistic for each row of a matrix of u values in (0, 1)."""
    n = u.shape[1]
    s1 = n + np.sum(np.log(u), axis=1)
    s2 = n + np.sum(np.log1p(-u), axis=1)
    c = _SCORE_COV
    return (s1 * s1 + s2 * s2 - 2.0 * c * s1 * s2) / (n * (1.0 - c * c))


def _u_from_x(x: np.ndarray, x_min: float) -> np.ndarray:
    """Transform x >= x_min to u = x_min / x, nudging exact ties off 1."""
    u = x_min / x
    return np.where(u >= 1.0, u * (1.0 - 1e-12), u)


def lmz_statistic(tail_values, x_min: float) -> float:
    """LMZ statistic of one tail; ties with the threshold are perturbed.

    Observations exactly at the threshold give u = 1 and an undefined
    ln(1 - u); they are a measure-zero artifact of finite precision and are
    nudged by a relative 1e-12 before the transform.
    """
    values = np.asarray(tail_values, dtype=float)
    if np.all(values == x_min):
        raise ValueError("degenerate tail")
    u = _u_from_x(values, x_min)
    return float(_lmz_from_u(u[None, :])[0])


@lru_cache(maxsize=32)
def _null_sample(n: int, replicates: int, seed: int) -> np.ndarray:
    """Sorted Monte Carlo sample of the LMZ null distribution at size n."""
    rng = derived_rng(seed, n)
    out = np.empty(replicates)
    done = 0
    while done < replicates:
        k = min(_CHUNK, replicates - done)
        u = rng.random((k, n))
        u[u == 0.0] = np.finfo(float).tiny
        x = 1.0 / u  # unit-exponent Pareto by inversion, x_min = 1
        out[done:done + k] = _lmz_from_u(_u_from_x(x, 1.0))
        done += k
    out.sort()
    return out


def _table_pvalue(statistic: float, n: int,
                  replicates: int = _NULL_REPLICATES, seed: int = _NULL_SEED) -> float:
    """Null p-value interpolated linearly in n between table columns."""
    sizes = URZUA_SIZES

    def column_p(size: int) -> float:
        null = _null_sample(size, replicates, seed)
        exceed = null.size - np.searchsorted(null, statistic, side="left")
        return (1.0 + exceed) / (null.size + 1.0)

    if n <= sizes[0]:
        return column_p(sizes[0])
    if n >= sizes[-1]:
        return column_p(sizes[-1])
    hi = int(np.searchsorted(np.asarray(sizes), n, side="left"))
    if sizes[hi] == n:
        return column_p(n)
    lo = hi - 1
    w = (n - sizes[lo]) / (sizes[hi] - sizes[lo])
    return (1.0 - w) * column_p(sizes[lo]) + w * column_p(sizes[hi])


def lmz(tail: TailSample) -> tuple[float, float]:
    """Urzua's LM test of the Zipf hypothesis.

    Returns (statistic, p_value).  For tails of more than
    ``SMALL_SAMPLE_LIMIT`` observations the p-value is chi-squared(2); for
    smaller tails it is read from a cached Monte Carlo null table with
    linear interpolation in the tail size.
    """
    if tail.tail_n < 2:
        raise ValueError("insufficient tail")
    statistic = lmz_statistic(tail.tail_values, tail.x_min)
    if tail.tail_n > SMALL_SAMPLE_LIMIT:
        p = float(stats.chi2.sf(statistic, 2))
    else:
        p = float(_table_pvalue(statistic, tail.tail_n))
    return statistic, p


def lmz_critical_table(sizes=URZUA_SIZES, levels=(0.05, 0.10),
                       replicates: int = 100_000, seed: int = 0) -> CriticalValueTable:
    """Monte Carlo regeneration of the LMZ significance table.

    For each tail size, draws ``replicates`` unit-exponent Pareto samples by
    inversion (x = x_min / u), computes LMZ, and returns the empirical upper
    quantiles at each level.  Each size uses its own random stream keyed by
    (seed, size), so the table is reproducible regardless of size order.
    """
    if replicates < 10_000:
        raise ValueError("too few replicates")
    sizes = tuple(int(n) for n in sizes)
    levels = tuple(float(v) for v in levels)
    if any(n < 5 for n in sizes):
        raise ValueError("tail sizes below 5 are not supported")
    if any(not 0.0 < v < 1.0 for v in levels):
        raise ValueError("levels must be in (0, 1)")

    values = np.empty((len(sizes), len(levels)))
    for i, n in enumerate(sizes):
        rng = derived_rng(seed, n)
        lmz_stats = np.empty(replicates)
        done = 0
        while done < replicates:
            k = min(_CHUNK, replicates - done)
            u = rng.random((k, n))
            u[u == 0.0] = np.finfo(float).tiny
            x = 1.0 / u
            lmz_stats[done:done + k] = _lmz_from_u(_u_from_x(x, 1.0))
            done += k
        for j, level in enumerate(levels):
            values[i, j] = np.quantile(lmz_stats, 1.0 - level)
    values.flags.writeable = False
    return CriticalValueTable(sizes, levels, values, replicates, seed)


def zipf_report(tail: TailSample, fit: TailFit) -> ZipfReport:
    """Run both Zipf tests on one fitted tail."""
    lr_stat, lr_p = lr_zipf(tail, fit)
    lmz_stat, lmz_p = lmz(tail)
    source = MONTE_CARLO_TABLE if tail.tail_n <= SMALL_SAMPLE_LIMIT else ASYMPTOTIC_CHI2
    return ZipfReport(lr_stat, lmz_stat, lr_p, lmz_p, tail.tail_n, source)
