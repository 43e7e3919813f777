"""Multiplicative growth with geometric stopping (Reed 2004).

Each firm's value is an initial level multiplied by N iid lognormal factors,
where N is geometric on {1, 2, ...}.  The resulting cross-section has
power-law tails on both ends; the upper tail exponent is the positive root
of the quadratic obtained from the moment generating function of the log
factor, which serves as an exact oracle for the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CHUNK_FIRMS = 100_000


@dataclass(frozen=True)
class ReedConfig:
    """Parameters of the multiplicative growth model.

    p is the geometric stopping parameter (q = 1 - p), x0 the initial value,
    and the factors are exp(Normal(log_z_mean, log_z_sd^2)).
    """

    p: float
    x0: float
    log_z_mean: float
    log_z_sd: float
    n_firms: int
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must be in (0, 1)")
        if not self.x0 > 0.0:
            raise ValueError("x0 must be positive")
        if not self.log_z_sd > 0.0:
            raise ValueError("log_z_sd must be positive")
        if self.n_firms < 1:
            raise ValueError("n_firms must be at least 1")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def lam(self) -> float:
        return self.p / self.q


def _draw_counts(rng: np.random.Generator, p: float, size: int) -> np.ndarray:
    """Geometric factor counts on {1, 2, ...} by inversion."""
    u = rng.random(size)
    u[u == 0.0] = np.finfo(float).tiny
    n = np.ceil(np.log(u) / np.log1p(-p)).astype(np.int64)
    np.maximum(n, 1, out=n)
    return n


def simulate(config: ReedConfig) -> np.ndarray:
    """One value per firm, deterministic given config.seed.

    Factor counts are drawn first for all firms, then the normal log factors
    are drawn and summed per firm in fixed-size blocks, so the output is
    reproducible and scales to millions of firms without holding every
    factor in memory at once.
    """
    rng = np.random.default_rng(config.seed)
    counts = _draw_counts(rng, config.p, config.n_firms)
    log_growth = np.empty(config.n_firms)
    start = 0
    while start < config.n_firms:
        stop = min(start + _CHUNK_FIRMS, config.n_firms)
        block = counts[start:stop]
        z = rng.normal(config.log_z_mean, config.log_z_sd, int(block.sum()))
        offsets = np.concatenate(([0], np.cumsum(block[:-1])))
        log_growth[start:stop] = np.add.reduceat(z, offsets)
        start = stop
    # log sums below about -708 would underflow exp to exactly zero; the
    # output contract is strictly positive values, so floor at the smallest
    # normal double (only reachable deep in the lower tail at tiny p)
    np.maximum(log_growth, np.log(np.finfo(float).tiny), out=log_growth)
    values = config.x0 * np.exp(log_growth)
    np.maximum(values, np.finfo(float).tiny, out=values)
    return values


def analytic_tail_exponent(config: ReedConfig) -> tuple[float, float]:
    """Exact tail exponents (alpha, beta) from the mgf pole condition.

    With lognormal factors the singularities of the value's mgf solve
    sigma^2 s^2 / 2 + mu s + ln q = 0.  The positive root alpha governs the
    upper tail Pr(X > x) ~ c x^(-alpha); beta is minus the negative root and
    governs the lower tail.  Both roots always exist for q in (0, 1).
    """
    mu = config.log_z_mean
    s2 = config.log_z_sd ** 2
    disc = mu * mu - 2.0 * s2 * np.log(config.q)
    root = np.sqrt(disc)
    alpha = (-mu + root) / s2
    beta = (mu + root) / s2
    return float(alpha), float(beta)


def geometric_pgf(config: ReedConfig, s: float) -> float:
    """Probability generating function of the factor count, p s / (1 - q s)."""
    if abs(s) >= 1.0 / config.q:
        raise ValueError("outside radius of convergence")
    return config.p * s / (1.0 - config.q * s)
