import math

import numpy as np
import pytest
from scipy import stats

import zipfkit as zk
from zipfkit.reedsim import ReedConfig


def test_config_validation():
    with pytest.raises(ValueError, match="p must be"):
        ReedConfig(p=1.0, x0=1.0, log_z_mean=0.0, log_z_sd=1.0, n_firms=10)
    with pytest.raises(ValueError, match="x0"):
        ReedConfig(p=0.5, x0=0.0, log_z_mean=0.0, log_z_sd=1.0, n_firms=10)
    with pytest.raises(ValueError, match="log_z_sd"):
        ReedConfig(p=0.5, x0=1.0, log_z_mean=0.0, log_z_sd=0.0, n_firms=10)
    with pytest.raises(ValueError, match="n_firms"):
        ReedConfig(p=0.5, x0=1.0, log_z_mean=0.0, log_z_sd=1.0, n_firms=0)


def test_single_factor_limit():
    # p -> 1 means one factor almost surely, so ln(X/x0) is a single normal
    n = 20_000
    config = ReedConfig(p=1.0 - 1e-12, x0=2.0, log_z_mean=-0.3, log_z_sd=0.8,
                        n_firms=n, seed=0)
    draws = np.log(zk.simulate(config) / 2.0)
    assert abs(draws.mean() - (-0.3)) < 4.0 * 0.8 / math.sqrt(n)


def _counts_via_degenerate_factors(p, n, seed):
    # with a vanishing factor spread, ln(X/x0)/m recovers the factor count
    m = -0.7
    config = ReedConfig(p=p, x0=1.0, log_z_mean=m, log_z_sd=1e-9, n_firms=n, seed=seed)
    return np.rint(np.log(zk.simulate(config)) / m).astype(int)


def test_factor_counts_follow_geometric():
    p, n = 0.3, 50_000
    counts = _counts_via_degenerate_factors(p, n, seed=1)
    assert counts.min() >= 1
    kmax = 12
    observed = np.bincount(np.minimum(counts, kmax), minlength=kmax + 1)[1:]
    pmf = p * (1.0 - p) ** (np.arange(1, kmax + 1) - 1)
    pmf[-1] = (1.0 - p) ** (kmax - 1)  # lump the geometric tail
    chi2_stat, p_value = stats.chisquare(observed, n * pmf)
    assert p_value > 0.01


def test_mean_count_matches_pgf_derivative():
    p, n = 0.3, 50_000
    counts = _counts_via_degenerate_factors(p, n, seed=2)
    config = ReedConfig(p=p, x0=1.0, log_z_mean=0.0, log_z_sd=1.0, n_firms=1)
    h = 1e-6
    derivative = (zk.geometric_pgf(config, 1.0 + h) - zk.geometric_pgf(config, 1.0 - h)) / (2 * h)
    tolerance = 4.0 * counts.std() / math.sqrt(n)
    assert abs(counts.mean() - derivative) < tolerance
    assert derivative == pytest.approx(1.0 / p, rel=1e-6)


def test_scale_multiplicativity_bitwise():
    base = ReedConfig(p=0.2, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0, n_firms=5000, seed=3)
    scaled = ReedConfig(p=0.2, x0=7.25, log_z_mean=-0.5, log_z_sd=1.0, n_firms=5000, seed=3)
    assert np.array_equal(zk.simulate(scaled), 7.25 * zk.simulate(base))


def test_analytic_root_closed_form():
    config = ReedConfig(p=0.01, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0, n_firms=1)
    alpha, beta = zk.analytic_tail_exponent(config)
    assert alpha == pytest.approx(0.5 + math.sqrt(0.25 - 2.0 * math.log(0.99)), abs=1e-12)
    assert round(alpha, 4) == 1.0197
    # both roots satisfy the defining quadratic
    for s in (alpha, -beta):
        residual = 0.5 * s * s + (-0.5) * s + math.log(0.99)
        assert abs(residual) < 1e-12


def test_analytic_alpha_gibrat_limit():
    # with log_z_mean = -sd^2/2 the exponent approaches one as p -> 0
    config = ReedConfig(p=1e-13, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0, n_firms=1)
    alpha, beta = zk.analytic_tail_exponent(config)
    assert alpha == pytest.approx(1.0, abs=1e-6)
    assert beta == pytest.approx(0.0, abs=1e-6)


def test_analytic_alpha_monotone_in_p():
    alphas = []
    for p in (0.2, 0.1, 0.05, 0.01):
        config = ReedConfig(p=p, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0, n_firms=1)
        alphas.append(zk.analytic_tail_exponent(config)[0])
    assert all(a > b for a, b in zip(alphas, alphas[1:]))
    assert alphas[-1] > 1.0


def test_simulated_top_percent_matches_analytic():
    config = ReedConfig(p=0.01, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0,
                        n_firms=1_000_000, seed=0)
    alpha_true, _ = zk.analytic_tail_exponent(config)
    values = zk.simulate(config)
    x_min = zk.select_xmin(values, "frac:0.01")
    fit = zk.fit_alpha_mle(zk.make_tail_sample(values, x_min))
    assert abs(fit.alpha - alpha_true) < 0.08


def test_pgf_endpoints_and_radius():
    config = ReedConfig(p=0.4, x0=1.0, log_z_mean=0.0, log_z_sd=1.0, n_firms=1)
    assert zk.geometric_pgf(config, 1.0) == pytest.approx(1.0)
    assert zk.geometric_pgf(config, 0.0) == 0.0
    with pytest.raises(ValueError, match="radius of convergence"):
        zk.geometric_pgf(config, 1.0 / config.q)
