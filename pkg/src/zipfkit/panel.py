"""Panel regression on unbalanced (company, year) data in log space.

Implements pooled OLS, one-way and two-way fixed effects (the within
transformation, with alternating demeaning for the unbalanced two-way case),
and Swamy-Arora random effects, plus the model selection tests: F and LR for
pooled vs fixed effects, Hausman for random vs fixed effects, and the pooled
OLS serial correlation check of Wooldridge (2010, p. 299).

Effects are identified by weighted zero-sum constraints (weights equal to
record counts), so the intercept is the grand mean level.  Fitted values of
the two-way model are the "theoretical" dependent variable; dropping the
year effect from them gives the year-shock-free "fundamentals" series.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

POOLED = "pooled"
FE_INDIVIDUAL = "fe_individual"
FE_TIME = "fe_time"
FE_TWOWAY = "fe_twoway"
RE_INDIVIDUAL = "re_individual"
MODELS = (POOLED, FE_INDIVIDUAL, FE_TIME, FE_TWOWAY, RE_INDIVIDUAL)

_N_SLOPES = 3


@dataclass(frozen=True)
class PanelDataset:
    """Unbalanced panel of log-space records keyed by (company, year).

    ``ln_x`` has one column per explanatory variable.  ``company_codes`` and
    ``year_codes`` are integer positions into ``companies`` / ``year_levels``.
    Construct through :func:`make_panel`, which checks key uniqueness and
    finiteness and builds the per-company and per-year record indexes.
    """

    company_ids: np.ndarray
    years: np.ndarray
    ln_y: np.ndarray
    ln_x: np.ndarray
    companies: tuple
    year_levels: tuple
    company_codes: np.ndarray
    year_codes: np.ndarray
    company_index: dict = field(repr=False)
    year_index: dict = field(repr=False)

    @property
    def n_records(self) -> int:
        return self.ln_y.size

    @property
    def n_companies(self) -> int:
        return len(self.companies)

    @property
    def n_years(self) -> int:
        return len(self.year_levels)


@dataclass(frozen=True)
class PanelFit:
    """Estimation result for one panel model.

    ``std_errors`` and ``p_values`` cover (intercept, slope_1..slope_3).
    ``company_effects`` / ``year_effects`` are empty for models that do not
    estimate them.  ``cov_slopes`` is the classical covariance of the slope
    estimates, used by the Hausman test.  ``sigma2_company``/``sigma2_noise``
    are the variance components of the random effects model, None otherwise.
    """

    model: str
    intercept: float
    slopes: np.ndarray
    company_effects: dict
    year_effects: dict
    residuals: np.ndarray
    rss: float
    r2: float
    std_errors: np.ndarray
    p_values: np.ndarray
    df_resid: int
    cov_slopes: np.ndarray
    n_obs: int
    n_companies: int
    n_years: int
    sigma2_company: float | None = None
    sigma2_noise: float | None = None
    absorbed_companies: tuple = ()
    absorbed_years: tuple = ()
    demean_sweeps: int = 0


class FTestResult(NamedTuple):
    statistic: float
    df1: int
    df2: int
    p_value: float


class Chi2TestResult(NamedTuple):
    statistic: float
    df: int
    p_value: float


class SerialCorrelationResult(NamedTuple):
    rho: float
    t_statistic: float
    p_value: float


@dataclass(frozen=True)
class SelectionReport:
    """Model selection evidence: pooled vs FE, RE vs FE, serial correlation."""

    f_fe: FTestResult
    lr_fe: Chi2TestResult
    hausman: Chi2TestResult
    wooldridge: SerialCorrelationResult
    hausman_adjusted: bool = False


def make_panel(company_ids, years, ln_y, ln_x) -> PanelDataset:
    """Assemble and validate a PanelDataset from record arrays."""
    company_ids = np.asarray(company_ids, dtype=object)
    years = np.asarray(years, dtype=int)
    ln_y = np.asarray(ln_y, dtype=float)
    ln_x = np.asarray(ln_x, dtype=float)
    if ln_x.ndim != 2 or ln_x.shape[1] != _N_SLOPES:
        raise ValueError(f"ln_x must have {_N_SLOPES} columns")
    n = ln_y.size
    if not (company_ids.size == years.size == n == ln_x.shape[0]):
        raise ValueError("record arrays must have equal length")
    if n == 0:
        raise ValueError("no usable rows")
    if not (np.all(np.isfinite(ln_y)) and np.all(np.isfinite(ln_x))):
        raise ValueError("non-finite value")

    companies, company_codes = np.unique(company_ids, return_inverse=True)
    year_levels, year_codes = np.unique(years, return_inverse=True)
    pair_keys = company_codes.astype(np.int64) * len(year_levels) + year_codes
    if np.unique(pair_keys).size != n:
        raise ValueError("duplicate key")

    company_index = {}
    for code, cid in enumerate(companies):
        company_index[cid] = np.flatnonzero(company_codes == code)
    year_index = {}
    for code, year in enumerate(year_levels):
        year_index[int(year)] = np.flatnonzero(year_codes == code)

    return PanelDataset(
        company_ids=company_ids,
        years=years,
        ln_y=ln_y,
        ln_x=ln_x,
        companies=tuple(companies),
        year_levels=tuple(int(y) for y in year_levels),
        company_codes=company_codes,
        year_codes=year_codes,
        company_index=company_index,
        year_index=year_index,
    )


def _group_means(x: np.ndarray, codes: np.ndarray, counts: np.ndarray) -> np.ndarray:
    if x.ndim == 1:
        return np.bincount(codes, weights=x, minlength=counts.size) / counts
    out = np.empty((counts.size, x.shape[1]))
    for j in range(x.shape[1]):
        out[:, j] = np.bincount(codes, weights=x[:, j], minlength=counts.size)
    return out / counts[:, None]


def twoway_demean(data: np.ndarray, company_codes: np.ndarray, year_codes: np.ndarray,
                  tol: float = 1e-10, max_sweeps: int = 1000) -> tuple[np.ndarray, int]:
    """Alternating company/year demeaning of the columns of ``data``.

    Sweeps subtract company means then year means until the largest
    adjustment applied in a sweep falls below ``tol``.  Balanced panels are
    exact after a single sweep (the second sweep applies zero adjustment and
    certifies convergence).  Returns the demeaned copy and the sweep count.
    """
    work = np.array(data, dtype=float)
    counts_c = np.bincount(company_codes).astype(float)
    counts_t = np.bincount(year_codes).astype(float)
    for sweep in range(1, max_sweeps + 1):
        mc = _group_means(work, company_codes, counts_c)
        work -= mc[company_codes]
        mt = _group_means(work, year_codes, counts_t)
        work -= mt[year_codes]
        change = max(np.max(np.abs(mc)), np.max(np.abs(mt)))
        if change < tol:
            return work, sweep
    raise RuntimeError("two-way demeaning did not converge")


def _recover_effects(partial: np.ndarray, company_codes, year_codes,
                     tol: float = 1e-13, max_sweeps: int = 10_000):
    """Least-squares effect decomposition of y - X b by backfitting.

    Returns (intercept, company effect vector, year effect vector) under the
    weighted zero-sum constraints sum_i n_i mu_i = 0 and sum_t n_t g_t = 0.
    """
    counts_c = np.bincount(company_codes).astype(float)
    counts_t = np.bincount(year_codes).astype(float)
    n = partial.size
    a0 = float(np.mean(partial))
    e = partial - a0
    scale = max(1.0, float(np.max(np.abs(e))) if e.size else 1.0)
    mu = np.zeros(counts_c.size)
    gamma = np.zeros(counts_t.size)
    for _ in range(max_sweeps):
        mu_new = _group_means(e - gamma[year_codes], company_codes, counts_c)
        gamma_new = _group_means(e - mu_new[company_codes], year_codes, counts_t)
        change = max(np.max(np.abs(mu_new - mu)), np.max(np.abs(gamma_new - gamma)))
        mu, gamma = mu_new, gamma_new
        if change < tol * scale:
            break
    else:
        raise RuntimeError("effect recovery did not converge")
    shift_mu = float(counts_c @ mu) / n
    mu -= shift_mu
    a0 += shift_mu
    shift_gamma = float(counts_t @ gamma) / n
    gamma -= shift_gamma
    a0 += shift_gamma
    return a0, mu, gamma


def _solve_ls(design: np.ndarray, response: np.ndarray) -> np.ndarray:
    beta, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("collinear regressors")
    return beta


def _absorbed_groups(levels, codes, transformed: np.ndarray, reference_scale: float):
    """Group labels whose transformed regressor rows are numerically zero."""
    row_mag = np.abs(transformed).max(axis=1)
    group_mag = np.zeros(len(levels))
    np.maximum.at(group_mag, codes, row_mag)
    cutoff = 1e-12 * max(1.0, reference_scale)
    return tuple(levels[i] for i in np.flatnonzero(group_mag < cutoff))


def _intercept_se(sigma2: float, n: int, xbar: np.ndarray, cov_slopes: np.ndarray) -> float:
    return float(np.sqrt(sigma2 / n + xbar @ cov_slopes @ xbar))


def _t_pvalues(estimates: np.ndarray, std_errors: np.ndarray, df: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(std_errors > 0, estimates / std_errors, np.inf)
    return 2.0 * stats.t.sf(np.abs(t), df)


def _r2(ln_y: np.ndarray, rss: float) -> float:
    tss = float(np.sum((ln_y - ln_y.mean()) ** 2))
    return 1.0 - rss / tss


def fit(panel: PanelDataset, model: str = FE_TWOWAY, *,
        demean_tol: float = 1e-10, max_sweeps: int = 1000) -> PanelFit:
    """Estimate one of the five panel models.

    Two-way fixed effects uses alternating demeaning (no dummy matrix), so
    it scales to panels with tens of thousands of companies; effects are
    recovered afterwards from the partial residuals.  Standard errors are
    the classical OLS ones on the transformed data with degrees of freedom
    corrected for the absorbed effects.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model: {model!r}")
    n = panel.n_records
    if n < 10:
        raise ValueError("panel too small")
    y = panel.ln_y
    x = panel.ln_x
    ncomp, nyear = panel.n_companies, panel.n_years
    ccodes, tcodes = panel.company_codes, panel.year_codes
    counts_c = np.bincount(ccodes).astype(float)
    counts_t = np.bincount(tcodes).astype(float)
    xbar_all = x.mean(axis=0)
    x_scale = float(np.max(np.abs(x)))

    mu = np.zeros(ncomp)
    gamma = np.zeros(nyear)
    absorbed_c: tuple = ()
    absorbed_t: tuple = ()
    sweeps = 0
    sigma2_company = None
    sigma2_noise = None

    if model == POOLED:
        design = np.column_stack((np.ones(n), x))
        beta = _solve_ls(design, y)
        a0, b = float(beta[0]), beta[1:]
        residuals = y - design @ beta
        rss = float(residuals @ residuals)
        df = n - 1 - _N_SLOPES
        sigma2 = rss / df
        cov = sigma2 * np.linalg.inv(design.T @ design)
        std_errors = np.sqrt(np.diag(cov))
        cov_slopes = cov[1:, 1:]

    elif model in (FE_INDIVIDUAL, FE_TIME):
        if model == FE_INDIVIDUAL and ncomp < 2:
            raise ValueError("individual fixed effects need at least 2 companies")
        if model == FE_TIME and nyear < 2:
            raise ValueError("time fixed effects need at least 2 years")
        codes = ccodes if model == FE_INDIVIDUAL else tcodes
        counts = counts_c if model == FE_INDIVIDUAL else counts_t
        levels = panel.companies if model == FE_INDIVIDUAL else panel.year_levels
        ybar = _group_means(y, codes, counts)
        xbar = _group_means(x, codes, counts)
        y_within = y - ybar[codes]
        x_within = x - xbar[codes]
        absorbed = _absorbed_groups(levels, codes, x_within, x_scale)
        if model == FE_INDIVIDUAL:
            absorbed_c = absorbed
        else:
            absorbed_t = absorbed
        b = _solve_ls(x_within, y_within)
        a0 = float(y.mean() - xbar_all @ b)
        effects = ybar - a0 - xbar @ b
        if model == FE_INDIVIDUAL:
            mu = effects
            df = n - ncomp - _N_SLOPES
        else:
            gamma = effects
            df = n - nyear - _N_SLOPES
        residuals = y_within - x_within @ b
        rss = float(residuals @ residuals)
        sigma2 = rss / df
        cov_slopes = sigma2 * np.linalg.inv(x_within.T @ x_within)
        se_b = np.sqrt(np.diag(cov_slopes))
        std_errors = np.concatenate(([_intercept_se(sigma2, n, xbar_all, cov_slopes)], se_b))

    elif model == FE_TWOWAY:
        if ncomp < 2 or nyear < 2:
            raise ValueError("two-way fixed effects needs at least 2 companies and 2 years")
        stacked = np.column_stack((y, x))
        demeaned, sweeps = twoway_demean(stacked, ccodes, tcodes,
                                         tol=demean_tol, max_sweeps=max_sweeps)
        y_within = demeaned[:, 0]
        x_within = demeaned[:, 1:]
        absorbed_c = _absorbed_groups(panel.companies, ccodes, x_within, x_scale)
        absorbed_t = _absorbed_groups(panel.year_levels, tcodes, x_within, x_scale)
        b = _solve_ls(x_within, y_within)
        a0, mu, gamma = _recover_effects(y - x @ b, ccodes, tcodes)
        residuals = y - (a0 + mu[ccodes] + gamma[tcodes] + x @ b)
        rss = float(residuals @ residuals)
        df = n - (ncomp - 1) - (nyear - 1) - 1 - _N_SLOPES
        sigma2 = rss / df
        cov_slopes = sigma2 * np.linalg.inv(x_within.T @ x_within)
        se_b = np.sqrt(np.diag(cov_slopes))
        std_errors = np.concatenate(([_intercept_se(sigma2, n, xbar_all, cov_slopes)], se_b))

    else:  # RE_INDIVIDUAL, Swamy-Arora
        if ncomp <= _N_SLOPES + 1:
            raise ValueError("too few companies for variance components")
        ybar = _group_means(y, ccodes, counts_c)
        xbar = _group_means(x, ccodes, counts_c)
        y_within = y - ybar[ccodes]
        x_within = x - xbar[ccodes]
        b_within = _solve_ls(x_within, y_within)
        rss_within = float(np.sum((y_within - x_within @ b_within) ** 2))
        sigma2_noise = rss_within / (n - ncomp - _N_SLOPES)

        between_design = np.column_stack((np.ones(ncomp), xbar))
        beta_between = _solve_ls(between_design, ybar)
        rss_between = float(np.sum((ybar - between_design @ beta_between) ** 2))
        sigma2_between = rss_between / (ncomp - 1 - _N_SLOPES)
        sigma2_company = max(0.0, sigma2_between - sigma2_noise * float(np.mean(1.0 / counts_c)))

        theta = 1.0 - np.sqrt(sigma2_noise / (counts_c * sigma2_company + sigma2_noise))
        th = theta[ccodes]
        design = np.column_stack((1.0 - th, x - th[:, None] * xbar[ccodes]))
        response = y - th * ybar[ccodes]
        beta = _solve_ls(design, response)
        a0, b = float(beta[0]), beta[1:]
        df = n - 1 - _N_SLOPES
        # GLS covariance: the quasi-demeaned errors have variance sigma2_eps
        # by construction, so the variance component (not the transformed
        # residual variance) scales (X'X)^-1; this keeps the Hausman
        # difference well behaved when the random effects model is wrong.
        cov = sigma2_noise * np.linalg.inv(design.T @ design)
        std_errors = np.sqrt(np.diag(cov))
        cov_slopes = cov[1:, 1:]
        residuals = y - (a0 + x @ b)
        rss = float(residuals @ residuals)

    if absorbed_c or absorbed_t:
        warnings.warn(f"groups absorbed by fixed effects: "
                      f"companies={list(absorbed_c)}, years={list(absorbed_t)}")

    estimates = np.concatenate(([a0], b))
    p_values = _t_pvalues(estimates, std_errors, df)
    company_effects = {cid: float(v) for cid, v in zip(panel.companies, mu)} \
        if model in (FE_INDIVIDUAL, FE_TWOWAY) else {}
    year_effects = {yr: float(v) for yr, v in zip(panel.year_levels, gamma)} \
        if model in (FE_TIME, FE_TWOWAY) else {}

    return PanelFit(
        model=model,
        intercept=a0,
        slopes=np.asarray(b, dtype=float),
        company_effects=company_effects,
        year_effects=year_effects,
        residuals=residuals,
        rss=rss,
        r2=_r2(y, rss),
        std_errors=std_errors,
        p_values=p_values,
        df_resid=df,
        cov_slopes=cov_slopes,
        n_obs=n,
        n_companies=ncomp,
        n_years=nyear,
        sigma2_company=sigma2_company,
        sigma2_noise=sigma2_noise,
        absorbed_companies=absorbed_c,
        absorbed_years=absorbed_t,
        demean_sweeps=sweeps,
    )


def f_effects_test(rss_restricted: float, rss_unrestricted: float,
                   q: int, df_unrestricted: int) -> FTestResult:
    """F test of q absorbed effect parameters against the pooled model."""
    num = max(rss_restricted - rss_unrestricted, 0.0) / q
    if num == 0.0:
        return FTestResult(0.0, q, df_unrestricted, 1.0)
    statistic = num / (rss_unrestricted / df_unrestricted)
    return FTestResult(float(statistic), q, df_unrestricted,
                       float(stats.f.sf(statistic, q, df_unrestricted)))


def lr_effects_test(rss_restricted: float, rss_unrestricted: float,
                    n: int, q: int) -> Chi2TestResult:
    """Gaussian likelihood ratio n ln(RSS_r / RSS_u), chi-squared(q)."""
    statistic = max(n * np.log(rss_restricted / rss_unrestricted), 0.0)
    return Chi2TestResult(float(statistic), q, float(stats.chi2.sf(statistic, q)))


def hausman_test(fit_fe: PanelFit, fit_re: PanelFit) -> tuple[Chi2TestResult, bool]:
    """Hausman contrast of FE and RE slopes.

    When the covariance difference is not positive definite (a standard
    finite-sample pathology) the quadratic form is taken on the positive
    eigenspace via the pseudo-inverse, and the adjusted flag is returned.
    """
    d = fit_fe.slopes - fit_re.slopes
    v = fit_fe.cov_slopes - fit_re.cov_slopes
    eigval, eigvec = np.linalg.eigh(v)
    adjusted = bool(np.any(eigval <= 0.0))
    keep = eigval > 0.0
    if not np.any(keep):
        return Chi2TestResult(0.0, d.size, 1.0), adjusted
    proj = eigvec[:, keep].T @ d
    statistic = float(np.sum(proj ** 2 / eigval[keep]))
    return Chi2TestResult(statistic, d.size, float(stats.chi2.sf(statistic, d.size))), adjusted


def pooled_serial_correlation(panel: PanelDataset, pooled_fit: PanelFit) -> SerialCorrelationResult:
    """AR(1) check on pooled OLS residuals (Wooldridge 2010, p. 299).

    Regresses the residual on its own previous-year value within companies
    (consecutive years only), with company-clustered standard errors.
    """
    e = pooled_fit.residuals
    order = np.lexsort((panel.years, panel.company_codes))
    oc = panel.company_codes[order]
    oy = panel.years[order]
    oe = e[order]
    pair = (oc[1:] == oc[:-1]) & (oy[1:] == oy[:-1] + 1)
    if not np.any(pair):
        raise ValueError("no consecutive-year pairs for serial correlation check")
    lag = oe[:-1][pair]
    cur = oe[1:][pair]
    clusters = oc[1:][pair]
    sxx = float(lag @ lag)
    rho = float(lag @ cur) / sxx
    u = cur - rho * lag
    score = lag * u
    cluster_sums = np.bincount(clusters, weights=score)
    var = float(np.sum(cluster_sums ** 2)) / sxx ** 2
    t_stat = rho / np.sqrt(var)
    n_clusters = np.unique(clusters).size
    p = 2.0 * float(stats.t.sf(abs(t_stat), max(n_clusters - 1, 1)))
    return SerialCorrelationResult(rho, float(t_stat), p)


def select_model(panel: PanelDataset) -> SelectionReport:
    """Run the model selection battery on one panel."""
    fit_pooled = fit(panel, POOLED)
    fit_two = fit(panel, FE_TWOWAY)
    fit_ind = fit(panel, FE_INDIVIDUAL)
    fit_re = fit(panel, RE_INDIVIDUAL)

    q = (panel.n_companies - 1) + (panel.n_years - 1)
    df_fe = panel.n_records - q - 1 - _N_SLOPES
    f_fe = f_effects_test(fit_pooled.rss, fit_two.rss, q, df_fe)
    lr_fe = lr_effects_test(fit_pooled.rss, fit_two.rss, panel.n_records, q)
    hausman, adjusted = hausman_test(fit_ind, fit_re)
    wooldridge = pooled_serial_correlation(panel, fit_pooled)
    return SelectionReport(f_fe=f_fe, lr_fe=lr_fe, hausman=hausman,
                           wooldridge=wooldridge, hausman_adjusted=adjusted)


def _effects_for_panel(fit_result: PanelFit, panel: PanelDataset):
    try:
        mu = np.array([fit_result.company_effects[c] for c in panel.companies])
        gamma = np.array([fit_result.year_effects[yr] for yr in panel.year_levels])
    except KeyError as exc:
        raise ValueError("unseen entity") from exc
    return mu, gamma


def theoretical_price(fit_result: PanelFit, panel: PanelDataset) -> np.ndarray:
    """Fitted log dependent variable of the two-way fixed effects model.

    Per record: intercept + company effect + year effect + slopes . ln_x.
    On the fitting panel this equals ln_y minus the stored residual.
    """
    if fit_result.model != FE_TWOWAY:
        raise ValueError("theoretical price requires a two-way fixed effects fit")
    mu, gamma = _effects_for_panel(fit_result, panel)
    return (fit_result.intercept + mu[panel.company_codes]
            + gamma[panel.year_codes] + panel.ln_x @ fit_result.slopes)


def fundamentals(fit_result: PanelFit, panel: PanelDataset) -> np.ndarray:
    """Theoretical log price with the year effect removed."""
    if fit_result.model != FE_TWOWAY:
        raise ValueError("fundamentals require a two-way fixed effects fit")
    mu, gamma = _effects_for_panel(fit_result, panel)
    del gamma
    return fit_result.intercept + mu[panel.company_codes] + panel.ln_x @ fit_result.slopes
