"""Synthetic panel generators.

The original data source is proprietary, so tests and demos run on synthetic
panels with known structure: a plain two-way error component generator, and
a variant whose company heterogeneity is driven by the multiplicative growth
model so the cross-section carries a heavy, Zipf-like tail.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._rng import derived_seed
from .panel import PanelDataset, make_panel
from .reedsim import ReedConfig, simulate

_DEFAULT_SLOPES = (0.137, 0.298, 0.378)
_FIRST_YEAR = 2004


@dataclass(frozen=True)
class SyntheticPanel:
    """A generated panel together with the quantities used to build it."""

    dataset: PanelDataset
    intercept: float
    slopes: np.ndarray
    company_effects: np.ndarray  # one per company
    year_effects: np.ndarray     # one per year
    noise: np.ndarray            # one per record
    ln_true_fundamentals: np.ndarray | None = None


def _apply_gaps(rng, n_companies: int, n_years: int, missing_rate: float):
    """Record mask with random gaps, keeping at least one record per company."""
    keep = rng.random((n_companies, n_years)) >= missing_rate
    empty = ~keep.any(axis=1)
    keep[empty, 0] = True
    return keep


def _center_effects(mu, gamma, comp_grid, year_grid):
    """Recenter generated effects to the weighted zero-sum identification.

    The fitted intercept is the grand mean level, so the generator's true
    intercept is only recoverable when the true effects carry zero
    record-weighted means themselves.
    """
    n = comp_grid.size
    mu = mu - np.bincount(comp_grid, minlength=mu.size) @ mu / n
    gamma = gamma - np.bincount(year_grid, minlength=gamma.size) @ gamma / n
    return mu, gamma


def fe_panel(n_companies: int = 200, n_years: int = 10, *,
             intercept: float = 1.485, slopes=_DEFAULT_SLOPES,
             company_sd: float = 0.7, year_sd: float = 0.25,
             noise_sd: float = 0.0, x_sd: float = 1.0,
             effect_x_coupling: float = 0.0, missing_rate: float = 0.0,
             seed: int = 0) -> SyntheticPanel:
    """Two-way error component panel with iid normal regressors.

    ``effect_x_coupling`` adds that multiple of the company effect to the
    first regressor, producing the effect/regressor correlation that the
    Hausman test is meant to detect.  ``missing_rate`` knocks out records at
    random (unbalanced panel), never emptying a company entirely.
    """
    rng = np.random.default_rng(seed)
    slopes = np.asarray(slopes, dtype=float)
    mu = rng.normal(0.0, company_sd, n_companies) if company_sd > 0 else np.zeros(n_companies)
    gamma = rng.normal(0.0, year_sd, n_years) if year_sd > 0 else np.zeros(n_years)

    keep = _apply_gaps(rng, n_companies, n_years, missing_rate)
    comp_grid, year_grid = np.nonzero(keep)
    n = comp_grid.size
    mu, gamma = _center_effects(mu, gamma, comp_grid, year_grid)

    x = rng.normal(0.0, x_sd, (n, slopes.size))
    if effect_x_coupling != 0.0:
        x[:, 0] += effect_x_coupling * mu[comp_grid]
    eps = rng.normal(0.0, noise_sd, n) if noise_sd > 0 else np.zeros(n)
    ln_y = intercept + mu[comp_grid] + gamma[year_grid] + x @ slopes + eps

    company_ids = np.array([f"C{i:05d}" for i in range(n_companies)], dtype=object)
    dataset = make_panel(company_ids[comp_grid], _FIRST_YEAR + year_grid, ln_y, x)
    return SyntheticPanel(dataset, intercept, slopes, mu, gamma, eps)


def reed_panel(n_companies: int = 500, n_years: int = 10, *,
               p: float = 0.05, log_z_mean: float = -0.5, log_z_sd: float = 1.0,
               x0: float = 1.0, intercept: float = 1.485, slopes=_DEFAULT_SLOPES,
               company_sd: float = 0.15, indicator_noise_sd: float = 0.1,
               year_sd: float = 0.2, noise_sd: float = 0.1,
               missing_rate: float = 0.0, seed: int = 0) -> SyntheticPanel:
    """Panel whose fundamentals come from the multiplicative growth model.

    Each company draws a growth-model value F_i; the k-th regressor loads on
    ln F_i with weight chosen so the slope-weighted sum of loadings is one,
    making the true per-record log fundamentals

        intercept + company effect + slopes . ln_x

    distributed like ln F_i up to light noise.  Year shocks and disturbances
    are then added to produce the observed dependent variable, mirroring the
    two-way error component structure.
    """
    rng = np.random.default_rng(derived_seed(seed, 1))
    slopes = np.asarray(slopes, dtype=float)
    config = ReedConfig(p=p, x0=x0, log_z_mean=log_z_mean, log_z_sd=log_z_sd,
                        n_firms=n_companies, seed=derived_seed(seed, 0))
    ln_f = np.log(simulate(config))

    loadings = 1.0 / (slopes.size * slopes)
    mu = rng.normal(0.0, company_sd, n_companies) if company_sd > 0 else np.zeros(n_companies)
    gamma = rng.normal(0.0, year_sd, n_years) if year_sd > 0 else np.zeros(n_years)

    keep = _apply_gaps(rng, n_companies, n_years, missing_rate)
    comp_grid, year_grid = np.nonzero(keep)
    n = comp_grid.size
    mu, gamma = _center_effects(mu, gamma, comp_grid, year_grid)

    x = loadings[None, :] * ln_f[comp_grid, None]
    x += rng.normal(0.0, indicator_noise_sd, (n, slopes.size))
    eps = rng.normal(0.0, noise_sd, n) if noise_sd > 0 else np.zeros(n)
    ln_fund = intercept + mu[comp_grid] + x @ slopes
    ln_y = ln_fund + gamma[year_grid] + eps

    company_ids = np.array([f"C{i:05d}" for i in range(n_companies)], dtype=object)
    dataset = make_panel(company_ids[comp_grid], _FIRST_YEAR + year_grid, ln_y, x)
    return SyntheticPanel(dataset, intercept, slopes, mu, gamma, eps,
                          ln_true_fundamentals=ln_fund)


def write_panel_csv(path, panel: PanelDataset, *, shares: bool = False,
                    bad_rows: int = 0, seed: int = 0) -> int:
    """Write a panel to the raw CSV schema, returning the data row count.

    Levels are exponentials of the stored log values.  With ``shares`` the
    four value columns are scaled up by a per-row share count and a
    shares_outstanding column is added, so loading divides them back out.
    ``bad_rows`` appends rows with a zero dividend that the loader must drop.
    """
    rng = np.random.default_rng(seed)
    header = ["company_id", "year", "price", "dividends", "cash_flow", "book_value"]
    if shares:
        header.append("shares_outstanding")
    n = panel.n_records
    price = np.exp(panel.ln_y)
    values = np.exp(panel.ln_x)
    share_counts = np.exp(rng.normal(2.0, 0.5, n)) if shares else None

    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in range(n):
            row = [panel.company_ids[r], int(panel.years[r])]
            cells = [price[r], values[r, 0], values[r, 1], values[r, 2]]
            if shares:
                s = share_counts[r]
                row += [f"{c * s:.12g}" for c in cells] + [f"{s:.12g}"]
            else:
                row += [f"{c:.12g}" for c in cells]
            writer.writerow(row)
            rows += 1
        for k in range(bad_rows):
            row = [f"BAD{k:04d}", _FIRST_YEAR, "10.0", "0.0", "1.0", "1.0"]
            if shares:
                row.append("1.0")
            writer.writerow(row)
            rows += 1
    return rows
