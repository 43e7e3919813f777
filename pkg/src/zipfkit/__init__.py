"""zipfkit: power-law tails, Zipf tests, panel fundamentals, growth simulation."""

from .dataio import DropReport, export_ccdf, load_panel, read_values
from .gof import (
    CVM_W2,
    KS_D,
    KS_TWO_SAMPLE,
    GofReport,
    bootstrap_pvalue,
    cvm_w2,
    ks_one_sample,
    ks_two_sample,
)
from .panel import (
    FE_INDIVIDUAL,
    FE_TIME,
    FE_TWOWAY,
    MODELS,
    POOLED,
    RE_INDIVIDUAL,
    PanelDataset,
    PanelFit,
    SelectionReport,
    fit,
    fundamentals,
    make_panel,
    select_model,
    theoretical_price,
)
from .pipeline import RunConfig, run_pipeline
from .reedsim import ReedConfig, analytic_tail_exponent, geometric_pgf, simulate
from .synth import SyntheticPanel, fe_panel, reed_panel, write_panel_csv
from .tail import (
    TailFit,
    TailSample,
    alpha_mle,
    ccdf,
    fit_alpha_mle,
    make_tail_sample,
    sample_pareto,
    select_xmin,
)
from .zipf import (
    URZUA_SIZES,
    CriticalValueTable,
    ZipfReport,
    lmz,
    lmz_critical_table,
    lr_zipf,
    zipf_report,
)

__version__ = "0.1.0"

__all__ = [
    "CVM_W2",
    "CriticalValueTable",
    "DropReport",
    "FE_INDIVIDUAL",
    "FE_TIME",
    "FE_TWOWAY",
    "GofReport",
    "KS_D",
    "KS_TWO_SAMPLE",
    "MODELS",
    "POOLED",
    "PanelDataset",
    "PanelFit",
    "RE_INDIVIDUAL",
    "ReedConfig",
    "RunConfig",
    "SelectionReport",
    "SyntheticPanel",
    "TailFit",
    "TailSample",
    "URZUA_SIZES",
    "ZipfReport",
    "alpha_mle",
    "analytic_tail_exponent",
    "bootstrap_pvalue",
    "ccdf",
    "cvm_w2",
    "export_ccdf",
    "fe_panel",
    "fit",
    "fit_alpha_mle",
    "fundamentals",
    "geometric_pgf",
    "ks_one_sample",
    "ks_two_sample",
    "lmz",
    "lmz_critical_table",
    "load_panel",
    "lr_zipf",
    "make_panel",
    "make_tail_sample",
    "read_values",
    "reed_panel",
    "run_pipeline",
    "sample_pareto",
    "select_model",
    "select_xmin",
    "simulate",
    "theoretical_price",
    "write_panel_csv",
    "zipf_report",
]
