"""Command-line interface.

Subcommands mirror the library: fit-tail, gof, zipf, panel, fundamentals,
simulate, ccdf, and pipeline.  All configuration is explicit (no environment
variables).  Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import dataio, gof, panel as panel_mod, pipeline, reedsim, zipf as zipf_mod
from .tail import fit_alpha_mle, make_tail_sample, select_xmin

_MODEL_FLAGS = {
    "pooled": panel_mod.POOLED,
    "fe-i": panel_mod.FE_INDIVIDUAL,
    "fe-t": panel_mod.FE_TIME,
    "fe-2w": panel_mod.FE_TWOWAY,
    "re-i": panel_mod.RE_INDIVIDUAL,
}


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_code_on_error(message))

    def exit_code_on_error(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _fitted_tail(path: str, policy: str):
    values = dataio.read_values(path)
    x_min = select_xmin(values, policy)
    sample = make_tail_sample(values, x_min)
    return sample, fit_alpha_mle(sample)


def _cmd_fit_tail(args) -> int:
    sample, fit = _fitted_tail(args.input, args.xmin_policy)
    print(f"alpha        {fit.alpha:.6f}")
    print(f"std_err      {fit.std_err:.6f}")
    print(f"x_min        {fit.x_min:.6g}")
    print(f"tail_n       {fit.tail_n}")
    print(f"tail_frac    {fit.tail_fraction:.6f}")
    return 0


def _cmd_gof(args) -> int:
    sample, fit = _fitted_tail(args.input, args.xmin_policy)
    statistic = gof.KS_D if args.statistic == "ks" else gof.CVM_W2
    report = gof.bootstrap_pvalue(sample, fit, statistic,
                                  replicates=args.replicates, seed=args.seed)
    print(f"alpha        {fit.alpha:.6f}")
    print(f"x_min        {fit.x_min:.6g}")
    print(f"tail_n       {fit.tail_n}")
    print(f"{report.statistic_name:<12} {report.statistic:.6f}")
    print(f"p_value      {report.p_value:.4f}  ({report.replicates} replicates, seed {args.seed})")
    return 0


def _cmd_zipf(args) -> int:
    if args.table:
        table = zipf_mod.lmz_critical_table(sizes=args.sizes, levels=args.levels,
                                            replicates=args.replicates, seed=args.seed)
        text = table.to_delimited()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if not args.input:
        raise ValueError("an input file is required unless --table is given")
    sample, fit = _fitted_tail(args.input, args.xmin_policy)
    report = zipf_mod.zipf_report(sample, fit)
    print(f"alpha        {fit.alpha:.6f}")
    print(f"x_min        {fit.x_min:.6g}")
    print(f"tail_n       {report.tail_n}")
    print(f"LR           {report.lr:.4f}  p = {report.lr_p:.4f}")
    print(f"LMZ          {report.lmz:.4f}  p = {report.lmz_p:.4f}  [{report.critical_source}]")
    return 0


def _print_panel_fit(fit) -> None:
    print(f"model        {fit.model}")
    print(f"n_obs        {fit.n_obs}  companies {fit.n_companies}  years {fit.n_years}")
    names = ("intercept", "b1", "b2", "b3")
    estimates = [fit.intercept, *fit.slopes]
    print(f"{'term':<10}{'estimate':>12}{'std_err':>12}{'p_value':>12}")
    for name, est, se, p in zip(names, estimates, fit.std_errors, fit.p_values):
        print(f"{name:<10}{est:>12.4f}{se:>12.4f}{p:>12.4g}")
    print(f"R2           {fit.r2:.4f}")
    print(f"RSS          {fit.rss:.6g}  df {fit.df_resid}")
    if fit.sigma2_company is not None:
        print(f"sigma2_mu    {fit.sigma2_company:.6g}")
        print(f"sigma2_eps   {fit.sigma2_noise:.6g}")


def _cmd_panel(args) -> int:
    dataset, drops = dataio.load_panel(args.input)
    print(f"rows         {drops.total_rows}  kept {drops.kept_rows}  "
          f"dropped {drops.total_dropped}")
    fit = panel_mod.fit(dataset, _MODEL_FLAGS[args.model])
    _print_panel_fit(fit)
    if args.select:
        report = panel_mod.select_model(dataset)
        f = report.f_fe
        lr = report.lr_fe
        h = report.hausman
        w = report.wooldridge
        print(f"F (effects)  {f.statistic:.4f}  df ({f.df1}, {f.df2})  p = {f.p_value:.4g}")
        print(f"LR (effects) {lr.statistic:.4f}  df {lr.df}  p = {lr.p_value:.4g}")
        flag = "  [positive-eigenspace adjusted]" if report.hausman_adjusted else ""
        print(f"Hausman      {h.statistic:.4f}  df {h.df}  p = {h.p_value:.4g}{flag}")
        print(f"Wooldridge   rho = {w.rho:.4f}  t = {w.t_statistic:.3f}  p = {w.p_value:.4g}")
    return 0


def _cmd_fundamentals(args) -> int:
    dataset, _ = dataio.load_panel(args.input)
    fit = panel_mod.fit(dataset, panel_mod.FE_TWOWAY)
    ln_fund = panel_mod.fundamentals(fit, dataset)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["company_id", "year", "ln_fundamentals"])
        for cid, year, value in zip(dataset.company_ids, dataset.years, ln_fund):
            writer.writerow([cid, int(year), f"{value:.17g}"])
    print(f"wrote {dataset.n_records} records to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    config = reedsim.ReedConfig(p=args.p, x0=args.x0, log_z_mean=args.mu,
                                log_z_sd=args.sigma, n_firms=args.firms, seed=args.seed)
    values = reedsim.simulate(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for v in values:
                fh.write(f"{v:.17g}\n")
        alpha, beta = reedsim.analytic_tail_exponent(config)
        print(f"wrote {args.firms} values to {args.out}  "
              f"(analytic tail exponents: upper {alpha:.4f}, lower {beta:.4f})")
    else:
        for v in values:
            sys.stdout.write(f"{v:.17g}\n")
    return 0


def _cmd_ccdf(args) -> int:
    values = dataio.read_values(args.input)
    dataio.export_ccdf(values, args.out)
    print(f"wrote CCDF of {values.size} observations to {args.out}")
    return 0


def _cmd_pipeline(args) -> int:
    config = pipeline.RunConfig.from_file(args.config)
    report = pipeline.run_pipeline(config)
    for name in pipeline.SERIES_NAMES:
        row = report["series"][name]
        print(f"{name:<13} alpha {row['alpha']:.4f}  x_min {row['x_min']:.4g}  "
              f"cvm_p {row['cvm_p']:.3f}  lmz {row['lmz']:.3f}  lr {row['lr']:.3f}  "
              f"n {row['tail_n']}")
    ks = report["two_sample_ks"]
    print(f"two-sample KS D {ks['statistic']:.5f}  p {ks['p_value']:.3f}")
    print(f"report written to {config.output_dir}")
    return 0


def _add_xmin_option(parser) -> None:
    parser.add_argument("--xmin-policy", default="frac:0.02",
                        help="fixed:<x> | frac:<f> | ks-scan (default frac:0.02)")


def build_parser() -> _Parser:
    parser = _Parser(prog="zipfkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit-tail", help="fit the tail exponent of a numeric vector")
    p.add_argument("input", help="text file, one value per line")
    _add_xmin_option(p)
    p.set_defaults(func=_cmd_fit_tail)

    p = sub.add_parser("gof", help="bootstrap goodness-of-fit test against a fitted Pareto")
    p.add_argument("input")
    _add_xmin_option(p)
    p.add_argument("--statistic", choices=("cvm", "ks"), default="cvm")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gof)

    p = sub.add_parser("zipf", help="test the unit-exponent hypothesis, or regenerate the LMZ table")
    p.add_argument("input", nargs="?")
    _add_xmin_option(p)
    p.add_argument("--table", action="store_true",
                   help="emit Monte Carlo LMZ critical values instead of testing data")
    p.add_argument("--sizes", type=_int_list, default=list(zipf_mod.URZUA_SIZES))
    p.add_argument("--levels", type=_float_list, default=[0.05, 0.10])
    p.add_argument("--replicates", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_zipf)

    p = sub.add_parser("panel", help="fit a panel model to the CSV schema")
    p.add_argument("input")
    p.add_argument("--model", choices=sorted(_MODEL_FLAGS), default="fe-2w")
    p.add_argument("--select", action="store_true", help="also run model selection tests")
    p.set_defaults(func=_cmd_panel)

    p = sub.add_parser("fundamentals", help="two-way FE fit, write per-record log fundamentals")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fundamentals)

    p = sub.add_parser("simulate", help="draw firm values from the multiplicative growth model")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mu", type=float, required=True, help="mean of the log factor")
    p.add_argument("--sigma", type=float, required=True, help="sd of the log factor")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--firms", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("ccdf", help="export the empirical CCDF of a numeric vector")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ccdf)

    p = sub.add_parser("pipeline", help="run the full analysis described by a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except ValueError as exc:
        print(f"zipfkit: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"zipfkit: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
