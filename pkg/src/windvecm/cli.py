"""Command-line surface: fit models, run grid backtests, evaluate combinations.

Every command reads its panel either from delimited data files (``--data``)
or from a simulation spec in JSON form (``--sim``), never both. All outputs
are deterministic given the inputs and the seed: rerunning a command
overwrites its outputs byte-identically.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .backtest import (
    BacktestConfig,
    BacktestGridResult,
    run_combination,
    run_grid,
    sample_origins,
    summarize_best,
)
from .errors import DegenerateVarianceError, InvalidInputError, WindVecmError
from .ingest import IngestOptions, load_panel
from .metrics import dm_test
from .model_io import write_model
from .panel import DeterministicSpec, TimeSeriesPanel
from .simulate import generate, spec_from_json
from .var import fit_var
from .vecm import fit_vecm


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pair(text: str) -> tuple[int, int]:
    parts = _int_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'p,r', got {text!r}")
    return parts[0], parts[1]


def _add_source_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", nargs="+", metavar="FILE",
                        help="delimited data files (long or wide form)")
    source.add_argument("--sim", metavar="SPEC.json",
                        help="simulation spec (JSON) to generate data from")
    parser.add_argument("--expected-regions", type=int, default=None,
                        help="fail unless the data has exactly this many regions")
    parser.add_argument("--max-gap", type=int, default=8,
                        help="longest gap (in grid slots) filled by interpolation")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--det", choices=["none", "constant"], default="constant",
                        help="deterministic term (default: constant)")
    parser.add_argument("--seed", type=int, default=0)


def _load_source(args) -> TimeSeriesPanel:
    if args.sim is not None:
        spec = spec_from_json(Path(args.sim).read_text(encoding="utf-8"))
        return generate(spec)
    options = IngestOptions(
        max_gap_slots=args.max_gap, expected_regions=args.expected_regions
    )
    panel, report = load_panel(args.data, options)
    print(
        f"loaded {panel.n_obs} x {panel.d} panel "
        f"({', '.join(report.regions_found)}); "
        f"gaps filled {report.gaps_filled}, duplicates {report.duplicates_resolved}, "
        f"rows dropped {report.rows_dropped}"
    )
    return panel


def _format_float(x: float) -> str:
    return f"{x:.17g}"


def cmd_fit(args) -> int:
    panel = _load_source(args)
    det = DeterministicSpec(args.det)
    if args.rank is None:
        model = fit_var(panel, args.p, det)
        print(f"fitted VAR(p={args.p}) on {panel.n_obs} x {panel.d} panel")
    else:
        model = fit_vecm(panel, args.p, args.rank, det)
        print(f"fitted VECM(p={args.p}, r={args.rank}) on {panel.n_obs} x {panel.d} panel")
        if model.eigenvalues is not None:
            print("eigenvalues: " + " ".join(f"{v:.6f}" for v in model.eigenvalues))
    diag = np.diag(model.resid_cov)
    print("residual variance by series: " + " ".join(f"{v:.6g}" for v in diag))
    write_model(model, args.out)
    print(f"model written to {args.out}")
    return 0


def _grid_lines(result: BacktestGridResult) -> list[str]:
    lines = ["T,p,r,n_ok,n_failed,mae,mse"]
    for rec in result.records:
        mae_s = _format_float(rec.mae) if rec.mae is not None else ""
        mse_s = _format_float(rec.mse) if rec.mse is not None else ""
        lines.append(f"{rec.T},{rec.p},{rec.r},{rec.n_ok},{rec.n_failed},{mae_s},{mse_s}")
    return lines


def _grid_long_lines(result: BacktestGridResult, metrics_out: list[str]) -> list[str]:
    lines = ["T,p,r,metric,value"]
    for rec in result.records:
        for name in metrics_out:
            value = getattr(rec, name)
            if value is not None:
                lines.append(f"{rec.T},{rec.p},{rec.r},{name},{_format_float(value)}")
    return lines


def _summary_table(result: BacktestGridResult, metric: str) -> str:
    rows = summarize_best(result, metric)
    headers = ["T/96 (=length in days)"] + [f"{r.T / 96:g}" for r in rows]
    body = [
        ["Best p"] + [str(r.best_p) if r.best_p is not None else "--" for r in rows],
        ["Best r"] + [str(r.best_r) if r.best_r is not None else "--" for r in rows],
        ["Improvement to best VAR on ΔY_t"]
        + [
            f"{r.improvement_vs_diff_var:.2f}"
            if r.improvement_vs_diff_var is not None else "--"
            for r in rows
        ],
        ["Improvement to best VAR on Y_t"]
        + [
            f"{r.improvement_vs_levels_var:.2f}"
            if r.improvement_vs_levels_var is not None else "--"
            for r in rows
        ],
    ]
    label_width = max(len(line[0]) for line in [headers] + body)
    col_width = max(5, max(len(cell) for line in [headers] + body for cell in line[1:]))
    out = [f"{metric.upper()} summary"]
    out.append(
        headers[0].ljust(label_width)
        + "".join(cell.rjust(col_width + 2) for cell in headers[1:])
    )
    for line in body:
        out.append(
            line[0].ljust(label_width)
            + "".join(cell.rjust(col_width + 2) for cell in line[1:])
        )
    failed = [r for r in rows if r.note]
    for r in failed:
        out.append(f"  note: T={r.T}: {r.note}")
    return "\n".join(out)


def _summary_csv_lines(result: BacktestGridResult, metric: str) -> list[str]:
    rows = summarize_best(result, metric)
    lines = ["T,best_p,best_r,best_loss,improvement_vs_diff_var,improvement_vs_levels_var,note"]
    for r in rows:
        cells = [
            str(r.T),
            str(r.best_p) if r.best_p is not None else "",
            str(r.best_r) if r.best_r is not None else "",
            _format_float(r.best_loss) if r.best_loss is not None else "",
            _format_float(r.improvement_vs_diff_var)
            if r.improvement_vs_diff_var is not None else "",
            _format_float(r.improvement_vs_levels_var)
            if r.improvement_vs_levels_var is not None else "",
            r.note,
        ]
        lines.append(",".join(cells))
    return lines


def cmd_backtest(args) -> int:
    panel = _load_source(args)
    config = BacktestConfig(
        T_grid=args.window,
        p_grid=args.p,
        r_grid=args.rank,
        horizon=args.horizon,
        n_origins=args.origins,
        seed=args.seed,
        det=DeterministicSpec(args.det),
        clip_nonnegative=args.clip0,
    )
    result = run_grid(panel, config, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_out = ["mae", "mse"] if args.metric == "both" else [args.metric]

    (out_dir / "grid.csv").write_text("\n".join(_grid_lines(result)) + "\n")
    (out_dir / "grid_long.csv").write_text(
        "\n".join(_grid_long_lines(result, metrics_out)) + "\n"
    )
    (out_dir / "origins.csv").write_text(
        "origin\n" + "\n".join(str(int(o)) for o in result.origins) + "\n"
    )
    meta_lines = [f"{k},{v}" for k, v in sorted(result.metadata.items())]
    (out_dir / "metadata.csv").write_text("key,value\n" + "\n".join(meta_lines) + "\n")

    n_failed_total = sum(rec.n_failed for rec in result.records)
    for metric in metrics_out:
        table = _summary_table(result, metric)
        (out_dir / f"summary_{metric}.txt").write_text(table + "\n")
        (out_dir / f"summary_{metric}.csv").write_text(
            "\n".join(_summary_csv_lines(result, metric)) + "\n"
        )
        print(table)
        print()
    print(
        f"evaluated {len(result.records)} cells on {result.origins.size} origins "
        f"({n_failed_total} cell-origin failures); files in {out_dir}"
    )
    return 0


def _dm_line(name: str, loss_a, loss_b, kind: str) -> str:
    try:
        res = dm_test(loss_a, loss_b, loss_kind=kind)
        return (
            f"DM {name} ({kind}): statistic {res.statistic:+.4f}, "
            f"p-value {res.p_value:.4g} (n={res.n_effective})"
        )
    except DegenerateVarianceError:
        return f"DM {name} ({kind}): degenerate variance (identical forecasters)"
    except InvalidInputError as exc:
        return f"DM {name} ({kind}): not computed ({exc})"


def cmd_combine(args) -> int:
    panel = _load_source(args)
    det = DeterministicSpec(args.det)
    origins = sample_origins(panel.n_obs, args.window, args.horizon,
                             args.origins, args.seed)
    result = run_combination(
        panel, args.window, args.model_a, args.model_b, origins,
        args.horizon, det=det, clip_nonnegative=args.clip0,
    )
    p_a, r_a = args.model_a
    p_b, r_b = args.model_b
    lines = [
        f"combination study: T={args.window}, H={args.horizon}, "
        f"{result.origins_ok.size} origins ({result.n_failed} failed)",
        f"model A (p={p_a}, r={r_a}):  MAE {result.mae_a:.6g}  MSE {result.mse_a:.6g}",
        f"model B (p={p_b}, r={r_b}):  MAE {result.mae_b:.6g}  MSE {result.mse_b:.6g}",
        f"equal-weight combination: MAE {result.mae_combined:.6g}  "
        f"MSE {result.mse_combined:.6g}",
        f"MAE change vs A: {(result.mae_combined / result.mae_a - 1.0) * 100:+.2f}%  "
        f"vs B: {(result.mae_combined / result.mae_b - 1.0) * 100:+.2f}%",
    ]
    kinds = (
        ["absolute", "squared"] if args.metric == "both"
        else ["absolute" if args.metric == "mae" else "squared"]
    )
    for kind in kinds:
        losses = result.abs_losses if kind == "absolute" else result.sq_losses
        lines.append(_dm_line("combined vs A", losses["combined"], losses["a"], kind))
        lines.append(_dm_line("combined vs B", losses["combined"], losses["b"], kind))
    report = "\n".join(lines)
    print(report)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "combine.txt").write_text(report + "\n")
        header = "model,mae,mse"
        rows = [
            f"a,{_format_float(result.mae_a)},{_format_float(result.mse_a)}",
            f"b,{_format_float(result.mae_b)},{_format_float(result.mse_b)}",
            f"combined,{_format_float(result.mae_combined)},{_format_float(result.mse_combined)}",
        ]
        (out_dir / "combine.csv").write_text(header + "\n" + "\n".join(rows) + "\n")
        print(f"files in {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="windvecm",
        description="Cointegrated VAR forecasting and rolling backtests "
                    "for multivariate power time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one model and write a model file")
    _add_source_args(fit)
    _add_common_args(fit)
    fit.add_argument("--p", type=int, required=True, help="autoregressive order")
    fit.add_argument("--rank", type=int, default=None,
                     help="cointegrating rank; omit to fit a plain VAR")
    fit.add_argument("--out", required=True, help="model file to write")
    fit.set_defaults(func=cmd_fit)

    bt = sub.add_parser("backtest", help="rolling-origin study over a (T, p, r) grid")
    _add_source_args(bt)
    _add_common_args(bt)
    bt.add_argument("--window", type=_int_list, default=BacktestConfig.T_grid,
                    help="comma-separated calibration lengths (default "
                         "96,192,384,768,1536,3072)")
    bt.add_argument("--p", type=_int_list, default=BacktestConfig.p_grid,
                    help="comma-separated orders (default 1..7)")
    bt.add_argument("--rank", type=_int_list, default=None,
                    help="comma-separated ranks (default 0..d)")
    bt.add_argument("--horizon", type=int, default=8)
    bt.add_argument("--origins", type=int, default=1000,
                    help="number of sampled forecast origins")
    bt.add_argument("--clip0", action="store_true",
                    help="floor forecasts at 0 MW")
    bt.add_argument("--metric", choices=["mae", "mse", "both"], default="both")
    bt.add_argument("--workers", type=int, default=None,
                    help="parallel cell workers (default $WINDVECM_WORKERS or 1)")
    bt.add_argument("--out", required=True, help="output directory")
    bt.set_defaults(func=cmd_backtest)

    comb = sub.add_parser("combine",
                          help="evaluate two models and their equal-weight mean")
    _add_source_args(comb)
    _add_common_args(comb)
    comb.add_argument("--model-a", type=_pair, required=True, metavar="P,R")
    comb.add_argument("--model-b", type=_pair, required=True, metavar="P,R")
    comb.add_argument("--window", type=int, required=True,
                      help="calibration length T")
    comb.add_argument("--horizon", type=int, default=8)
    comb.add_argument("--origins", type=int, default=1000)
    comb.add_argument("--clip0", action="store_true")
    comb.add_argument("--metric", choices=["mae", "mse", "both"], default="both")
    comb.add_argument("--out", default=None, help="optional output directory")
    comb.set_defaults(func=cmd_combine)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WindVecmError as exc:
        print(f"windvecm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
