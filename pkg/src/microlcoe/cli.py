"""Command-line front end.

Subcommands
-----------
lcoe      cost one explicit design and print its breakdown
optimize  search the design box for the cheapest design (GA, optional SA check)
study     run an uncertainty study (``--mode all|occ|om|fuel|none``)
sweep     sensitivity sweep over efficiency, discount rate, or inflation
compare   rank the optimized microreactor against benchmark technologies

Every run writes a ``manifest.json`` with the seed, resolved configuration,
config hash and library versions, which is sufficient to reproduce the
outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical/optimization error.
"""

from __future__ import annotations

import argparse
import csv
import platform
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    StudyError,
    StudyReport,
    run_uncertainty_study,
    sensitivity_sweep,
    technology_comparison,
    write_comparison_csv,
    write_manifest,
    write_sensitivity_csv,
    write_study_csv,
    write_study_stats_csv,
)
from .config import ConfigError, StudyConfig, config_hash, load_config, resolved_dict
from .costs import ReactorDesign, lcoe_breakdown
from .optimize import EvaluationError, OptimizationResult, optimize_design
from .uncertainty import STUDY_MODES

_DESIGN_KEYS = {"p": "p_elec", "xp": "x_p", "xt": "x_t", "t": "t_refuel", "db": "db"}

_SWEEP_CLI_PARAMS = {
    "efficiency": "efficiency",
    "discount": "discount_rate",
    "inflation": "inflation",
}

_DEFAULT_SWEEP_VALUES = {
    "efficiency": (0.35, 0.40, 0.45, 0.50),
    "discount": (0.03, 0.05),
    "inflation": (0.002, 0.02),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microlcoe",
        description="Levelized-cost optimizer for a generic nuclear microreactor.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--seed", type=int, metavar="U64", help="root random seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--threads", type=int, metavar="N", help="worker process cap")
    common.add_argument(
        "--downtime", choices=("on", "off"),
        help="couple refueling downtime into the capacity factor",
    )
    common.add_argument(
        "--inflation-mode", choices=("real", "escalated"), dest="inflation_mode",
        help="discounting convention",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    lcoe = sub.add_parser("lcoe", parents=[common], help="cost one design")
    lcoe.add_argument(
        "--design", required=True, metavar="p=..,xp=..,xt=..,t=..,db=..",
        help="design point, e.g. p=19.13,xp=5,xt=0.2913,t=6.24,db=30",
    )

    opt = sub.add_parser("optimize", parents=[common], help="base-case design search")
    opt.add_argument(
        "--validate-sa", action="store_true", dest="validate_sa",
        help="also run simulated annealing and report the agreement",
    )

    study = sub.add_parser("study", parents=[common], help="uncertainty study")
    study.add_argument("--mode", required=True, choices=STUDY_MODES)
    study.add_argument("--n", type=int, default=100, help="number of scenarios")

    sweep = sub.add_parser("sweep", parents=[common], help="sensitivity sweep")
    sweep.add_argument("--param", required=True, choices=tuple(_SWEEP_CLI_PARAMS))
    sweep.add_argument(
        "--values", metavar="V1,V2,...", help="override the swept values"
    )
    sweep.add_argument(
        "--fixed-design", metavar="p=..,xp=..,...", dest="fixed_design",
        help="re-cost this fixed design instead of re-optimizing",
    )

    sub.add_parser("compare", parents=[common], help="benchmark ranking")

    return parser


def parse_design(text: str) -> ReactorDesign:
    """Parse ``p=..,xp=..,xt=..,t=..,db=..`` into a design point."""
    fields = {}
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ConfigError(f"design field '{chunk}' is not key=value")
        key, _, raw = chunk.partition("=")
        key = key.strip()
        if key not in _DESIGN_KEYS:
            raise ConfigError(f"unknown design key '{key}' (expected {sorted(_DESIGN_KEYS)})")
        try:
            fields[_DESIGN_KEYS[key]] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"design value for '{key}' is not a number: {raw!r}") from exc
    missing = sorted(set(_DESIGN_KEYS.values()) - set(fields))
    if missing:
        raise ConfigError(f"design is missing {missing}")
    try:
        return ReactorDesign(**fields)
    except ValueError as exc:
        raise ConfigError(f"design: {exc}") from exc


def _apply_overrides(config: StudyConfig, args: argparse.Namespace) -> StudyConfig:
    fin = config.fin
    if args.downtime is not None:
        fin = replace(fin, downtime_model=(args.downtime == "on"))
    if args.inflation_mode is not None:
        fin = replace(fin, inflation_mode=args.inflation_mode)
    updates = {"fin": fin}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["output_dir"] = args.out
    if args.threads is not None:
        updates["threads"] = args.threads
    return replace(config, **updates)


def _manifest(config: StudyConfig, command: str, argv, outputs) -> dict:
    return {
        "tool": "microlcoe",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "seed": config.seed,
        "threads": config.threads,
        "config_sha256": config_hash(config),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "outputs": sorted(outputs),
        "config": resolved_dict(config),
    }


def _finish(config: StudyConfig, command: str, argv, outputs: list) -> None:
    out_dir = Path(config.output_dir)
    write_manifest(out_dir / "manifest.json", _manifest(config, command, argv, outputs))


def _print_breakdown(breakdown) -> None:
    print(f"  capital          {breakdown.capital:12.2f} $/MWh")
    print(f"  o&m              {breakdown.om:12.2f} $/MWh")
    print(f"  fuel             {breakdown.fuel:12.2f} $/MWh")
    print(f"  spent fuel       {breakdown.spent:12.2f} $/MWh")
    print(f"  decommissioning  {breakdown.decommissioning:12.2f} $/MWh")
    print(f"  ptc credit       {-breakdown.ptc_credit:12.2f} $/MWh")
    print(f"  total            {breakdown.total:12.2f} $/MWh")
    print(f"  (before credit)  {breakdown.total_before_credit:12.2f} $/MWh")
    print(f"  annual energy    {breakdown.annual_energy:12.0f} MWh/yr")


def _design_str(design: ReactorDesign) -> str:
    return (
        f"p_elec={design.p_elec:.3f} MW_e, x_p={design.x_p:.4f} wt%, "
        f"x_t={design.x_t:.4f} wt%, t_refuel={design.t_refuel:.3f} yr, "
        f"db={design.db:.3f} MWd/kgU"
    )


def _write_optimize_csv(path, rows: list[tuple[str, OptimizationResult]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "method", "lcoe", "penalized_objective", "penalty_value",
                "burnup_residual", "p_elec", "x_p", "x_t", "t_refuel", "db",
                "capital", "om", "fuel", "spent", "decommissioning", "ptc_credit",
                "annual_energy", "evaluations", "restart_bests",
            ]
        )
        for method, res in rows:
            d, bd = res.best_design, res.breakdown
            writer.writerow(
                [
                    method, repr(res.lcoe), repr(res.objective), repr(res.penalty_value),
                    repr(res.burnup_residual),
                    repr(float(d.p_elec)), repr(float(d.x_p)), repr(float(d.x_t)),
                    repr(float(d.t_refuel)), repr(float(d.db)),
                    repr(float(bd.capital)), repr(float(bd.om)), repr(float(bd.fuel)),
                    repr(float(bd.spent)), repr(float(bd.decommissioning)),
                    repr(float(bd.ptc_credit)), repr(float(bd.annual_energy)),
                    str(res.evaluations),
                    ";".join(repr(b) for b in res.restart_bests),
                ]
            )


def _cmd_lcoe(config: StudyConfig, args, argv) -> int:
    design = parse_design(args.design)
    breakdown = lcoe_breakdown(design, config.costs, config.fin)
    print(f"design: {_design_str(design)}")
    _print_breakdown(breakdown)
    _finish(config, "lcoe", argv, [])
    return 0


def _cmd_optimize(config: StudyConfig, args, argv) -> int:
    result = optimize_design(
        config.costs, config.fin, method="ga", ga_config=config.ga,
        penalty_weight=config.penalty_weight, seed=config.seed,
    )
    rows = [("ga", result)]
    print(f"best design ({config.ga.restarts} GA restarts, seed {config.seed}):")
    print(f"  {_design_str(result.best_design)}")
    print(f"  lcoe {result.lcoe:.2f} $/MWh, burnup residual {result.burnup_residual:.3f} MWd/kgU, "
          f"penalty {result.penalty_value:.3f}")
    _print_breakdown(result.breakdown)
    if args.validate_sa:
        sa_result = optimize_design(
            config.costs, config.fin, method="sa", sa_config=config.sa,
            penalty_weight=config.penalty_weight, seed=config.seed,
        )
        rows.append(("sa", sa_result))
        gap = abs(result.objective - sa_result.objective) / result.objective
        print(f"sa check: lcoe {sa_result.lcoe:.2f} $/MWh "
              f"({_design_str(sa_result.best_design)}), relative gap {gap:.4%}")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_optimize_csv(out_dir / "optimize.csv", rows)
    _finish(config, "optimize", argv, ["optimize.csv"])
    return 0


def _print_stats(report: StudyReport) -> None:
    print(f"{'variable':<12}{'max':>10}{'min':>10}{'sd':>10}{'q1':>10}{'median':>10}{'q3':>10}")
    for name, stats in report.stats.items():
        print(
            f"{name:<12}{stats.max:>10.2f}{stats.min:>10.2f}{stats.sd:>10.2f}"
            f"{stats.q1:>10.2f}{stats.median:>10.2f}{stats.q3:>10.2f}"
        )
    low, high = report.ptc_reduction_range
    print(f"ptc reduction across scenarios: {low:.2%} to {high:.2%}")


def _cmd_study(config: StudyConfig, args, argv) -> int:
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    report = run_uncertainty_study(
        args.mode, n=args.n, seed=config.seed,
        params=config.uncertain, base_costs=config.costs, fin=config.fin,
        ga_config=config.ga, penalty_weight=config.penalty_weight,
        threads=config.threads,
    )
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    param_names = [p.name for p in config.uncertain]
    scenario_csv = f"study_{args.mode}.csv"
    stats_csv = f"study_{args.mode}_stats.csv"
    write_study_csv(report, out_dir / scenario_csv, param_names)
    outputs = [scenario_csv]
    print(f"study mode={args.mode}, n={args.n}, seed={config.seed}")
    if report.stats:
        write_study_stats_csv(report, out_dir / stats_csv)
        outputs.append(stats_csv)
        _print_stats(report)
    _finish(config, "study", argv, outputs)
    return 0


def _cmd_sweep(config: StudyConfig, args, argv) -> int:
    if args.values is not None:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"--values must be comma-separated numbers: {exc}") from exc
        if not values:
            raise ConfigError("--values is empty")
    else:
        values = list(_DEFAULT_SWEEP_VALUES[args.param])
    fixed = parse_design(args.fixed_design) if args.fixed_design else None
    rows = sensitivity_sweep(
        _SWEEP_CLI_PARAMS[args.param], values,
        costs=config.costs, fin=config.fin, ga_config=config.ga,
        penalty_weight=config.penalty_weight, seed=config.seed,
        reoptimize=fixed is None, design=fixed,
    )
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f"sensitivity_{args.param}.csv"
    write_sensitivity_csv(rows, out_dir / name)
    print(f"{'value':>10}{'lcoe':>12}")
    for row in rows:
        print(f"{row.value:>10.4g}{row.breakdown.total:>12.2f}")
    _finish(config, "sweep", argv, [name])
    return 0


def _cmd_compare(config: StudyConfig, args, argv) -> int:
    result = optimize_design(
        config.costs, config.fin, method="ga", ga_config=config.ga,
        penalty_weight=config.penalty_weight, seed=config.seed,
    )
    ranking = technology_comparison(result.lcoe, config.benchmarks)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(ranking, out_dir / "compare.csv")
    print(f"{'rank':<6}{'technology':<24}{'lcoe':>10}{'delta':>10}")
    for rank, (name, value, delta) in enumerate(ranking, start=1):
        print(f"{rank:<6}{name:<24}{value:>10.2f}{delta:>+10.2f}")
    _finish(config, "compare", argv, ["compare.csv"])
    return 0


_COMMANDS = {
    "lcoe": _cmd_lcoe,
    "optimize": _cmd_optimize,
    "study": _cmd_study,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](config, args, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StudyError as exc:
        print(f"optimization error: {exc}", file=sys.stderr)
        return 3
    except (EvaluationError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
