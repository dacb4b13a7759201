"""Command line interface.

Subcommands:

  gen      materialize a scenario (network, transactions, requests)
  run      run one strategy end to end and write its reports
  compare  run all strategies on identical demand
  sweep    rerun one strategy across a parameter range and seeds

Exit codes follow the error hierarchy: 0 success, 2 bad configuration
or input data, 3 solver failure, 4 file system trouble. All report
files are deterministic; run.log is the only artifact that may differ
between runs (it records wall-clock timing).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .config import load_config, parse_overrides
from .demand import requests_to_csv_lines, transactions_to_csv_lines
from .errors import ConfigError, FlashFleetError, ParseError, \
    SolverError, ValidationError
from .experiments import (STRATEGIES, SWEEP_PARAMS, run_strategy,
                          run_sweep, synthesize_demand)
from .gridgen import (build_transactions, choose_store_vertices,
                      grid_edge_lines)
from .network import TravelTimeOracle, load_network
from .reports import (intervals_csv_lines, kpi_mapping,
                      outcomes_csv_lines, plans_csv_lines, render_json,
                      sweep_csv_lines, tasks_csv_lines)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(sub):
    sub.add_argument("--out", required=True,
                     help="output directory (created if missing)")
    sub.add_argument("--config", default=None,
                     help="JSON config file")
    sub.add_argument("--set", dest="overrides", action="append",
                     default=[], metavar="KEY=VALUE",
                     help="override one config key (repeatable)")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flashfleet",
                     description="fleet sizing for flash delivery")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="write scenario input files")
    _add_common(gen)

    run = subs.add_parser("run", help="run one strategy")
    _add_common(run)
    run.add_argument("--strategy", choices=STRATEGIES, default=None,
                     help="strategy (defaults to the config value)")

    cmp_ = subs.add_parser("compare", help="run every strategy")
    _add_common(cmp_)

    sweep = subs.add_parser("sweep", help="parameter sensitivity runs")
    _add_common(sweep)
    sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sweep.add_argument("--values", required=True,
                       help="comma separated parameter values")
    sweep.add_argument("--seeds", default=None,
                       help="comma separated seeds (default: config seed)")
    sweep.add_argument("--strategy", choices=STRATEGIES, default=None)
    return parser


def _load(args):
    overrides = parse_overrides(args.overrides)
    cfg = load_config(args.config, overrides)
    if args.seed is not None:
        cfg = cfg.with_overrides([("seed", str(args.seed))])
    strategy = getattr(args, "strategy", None)
    if strategy:
        cfg = cfg.with_overrides([("strategy", strategy)])
    return cfg


def _build_scenario(cfg):
    edges = grid_edge_lines(cfg.grid_width, cfg.grid_height,
                            cfg.edge_base_time_s)
    stores = choose_store_vertices(cfg.grid_width, cfg.grid_height,
                                   cfg.num_stores)
    network = load_network(edges, stores)
    oracle = TravelTimeOracle(network)
    transactions = build_transactions(network.stores,
                                      cfg.horizon_windows,
                                      cfg.demand_level)
    requests = synthesize_demand(network, transactions,
                                 cfg.demand_share, cfg.window_length_s,
                                 cfg.seed, cfg.engine_params(),
                                 oracle=oracle)
    return network, oracle, transactions, requests


def _write(out_dir: str, name: str, lines) -> None:
    with open(os.path.join(out_dir, name), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_text(out_dir: str, name: str, text: str) -> None:
    with open(os.path.join(out_dir, name), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(text)


def _run_one(cfg, network, oracle, requests, strategy: str):
    return run_strategy(
        network, requests, strategy, params=cfg.engine_params(),
        m_fix_s=cfg.m_fix_s,
        encouraged_penalty_s=cfg.encouraged_penalty_s,
        fixed_fleet=cfg.fixed_fleet, hierarchical=cfg.hierarchical,
        chain_interval_s=cfg.chain_interval_s, oracle=oracle)


def _kpi_line(k) -> str:
    return (f"fleet={k.fleet_size} tasks={k.num_tasks} "
            f"served={k.served_requests}/{k.total_requests} "
            f"drive_s={k.total_drive_s} delay_s={k.total_delay_s} "
            f"objective={k.objective}")


def _cmd_gen(cfg, out_dir: str, log):
    network, _, transactions, requests = _build_scenario(cfg)
    h = cfg.config_hash()
    tag = f"config_hash={h}"
    _write(out_dir, "edges.txt", grid_edge_lines(
        cfg.grid_width, cfg.grid_height, cfg.edge_base_time_s))
    _write(out_dir, "stores.txt", list(network.stores))
    _write(out_dir, "transactions.csv",
           transactions_to_csv_lines(transactions, comments=[tag]))
    _write(out_dir, "requests.csv",
           requests_to_csv_lines(requests, comments=[tag]))
    _write_text(out_dir, "scenario.json", render_json({
        "command": "gen",
        "config": cfg.to_mapping(),
        "config_hash": h,
        "num_vertices": network.num_vertices,
        "num_stores": len(network.stores),
        "num_transactions": len(transactions),
        "num_requests": len(requests),
    }))
    log.append(f"gen wrote {len(requests)} requests for "
               f"{len(network.stores)} stores")
    return 0


def _cmd_run(cfg, out_dir: str, log):
    network, oracle, _, requests = _build_scenario(cfg)
    result = _run_one(cfg, network, oracle, requests, cfg.strategy)
    h = cfg.config_hash()
    _write(out_dir, "tasks.csv",
           tasks_csv_lines(result.pooling.tasks, h))
    _write(out_dir, "outcomes.csv",
           outcomes_csv_lines(result.pooling.outcomes, h))
    if result.fleet is not None:
        _write(out_dir, "plans.csv", plans_csv_lines(result.fleet, h))
    _write(out_dir, "intervals.csv",
           intervals_csv_lines(result.kpis, h))
    _write_text(out_dir, "report.json", render_json({
        "command": "run",
        "config": cfg.to_mapping(),
        "config_hash": h,
        "kpis": kpi_mapping(result.kpis),
    }))
    log.append(f"{cfg.strategy}: {_kpi_line(result.kpis)}")
    return 0


def _cmd_compare(cfg, out_dir: str, log):
    network, oracle, _, requests = _build_scenario(cfg)
    h = cfg.config_hash()
    kpis = {}
    for strategy in STRATEGIES:
        result = _run_one(cfg, network, oracle, requests, strategy)
        _write(out_dir, f"tasks_{strategy}.csv",
               tasks_csv_lines(result.pooling.tasks, h))
        _write(out_dir, f"outcomes_{strategy}.csv",
               outcomes_csv_lines(result.pooling.outcomes, h))
        if result.fleet is not None:
            _write(out_dir, f"plans_{strategy}.csv",
                   plans_csv_lines(result.fleet, h))
        kpis[strategy] = kpi_mapping(result.kpis)
        log.append(f"{strategy}: {_kpi_line(result.kpis)}")
    _write_text(out_dir, "report.json", render_json({
        "command": "compare",
        "config": cfg.to_mapping(),
        "config_hash": h,
        "kpis": kpis,
    }))
    return 0


def _cmd_sweep(cfg, args, out_dir: str, log):
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must name at least one value")
    if args.seeds is None:
        seeds = [cfg.seed]
    else:
        try:
            seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        except ValueError:
            raise ConfigError("--seeds must be comma separated "
                              "integers") from None
        if not seeds:
            raise ConfigError("--seeds must name at least one seed")
    strategy = args.strategy or cfg.strategy
    network, _, transactions, _ = _build_scenario(cfg)
    rows = run_sweep(
        network, transactions, param=args.param, values=values,
        seeds=seeds, strategy=strategy,
        base_params=cfg.engine_params(), demand_share=cfg.demand_share,
        window_length_s=cfg.window_length_s, m_fix_s=cfg.m_fix_s,
        encouraged_penalty_s=cfg.encouraged_penalty_s,
        fixed_fleet=cfg.fixed_fleet, hierarchical=cfg.hierarchical,
        chain_interval_s=cfg.chain_interval_s)
    h = cfg.config_hash()
    _write(out_dir, "sweep.csv", sweep_csv_lines(rows, h))
    _write_text(out_dir, "report.json", render_json({
        "command": "sweep",
        "config": cfg.to_mapping(),
        "config_hash": h,
        "param": args.param,
        "values": values,
        "seeds": seeds,
        "strategy": strategy,
        "rows": [{
            "param": r.param,
            "value": r.value,
            "seed": r.seed,
            "strategy": r.strategy,
            "kpis": kpi_mapping(r.kpis),
        } for r in rows],
    }))
    log.append(f"sweep {args.param} over {len(values)} values x "
               f"{len(seeds)} seeds: {len(rows)} rows")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    started = time.monotonic()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help and friends
            return int(exc.code or 0)
        cfg = _load(args)
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        log = [f"flashfleet {args.command}",
               f"config_hash {cfg.config_hash()}"]
        if args.command == "gen":
            code = _cmd_gen(cfg, out_dir, log)
        elif args.command == "run":
            code = _cmd_run(cfg, out_dir, log)
        elif args.command == "compare":
            code = _cmd_compare(cfg, out_dir, log)
        else:
            code = _cmd_sweep(cfg, args, out_dir, log)
        log.append(f"elapsed_s {time.monotonic() - started:.3f}")
        _write(out_dir, "run.log", log)
        return code
    except (ParseError, ValidationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except FlashFleetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
