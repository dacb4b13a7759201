"""Strategy runners, KPIs, and parameter sweeps.

Four fleet strategies are compared on identical demand:

  proposed            rolling-horizon pooling, then task chaining
  encouraged_pooling  same, but opening a new vehicle costs an extra
                      penalty during pooling, which biases assignments
                      toward fuller routes
  chaining_only       one dedicated zero-delay task per request, fleet
                      reduction comes from chaining alone
  fixed_vehicles      a constant fleet serves what it can within the
                      delay bound; no chaining, unserved requests count
                      against the service rate

All KPI arithmetic is exact: counts and seconds are ints, ratios and
objectives are Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from ._util import as_fraction
from .chaining import FleetSolution, chain_tasks
from .demand import (TransactionRecord, compute_catchment_areas,
                     synthesize_requests)
from .errors import ConfigError
from .network import Network, TravelTimeOracle
from .pooling import (PoolingParams, PoolingResult, build_solo_tasks,
                      run_pooling)

__all__ = [
    "STRATEGIES",
    "KpiReport",
    "StrategyResult",
    "SweepRow",
    "run_strategy",
    "compute_kpis",
    "synthesize_demand",
    "redistribute_transactions",
    "run_sweep",
    "SWEEP_PARAMS",
]

STRATEGIES = ("proposed", "encouraged_pooling", "chaining_only",
              "fixed_vehicles")

SWEEP_PARAMS = ("alpha", "max_delay_s", "demand_share", "store_share")


@dataclass(frozen=True)
class KpiReport:
    strategy: str
    total_requests: int
    served_requests: int
    service_rate: Fraction
    fleet_size: int
    num_tasks: int
    total_drive_s: int
    pooling_drive_s: int
    relocation_drive_s: int
    total_delay_s: int
    mean_delay_s: Fraction
    pooling_effectiveness: Fraction
    objective: Fraction
    m_fix_s: int
    alpha: Fraction
    max_delay_s: int
    delay_histogram: tuple
    interval_s: int
    interval_rows: tuple


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    pooling: PoolingResult
    fleet: Optional[FleetSolution]
    kpis: KpiReport


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: str
    seed: int
    strategy: str
    kpis: KpiReport


def compute_kpis(strategy: str, pooling: PoolingResult,
                 fleet: Optional[FleetSolution], *, m_fix_s: int,
                 fixed_fleet: Optional[int] = None,
                 interval_s: int = 3600) -> KpiReport:
    """Aggregate one run into its report numbers.

    With a FleetSolution the fleet size and driven time come from the
    chained plans (relocation legs included). Without one (the fixed
    fleet strategy) the configured fleet is costed in full, idle
    vehicles included, and driven time is summed over tasks.
    """
    params = pooling.params
    alpha = params.alpha
    outcomes = pooling.outcomes
    total = len(outcomes)
    served = [o for o in outcomes if o.served]
    delay_total = sum(o.delay_s for o in served)
    pooling_drive = sum(t.drive_s for t in pooling.tasks)
    if fleet is not None:
        fleet_size = fleet.fleet_size
        drive = fleet.total_drive_s
        if fleet.total_delay_s != delay_total:
            raise ValueError("task delays disagree with request delays")
        if drive < pooling_drive:
            raise ValueError("chained driving below task driving")
    else:
        if fixed_fleet is None:
            raise ValueError("fixed_fleet required without a chained fleet")
        fleet_size = fixed_fleet
        drive = pooling_drive

    objective = (Fraction(m_fix_s * fleet_size)
                 + (1 - alpha) * delay_total + alpha * drive)
    n_tasks = len(pooling.tasks)
    bins = [0] * (params.max_delay_s // 10 + 1)
    for o in served:
        bins[o.delay_s // 10] += 1

    service_rate = Fraction(len(served), total) if total else Fraction(1)
    mean_delay = (Fraction(delay_total, len(served)) if served
                  else Fraction(0))
    effectiveness = (Fraction(len(served), n_tasks) if n_tasks
                     else Fraction(0))
    return KpiReport(
        strategy=strategy,
        total_requests=total,
        served_requests=len(served),
        service_rate=service_rate,
        fleet_size=fleet_size,
        num_tasks=n_tasks,
        total_drive_s=drive,
        pooling_drive_s=pooling_drive,
        relocation_drive_s=drive - pooling_drive,
        total_delay_s=delay_total,
        mean_delay_s=mean_delay,
        pooling_effectiveness=effectiveness,
        objective=objective,
        m_fix_s=m_fix_s,
        alpha=alpha,
        max_delay_s=params.max_delay_s,
        delay_histogram=tuple(bins),
        interval_s=interval_s,
        interval_rows=_interval_rows(pooling, interval_s),
    )


def _interval_rows(pooling: PoolingResult, interval_s: int) -> tuple:
    """Per-interval activity rows (interval, placed, tasks, delay_s).

    Requests bucket by placement time, tasks and their delay by task
    start. The range is contiguous from the first to the last non-empty
    interval so consecutive reports line up row for row.
    """
    placed = {}
    tasks = {}
    delays = {}
    for o in pooling.outcomes:
        k = o.placed_at // interval_s
        placed[k] = placed.get(k, 0) + 1
    for t in pooling.tasks:
        k = t.start_time // interval_s
        tasks[k] = tasks.get(k, 0) + 1
        delays[k] = delays.get(k, 0) + t.delay_s
    keys = set(placed) | set(tasks)
    if not keys:
        return ()
    return tuple((k, placed.get(k, 0), tasks.get(k, 0), delays.get(k, 0))
                 for k in range(min(keys), max(keys) + 1))


def run_strategy(network: Network, requests, strategy: str, *,
                 params: PoolingParams, m_fix_s: int = 2000,
                 encouraged_penalty_s: int = 1000,
                 fixed_fleet: int = 10, hierarchical: bool = True,
                 chain_interval_s: int = 3600,
                 oracle: Optional[TravelTimeOracle] = None
                 ) -> StrategyResult:
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}; expected one "
                          f"of {', '.join(STRATEGIES)}")
    if oracle is None:
        oracle = TravelTimeOracle(network)
    fleet = None
    fixed = None
    if strategy == "proposed":
        p = replace(params, new_vehicle_penalty_s=0)
        pooling = run_pooling(network, requests, p, oracle=oracle)
        fleet = chain_tasks(pooling.tasks, oracle, m_fix_s=m_fix_s,
                            alpha=p.alpha, hierarchical=hierarchical,
                            interval_s=chain_interval_s)
    elif strategy == "encouraged_pooling":
        p = replace(params, new_vehicle_penalty_s=encouraged_penalty_s)
        pooling = run_pooling(network, requests, p, oracle=oracle)
        fleet = chain_tasks(pooling.tasks, oracle, m_fix_s=m_fix_s,
                            alpha=p.alpha, hierarchical=hierarchical,
                            interval_s=chain_interval_s)
    elif strategy == "chaining_only":
        p = replace(params, new_vehicle_penalty_s=0)
        pooling = build_solo_tasks(network, requests, p, oracle=oracle)
        fleet = chain_tasks(pooling.tasks, oracle, m_fix_s=m_fix_s,
                            alpha=p.alpha, hierarchical=hierarchical,
                            interval_s=chain_interval_s)
    else:
        p = replace(params, new_vehicle_penalty_s=0)
        pooling = run_pooling(network, requests, p, oracle=oracle,
                              fixed_fleet=fixed_fleet)
        fixed = fixed_fleet
    kpis = compute_kpis(strategy, pooling, fleet, m_fix_s=m_fix_s,
                        fixed_fleet=fixed, interval_s=chain_interval_s)
    return StrategyResult(strategy, pooling, fleet, kpis)


def synthesize_demand(network: Network, transactions, share,
                      window_length_s: int, seed: int,
                      params: PoolingParams, *,
                      oracle: Optional[TravelTimeOracle] = None):
    """Transactions to concrete requests on this network's catchments."""
    if oracle is None:
        oracle = TravelTimeOracle(network)
    areas = compute_catchment_areas(oracle, network.stores)
    return synthesize_requests(
        transactions, areas, share, window_length_s, seed,
        oracle=oracle, t_load_s=params.t_load_s,
        t_deliver_s=params.t_deliver_s, max_delay_s=params.max_delay_s)


def redistribute_transactions(transactions, stores):
    """Spread each window's total transaction volume over a store set.

    Used when sweeping over store subsets: closing a store relocates
    its customers rather than deleting them, so window totals must stay
    constant. Shares are equal per store; leftover units go to the
    lexicographically first stores.
    """
    ordered = sorted(set(stores))
    if not ordered:
        raise ConfigError("store set must not be empty")
    totals = {}
    for rec in transactions:
        totals[rec.window] = totals.get(rec.window, 0) + rec.count
    out = []
    n = len(ordered)
    for window in sorted(totals):
        base, rem = divmod(totals[window], n)
        for i, store in enumerate(ordered):
            count = base + (1 if i < rem else 0)
            if count:
                out.append(TransactionRecord(store, window, count))
    return out


def run_sweep(network: Network, transactions, *, param: str, values,
              seeds, strategy: str, base_params: PoolingParams,
              demand_share, window_length_s: int, m_fix_s: int = 2000,
              encouraged_penalty_s: int = 1000, fixed_fleet: int = 10,
              hierarchical: bool = True, chain_interval_s: int = 3600
              ) -> tuple:
    """Run one strategy across a parameter range and several seeds.

    alpha and max_delay_s vary the engine parameters; demand_share
    scales request volume; store_share runs on nested prefixes of the
    store list (a store_share of 1/2 keeps the lexicographically first
    half, so larger values strictly add stores).
    """
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}; expected "
                          f"one of {', '.join(SWEEP_PARAMS)}")
    rows = []
    for value in values:
        for seed in seeds:
            net = network
            params = base_params
            share = demand_share
            txns = transactions
            if param == "alpha":
                params = replace(base_params, alpha=as_fraction(value))
            elif param == "max_delay_s":
                try:
                    params = replace(base_params, max_delay_s=int(value))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            elif param == "demand_share":
                share = as_fraction(value)
            else:
                frac = as_fraction(value)
                if not 0 < frac <= 1:
                    raise ConfigError("store_share must be in (0, 1]")
                count = max(1, int(frac * len(network.stores)))
                subset = network.stores[:count]
                net = network.with_stores(subset)
                txns = redistribute_transactions(transactions, subset)
            oracle = TravelTimeOracle(net)
            requests = synthesize_demand(net, txns, share,
                                         window_length_s, seed, params,
                                         oracle=oracle)
            result = run_strategy(
                net, requests, strategy, params=params, m_fix_s=m_fix_s,
                encouraged_penalty_s=encouraged_penalty_s,
                fixed_fleet=fixed_fleet, hierarchical=hierarchical,
                chain_interval_s=chain_interval_s, oracle=oracle)
            rows.append(SweepRow(param, _value_str(value), seed,
                                 strategy, result.kpis))
    return tuple(rows)


def _value_str(value) -> str:
    if isinstance(value, Fraction):
        return (str(value.numerator) if value.denominator == 1
                else f"{value.numerator}/{value.denominator}")
    return str(value)
