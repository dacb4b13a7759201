"""Deterministic CSV and JSON serialization of run results.

Every artifact starts with (or contains) the config hash so outputs
from different configurations never get compared by accident. All
numbers are ints or exact fraction strings; floats appear only as
rounded convenience values next to their exact forms.
"""

from __future__ import annotations

import json
from fractions import Fraction

__all__ = [
    "fraction_str",
    "tasks_csv_lines",
    "outcomes_csv_lines",
    "plans_csv_lines",
    "intervals_csv_lines",
    "sweep_csv_lines",
    "kpi_mapping",
    "render_json",
]


def fraction_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _approx(value: Fraction) -> float:
    return round(float(value), 6)


def tasks_csv_lines(tasks, config_hash: str):
    lines = [f"# config_hash={config_hash}"]
    lines.append("id,vehicle,start_vertex,start_time,end_vertex,"
                 "end_time,drive_s,delay_s,num_stops,num_via,serves")
    for t in tasks:
        serves = ";".join(str(r) for r in t.serves)
        lines.append(
            f"{t.id},{t.vehicle},{t.start_vertex},{t.start_time},"
            f"{t.end_vertex},{t.end_time},{t.drive_s},{t.delay_s},"
            f"{len(t.stops)},{len(t.via)},{serves}")
    return lines


def outcomes_csv_lines(outcomes, config_hash: str):
    lines = [f"# config_hash={config_hash}"]
    lines.append("request,placed_at,served,vehicle,task,delivered_at,"
                 "delay_s")
    for o in outcomes:
        if o.served:
            lines.append(f"{o.request},{o.placed_at},1,{o.vehicle},"
                         f"{o.task},{o.delivered_at},{o.delay_s}")
        else:
            lines.append(f"{o.request},{o.placed_at},0,,,,")
    return lines


def plans_csv_lines(fleet, config_hash: str):
    lines = [f"# config_hash={config_hash}"]
    lines.append("id,start_vertex,start_time,end_vertex,end_time,"
                 "num_tasks,drive_s,delay_s,num_requests,tasks")
    for p in fleet.plans:
        tasks = ";".join(str(tid) for tid in p.tasks)
        lines.append(
            f"{p.id},{p.start_vertex},{p.start_time},{p.end_vertex},"
            f"{p.end_time},{len(p.tasks)},{p.drive_s},{p.delay_s},"
            f"{len(p.serves)},{tasks}")
    return lines


def intervals_csv_lines(kpis, config_hash: str):
    lines = [f"# config_hash={config_hash}"]
    lines.append("interval,requests_placed,tasks_started,delay_s")
    for interval, placed, tasks, delay in kpis.interval_rows:
        lines.append(f"{interval},{placed},{tasks},{delay}")
    return lines


def sweep_csv_lines(rows, config_hash: str):
    lines = [f"# config_hash={config_hash}"]
    lines.append("param,value,seed,strategy,fleet_size,num_tasks,"
                 "served_requests,total_requests,service_rate,"
                 "total_drive_s,total_delay_s,mean_delay_s,"
                 "pooling_effectiveness,objective")
    for row in rows:
        k = row.kpis
        lines.append(
            f"{row.param},{row.value},{row.seed},{row.strategy},"
            f"{k.fleet_size},{k.num_tasks},{k.served_requests},"
            f"{k.total_requests},{fraction_str(k.service_rate)},"
            f"{k.total_drive_s},{k.total_delay_s},"
            f"{fraction_str(k.mean_delay_s)},"
            f"{fraction_str(k.pooling_effectiveness)},"
            f"{fraction_str(k.objective)}")
    return lines


def kpi_mapping(kpis) -> dict:
    """JSON-safe view of a KpiReport with exact and rounded ratios."""
    return {
        "strategy": kpis.strategy,
        "total_requests": kpis.total_requests,
        "served_requests": kpis.served_requests,
        "service_rate": fraction_str(kpis.service_rate),
        "service_rate_approx": _approx(kpis.service_rate),
        "fleet_size": kpis.fleet_size,
        "num_tasks": kpis.num_tasks,
        "total_drive_s": kpis.total_drive_s,
        "pooling_drive_s": kpis.pooling_drive_s,
        "relocation_drive_s": kpis.relocation_drive_s,
        "total_delay_s": kpis.total_delay_s,
        "mean_delay_s": fraction_str(kpis.mean_delay_s),
        "mean_delay_s_approx": _approx(kpis.mean_delay_s),
        "pooling_effectiveness": fraction_str(kpis.pooling_effectiveness),
        "pooling_effectiveness_approx": _approx(
            kpis.pooling_effectiveness),
        "objective": fraction_str(kpis.objective),
        "objective_approx": _approx(kpis.objective),
        "m_fix_s": kpis.m_fix_s,
        "alpha": fraction_str(kpis.alpha),
        "max_delay_s": kpis.max_delay_s,
        "delay_histogram_bin_s": 10,
        "delay_histogram": list(kpis.delay_histogram),
        "interval_s": kpis.interval_s,
        "intervals": [list(row) for row in kpis.interval_rows],
    }


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
