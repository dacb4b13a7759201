"""Chaining completed tasks into per-vehicle operational plans.

A vehicle that finishes task i at end_vertex/end_time can take over
task j when it can relocate there in time: end_time_i + travel <=
start_time_j. Selecting such an arc merges two plans and therefore
saves one vehicle worth of fixed cost while paying the relocation
drive, so the arc weight is -m_fix_s + alpha * travel (in exact
deciseconds, rounded half-even once). A min-weight matching with at
most one successor and one predecessor per task yields the cheapest
chain decomposition; the fleet size is the number of chains,
len(tasks) - len(selected arcs).

chain_tasks matches over all task pairs at once. The hierarchical
variant first chains within fixed time intervals of task start times,
then runs a second matching over the interval plans; an optimal
in-interval matching never leaves an improving arc between two plans
of the same interval unused, so the second pass effectively links
across intervals only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._util import as_fraction
from .errors import ValidationError
from .network import TravelTimeOracle
from .pooling import Task
from .solver import MatchingInstance, solve_matching

__all__ = [
    "ChainArc",
    "RelocationLeg",
    "OperationalPlan",
    "FleetSolution",
    "build_chain_arcs",
    "chain_tasks",
]


@dataclass(frozen=True)
class ChainArc:
    """Feasible hand-over from task i to task j."""

    from_task: int
    to_task: int
    travel_s: int
    weight_decis: int


@dataclass(frozen=True)
class RelocationLeg:
    from_task: int
    to_task: int
    depart_time: int
    travel_s: int
    arrive_time: int
    wait_s: int


@dataclass(frozen=True)
class OperationalPlan:
    """One vehicle's day: tasks in execution order plus relocations."""

    id: int
    tasks: tuple
    legs: tuple
    start_vertex: str
    start_time: int
    end_vertex: str
    end_time: int
    drive_s: int
    delay_s: int
    serves: tuple


@dataclass(frozen=True)
class FleetSolution:
    plans: tuple
    alpha: Fraction
    m_fix_s: int

    @property
    def fleet_size(self) -> int:
        return len(self.plans)

    @property
    def total_drive_s(self) -> int:
        return sum(p.drive_s for p in self.plans)

    @property
    def total_delay_s(self) -> int:
        return sum(p.delay_s for p in self.plans)

    def objective(self) -> Fraction:
        """Fleet cost in exact seconds.

        m_fix_s per vehicle, plus the alpha-weighted mix of delivery
        delay and driven time over all plans.
        """
        return (Fraction(self.m_fix_s * self.fleet_size)
                + (1 - self.alpha) * self.total_delay_s
                + self.alpha * self.total_drive_s)


def _arc_weight_decis(travel_s: int, alpha: Fraction, m_fix_s: int) -> int:
    reloc = round(Fraction(10 * alpha.numerator * travel_s,
                           alpha.denominator))
    return reloc - 10 * m_fix_s


def build_chain_arcs(tasks, oracle: TravelTimeOracle, *,
                     m_fix_s: int, alpha) -> tuple:
    """All feasible negative-weight hand-over arcs between tasks.

    Arcs whose weight is non-negative can never improve the chain
    decomposition and are omitted.
    """
    alpha = as_fraction(alpha)
    arcs = []
    ordered = sorted(tasks, key=lambda t: t.id)
    for a in ordered:
        for b in ordered:
            if a.id == b.id:
                continue
            travel = oracle.time(a.end_vertex, b.start_vertex)
            if travel < 0:
                continue
            if a.end_time + travel > b.start_time:
                continue
            w = _arc_weight_decis(travel, alpha, m_fix_s)
            if w >= 0:
                continue
            arcs.append(ChainArc(a.id, b.id, travel, w))
    return tuple(arcs)


def _match(tasks, arcs):
    instance = MatchingInstance(
        tuple(t.id for t in sorted(tasks, key=lambda t: t.id)),
        tuple((a.from_task, a.to_task, a.weight_decis) for a in arcs))
    return solve_matching(instance)


def _assemble_plans(tasks, selected_arcs, oracle, alpha, m_fix_s):
    by_id = {t.id: t for t in tasks}
    succ = {}
    has_pred = set()
    for i, j in selected_arcs:
        succ[i] = j
        has_pred.add(j)
    chains = []
    for t in sorted(by_id):
        if t in has_pred:
            continue
        chain = [t]
        while chain[-1] in succ:
            chain.append(succ[chain[-1]])
        chains.append(chain)
    plans = []
    for k, chain in enumerate(sorted(chains, key=lambda c: c[0])):
        legs = []
        drive = 0
        delay = 0
        serves = []
        for tid in chain:
            t = by_id[tid]
            drive += t.drive_s
            delay += t.delay_s
            serves.extend(t.serves)
        for prev_id, next_id in zip(chain, chain[1:]):
            prev = by_id[prev_id]
            nxt = by_id[next_id]
            travel = oracle.time(prev.end_vertex, nxt.start_vertex)
            arrive = prev.end_time + travel
            legs.append(RelocationLeg(
                prev_id, next_id, prev.end_time, travel, arrive,
                nxt.start_time - arrive))
            drive += travel
        first = by_id[chain[0]]
        last = by_id[chain[-1]]
        plans.append(OperationalPlan(
            id=k, tasks=tuple(chain), legs=tuple(legs),
            start_vertex=first.start_vertex, start_time=first.start_time,
            end_vertex=last.end_vertex, end_time=last.end_time,
            drive_s=drive, delay_s=delay,
            serves=tuple(sorted(serves))))
    return FleetSolution(tuple(plans), alpha, m_fix_s)


def _validate_tasks(tasks):
    seen = set()
    for t in tasks:
        if t.id in seen:
            raise ValidationError(f"duplicate task id {t.id}")
        seen.add(t.id)


def chain_tasks(tasks, oracle: TravelTimeOracle, *,
                m_fix_s: int = 2000, alpha=Fraction(1),
                hierarchical: bool = True,
                interval_s: int = 3600) -> FleetSolution:
    """Chain tasks into operational plans, minimizing fleet cost.

    hierarchical=True first matches within intervals of task start
    time (interval_s wide), then matches the resulting plans across
    intervals; hierarchical=False matches all tasks in one pass.
    """
    alpha = as_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValidationError("alpha must lie in [0, 1]")
    if interval_s < 1:
        raise ValidationError("interval_s must be positive")
    tasks = tuple(tasks)
    _validate_tasks(tasks)
    if not tasks:
        return FleetSolution((), alpha, m_fix_s)
    if not hierarchical:
        arcs = build_chain_arcs(tasks, oracle, m_fix_s=m_fix_s,
                                alpha=alpha)
        selected = _match(tasks, arcs)
        return _assemble_plans(tasks, selected, oracle, alpha, m_fix_s)

    groups = {}
    for t in tasks:
        groups.setdefault(t.start_time // interval_s, []).append(t)
    all_selected = []
    # Heads of in-interval chains, the nodes of the second pass.
    stage = []
    for key in sorted(groups):
        members = groups[key]
        arcs = build_chain_arcs(members, oracle, m_fix_s=m_fix_s,
                                alpha=alpha)
        selected = _match(members, arcs)
        all_selected.extend(selected)
        succ = {i: j for i, j in selected}
        has_pred = {j for _i, j in selected}
        by_id = {t.id: t for t in members}
        for tid in sorted(by_id):
            if tid in has_pred:
                continue
            chain = [tid]
            while chain[-1] in succ:
                chain.append(succ[chain[-1]])
            first = by_id[chain[0]]
            last = by_id[chain[-1]]
            # Summarize the chain as one meta-task for the macro pass.
            stage.append(Task(
                id=first.id, vehicle="", start_vertex=first.start_vertex,
                start_time=first.start_time, end_vertex=last.end_vertex,
                end_time=last.end_time, serves=(), stops=(), via=(),
                drive_s=0, delay_s=0))
    macro_arcs = build_chain_arcs(stage, oracle, m_fix_s=m_fix_s,
                                  alpha=alpha)
    macro_selected = _match(stage, macro_arcs)
    # A macro arc joins the END of the chain headed by from_task to the
    # start of the chain headed by to_task.
    head_to_tail = {}
    succ_all = {i: j for i, j in all_selected}
    for t in stage:
        tail = t.id
        while tail in succ_all:
            tail = succ_all[tail]
        head_to_tail[t.id] = tail
    for i, j in macro_selected:
        all_selected.append((head_to_tail[i], j))
    return _assemble_plans(tasks, tuple(all_selected), oracle, alpha,
                           m_fix_s)
