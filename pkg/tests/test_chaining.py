from fractions import Fraction

import numpy as np
import pytest

from flashfleet.chaining import (ChainArc, FleetSolution, RelocationLeg,
                                 build_chain_arcs, chain_tasks)
from flashfleet.errors import ValidationError
from flashfleet.pooling import Task, build_solo_tasks, run_pooling
from refimpl import max_matching_size, replay_plan


def make_task(tid, start_vertex, start_time, end_vertex, end_time,
              drive=10, delay=0):
    return Task(id=tid, vehicle=f"v{tid}", start_vertex=start_vertex,
                start_time=start_time, end_vertex=end_vertex,
                end_time=end_time, serves=(tid,), stops=(), via=(),
                drive_s=drive, delay_s=delay)


def selected_arc_count(solution):
    return sum(len(p.tasks) - 1 for p in solution.plans)


class TestArcConstruction:
    def test_weight_is_scaled_travel_minus_fixed_cost(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 500, "g11", 600))
        arcs = build_chain_arcs(tasks, grid3_oracle, m_fix_s=2000,
                                alpha=Fraction(1))
        # travel g00 -> g11 is 100s: 10*100 - 10*2000 = -19000 decis
        assert arcs == (ChainArc(0, 1, 100, -19000),)

    def test_alpha_scales_relocation_share(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 500, "g11", 600))
        arcs = build_chain_arcs(tasks, grid3_oracle, m_fix_s=2000,
                                alpha=Fraction(9, 10))
        assert arcs == (ChainArc(0, 1, 100, 900 - 20000),)

    def test_too_tight_handover_excluded(self, grid3_oracle):
        # arrival would be 100 + 100 = 200, after the next start
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 150, "g11", 300))
        assert build_chain_arcs(tasks, grid3_oracle, m_fix_s=2000,
                                alpha=1) == ()

    def test_exact_arrival_is_feasible(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 200, "g11", 300))
        arcs = build_chain_arcs(tasks, grid3_oracle, m_fix_s=2000,
                                alpha=1)
        assert [(a.from_task, a.to_task) for a in arcs] == [(0, 1)]

    def test_non_negative_weight_excluded(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 500, "g11", 600))
        # reloc 10*100 decis == 10*m_fix exactly: not worth an arc
        assert build_chain_arcs(tasks, grid3_oracle, m_fix_s=100,
                                alpha=1) == ()
        kept = build_chain_arcs(tasks, grid3_oracle, m_fix_s=101, alpha=1)
        assert kept == (ChainArc(0, 1, 100, -10),)


class TestChainTasks:
    def test_smoke_proposed_plans_frozen(self, grid3, grid3_oracle,
                                         smoke_requests, default_params):
        pooled = run_pooling(grid3, smoke_requests, default_params,
                             oracle=grid3_oracle)
        sol = chain_tasks(pooled.tasks, grid3_oracle)
        assert sol.fleet_size == 2
        p0, p1 = sol.plans
        assert p0.tasks == (0, 2, 4)
        assert p0.legs == (
            RelocationLeg(0, 2, 220, 100, 320, 80),
            RelocationLeg(2, 4, 570, 50, 620, 1480),
        )
        assert (p0.start_vertex, p0.start_time) == ("g00", 0)
        assert (p0.end_vertex, p0.end_time) == ("g10", 2270)
        assert (p0.drive_s, p0.delay_s, p0.serves) == (350, 70, (0, 2, 4))

        assert p1.tasks == (1, 3)
        assert p1.legs == (RelocationLeg(1, 3, 270, 50, 320, 1680),)
        assert (p1.drive_s, p1.delay_s, p1.serves) == (150, 70, (1, 3))

        assert sol.total_drive_s == 500
        assert sol.total_delay_s == 140
        assert sol.objective() == Fraction(4500)

        by_id = {t.id: t for t in pooled.tasks}
        for p in sol.plans:
            drive, delay, serves = replay_plan(p, by_id, grid3_oracle)
            assert (drive, delay, serves) == (p.drive_s, p.delay_s,
                                              p.serves)

    def test_solo_tasks_chain_to_same_fleet(self, grid3, grid3_oracle,
                                            smoke_requests,
                                            default_params):
        solo = build_solo_tasks(grid3, smoke_requests, default_params,
                                oracle=grid3_oracle)
        sol = chain_tasks(solo.tasks, grid3_oracle)
        assert sol.fleet_size == 2
        assert [p.tasks for p in sol.plans] == [(0, 2, 4), (1, 3)]
        assert sol.total_delay_s == 0
        assert sol.objective() == Fraction(4500)

    def test_fleet_identity(self, grid3, grid3_oracle, smoke_requests,
                            default_params):
        for penalty in (0, 1000):
            params = default_params if penalty == 0 else \
                type(default_params)(new_vehicle_penalty_s=penalty)
            pooled = run_pooling(grid3, smoke_requests, params,
                                 oracle=grid3_oracle)
            sol = chain_tasks(pooled.tasks, grid3_oracle)
            assert sol.fleet_size == len(pooled.tasks) \
                - selected_arc_count(sol)

    def test_smoke_staging_recovers_flat_chains(self, grid3,
                                                grid3_oracle,
                                                smoke_requests,
                                                default_params):
        # the macro pass bridges the two start-time groups along the
        # same arcs the flat pass picks, so the plans coincide
        pooled = run_pooling(grid3, smoke_requests, default_params,
                             oracle=grid3_oracle)
        flat = chain_tasks(pooled.tasks, grid3_oracle,
                           hierarchical=False)
        assert [p.tasks for p in flat.plans] == [(0, 2, 4), (1, 3)]
        staged = chain_tasks(pooled.tasks, grid3_oracle,
                             interval_s=1000)
        assert staged == flat

    def test_staging_can_trade_drive_for_locality(self, grid3_oracle):
        # in-stage matching grabs the expensive 0->1 handover; the flat
        # pass instead rests vehicle 1 and reuses vehicle 0 for task 2
        tasks = (make_task(0, "g00", 0, "g02", 100),
                 make_task(1, "g20", 300, "g22", 1050),
                 make_task(2, "g02", 1100, "g02", 1200))
        flat = chain_tasks(tasks, grid3_oracle, hierarchical=False)
        assert [p.tasks for p in flat.plans] == [(0, 2), (1,)]
        staged = chain_tasks(tasks, grid3_oracle, interval_s=1000)
        assert [p.tasks for p in staged.plans] == [(0, 1), (2,)]
        assert staged.fleet_size == flat.fleet_size == 2
        assert staged.total_drive_s > flat.total_drive_s
        assert staged.objective() >= flat.objective()

    def test_single_interval_equals_flat(self, grid3, grid3_oracle,
                                         smoke_requests, default_params):
        pooled = run_pooling(grid3, smoke_requests, default_params,
                             oracle=grid3_oracle)
        flat = chain_tasks(pooled.tasks, grid3_oracle,
                           hierarchical=False)
        one = chain_tasks(pooled.tasks, grid3_oracle,
                          interval_s=10 ** 9)
        assert one == flat

    def test_zero_fixed_cost_never_chains(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100),
                 make_task(1, "g11", 500, "g11", 600))
        sol = chain_tasks(tasks, grid3_oracle, m_fix_s=0)
        assert sol.fleet_size == 2
        assert all(len(p.tasks) == 1 for p in sol.plans)

    def test_empty_tasks(self, grid3_oracle):
        sol = chain_tasks((), grid3_oracle)
        assert sol == FleetSolution((), Fraction(1), 2000)
        assert sol.fleet_size == 0 and sol.objective() == 0

    def test_duplicate_task_ids_rejected(self, grid3_oracle):
        t = make_task(3, "g00", 0, "g00", 100)
        with pytest.raises(ValidationError, match="duplicate task id"):
            chain_tasks((t, t), grid3_oracle)

    def test_alpha_and_interval_validation(self, grid3_oracle):
        t = make_task(0, "g00", 0, "g00", 100)
        with pytest.raises(ValidationError, match="alpha"):
            chain_tasks((t,), grid3_oracle, alpha=Fraction(11, 10))
        with pytest.raises(ValidationError, match="interval"):
            chain_tasks((t,), grid3_oracle, interval_s=0)

    def test_objective_mixes_delay_and_drive(self, grid3_oracle):
        tasks = (make_task(0, "g00", 0, "g00", 100, drive=80, delay=30),
                 make_task(1, "g11", 500, "g11", 600, drive=40, delay=10))
        sol = chain_tasks(tasks, grid3_oracle, alpha=Fraction(9, 10))
        assert sol.fleet_size == 1
        assert sol.total_drive_s == 80 + 40 + 100
        assert sol.total_delay_s == 40
        assert sol.objective() == (
            Fraction(2000)
            + Fraction(1, 10) * 40 + Fraction(9, 10) * 220)


class TestCardinality:
    def test_dominant_fixed_cost_yields_maximum_matching(self,
                                                         grid3,
                                                         grid3_oracle):
        ids = grid3.ids
        rng = np.random.Generator(np.random.PCG64(31337))
        for _ in range(60):
            n = int(rng.integers(1, 11))
            tasks = []
            for k in range(n):
                start = int(rng.integers(0, 40)) * 50
                end = start + int(rng.integers(1, 10)) * 50
                tasks.append(make_task(
                    k, ids[int(rng.integers(0, len(ids)))], start,
                    ids[int(rng.integers(0, len(ids)))], end))
            sol = chain_tasks(tasks, grid3_oracle, m_fix_s=2000)
            feasible = []
            for a in tasks:
                for b in tasks:
                    if a.id == b.id:
                        continue
                    travel = grid3_oracle.time(a.end_vertex,
                                               b.start_vertex)
                    if a.end_time + travel <= b.start_time:
                        feasible.append((a.id, b.id))
            best = max_matching_size(range(n), feasible)
            assert sol.fleet_size == n - best
            assert selected_arc_count(sol) == best
