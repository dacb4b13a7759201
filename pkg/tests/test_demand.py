import numpy as np
import pytest

from flashfleet.demand import (CatchmentArea, TransactionRecord,
                               build_request, compute_catchment_areas,
                               load_requests, load_transactions,
                               requests_to_csv_lines,
                               synthesize_requests,
                               transactions_to_csv_lines)
from flashfleet.errors import ParseError, ValidationError


class TestTransactionsCsv:
    def test_round_trip(self):
        records = [TransactionRecord("a", 0, 3),
                   TransactionRecord("b", 2, 0)]
        lines = transactions_to_csv_lines(records, comments=["hello"])
        assert lines[0] == "# hello"
        assert lines[1] == "store,window,count"
        assert load_transactions(lines) == records

    def test_missing_header(self):
        with pytest.raises(ParseError, match="expected header"):
            load_transactions(["a,0,3"])
        with pytest.raises(ParseError, match="missing header"):
            load_transactions(["# only a comment"])

    def test_bad_field_count(self):
        with pytest.raises(ParseError, match="3 fields"):
            load_transactions(["store,window,count", "a,0"])

    def test_non_integer(self):
        with pytest.raises(ParseError, match="integers"):
            load_transactions(["store,window,count", "a,0,many"])

    def test_negative(self):
        with pytest.raises(ParseError, match="non-negative"):
            load_transactions(["store,window,count", "a,-1,3"])


class TestCatchmentAreas:
    def test_partition_on_grid(self, grid3, grid3_oracle):
        areas = compute_catchment_areas(grid3_oracle, grid3.stores)
        got = {a.store: a.members for a in areas}
        # ties (g02, g11, g20 are 100 s from both) go to the lexico-
        # graphically smaller store
        assert got == {
            "g00": ("g00", "g01", "g02", "g10", "g11", "g20"),
            "g22": ("g12", "g21", "g22"),
        }
        all_members = [v for a in areas for v in a.members]
        assert sorted(all_members) == sorted(grid3.ids)

    def test_store_subset(self, grid3, grid3_oracle):
        areas = compute_catchment_areas(grid3_oracle, ["g22"])
        assert len(areas) == 1
        assert areas[0].members == tuple(sorted(grid3.ids))

    def test_unknown_store(self, grid3_oracle):
        with pytest.raises(ValidationError, match="unknown store"):
            compute_catchment_areas(grid3_oracle, ["zz"])

    def test_empty_store_list(self, grid3_oracle):
        with pytest.raises(ValidationError, match="not be empty"):
            compute_catchment_areas(grid3_oracle, [])


class TestBuildRequest:
    def test_service_time_arithmetic(self, grid3_oracle):
        r = build_request(7, "g11", 40, oracle=grid3_oracle, t_load_s=60,
                          t_deliver_s=60, max_delay_s=300)
        # nearest store g00 at 100 s: 40 + 60 + 100 + 60
        assert r.nearest_store == "g00"
        assert r.earliest_dropoff == 260
        assert r.deadline == 560

    def test_uses_nearest_store_tie_rule(self, grid3_oracle):
        r = build_request(0, "g20", 0, oracle=grid3_oracle, t_load_s=1,
                          t_deliver_s=2, max_delay_s=3)
        assert r.nearest_store == "g00"
        assert r.earliest_dropoff == 0 + 1 + 100 + 2
        assert r.deadline == r.earliest_dropoff + 3


def synth(grid3_oracle, transactions, share, seed=5, window=3600):
    areas = compute_catchment_areas(grid3_oracle,
                                    grid3_oracle.network.stores)
    return synthesize_requests(transactions, areas, share, window, seed,
                               oracle=grid3_oracle, t_load_s=60,
                               t_deliver_s=60, max_delay_s=300)


class TestSynthesizeRequests:
    def test_cardinality_rounds_half_even(self, grid3_oracle):
        txns = [TransactionRecord("g00", 0, 1),
                TransactionRecord("g00", 1, 3),
                TransactionRecord("g22", 2, 5)]
        reqs = synth(grid3_oracle, txns, "0.5")
        # round(0.5) = 0, round(1.5) = 2, round(2.5) = 2
        assert len(reqs) == 4

    def test_membership_and_windows(self, grid3_oracle):
        txns = [TransactionRecord("g00", 2, 40),
                TransactionRecord("g22", 5, 40)]
        areas = {a.store: set(a.members)
                 for a in compute_catchment_areas(
                     grid3_oracle, grid3_oracle.network.stores)}
        reqs = synth(grid3_oracle, txns, 1)
        assert len(reqs) == 80
        near = {"g00": 0, "g22": 0}
        for r in reqs:
            window = r.placed_at // 3600
            assert window in (2, 5)
            owner = "g00" if window == 2 else "g22"
            assert r.goal in areas[owner]
            near[owner] += 1
        assert near == {"g00": 40, "g22": 40}

    def test_ids_follow_placement_order(self, grid3_oracle):
        txns = [TransactionRecord("g22", 0, 30),
                TransactionRecord("g00", 0, 30)]
        reqs = synth(grid3_oracle, txns, 1)
        assert [r.id for r in reqs] == list(range(60))
        placed = [r.placed_at for r in reqs]
        assert placed == sorted(placed)

    def test_reproducible_and_seed_sensitive(self, grid3_oracle):
        txns = [TransactionRecord("g00", 0, 20)]
        a = synth(grid3_oracle, txns, 1, seed=9)
        b = synth(grid3_oracle, txns, 1, seed=9)
        c = synth(grid3_oracle, txns, 1, seed=10)
        assert a == b
        assert a != c

    def test_goal_draw_is_uniform_over_area(self, grid3_oracle):
        txns = [TransactionRecord("g00", 0, 10_000)]
        reqs = synth(grid3_oracle, txns, 1, seed=123)
        counts = {}
        for r in reqs:
            counts[r.goal] = counts.get(r.goal, 0) + 1
        members = 6
        expect = 10_000 / members
        sigma = (10_000 * (1 / members) * (1 - 1 / members)) ** 0.5
        assert set(counts) <= {"g00", "g01", "g02", "g10", "g11", "g20"}
        for vertex, count in counts.items():
            assert abs(count - expect) <= 5 * sigma, vertex

    def test_zero_count_records_skipped(self, grid3_oracle):
        txns = [TransactionRecord("g00", 0, 0)]
        assert synth(grid3_oracle, txns, 1) == []

    def test_share_validation(self, grid3_oracle):
        with pytest.raises(ValidationError, match="non-negative"):
            synth(grid3_oracle, [TransactionRecord("g00", 0, 1)], -1)

    def test_window_validation(self, grid3_oracle):
        with pytest.raises(ValidationError, match="positive"):
            synth(grid3_oracle, [TransactionRecord("g00", 0, 1)], 1,
                  window=0)

    def test_missing_area(self, grid3_oracle):
        areas = [CatchmentArea("g00", ("g00",))]
        with pytest.raises(ValidationError, match="without a"):
            synthesize_requests([TransactionRecord("g22", 0, 4)], areas,
                                1, 3600, 1, oracle=grid3_oracle,
                                t_load_s=60, t_deliver_s=60,
                                max_delay_s=300)


class TestRequestsCsv:
    def test_round_trip(self, grid3_oracle):
        txns = [TransactionRecord("g00", 0, 10),
                TransactionRecord("g22", 1, 10)]
        reqs = synth(grid3_oracle, txns, 1)
        lines = requests_to_csv_lines(reqs, comments=["tag"])
        assert lines[0] == "# tag"
        assert lines[1] == "id,goal,placed_at"
        back = load_requests(lines, oracle=grid3_oracle, t_load_s=60,
                             t_deliver_s=60, max_delay_s=300)
        assert back == reqs

    def test_rows_sorted_on_load(self, grid3_oracle):
        lines = ["id,goal,placed_at", "5,g11,300", "2,g01,100",
                 "9,g10,100"]
        back = load_requests(lines, oracle=grid3_oracle, t_load_s=60,
                             t_deliver_s=60, max_delay_s=300)
        assert [r.id for r in back] == [2, 9, 5]

    def test_duplicate_id(self, grid3_oracle):
        lines = ["id,goal,placed_at", "1,g11,0", "1,g01,5"]
        with pytest.raises(ValidationError, match="duplicate"):
            load_requests(lines, oracle=grid3_oracle, t_load_s=60,
                          t_deliver_s=60, max_delay_s=300)

    def test_header_required(self, grid3_oracle):
        with pytest.raises(ParseError, match="header"):
            load_requests(["1,g11,0"], oracle=grid3_oracle, t_load_s=60,
                          t_deliver_s=60, max_delay_s=300)

    def test_negative_placed_at(self, grid3_oracle):
        lines = ["id,goal,placed_at", "1,g11,-4"]
        with pytest.raises(ParseError, match="non-negative"):
            load_requests(lines, oracle=grid3_oracle, t_load_s=60,
                          t_deliver_s=60, max_delay_s=300)
