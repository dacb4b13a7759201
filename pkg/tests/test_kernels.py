import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from flashfleet import kernels
from refimpl import bellman_ford


def csr_from_edges(n, edges):
    rows = sorted(edges, key=lambda e: (e[0], e[1]))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.zeros(len(rows), dtype=np.int64)
    weights = np.zeros(len(rows), dtype=np.int64)
    for k, (u, v, w) in enumerate(rows):
        indptr[u + 1] += 1
        indices[k] = v
        weights[k] = w
    np.cumsum(indptr, out=indptr)
    return indptr, indices, weights


def random_graph(rng, n):
    edges = {}
    # random ring so most of the graph is reachable, plus chords
    order = rng.permutation(n)
    for a, b in zip(order, np.roll(order, -1)):
        edges[(int(a), int(b))] = int(rng.integers(1, 100))
    for _ in range(n * 2):
        u, v = int(rng.integers(0, n)), int(rng.integers(0, n))
        if u != v:
            w = int(rng.integers(1, 100))
            if (u, v) not in edges or w < edges[(u, v)]:
                edges[(u, v)] = w
    return [(u, v, w) for (u, v), w in sorted(edges.items())]


class TestDijkstra:
    def test_matches_bellman_ford_on_random_graphs(self):
        rng = np.random.Generator(np.random.PCG64(1))
        for _ in range(25):
            n = int(rng.integers(2, 51))
            edges = random_graph(rng, n)
            indptr, indices, weights = csr_from_edges(n, edges)
            for src in range(n):
                got = kernels.dijkstra_row(indptr, indices, weights, src)
                want = bellman_ford(n, edges, src)
                assert got.tolist() == want

    def test_unreachable_marked(self):
        indptr, indices, weights = csr_from_edges(3, [(0, 1, 5)])
        row = kernels.dijkstra_row(indptr, indices, weights, 0)
        assert row.tolist() == [0, 5, kernels.UNREACHABLE]

    def test_parallel_min_and_self_loop(self):
        # CSR may carry a self loop; it must never shorten anything
        edges = [(0, 0, 1), (0, 1, 9), (1, 2, 1)]
        indptr, indices, weights = csr_from_edges(3, edges)
        row = kernels.dijkstra_row(indptr, indices, weights, 0)
        assert row.tolist() == [0, 9, 10]


def seq_arrays(seq):
    verts = np.array([s[0] for s in seq], dtype=np.int64)
    kinds = np.array([s[1] for s in seq], dtype=np.int64)
    svc = np.array([s[2] for s in seq], dtype=np.int64)
    ddl = np.array([s[3] for s in seq], dtype=np.int64)
    early = np.array([s[4] for s in seq], dtype=np.int64)
    return verts, kinds, svc, ddl, early


LINE_DIST = np.array([[abs(i - j) * 10 for j in range(6)]
                      for i in range(6)], dtype=np.int64)


class TestEvaluateSequence:
    def test_hand_walk(self):
        # anchor 0 at t=0: pickup at 2 (svc 60), dropoff at 4 (svc 60)
        seq = [(2, 0, 60, 0, 0), (4, 1, 60, 300, 120)]
        ok, drive, delay, end = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 0, 0, 4, LINE_DIST)
        # legs 20 + 20: pickup done at 80, dropoff done at 160
        assert (ok, drive, delay, end) == (True, 40, 40, 160)

    def test_epoch_floors_departure(self):
        seq = [(1, 0, 60, 0, 0), (2, 1, 60, 1000, 0)]
        ok, drive, delay, end = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 500, 0, 4, LINE_DIST)
        assert ok and end == 500 + 10 + 60 + 10 + 60

    def test_deadline_infeasible(self):
        seq = [(1, 0, 60, 0, 0), (5, 1, 60, 100, 0)]
        ok, *_rest = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 0, 0, 4, LINE_DIST)
        assert not ok

    def test_capacity_infeasible(self):
        seq = [(1, 0, 10, 0, 0), (2, 0, 10, 0, 0),
               (3, 1, 10, 9999, 0), (4, 1, 10, 9999, 0)]
        ok1, *_ = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 0, 0, 2, LINE_DIST)
        ok2, *_ = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 0, 1, 2, LINE_DIST)
        assert ok1 and not ok2

    def test_unreachable_leg_infeasible(self):
        dist = LINE_DIST.copy()
        dist[0, 3] = -1
        seq = [(3, 0, 10, 0, 0)]
        ok, *_ = kernels.evaluate_sequence(
            *seq_arrays(seq), 0, 0, 0, 0, 4, dist)
        assert not ok

    def test_empty_sequence(self):
        ok, drive, delay, end = kernels.evaluate_sequence(
            *seq_arrays([]), 2, 40, 100, 0, 4, LINE_DIST)
        assert (ok, drive, delay, end) == (True, 0, 0, 100)

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_agrees_with_schedule_sequence(self, data):
        n_stop = data.draw(st.integers(0, 5))
        seq = []
        onboard = data.draw(st.integers(0, 2))
        open_count = onboard
        for _ in range(n_stop):
            kind = data.draw(st.integers(0, 1)) if open_count else 0
            open_count += 1 if kind == 0 else -1
            seq.append((data.draw(st.integers(0, 5)), kind,
                        data.draw(st.integers(0, 90)),
                        data.draw(st.integers(0, 600)),
                        data.draw(st.integers(0, 300))))
        anchor = data.draw(st.integers(0, 5))
        t0 = data.draw(st.integers(0, 200))
        epoch = data.draw(st.integers(0, 200))
        cap = data.draw(st.integers(1, 4))
        args = (*seq_arrays(seq), anchor, t0, epoch, onboard, cap,
                LINE_DIST)
        ok1, drive1, delay1, end1 = kernels.evaluate_sequence(*args)
        ok2, arrivals, completions, drive2, delay2 = \
            kernels.schedule_sequence(*args)
        assert ok1 == ok2
        if ok1:
            assert (drive1, delay1) == (drive2, delay2)
            if seq:
                assert end1 == int(completions[-1])
                legs = np.diff(np.concatenate(
                    ([max(t0, epoch)], completions)))
                svc = np.array([s[2] for s in seq])
                assert (arrivals == completions - svc).all()
                assert int((legs - svc).sum()) == drive1


class TestScheduleSequence:
    def test_records_stop_times(self):
        seq = [(2, 0, 60, 0, 0), (4, 1, 60, 300, 120)]
        ok, arrivals, completions, drive, delay = \
            kernels.schedule_sequence(*seq_arrays(seq), 0, 0, 0, 0, 4,
                                      LINE_DIST)
        assert ok
        assert arrivals.tolist() == [20, 100]
        assert completions.tolist() == [80, 160]
        assert (drive, delay) == (40, 40)


class TestEnumerateInsertions:
    def run_reference(self, seq, anchor, t0, epoch, onboard, cap,
                      stores, goal, psvc, dsvc, rddl, rearly,
                      alpha_num, alpha_den):
        """Splice every (p, q, store) by hand and keep the best store."""
        rows = []
        n = len(seq)
        for p in range(n + 1):
            for q in range(p, n + 1):
                best = None
                best_c = None
                for s in stores:
                    pick = (s, 0, psvc, 0, 0)
                    drop = (goal, 1, dsvc, rddl, rearly)
                    merged = seq[:p] + [pick] + seq[p:q] + [drop] + seq[q:]
                    ok, drive, delay, end = kernels.evaluate_sequence(
                        *seq_arrays(merged), anchor, t0, epoch, onboard,
                        cap, LINE_DIST)
                    if not ok:
                        continue
                    c = (alpha_den - alpha_num) * delay + alpha_num * drive
                    if best is None or c < best_c:
                        best = (p, q, s, drive, delay, end)
                        best_c = c
                if best is not None:
                    rows.append(best)
        return rows

    @given(st.data())
    @settings(max_examples=120, deadline=None)
    def test_matches_splice_enumeration(self, data):
        n_stop = data.draw(st.integers(0, 3))
        seq = []
        open_count = 0
        for _ in range(n_stop):
            kind = data.draw(st.integers(0, 1)) if open_count else 0
            open_count += 1 if kind == 0 else -1
            seq.append((data.draw(st.integers(0, 5)), kind,
                        data.draw(st.integers(0, 60)),
                        data.draw(st.integers(100, 900)),
                        data.draw(st.integers(0, 400))))
        anchor = data.draw(st.integers(0, 5))
        t0 = data.draw(st.integers(0, 100))
        stores = data.draw(st.lists(st.integers(0, 5), min_size=1,
                                    max_size=3))
        goal = data.draw(st.integers(0, 5))
        rddl = data.draw(st.integers(100, 900))
        rearly = data.draw(st.integers(0, 400))
        alpha_num = data.draw(st.integers(0, 10))
        want = self.run_reference(seq, anchor, t0, 0, 0, 4, stores,
                                  goal, 30, 30, rddl, rearly,
                                  alpha_num, 10)
        out = np.zeros((64, 6), dtype=np.int64)
        got = kernels.enumerate_insertions(
            *seq_arrays(seq), anchor, t0, 0, 0, 4, LINE_DIST,
            np.array(stores, dtype=np.int64), goal, 30, 30, rddl,
            rearly, alpha_num, 10, out)
        assert got == len(want)
        assert [tuple(r) for r in out[:got].tolist()] == want

    def test_store_tie_first_in_scan_order_wins(self):
        # stores 1 and 3 are symmetric around goal 2: same drive, same
        # delay, so the first listed store must win
        out = np.zeros((8, 6), dtype=np.int64)
        got = kernels.enumerate_insertions(
            *seq_arrays([]), 2, 0, 0, 0, 4, LINE_DIST,
            np.array([3, 1], dtype=np.int64), 2, 60, 60, 10_000, 0,
            1, 1, out)
        assert got == 1
        p, q, store, drive, delay, end = out[0].tolist()
        assert (p, q, store) == (0, 0, 3)


class TestDenseAssignment:
    def test_matches_scipy_on_random_matrices(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for _ in range(200):
            n = int(rng.integers(1, 13))
            C = rng.integers(0, 50, size=(n, n)).astype(np.int64)
            col_of_row, u, v = kernels.solve_dense_assignment(C)
            assert sorted(col_of_row.tolist()) == list(range(n))
            total = int(C[np.arange(n), col_of_row].sum())
            rr, cc = linear_sum_assignment(C)
            assert total == int(C[rr, cc].sum())
            # dual feasibility with complementary slackness
            slack = C - u[:, None] - v[None, :]
            assert int(slack.min()) >= 0
            assert (slack[np.arange(n), col_of_row] == 0).all()
            assert int(u.sum() + v.sum()) == total

    def test_deterministic_repeat(self):
        rng = np.random.Generator(np.random.PCG64(8))
        C = rng.integers(0, 5, size=(9, 9)).astype(np.int64)
        first = kernels.solve_dense_assignment(C)
        second = kernels.solve_dense_assignment(C)
        for a, b in zip(first, second):
            assert a.tolist() == b.tolist()

    def test_empty_matrix(self):
        col_of_row, u, v = kernels.solve_dense_assignment(
            np.zeros((0, 0), dtype=np.int64))
        assert col_of_row.size == 0 and u.size == 0 and v.size == 0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            kernels.solve_dense_assignment(np.zeros((2, 3), np.int64))

    def test_detects_infeasible(self):
        C = np.full((2, 2), 2 ** 62, dtype=np.int64)
        with pytest.raises(ValueError):
            kernels.solve_dense_assignment(C)


class TestBackends:
    def test_pure_backend_always_available(self):
        backends = kernels.available_backends()
        assert "pure" in backends
        assert kernels.BACKEND in backends

    def test_unknown_backend_rejected(self):
        with pytest.raises(KeyError):
            kernels.get_backend("gpu")

    def test_backends_bit_identical(self):
        backends = kernels.available_backends()
        if len(backends) < 2:
            pytest.skip("compiled extension not built")
        pure = backends["pure"]
        comp = backends["compiled"]
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(40):
            n = int(rng.integers(2, 30))
            edges = random_graph(rng, n)
            indptr, indices, weights = csr_from_edges(n, edges)
            src = int(rng.integers(0, n))
            assert pure.dijkstra_row(indptr, indices, weights,
                                     src).tolist() == \
                comp.dijkstra_row(indptr, indices, weights, src).tolist()
        for _ in range(60):
            n = int(rng.integers(1, 10))
            C = rng.integers(0, 30, size=(n, n)).astype(np.int64)
            got_p = pure.solve_dense_assignment(C)
            got_c = comp.solve_dense_assignment(C)
            for a, b in zip(got_p, got_c):
                assert a.tolist() == b.tolist()
        for _ in range(120):
            n_stop = int(rng.integers(0, 5))
            seq = []
            open_count = 0
            for _ in range(n_stop):
                kind = int(rng.integers(0, 2)) if open_count else 0
                open_count += 1 if kind == 0 else -1
                seq.append((int(rng.integers(0, 6)), kind,
                            int(rng.integers(0, 60)),
                            int(rng.integers(100, 900)),
                            int(rng.integers(0, 400))))
            args = (*seq_arrays(seq), int(rng.integers(0, 6)),
                    int(rng.integers(0, 100)), 0, 0, 4, LINE_DIST)
            assert pure.evaluate_sequence(*args) == \
                comp.evaluate_sequence(*args)
            ok_p, arr_p, comp_p, dr_p, de_p = pure.schedule_sequence(*args)
            ok_c, arr_c, comp_c, dr_c, de_c = comp.schedule_sequence(*args)
            assert (ok_p, dr_p, de_p) == (ok_c, dr_c, de_c)
            assert arr_p.tolist() == arr_c.tolist()
            assert comp_p.tolist() == comp_c.tolist()
            out_p = np.zeros((64, 6), dtype=np.int64)
            out_c = np.zeros((64, 6), dtype=np.int64)
            stores = np.array([0, 2, 5], dtype=np.int64)
            goal = int(rng.integers(0, 6))
            rows_p = pure.enumerate_insertions(
                *seq_arrays(seq), 0, 0, 0, 0, 4, LINE_DIST, stores,
                goal, 30, 30, 700, 100, 1, 1, out_p)
            rows_c = comp.enumerate_insertions(
                *seq_arrays(seq), 0, 0, 0, 0, 4, LINE_DIST, stores,
                goal, 30, 30, 700, 100, 1, 1, out_c)
            assert rows_p == rows_c
            assert out_p[:rows_p].tolist() == out_c[:rows_c].tolist()
        for goal in range(6):
            out_p = np.zeros((8, 6), dtype=np.int64)
            out_c = np.zeros((8, 6), dtype=np.int64)
            stores = np.array([1, 4], dtype=np.int64)
            rows_p = pure.enumerate_insertions(
                *seq_arrays([]), 0, 0, 0, 0, 4, LINE_DIST, stores,
                goal, 60, 60, 10_000, 0, 9, 10, out_p)
            rows_c = comp.enumerate_insertions(
                *seq_arrays([]), 0, 0, 0, 0, 4, LINE_DIST, stores,
                goal, 60, 60, 10_000, 0, 9, 10, out_c)
            assert rows_p == rows_c
            assert out_p[:rows_p].tolist() == out_c[:rows_c].tolist()
