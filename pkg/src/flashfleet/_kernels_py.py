"""Pure Python twin of the compiled kernels.

This module defines the reference semantics for the hot numeric
kernels; src/flashfleet/_kernels.pyx must produce bit-identical
results. All times are integer seconds, all arrays are int64, and
-1 marks an unreachable distance.

Kernel overview:
  dijkstra_row           one-to-all shortest path times on a CSR graph
  evaluate_sequence      feasibility and cost of one stop sequence
  schedule_sequence      same walk, but records per-stop times
  enumerate_insertions   all feasible (pickup, dropoff) insertions of a
                         request into a base sequence, best store each
  solve_dense_assignment min-sum perfect assignment with dual potentials
"""

from __future__ import annotations

import heapq

import numpy as np

UNREACHABLE = -1
_INF = 2**62


def backend_name() -> str:
    return "pure"


def dijkstra_row(indptr, indices, weights, source):
    """Shortest path time from ``source`` to every vertex.

    ``indptr``/``indices``/``weights`` form a CSR adjacency of a
    directed graph with positive integer weights. Returns an int64
    array with -1 for unreachable vertices.
    """
    n = len(indptr) - 1
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    ip = indptr
    idx = indices
    w = weights
    dist[source] = 0
    heap = [(0, int(source))]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(ip[u], ip[u + 1]):
            v = int(idx[k])
            if done[v]:
                continue
            nd = d + int(w[k])
            if dist[v] < 0 or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def evaluate_sequence(verts, kinds, svc, ddl, early,
                      anchor, anchor_time, epoch,
                      onboard0, capacity, dist):
    """Walk a stop sequence and return (feasible, drive, delay, end).

    The vehicle departs from POI ``anchor`` at max(anchor_time, epoch)
    and visits stops in order with no waiting. Stop kinds: 0 = pickup
    (load check against ``capacity``), 1 = dropoff (completion checked
    against ``ddl``, lateness past ``early`` accumulated into delay).
    ``dist`` is a dense POI-to-POI travel time matrix.
    """
    t = int(anchor_time)
    e = int(epoch)
    if e > t:
        t = e
    cur = int(anchor)
    drive = 0
    delay = 0
    onb = int(onboard0)
    cap = int(capacity)
    n = len(verts)
    for i in range(n):
        v = int(verts[i])
        leg = int(dist[cur, v])
        if leg < 0:
            return False, 0, 0, 0
        t += leg + int(svc[i])
        drive += leg
        if int(kinds[i]) == 0:
            onb += 1
            if onb > cap:
                return False, 0, 0, 0
        else:
            onb -= 1
            if t > int(ddl[i]):
                return False, 0, 0, 0
            delay += t - int(early[i])
        cur = v
    return True, drive, delay, t


def schedule_sequence(verts, kinds, svc, ddl, early,
                      anchor, anchor_time, epoch,
                      onboard0, capacity, dist):
    """Like evaluate_sequence but also records per-stop times.

    Returns (feasible, arrivals, completions, drive, delay); the two
    arrays are int64 and meaningless when infeasible.
    """
    n = len(verts)
    arrivals = np.zeros(n, dtype=np.int64)
    completions = np.zeros(n, dtype=np.int64)
    t = int(anchor_time)
    e = int(epoch)
    if e > t:
        t = e
    cur = int(anchor)
    drive = 0
    delay = 0
    onb = int(onboard0)
    cap = int(capacity)
    for i in range(n):
        v = int(verts[i])
        leg = int(dist[cur, v])
        if leg < 0:
            return False, arrivals, completions, 0, 0
        t += leg
        drive += leg
        arrivals[i] = t
        t += int(svc[i])
        completions[i] = t
        if int(kinds[i]) == 0:
            onb += 1
            if onb > cap:
                return False, arrivals, completions, 0, 0
        else:
            onb -= 1
            if t > int(ddl[i]):
                return False, arrivals, completions, 0, 0
            delay += t - int(early[i])
        cur = v
    return True, arrivals, completions, drive, delay


def enumerate_insertions(verts, kinds, svc, ddl, early,
                         anchor, anchor_time, epoch,
                         onboard0, capacity, dist,
                         stores, goal, pick_svc, drop_svc,
                         req_ddl, req_early,
                         alpha_num, alpha_den, out):
    """Enumerate feasible insertions of one request into a sequence.

    The inserted pickup goes at position p, the dropoff at position q
    (p <= q, both over the base sequence of length n): the resulting
    order is base[0:p], pickup, base[p:q], dropoff, base[q:n]. For each
    feasible (p, q) the pickup store is chosen from ``stores`` (scanned
    in the given order) minimizing the scaled cost
    (alpha_den - alpha_num) * delay + alpha_num * drive, first best
    winning ties. One row (p, q, store, drive, delay, end) is written
    to ``out`` per feasible pair; returns the number of rows.
    """
    n = len(verts)
    bverts = [int(x) for x in verts]
    bkinds = [int(x) for x in kinds]
    bsvc = [int(x) for x in svc]
    bddl = [int(x) for x in ddl]
    bearly = [int(x) for x in early]
    slist = [int(x) for x in stores]
    g = int(goal)
    t0 = int(anchor_time)
    e = int(epoch)
    if e > t0:
        t0 = e
    a0 = int(anchor)
    onb0 = int(onboard0)
    cap = int(capacity)
    psvc = int(pick_svc)
    dsvc = int(drop_svc)
    rddl = int(req_ddl)
    rearly = int(req_early)
    wd = int(alpha_den) - int(alpha_num)
    wf = int(alpha_num)
    rows = 0
    for p in range(n + 1):
        for q in range(p, n + 1):
            best_c = 0
            best = None
            for s in slist:
                res = _walk_insert(bverts, bkinds, bsvc, bddl, bearly, n,
                                   a0, t0, onb0, cap, dist,
                                   p, q, s, g, psvc, dsvc, rddl, rearly)
                if res is None:
                    continue
                drive, delay, end = res
                c = wd * delay + wf * drive
                if best is None or c < best_c:
                    best_c = c
                    best = (s, drive, delay, end)
            if best is not None:
                out[rows, 0] = p
                out[rows, 1] = q
                out[rows, 2] = best[0]
                out[rows, 3] = best[1]
                out[rows, 4] = best[2]
                out[rows, 5] = best[3]
                rows += 1
    return rows


def _walk_insert(bverts, bkinds, bsvc, bddl, bearly, n,
                 a0, t0, onb0, cap, dist,
                 p, q, s, g, psvc, dsvc, rddl, rearly):
    """Walk the base sequence with a pickup/dropoff pair spliced in."""
    t = t0
    cur = a0
    drive = 0
    delay = 0
    onb = onb0
    i = 0
    # pos runs over the merged sequence of length n + 2
    for pos in range(n + 2):
        if pos == p:
            v, kind, sv, dd, ea = s, 0, psvc, 0, 0
        elif pos == q + 1:
            v, kind, sv, dd, ea = g, 1, dsvc, rddl, rearly
        else:
            v, kind, sv, dd, ea = (bverts[i], bkinds[i], bsvc[i],
                                   bddl[i], bearly[i])
            i += 1
        leg = int(dist[cur, v])
        if leg < 0:
            return None
        t += leg + sv
        drive += leg
        if kind == 0:
            onb += 1
            if onb > cap:
                return None
        else:
            onb -= 1
            if t > dd:
                return None
            delay += t - ea
        cur = v
    return drive, delay, t


def solve_dense_assignment(cost):
    """Min-sum perfect assignment on a square int64 cost matrix.

    Returns (col_of_row, u, v): col_of_row[i] is the column assigned
    to row i, and the potentials satisfy u[i] + v[j] <= cost[i, j]
    for every cell with equality on assigned cells. Deterministic:
    index-order scans, first minimum wins ties. Raises ValueError if
    no finite perfect assignment exists (callers pad to avoid this).
    """
    C = np.ascontiguousarray(cost, dtype=np.int64)
    N = C.shape[0]
    if C.ndim != 2 or C.shape[1] != N:
        raise ValueError("cost matrix must be square")
    col_of_row = np.full(N, -1, dtype=np.int64)
    if N == 0:
        return col_of_row, np.zeros(0, np.int64), np.zeros(0, np.int64)
    # Shortest augmenting path formulation with 1-based columns and a
    # virtual column 0 holding the row currently seeking a match.
    u = np.zeros(N + 1, dtype=np.int64)
    v = np.zeros(N + 1, dtype=np.int64)
    p = np.zeros(N + 1, dtype=np.int64)
    way = np.zeros(N + 1, dtype=np.int64)
    for i in range(1, N + 1):
        p[0] = i
        j0 = 0
        minv = np.full(N + 1, _INF, dtype=np.int64)
        used = np.zeros(N + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = int(p[j0])
            free = ~used[1:]
            cur = C[i0 - 1, :] - u[i0] - v[1:]
            upd = free & (cur < minv[1:])
            if upd.any():
                minv[1:][upd] = cur[upd]
                way[1:][upd] = j0
            masked = np.where(free, minv[1:], _INF)
            j1 = int(np.argmin(masked)) + 1
            delta = int(masked[j1 - 1])
            if delta >= _INF:
                raise ValueError("no finite perfect assignment")
            rows_used = p[used]
            u[rows_used] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = int(way[j0])
            p[j0] = p[j1]
            j0 = j1
    for j in range(1, N + 1):
        col_of_row[int(p[j]) - 1] = j - 1
    return col_of_row, u[1:].copy(), v[1:].copy()
