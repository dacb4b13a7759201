# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

Must stay in lockstep with _kernels_py: same functions, same integer
semantics, bit-identical outputs. See that module for documentation.
"""

from libc.stdlib cimport free, malloc

import numpy as np

ctypedef long long i64

UNREACHABLE = -1

cdef i64 _INF = (<i64>1) << 62


def backend_name():
    return "compiled"


cdef inline void _heap_push(i64* hd, i64* hn, Py_ssize_t* size, i64 d, i64 node) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    cdef i64 td, tn
    hd[i] = d
    hn[i] = node
    size[0] = i + 1
    while i > 0:
        parent = (i - 1) >> 1
        if hd[parent] > hd[i]:
            td = hd[parent]; hd[parent] = hd[i]; hd[i] = td
            tn = hn[parent]; hn[parent] = hn[i]; hn[i] = tn
            i = parent
        else:
            break


cdef inline void _heap_pop(i64* hd, i64* hn, Py_ssize_t* size) noexcept nogil:
    cdef Py_ssize_t n = size[0] - 1
    cdef Py_ssize_t i = 0, child
    cdef i64 td, tn
    hd[0] = hd[n]
    hn[0] = hn[n]
    size[0] = n
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and hd[child + 1] < hd[child]:
            child += 1
        if hd[child] < hd[i]:
            td = hd[child]; hd[child] = hd[i]; hd[i] = td
            tn = hn[child]; hn[child] = hn[i]; hn[i] = tn
            i = child
        else:
            break


def dijkstra_row(indptr, indices, weights, source):
    """One-to-all shortest path times on a CSR graph; -1 unreachable."""
    cdef i64[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[:] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef i64[:] w = np.ascontiguousarray(weights, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    out = np.full(n, -1, dtype=np.int64)
    cdef i64[:] dist = out
    cdef Py_ssize_t cap = idx.shape[0] + 1
    cdef i64* hd = <i64*>malloc(cap * sizeof(i64))
    cdef i64* hn = <i64*>malloc(cap * sizeof(i64))
    cdef char* done = <char*>malloc(n * sizeof(char))
    if hd == NULL or hn == NULL or done == NULL:
        free(hd); free(hn); free(done)
        raise MemoryError()
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t u, v, k
    cdef Py_ssize_t src = source
    cdef i64 d, nd
    with nogil:
        for u in range(n):
            done[u] = 0
        dist[src] = 0
        _heap_push(hd, hn, &size, 0, src)
        while size > 0:
            d = hd[0]
            u = <Py_ssize_t>hn[0]
            _heap_pop(hd, hn, &size)
            if done[u]:
                continue
            done[u] = 1
            for k in range(ip[u], ip[u + 1]):
                v = <Py_ssize_t>idx[k]
                if done[v]:
                    continue
                nd = d + w[k]
                if dist[v] < 0 or nd < dist[v]:
                    dist[v] = nd
                    _heap_push(hd, hn, &size, nd, v)
    free(hd); free(hn); free(done)
    return out


def evaluate_sequence(verts, kinds, svc, ddl, early,
                      anchor, anchor_time, epoch,
                      onboard0, capacity, dist):
    """Walk a stop sequence; returns (feasible, drive, delay, end)."""
    cdef i64[:] vv = np.ascontiguousarray(verts, dtype=np.int64)
    cdef i64[:] kk = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef i64[:] ss = np.ascontiguousarray(svc, dtype=np.int64)
    cdef i64[:] dd = np.ascontiguousarray(ddl, dtype=np.int64)
    cdef i64[:] ee = np.ascontiguousarray(early, dtype=np.int64)
    cdef i64[:, :] D = np.ascontiguousarray(dist, dtype=np.int64)
    cdef i64 t = anchor_time
    cdef i64 e = epoch
    cdef Py_ssize_t cur = anchor
    cdef i64 drive = 0, delay = 0, leg
    cdef i64 onb = onboard0, cap = capacity
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t i, v
    if e > t:
        t = e
    for i in range(n):
        v = <Py_ssize_t>vv[i]
        leg = D[cur, v]
        if leg < 0:
            return False, 0, 0, 0
        t += leg + ss[i]
        drive += leg
        if kk[i] == 0:
            onb += 1
            if onb > cap:
                return False, 0, 0, 0
        else:
            onb -= 1
            if t > dd[i]:
                return False, 0, 0, 0
            delay += t - ee[i]
        cur = v
    return True, int(drive), int(delay), int(t)


def schedule_sequence(verts, kinds, svc, ddl, early,
                      anchor, anchor_time, epoch,
                      onboard0, capacity, dist):
    """Like evaluate_sequence but records per-stop arrival/completion."""
    cdef i64[:] vv = np.ascontiguousarray(verts, dtype=np.int64)
    cdef i64[:] kk = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef i64[:] ss = np.ascontiguousarray(svc, dtype=np.int64)
    cdef i64[:] dd = np.ascontiguousarray(ddl, dtype=np.int64)
    cdef i64[:] ee = np.ascontiguousarray(early, dtype=np.int64)
    cdef i64[:, :] D = np.ascontiguousarray(dist, dtype=np.int64)
    cdef Py_ssize_t n = vv.shape[0]
    arr_out = np.zeros(n, dtype=np.int64)
    cmp_out = np.zeros(n, dtype=np.int64)
    cdef i64[:] arr = arr_out
    cdef i64[:] comp = cmp_out
    cdef i64 t = anchor_time
    cdef i64 e = epoch
    cdef Py_ssize_t cur = anchor
    cdef i64 drive = 0, delay = 0, leg
    cdef i64 onb = onboard0, cap = capacity
    cdef Py_ssize_t i, v
    if e > t:
        t = e
    for i in range(n):
        v = <Py_ssize_t>vv[i]
        leg = D[cur, v]
        if leg < 0:
            return False, arr_out, cmp_out, 0, 0
        t += leg
        drive += leg
        arr[i] = t
        t += ss[i]
        comp[i] = t
        if kk[i] == 0:
            onb += 1
            if onb > cap:
                return False, arr_out, cmp_out, 0, 0
        else:
            onb -= 1
            if t > dd[i]:
                return False, arr_out, cmp_out, 0, 0
            delay += t - ee[i]
        cur = v
    return True, arr_out, cmp_out, int(drive), int(delay)


def enumerate_insertions(verts, kinds, svc, ddl, early,
                         anchor, anchor_time, epoch,
                         onboard0, capacity, dist,
                         stores, goal, pick_svc, drop_svc,
                         req_ddl, req_early,
                         alpha_num, alpha_den, out):
    """Feasible (p, q) insertions with the best pickup store each.

    Writes rows (p, q, store, drive, delay, end) to ``out`` and
    returns the row count. Store scan keeps the first minimum of
    (alpha_den - alpha_num) * delay + alpha_num * drive.
    """
    cdef i64[:] bv = np.ascontiguousarray(verts, dtype=np.int64)
    cdef i64[:] bk = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef i64[:] bs = np.ascontiguousarray(svc, dtype=np.int64)
    cdef i64[:] bd = np.ascontiguousarray(ddl, dtype=np.int64)
    cdef i64[:] be = np.ascontiguousarray(early, dtype=np.int64)
    cdef i64[:, :] D = np.ascontiguousarray(dist, dtype=np.int64)
    cdef i64[:] st = np.ascontiguousarray(stores, dtype=np.int64)
    cdef i64[:, :] res = out
    cdef Py_ssize_t n = bv.shape[0]
    cdef Py_ssize_t ns = st.shape[0]
    cdef i64 t0 = anchor_time
    cdef i64 ep = epoch
    cdef Py_ssize_t a0 = anchor
    cdef i64 onb0 = onboard0, cap = capacity
    cdef i64 g = goal
    cdef i64 psvc = pick_svc, dsvc = drop_svc
    cdef i64 rddl = req_ddl, rearly = req_early
    cdef i64 wd = (<i64>alpha_den) - (<i64>alpha_num)
    cdef i64 wf = alpha_num
    cdef Py_ssize_t rows = 0
    cdef Py_ssize_t p, q, si, pos, i, v, cur
    cdef i64 t, drive, delay, onb, leg, c
    cdef i64 kind, sv, ddv, eav
    cdef int ok
    cdef i64 best_c = 0, best_s = 0, best_drive = 0, best_delay = 0, best_end = 0
    cdef int have
    if ep > t0:
        t0 = ep
    for p in range(n + 1):
        for q in range(p, n + 1):
            have = 0
            for si in range(ns):
                t = t0
                drive = 0
                delay = 0
                onb = onb0
                i = 0
                ok = 1
                cur = a0
                for pos in range(n + 2):
                    if pos == p:
                        v = <Py_ssize_t>st[si]; kind = 0; sv = psvc; ddv = 0; eav = 0
                    elif pos == q + 1:
                        v = <Py_ssize_t>g; kind = 1; sv = dsvc; ddv = rddl; eav = rearly
                    else:
                        v = <Py_ssize_t>bv[i]; kind = bk[i]; sv = bs[i]
                        ddv = bd[i]; eav = be[i]
                        i += 1
                    leg = D[cur, v]
                    if leg < 0:
                        ok = 0
                        break
                    t += leg + sv
                    drive += leg
                    if kind == 0:
                        onb += 1
                        if onb > cap:
                            ok = 0
                            break
                    else:
                        onb -= 1
                        if t > ddv:
                            ok = 0
                            break
                        delay += t - eav
                    cur = v
                if not ok:
                    continue
                c = wd * delay + wf * drive
                if (not have) or c < best_c:
                    have = 1
                    best_c = c
                    best_s = st[si]
                    best_drive = drive
                    best_delay = delay
                    best_end = t
            if have:
                res[rows, 0] = p
                res[rows, 1] = q
                res[rows, 2] = best_s
                res[rows, 3] = best_drive
                res[rows, 4] = best_delay
                res[rows, 5] = best_end
                rows += 1
    return rows


def solve_dense_assignment(cost):
    """Min-sum perfect assignment; returns (col_of_row, u, v)."""
    C_arr = np.ascontiguousarray(cost, dtype=np.int64)
    if C_arr.ndim != 2 or C_arr.shape[0] != C_arr.shape[1]:
        raise ValueError("cost matrix must be square")
    cdef i64[:, :] C = C_arr
    cdef Py_ssize_t N = C.shape[0]
    col_out = np.full(N, -1, dtype=np.int64)
    if N == 0:
        z = np.zeros(0, dtype=np.int64)
        return col_out, z, z.copy()
    u_arr = np.zeros(N + 1, dtype=np.int64)
    v_arr = np.zeros(N + 1, dtype=np.int64)
    p_arr = np.zeros(N + 1, dtype=np.int64)
    way_arr = np.zeros(N + 1, dtype=np.int64)
    minv_arr = np.zeros(N + 1, dtype=np.int64)
    used_arr = np.zeros(N + 1, dtype=np.uint8)
    cdef i64[:] u = u_arr
    cdef i64[:] v = v_arr
    cdef i64[:] p = p_arr
    cdef i64[:] way = way_arr
    cdef i64[:] minv = minv_arr
    cdef unsigned char[:] used = used_arr
    cdef i64[:] col_of_row = col_out
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef i64 delta, curv
    cdef int fail = 0
    with nogil:
        for i in range(1, N + 1):
            p[0] = i
            j0 = 0
            for j in range(N + 1):
                minv[j] = _INF
                used[j] = 0
            while True:
                used[j0] = 1
                i0 = <Py_ssize_t>p[j0]
                delta = _INF
                j1 = -1
                for j in range(1, N + 1):
                    if not used[j]:
                        curv = C[i0 - 1, j - 1] - u[i0] - v[j]
                        if curv < minv[j]:
                            minv[j] = curv
                            way[j] = j0
                        if minv[j] < delta:
                            delta = minv[j]
                            j1 = j
                if delta >= _INF:
                    fail = 1
                    break
                for j in range(N + 1):
                    if used[j]:
                        u[p[j]] += delta
                        v[j] -= delta
                    else:
                        minv[j] -= delta
                j0 = j1
                if p[j0] == 0:
                    break
            if fail:
                break
            while j0:
                j1 = <Py_ssize_t>way[j0]
                p[j0] = p[j1]
                j0 = j1
    if fail:
        raise ValueError("no finite perfect assignment")
    for j in range(1, N + 1):
        col_of_row[<Py_ssize_t>p[j] - 1] = j - 1
    return col_out, u_arr[1:].copy(), v_arr[1:].copy()
