"""Exact solvers for the two optimization problems in the pipeline.

solve_assignment picks one candidate route per vehicle so that every
pending request is served exactly once at minimum total cost (a set
partitioning problem, solved by depth-first branch and bound).

solve_matching selects task-to-task chaining arcs, at most one
predecessor and one successor per task, minimizing total arc weight
(min-cost bipartite matching via a dense shortest-augmenting-path
assignment kernel on a dummy-padded square matrix).

Both return the exact optimum and break cost ties deterministically:
assignment prefers the lexicographically smallest sorted route-id
vector, matching the lexicographically smallest sorted arc list
(a shorter list that is a prefix of a longer one wins). Brute force
references implement the same rules independently for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfeasibleError, InstanceTooLargeError, SolverError

__all__ = [
    "RouteColumn",
    "AssignmentInstance",
    "MatchingInstance",
    "solve_assignment",
    "brute_force_assignment",
    "solve_matching",
    "brute_force_matching",
]

_BIG = 1 << 40

# Fixed-point denominator for frozen Lagrangian multipliers in the
# assignment search; any positive value keeps the bound exact.
_U_SCALE = 1024


@dataclass(frozen=True)
class RouteColumn:
    """One candidate route in an assignment instance."""

    id: int
    vehicle: object
    serves: frozenset
    cost: int


@dataclass(frozen=True)
class AssignmentInstance:
    """Snapshot assignment problem.

    Every request must be covered by exactly one selected column, each
    vehicle may execute at most one column, and mandatory vehicles
    must receive one. Costs are non-negative integers.

    vehicle_capacity raises the per-vehicle column limit above one for
    listed vehicles. A capacity of k stands for k interchangeable
    vehicles parked at the same spot, which keeps the search free of
    the label symmetry separate copies would create. Mandatory
    vehicles are single real vehicles and must keep capacity one.
    """

    columns: tuple
    requests: tuple
    mandatory_vehicles: frozenset = frozenset()
    vehicle_capacity: tuple = ()

    def capacity_map(self) -> dict:
        out = {}
        for vehicle, cap in self.vehicle_capacity:
            if not isinstance(cap, int) or cap < 1:
                raise ValueError(
                    f"vehicle {vehicle!r}: capacity must be a positive "
                    f"integer, got {cap!r}")
            if vehicle in out:
                raise ValueError(
                    f"vehicle {vehicle!r} listed twice in vehicle_capacity")
            if cap > 1 and vehicle in self.mandatory_vehicles:
                raise ValueError(
                    f"mandatory vehicle {vehicle!r} cannot have "
                    f"capacity {cap}")
            out[vehicle] = cap
        return out


@dataclass(frozen=True)
class MatchingInstance:
    """Chaining problem: nodes are task ids, arcs (i, j, weight)."""

    nodes: tuple
    arcs: tuple


def _assignment_elements(instance: AssignmentInstance):
    """Unify requests and mandatory-vehicle tokens into one element set.

    A column covers its served requests plus, when its vehicle is
    mandatory, the vehicle's token; exact cover of all elements then
    encodes both the exactly-once and mandatory constraints.
    """
    requests = sorted(set(instance.requests))
    if len(requests) != len(instance.requests):
        raise ValueError("duplicate request ids in assignment instance")
    mandatory = sorted(instance.mandatory_vehicles)
    elements = [("r", r) for r in requests] + [("v", v) for v in mandatory]
    element_pos = {e: k for k, e in enumerate(elements)}
    request_set = set(requests)
    mandatory_set = set(mandatory)

    seen_ids = set()
    cols = []
    for col in instance.columns:
        if col.id in seen_ids:
            raise ValueError(f"duplicate route id {col.id}")
        seen_ids.add(col.id)
        if not isinstance(col.cost, int) or col.cost < 0:
            raise ValueError(
                f"route {col.id}: cost must be a non-negative integer")
        unknown = [r for r in col.serves if r not in request_set]
        if unknown:
            raise ValueError(
                f"route {col.id} serves unknown request {unknown[0]!r}")
        if not col.serves and col.vehicle not in mandatory_set:
            raise ValueError(
                f"route {col.id} covers nothing: empty serves on a "
                f"non-mandatory vehicle")
        mask = 0
        for r in col.serves:
            mask |= 1 << element_pos[("r", r)]
        if col.vehicle in mandatory_set:
            mask |= 1 << element_pos[("v", col.vehicle)]
        cols.append((col.id, col.vehicle, mask, col.cost, len(col.serves)
                     + (1 if col.vehicle in mandatory_set else 0)))
    return elements, cols


def solve_assignment(instance: AssignmentInstance):
    """Exact minimum-cost set partitioning over candidate routes.

    Returns the selected route ids as a sorted tuple. Raises
    InfeasibleError naming an uncoverable request or unservable
    mandatory vehicle when no feasible selection exists.
    """
    elements, cols = _assignment_elements(instance)
    n_elem = len(elements)
    if n_elem == 0:
        return ()

    static_count = [0] * n_elem
    for _cid, _veh, mask, _cost, _sz in cols:
        m = mask
        while m:
            b = m & -m
            static_count[b.bit_length() - 1] += 1
            m ^= b
    for k, c in enumerate(static_count):
        if c == 0:
            kind, value = elements[k]
            if kind == "r":
                raise InfeasibleError(
                    f"request {value!r} cannot be covered by any "
                    f"candidate route")
            raise InfeasibleError(
                f"mandatory vehicle {value!r} has no candidate route")

    n_req = len(instance.requests)
    req_full = (1 << n_req) - 1

    vehicles = sorted({veh for _cid, veh, _m, _c, _s in cols}, key=repr)
    veh_pos = {v: k for k, v in enumerate(vehicles)}
    n_veh = len(vehicles)
    cap_map = instance.capacity_map()
    capacity = [cap_map.get(v, 1) for v in vehicles]
    is_mandatory = [v in instance.mandatory_vehicles for v in vehicles]

    # Per-vehicle candidate lists over request bits only; the mandatory
    # token is tracked as a per-vehicle obligation instead of a mask bit.
    vcols = [[] for _ in range(n_veh)]
    for cid, veh, mask, cost, _sz in cols:
        vcols[veh_pos[veh]].append((cost, cid, mask & req_full))
    for lst in vcols:
        lst.sort()

    # Presolve: a mandatory vehicle whose surviving candidates have
    # shrunk to a single column must take it in every feasible
    # selection, so commit it and propagate. Typical snapshots are
    # dominated by vehicles just continuing their plan, which this
    # resolves without touching the search.
    forced_ids = []
    forced_mask = 0
    mand_open = [is_mandatory[vp] for vp in range(n_veh)]
    changed = True
    while changed:
        changed = False
        for vp in range(n_veh):
            if not mand_open[vp]:
                continue
            avail = [e for e in vcols[vp] if not (e[2] & forced_mask)]
            if not avail:
                raise InfeasibleError(
                    "assignment instance admits no feasible selection "
                    "(conflicting coverage requirements)")
            if len(avail) == 1:
                _cost, cid, rmask = avail[0]
                forced_ids.append(cid)
                forced_mask |= rmask
                mand_open[vp] = False
                vcols[vp] = []
                changed = True
    if forced_mask or forced_ids:
        for vp in range(n_veh):
            vcols[vp] = [e for e in vcols[vp] if not (e[2] & forced_mask)]
        for ri in range(n_req):
            if forced_mask >> ri & 1:
                continue
            if not any(e[2] >> ri & 1
                       for lst in vcols for e in lst):
                raise InfeasibleError(
                    "assignment instance admits no feasible selection "
                    "(conflicting coverage requirements)")
        if forced_mask == req_full and not any(mand_open):
            return tuple(sorted(forced_ids))
        # Renumber the residual requests into a dense bit range.
        keep = [ri for ri in range(n_req) if not (forced_mask >> ri & 1)]
        new_bit = {ri: i for i, ri in enumerate(keep)}
        n_req = len(keep)
        req_full = (1 << n_req) - 1
        for vp in range(n_veh):
            packed = []
            for cost, cid, rmask in vcols[vp]:
                m = rmask
                nm = 0
                while m:
                    b = m & -m
                    nm |= 1 << new_bit[b.bit_length() - 1]
                    m ^= b
                packed.append((cost, cid, nm))
            vcols[vp] = packed
        is_mandatory = mand_open

    # Greedy feasible selection: cheapest disjoint cover per request,
    # then an idle column for every mandatory vehicle still unused.
    # Doubles as the first incumbent and as the subgradient step scale.
    all_cols = sorted((cost, cid, rmask, vp)
                      for vp in range(n_veh)
                      for cost, cid, rmask in vcols[vp])

    def greedy_selection():
        covered = 0
        remaining = list(capacity)
        unused_mand = list(is_mandatory)
        cost = 0
        chosen = []
        for ri in range(n_req):
            if covered >> ri & 1:
                continue
            for ccost, cid, rmask, vp in all_cols:
                if rmask >> ri & 1 and remaining[vp] > 0 \
                        and not (rmask & covered):
                    covered |= rmask
                    remaining[vp] -= 1
                    cost += ccost
                    chosen.append(cid)
                    unused_mand[vp] = False
                    break
            else:
                return None
        for vp in range(n_veh):
            if unused_mand[vp]:
                if remaining[vp] == 0:
                    return None
                for ccost, cid, rmask in vcols[vp]:
                    if not (rmask & covered):
                        covered |= rmask
                        remaining[vp] -= 1
                        cost += ccost
                        chosen.append(cid)
                        break
                else:
                    return None
        return cost, tuple(sorted(chosen))

    greedy = greedy_selection()
    ub_scale = greedy[0] if greedy else sum(c for c, *_x in all_cols)

    # Root Lagrangian relaxation of the exactly-once constraints: for a
    # multiplier vector u, every feasible completion costs at least
    # sum(u) plus each vehicle's best reduced-cost response (mandatory
    # vehicles answer with their single cheapest column, optional ones
    # with their most negative columns up to capacity). The subgradient
    # ascent below only tunes u for pruning power; bound validity holds
    # for any u, so float drift here cannot change the returned optimum.
    u = [0.0] * n_req
    best_u = u
    best_lag = None
    step_scale = 1.0
    rounds = 400 if n_req >= 10 else 80
    for _it in range(rounds):
        lag = 0.0
        grad = [1.0] * n_req
        for vp in range(n_veh):
            if is_mandatory[vp]:
                pick_rc = None
                pick_mask = 0
                for cost, _cid, rmask in vcols[vp]:
                    rc = float(cost)
                    m = rmask
                    while m:
                        b = m & -m
                        rc -= u[b.bit_length() - 1]
                        m ^= b
                    if pick_rc is None or rc < pick_rc:
                        pick_rc = rc
                        pick_mask = rmask
                lag += pick_rc
                m = pick_mask
                while m:
                    b = m & -m
                    grad[b.bit_length() - 1] -= 1.0
                    m ^= b
            else:
                negatives = []
                for cost, _cid, rmask in vcols[vp]:
                    rc = float(cost)
                    m = rmask
                    while m:
                        b = m & -m
                        rc -= u[b.bit_length() - 1]
                        m ^= b
                    if rc < 0.0:
                        negatives.append((rc, rmask))
                negatives.sort(key=lambda t: t[0])
                for rc, rmask in negatives[:capacity[vp]]:
                    lag += rc
                    m = rmask
                    while m:
                        b = m & -m
                        grad[b.bit_length() - 1] -= 1.0
                        m ^= b
        lag += sum(u)
        if best_lag is None or lag > best_lag:
            best_lag = lag
            best_u = u[:]
        norm = 0.0
        for g in grad:
            norm += g * g
        if norm == 0.0:
            break
        step = step_scale * (ub_scale - lag) / norm
        if step <= 0.0:
            step = step_scale
        u = [u[i] + step * grad[i] for i in range(n_req)]
        step_scale *= 0.98

    # Freeze the multipliers to integers (fixed-point, denominator
    # _U_SCALE) so every pruning comparison is exact arithmetic.
    ui = [round(x * _U_SCALE) for x in best_u]
    u_total = sum(ui)

    # Scaled reduced cost per column; per-vehicle lists sorted by it so
    # the bound's negative-prefix scan can stop at the first rc >= 0.
    vrc = [[] for _ in range(n_veh)]
    for vp in range(n_veh):
        for cost, cid, rmask in vcols[vp]:
            rc = cost * _U_SCALE
            m = rmask
            while m:
                b = m & -m
                rc -= ui[b.bit_length() - 1]
                m ^= b
            vrc[vp].append((rc, cost, cid, rmask, vp))
        vrc[vp].sort()

    cover = [[] for _ in range(n_req)]
    for vp in range(n_veh):
        for entry in vrc[vp]:
            m = entry[3]
            while m:
                b = m & -m
                cover[b.bit_length() - 1].append(entry)
                m ^= b
    for lst in cover:
        lst.sort()

    remaining = list(capacity)
    used_mand = [False] * n_veh
    mand_left = sum(1 for flag in is_mandatory if flag)

    def completion_bound(covered: int, u_left: int):
        # Lower bound (scaled by _U_SCALE) on any completion from this
        # node; None when an unused mandatory vehicle has no fitting
        # column left, which proves the node dead outright.
        total = u_left
        for vp in range(n_veh):
            slots = remaining[vp]
            if is_mandatory[vp] and not used_mand[vp]:
                for rc, _cost, _cid, rmask, _vp in vrc[vp]:
                    if not (rmask & covered):
                        total += rc
                        break
                else:
                    return None
            elif slots > 0:
                for rc, _cost, _cid, rmask, _vp in vrc[vp]:
                    if rc >= 0:
                        break
                    if not (rmask & covered):
                        total += rc
                        slots -= 1
                        if slots == 0:
                            break
        return total

    best: list = [None, None]  # [cost, sorted id tuple]
    if greedy:
        best[0], best[1] = greedy
    chosen_ids: list = []

    # Transposition table: distinct column subsets can produce the same
    # search state (covered requests, per-vehicle usage, open
    # obligations). Identical states share one completion set, and
    # because equal states imply equal prefix sizes, a prefix that is
    # worse on (cost, sorted ids) can never beat the stored one on the
    # final (cost, sorted ids) either, so revisits prune exactly.
    seen: dict = {}

    def dfs(covered: int, cost: int, u_left: int):
        nonlocal mand_left
        state = (covered, tuple(remaining), tuple(used_mand))
        mark = (cost, tuple(sorted(chosen_ids)))
        prior = seen.get(state)
        if prior is not None and prior <= mark:
            return
        seen[state] = mark
        if covered == req_full and mand_left == 0:
            cand = (cost, tuple(sorted(chosen_ids)))
            if best[0] is None or cand < (best[0], best[1]):
                best[0], best[1] = cand
            return
        if covered != req_full:
            # Fail-first: branch on the request with the fewest columns
            # still available to cover it.
            branch = -1
            fewest = None
            unc = ~covered & req_full
            while unc:
                b = unc & -unc
                ri = b.bit_length() - 1
                n_avail = 0
                for _rc, _cost, _cid, rmask, vp in cover[ri]:
                    if remaining[vp] > 0 and not (rmask & covered):
                        n_avail += 1
                        if fewest is not None and n_avail >= fewest:
                            break
                if fewest is None or n_avail < fewest:
                    fewest = n_avail
                    branch = ri
                    if n_avail == 0:
                        return
                unc ^= b
            candidates = cover[branch]
        else:
            # Only mandatory obligations left; give the first unused
            # vehicle its cheapest remaining column.
            vp0 = next(vp for vp in range(n_veh)
                       if is_mandatory[vp] and not used_mand[vp])
            candidates = vrc[vp0]

        # Score each feasible child by its completion bound, prune
        # against the incumbent, then recurse best-bound-first. The
        # strict > keeps every cost tie alive for the id tie-break.
        survivors = []
        for rc, ccost, cid, rmask, vp in candidates:
            if remaining[vp] == 0 or (rmask & covered):
                continue
            remaining[vp] -= 1
            flipped = False
            if is_mandatory[vp] and not used_mand[vp]:
                used_mand[vp] = True
                mand_left -= 1
                flipped = True
            nu = u_left
            m = rmask
            while m:
                b = m & -m
                nu -= ui[b.bit_length() - 1]
                m ^= b
            bound = completion_bound(covered | rmask, nu)
            remaining[vp] += 1
            if flipped:
                used_mand[vp] = False
                mand_left += 1
            if bound is None:
                continue
            new_cost = cost + ccost
            if best[0] is not None \
                    and new_cost * _U_SCALE + bound > best[0] * _U_SCALE:
                continue
            survivors.append((new_cost * _U_SCALE + bound, cid,
                              new_cost, nu, rmask, vp))
        survivors.sort()
        for key, cid, new_cost, nu, rmask, vp in survivors:
            if remaining[vp] == 0 or (rmask & covered):
                continue
            if best[0] is not None and key > best[0] * _U_SCALE:
                continue
            remaining[vp] -= 1
            flipped = False
            if is_mandatory[vp] and not used_mand[vp]:
                used_mand[vp] = True
                mand_left -= 1
                flipped = True
            chosen_ids.append(cid)
            dfs(covered | rmask, new_cost, nu)
            chosen_ids.pop()
            remaining[vp] += 1
            if flipped:
                used_mand[vp] = False
                mand_left += 1

    dfs(0, 0, u_total)
    if best[0] is None:
        raise InfeasibleError(
            "assignment instance admits no feasible selection "
            "(conflicting coverage requirements)")
    if forced_ids:
        return tuple(sorted(forced_ids + list(best[1])))
    return best[1]


def brute_force_assignment(instance: AssignmentInstance, *,
                           max_routes: int = 15):
    """Reference solver: exhaustive subset enumeration, same tie rule.

    Checks feasibility directly against the instance definition
    (disjoint serves, full request coverage, per-vehicle column limits,
    every mandatory vehicle used) without the element encoding the
    production solver relies on.
    """
    if len(instance.columns) > max_routes:
        raise InstanceTooLargeError(
            f"brute force assignment limited to {max_routes} routes, "
            f"got {len(instance.columns)}")
    all_requests = frozenset(instance.requests)
    mandatory = frozenset(instance.mandatory_vehicles)
    cap_map = instance.capacity_map()
    cols = sorted(instance.columns, key=lambda c: c.id)
    for col in cols:
        if not col.serves and col.vehicle not in mandatory:
            raise ValueError(
                f"route {col.id} covers nothing: empty serves on a "
                f"non-mandatory vehicle")
    best = [None]

    def rec(k, served, veh_count, cost, chosen):
        if k == len(cols):
            if (served == all_requests
                    and all(v in veh_count for v in mandatory)):
                cand = (cost, tuple(sorted(chosen)))
                if best[0] is None or cand < best[0]:
                    best[0] = cand
            return
        rec(k + 1, served, veh_count, cost, chosen)
        col = cols[k]
        taken = veh_count.get(col.vehicle, 0)
        if not col.serves & served and taken < cap_map.get(col.vehicle, 1):
            bumped = dict(veh_count)
            bumped[col.vehicle] = taken + 1
            rec(k + 1, served | col.serves, bumped,
                cost + col.cost, chosen + [col.id])

    rec(0, frozenset(), {}, 0, [])
    if best[0] is None:
        raise InfeasibleError(
            "assignment instance admits no feasible selection")
    return best[0][1]


def _validate_matching(instance: MatchingInstance):
    nodes = sorted(set(instance.nodes))
    if len(nodes) != len(instance.nodes):
        raise ValueError("duplicate node ids in matching instance")
    pos = {n: k for k, n in enumerate(nodes)}
    seen = set()
    arcs = []
    for i, j, w in instance.arcs:
        if i not in pos or j not in pos:
            raise ValueError(f"arc ({i!r}, {j!r}) references unknown node")
        if i == j:
            raise ValueError(f"self arc on node {i!r}")
        if (i, j) in seen:
            raise ValueError(f"duplicate arc ({i!r}, {j!r})")
        seen.add((i, j))
        if not isinstance(w, int):
            raise ValueError(f"arc ({i!r}, {j!r}): weight must be int")
        if abs(w) >= _BIG:
            raise ValueError(f"arc ({i!r}, {j!r}): weight too large")
        arcs.append((pos[i], pos[j], w))
    arcs.sort(key=lambda a: (a[0], a[1]))
    return nodes, arcs


def solve_matching(instance: MatchingInstance):
    """Minimum-weight matching over directed chaining arcs.

    Every node may have at most one outgoing and one incoming selected
    arc. Arcs with non-negative weight are never part of a strictly
    improving solution, but zero-weight arcs may appear in the
    canonical answer when they lexicographically lower the sorted arc
    list. Returns the chosen arcs as a tuple of (i, j) pairs sorted
    ascending.
    """
    nodes, arcs = _validate_matching(instance)
    n = len(nodes)
    kept = [(i, j, w) for i, j, w in arcs if w <= 0]
    if n == 0 or not kept:
        return ()

    size = 2 * n
    C = np.full((size, size), _BIG, dtype=np.int64)
    C[:n, n:] = 0
    C[n:, :] = 0
    warr = {}
    for i, j, w in kept:
        C[i, j] = w
        warr[(i, j)] = w

    col_of_row, u, v = kernels.solve_dense_assignment(C)
    row_match = col_of_row.astype(np.int64)
    col_match = np.full(size, -1, dtype=np.int64)
    for r in range(size):
        col_match[int(row_match[r])] = r

    value = 0
    for r in range(n):
        c = int(row_match[r])
        if c < n:
            if (r, c) not in warr:
                raise SolverError("matching kernel selected a missing arc")
            value += warr[(r, c)]

    tight = (u[:, None] + v[None, :] == C) & (C < _BIG)

    locked_row = np.zeros(size, dtype=bool)
    locked_col = np.zeros(size, dtype=bool)
    chosen = []
    chosen_sum = 0
    for i, j, w in kept:
        if chosen_sum == value:
            break
        if locked_row[i] or locked_col[j] or not tight[i, j]:
            continue
        if int(row_match[i]) == j:
            ok = True
        else:
            ok = _force_arc(i, j, row_match, col_match, tight,
                            locked_row, locked_col)
        if ok:
            chosen.append((nodes[i], nodes[j]))
            chosen_sum += w
            locked_row[i] = True
            locked_col[j] = True
        else:
            tight[i, j] = False
    if chosen_sum != value:
        raise SolverError("matching canonicalization failed to reach "
                          "the optimal value")
    return tuple(chosen)


def _force_arc(i, j, row_match, col_match, tight, locked_row, locked_col):
    """Try to rebuild a perfect matching in the tight graph with (i, j).

    Displaces the current partners of i and j, then searches one
    augmenting path for the displaced row. Mutates the match arrays on
    success; leaves them untouched on failure.
    """
    rm = row_match.copy()
    cm = col_match.copy()
    j_old = int(rm[i])
    i_old = int(cm[j])
    rm[i] = j
    cm[j] = i
    rm[i_old] = -1
    cm[j_old] = -1

    size = rm.shape[0]
    visited = np.zeros(size, dtype=bool)
    # The forced pair must not be disturbed while augmenting.
    stack = [(i_old, iter(np.nonzero(tight[i_old])[0]), -1)]
    found = False
    while stack:
        row, it, _in_col = stack[-1]
        advanced = False
        for c_np in it:
            c = int(c_np)
            if visited[c] or locked_col[c] or c == j:
                continue
            visited[c] = True
            owner = int(cm[c])
            if owner == -1:
                # Augment along the stack.
                rm[row] = c
                cm[c] = row
                for t in range(len(stack) - 1, 0, -1):
                    _r, _it, in_col = stack[t]
                    prev_row = stack[t - 1][0]
                    rm[prev_row] = in_col
                    cm[in_col] = prev_row
                found = True
                break
            if owner == i or locked_row[owner]:
                continue
            stack.append((owner, iter(np.nonzero(tight[owner])[0]), c))
            advanced = True
            break
        if found:
            break
        if not advanced:
            stack.pop()
    if not found:
        return False
    row_match[:] = rm
    col_match[:] = cm
    return True


def brute_force_matching(instance: MatchingInstance, *,
                         max_nodes: int = 10):
    """Reference solver: bitmask DP over successor choices.

    The DP value is the pair (cost, chosen arc tuple); tuple comparison
    realizes exactly the documented tie rule, including preferring a
    prefix over any extension.
    """
    nodes, arcs = _validate_matching(instance)
    n = len(nodes)
    if n > max_nodes:
        raise InstanceTooLargeError(
            f"brute force matching limited to {max_nodes} nodes, got {n}")
    adj = [[] for _ in range(n)]
    for i, j, w in arcs:
        adj[i].append((j, w))
    memo = {}

    def rec(i, mask):
        if i == n:
            return (0, ())
        key = (i, mask)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best_cost, best_arcs = rec(i + 1, mask)
        for j, w in adj[i]:
            if mask >> j & 1:
                continue
            c, rest = rec(i + 1, mask | (1 << j))
            cand_cost = c + w
            cand_arcs = ((i, j),) + rest
            if (cand_cost, cand_arcs) < (best_cost, best_arcs):
                best_cost, best_arcs = cand_cost, cand_arcs
        memo[key] = (best_cost, best_arcs)
        return memo[key]

    _cost, chosen = rec(0, 0)
    return tuple((nodes[i], nodes[j]) for i, j in chosen)
