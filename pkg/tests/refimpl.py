"""Independent reference implementations used to cross-check results.

Everything here is deliberately written with different algorithms and
data layouts than the package code it checks: plain lists instead of
CSR arrays, Bellman-Ford instead of Dijkstra, augmenting-path search
instead of the dense assignment kernel, a replay that re-drives task
logs from scratch. Slow but obviously correct at test sizes.
"""

from __future__ import annotations

from fractions import Fraction

from flashfleet.solver import AssignmentInstance, MatchingInstance, \
    RouteColumn


def bellman_ford(num_vertices, edges, source):
    """Distances from source over an edge list [(u, v, w)]; -1 unreachable."""
    dist = [None] * num_vertices
    dist[source] = 0
    for _ in range(num_vertices - 1):
        changed = False
        for u, v, w in edges:
            du = dist[u]
            if du is None:
                continue
            if dist[v] is None or du + w < dist[v]:
                dist[v] = du + w
                changed = True
        if not changed:
            break
    return [-1 if d is None else d for d in dist]


def max_matching_size(nodes, arcs):
    """Maximum bipartite matching cardinality over (tail, head) arcs."""
    heads = {}
    for arc in arcs:
        heads.setdefault(arc[0], []).append(arc[1])

    match_of_head = {}

    def augment(tail, blocked):
        for head in heads.get(tail, ()):
            if head in blocked:
                continue
            blocked.add(head)
            owner = match_of_head.get(head)
            if owner is None or augment(owner, blocked):
                match_of_head[head] = tail
                return True
        return False

    size = 0
    for tail in nodes:
        if augment(tail, set()):
            size += 1
    return size


def replay_task(task, oracle, requests_by_id, *, capacity, t_load_s,
                t_deliver_s):
    """Re-drive one task from its stop and via logs.

    Returns the recomputed (drive_s, delay_s, end_vertex, end_time).
    Asserts physical consistency along the way: every leg takes exactly
    the shortest-path time, services last exactly their configured
    duration, pickups precede dropoffs, the onboard load never exceeds
    capacity, and every dropoff lands by its request's deadline.
    """
    merged = []
    si = vi = 0
    stops = list(task.stops)
    vias = list(task.via)
    while si < len(stops) or vi < len(vias):
        take_stop = vi >= len(vias) or (
            si < len(stops) and stops[si].arrival <= vias[vi][0])
        if take_stop:
            merged.append(("stop", stops[si]))
            si += 1
        else:
            merged.append(("via", vias[vi]))
            vi += 1

    vertex = task.start_vertex
    free_at = task.start_time
    drive = 0
    delay = 0
    onboard = set()
    for kind, item in merged:
        if kind == "via":
            t, via_vertex = item
            leg = oracle.time(vertex, via_vertex)
            assert free_at + leg == t, "via passage off the timeline"
            drive += leg
            vertex = via_vertex
            free_at = t
            continue
        leg = oracle.time(vertex, item.vertex)
        assert free_at + leg == item.arrival, "stop arrival off the timeline"
        svc = t_load_s if item.kind == "pickup" else t_deliver_s
        assert item.completion == item.arrival + svc, "service time mismatch"
        if item.kind == "pickup":
            onboard.add(item.request)
            assert len(onboard) <= capacity, "capacity exceeded"
        else:
            assert item.request in onboard, "dropoff without pickup"
            onboard.discard(item.request)
            req = requests_by_id[item.request]
            assert item.completion <= req.deadline, "deadline violated"
            delay += item.completion - req.earliest_dropoff
        drive += leg
        vertex = item.vertex
        free_at = item.completion
    assert not onboard, "task ended with requests onboard"
    return drive, delay, vertex, free_at


def replay_plan(plan, tasks_by_id, oracle):
    """Check a chained plan's relocation legs and aggregates.

    Every leg must depart at the previous task's end, take the
    shortest-path time, and land no later than the next task's start.
    Returns the recomputed (drive_s, delay_s, serves).
    """
    chain = [tasks_by_id[tid] for tid in plan.tasks]
    assert plan.start_vertex == chain[0].start_vertex
    assert plan.start_time == chain[0].start_time
    assert plan.end_vertex == chain[-1].end_vertex
    assert plan.end_time == chain[-1].end_time
    assert len(plan.legs) == len(chain) - 1
    drive = sum(t.drive_s for t in chain)
    delay = sum(t.delay_s for t in chain)
    serves = []
    for t in chain:
        serves.extend(t.serves)
    for leg, prev, nxt in zip(plan.legs, chain, chain[1:]):
        assert leg.from_task == prev.id and leg.to_task == nxt.id
        assert leg.depart_time == prev.end_time
        assert leg.travel_s == oracle.time(prev.end_vertex, nxt.start_vertex)
        assert leg.arrive_time == leg.depart_time + leg.travel_s
        assert leg.arrive_time <= nxt.start_time
        assert leg.wait_s == nxt.start_time - leg.arrive_time
        drive += leg.travel_s
    return drive, delay, tuple(sorted(serves))


def objective_from_logs(outcomes, tasks, plans, *, m_fix_s, alpha):
    """Recompute the fleet objective from raw logs only.

    Fleet size is the plan count, delay is summed over served request
    outcomes, and driven time is summed over task drives plus the
    relocation legs recorded in the plans.
    """
    delay = sum(o.delay_s for o in outcomes if o.served)
    drive = sum(t.drive_s for t in tasks)
    drive += sum(leg.travel_s for p in plans for leg in p.legs)
    return (Fraction(m_fix_s * len(plans))
            + (1 - Fraction(alpha)) * delay + Fraction(alpha) * drive)


def random_assignment_instance(rng, *, max_routes=12):
    """Random assignment instance honoring the solver input contract.

    Empty-serves columns appear only on mandatory vehicles; raised
    capacities only on non-mandatory ones. Costs are drawn from a small
    range so ties are frequent and the tie rule gets exercised.
    """
    n_req = int(rng.integers(1, 7))
    requests = tuple(range(n_req))
    n_veh = int(rng.integers(1, 5))
    vehicles = [f"v{k}" for k in range(n_veh)]
    mandatory = frozenset(v for v in vehicles if rng.random() < 0.3)
    capacities = []
    for v in vehicles:
        if v not in mandatory and rng.random() < 0.3:
            capacities.append((v, int(rng.integers(2, 4))))
    n_cols = int(rng.integers(1, max_routes + 1))
    columns = []
    for cid in range(n_cols):
        vehicle = vehicles[int(rng.integers(0, n_veh))]
        low = 0 if vehicle in mandatory else 1
        size = int(rng.integers(low, min(n_req, 4) + 1))
        serves = frozenset(
            int(r) for r in rng.choice(n_req, size=size, replace=False))
        columns.append(RouteColumn(cid, vehicle, serves,
                                   int(rng.integers(0, 30))))
    return AssignmentInstance(tuple(columns), requests, mandatory,
                              tuple(capacities))


def random_matching_instance(rng, *, max_nodes=10):
    """Random matching instance with mixed-sign weights and many ties."""
    n = int(rng.integers(0, max_nodes + 1))
    nodes = tuple(range(n))
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.3:
                arcs.append((i, j, int(rng.integers(-15, 6))))
    return MatchingInstance(nodes, tuple(arcs))
