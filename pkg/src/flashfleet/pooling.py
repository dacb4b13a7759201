"""Rolling-horizon request pooling.

The engine advances a global snapshot clock in fixed steps. At each
epoch it executes committed plans up to the clock, retires vehicles
that finished (their driven route becomes a Task), spawns one
potential vehicle per unserved pending request at that request's
nearest store, enumerates candidate multi-request routes per vehicle
by cheapest-insertion search, and solves an exact set partitioning
problem that assigns every pending request to exactly one route.
Committed plans may be revised at any later epoch as long as already
executed stops and the vehicle's physically committed next vertex are
honored; diverted passages are kept as via waypoints so every task
replays exactly.

Two fleet models share the loop. The flexible model creates vehicles
on demand and retires them when idle, so fleet size is an output. The
fixed model runs a constant fleet placed at stores up front; requests
no vehicle can serve within the delay bound are dropped permanently
via high-cost rejection columns, and each vehicle's activity between
idle periods is closed off as its own task.

All times are integer seconds. Route costs enter the assignment
solver as integer deciseconds, rounded half-even exactly once from an
exact rational; candidate comparisons during generation use the
unrounded scaled integer cost, so no floating point is involved
anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from ._util import as_fraction
from .errors import SolverError, ValidationError
from .network import Network, TravelTimeOracle
from .solver import AssignmentInstance, RouteColumn, solve_assignment

__all__ = [
    "PoolingParams",
    "Stop",
    "Task",
    "RequestOutcome",
    "PoolingResult",
    "run_pooling",
    "build_solo_tasks",
]

PICKUP = "pickup"
DROPOFF = "dropoff"

# Rejection columns (fixed fleet only) must dominate any real route
# cost, which stays far below 10**8 deciseconds on a day-long horizon.
REJECT_COST_DECIS = 10 ** 9


@dataclass(frozen=True)
class PoolingParams:
    """Tunable parameters of the pooling engine.

    max_requests_per_route defaults to the seat capacity when None.
    alpha weighs driven time against delivery delay in route costs:
    cost = (1 - alpha) * delay + alpha * drive. new_vehicle_penalty_s
    is added to every route of a not-yet-enrolled vehicle, which
    discourages fleet growth when positive.
    """

    snapshot_period_s: int = 100
    capacity: int = 4
    max_delay_s: int = 300
    t_load_s: int = 60
    t_deliver_s: int = 60
    alpha: Fraction = Fraction(1)
    new_vehicle_penalty_s: int = 0
    max_routes_per_vehicle: int = 200
    max_requests_per_route: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        for name in ("snapshot_period_s", "capacity",
                     "max_routes_per_vehicle"):
            if not isinstance(getattr(self, name), int) \
                    or getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("max_delay_s", "t_load_s", "t_deliver_s",
                     "new_vehicle_penalty_s"):
            if not isinstance(getattr(self, name), int) \
                    or getattr(self, name) < 0:
                raise ValueError(f"{name} must be a non-negative integer")
        # Any pending request must still admit a fresh solo route at the
        # next epoch, which needs the epoch spacing to fit the delay
        # budget; see the feasibility argument in run_pooling.
        if self.snapshot_period_s > self.max_delay_s:
            raise ValueError(
                "snapshot_period_s must not exceed max_delay_s")
        if self.max_requests_per_route is not None and (
                not isinstance(self.max_requests_per_route, int)
                or self.max_requests_per_route < 1):
            raise ValueError(
                "max_requests_per_route must be a positive integer")

    @property
    def route_request_limit(self) -> int:
        if self.max_requests_per_route is None:
            return self.capacity
        return self.max_requests_per_route


@dataclass(frozen=True)
class Stop:
    """One executed or committed service stop."""

    request: int
    kind: str
    vertex: str
    arrival: int
    completion: int


@dataclass(frozen=True)
class Task:
    """A completed vehicle route, the unit that chaining works on.

    start_vertex/start_time is where and when the vehicle came into
    existence (its spawn store, or the bout anchor for fixed fleets);
    any vehicle positioned there by start_time can replay the task
    exactly. via holds (time, vertex) passages that were physically
    committed but carried no service, so drive_s accounts for the
    route actually driven, not the plans that were revised away.
    """

    id: int
    vehicle: str
    start_vertex: str
    start_time: int
    end_vertex: str
    end_time: int
    serves: tuple
    stops: tuple
    via: tuple
    drive_s: int
    delay_s: int


@dataclass(frozen=True)
class RequestOutcome:
    request: int
    placed_at: int
    served: bool
    vehicle: Optional[str]
    task: Optional[int]
    delivered_at: Optional[int]
    delay_s: Optional[int]


@dataclass(frozen=True)
class PoolingResult:
    tasks: tuple
    outcomes: tuple
    num_epochs: int
    params: PoolingParams
    fixed_fleet: Optional[int]

    @property
    def served_requests(self) -> int:
        return sum(1 for o in self.outcomes if o.served)

    @property
    def total_requests(self) -> int:
        return len(self.outcomes)


class _SeqStop(NamedTuple):
    rid: int
    kind: int  # 0 pickup, 1 dropoff
    poi: int
    vertex: str
    svc: int
    ddl: int
    early: int


class _Cand:
    """A candidate route during generation for one vehicle."""

    __slots__ = ("seq", "serves", "max_rid", "drive", "delay", "end",
                 "cost_scaled", "kept", "arrays")

    def __init__(self, seq, serves, max_rid, drive, delay, end,
                 cost_scaled):
        self.seq = seq
        self.serves = serves
        self.max_rid = max_rid
        self.drive = drive
        self.delay = delay
        self.end = end
        self.cost_scaled = cost_scaled
        self.kept = True
        self.arrays = None

    def kernel_arrays(self):
        if self.arrays is None:
            self.arrays = (
                np.array([s.poi for s in self.seq], dtype=np.int64),
                np.array([s.kind for s in self.seq], dtype=np.int64),
                np.array([s.svc for s in self.seq], dtype=np.int64),
                np.array([s.ddl for s in self.seq], dtype=np.int64),
                np.array([s.early for s in self.seq], dtype=np.int64),
            )
        return self.arrays


class _Vehicle:
    __slots__ = ("id", "spawn_vertex", "spawn_time", "anchor_vertex",
                 "anchor_time", "onboard", "plan", "executed", "via",
                 "en_route", "persistent", "bout_vertex", "bout_depart",
                 "bout_stop_lo", "bout_via_lo")

    def __init__(self, vid, vertex, time, persistent=False):
        self.id = vid
        self.spawn_vertex = vertex
        self.spawn_time = time
        self.anchor_vertex = vertex
        self.anchor_time = time
        self.onboard = set()
        self.plan = []
        self.executed = []
        self.via = []
        self.en_route = False
        self.persistent = persistent
        self.bout_vertex = None
        self.bout_depart = None
        self.bout_stop_lo = 0
        self.bout_via_lo = 0

    def busy(self, epoch: int) -> bool:
        return bool(self.plan) or bool(self.onboard) \
            or self.anchor_time > epoch


class _Engine:
    def __init__(self, network: Network, requests, params: PoolingParams,
                 *, fixed_fleet=None, oracle=None):
        self.net = network
        self.oracle = oracle if oracle is not None \
            else TravelTimeOracle(network)
        self.params = params
        self.fixed_fleet = fixed_fleet
        reqs = sorted(requests, key=lambda r: r.id)
        if len({r.id for r in reqs}) != len(reqs):
            raise ValidationError("duplicate request ids")
        for r in reqs:
            if r.goal not in network.index:
                raise ValidationError(
                    f"request {r.id}: unknown goal vertex {r.goal!r}")
        self.requests = reqs
        self.req_by_id = {r.id: r for r in reqs}
        self.placed_times = sorted(r.placed_at for r in reqs)

        self.vehicles: dict = {}
        self.picked: dict = {}
        self.dropped: set = set()
        self.outcome_vehicle: dict = {}
        self.outcome_time: dict = {}
        self.outcome_task: dict = {}
        self.tasks: list = []

        # Longest sequence an insertion ever walks: onboard dropoffs
        # plus pickup/dropoff pairs for every addable request.
        base_len = params.capacity + 2 * params.route_request_limit
        max_rows = (base_len + 1) * (base_len + 2) // 2
        self._ins_buf = np.empty((max_rows, 6), dtype=np.int64)

        if fixed_fleet is not None:
            self._place_fixed_fleet(fixed_fleet)

    # -- fixed fleet placement ------------------------------------------

    def _place_fixed_fleet(self, count):
        """Distribute the fleet over stores by request volume.

        Largest remainder apportionment on the number of requests whose
        nearest store is each store; ties and the no-demand case fall
        back to store id order.
        """
        if not isinstance(count, int) or count < 0:
            raise ValueError("fixed fleet size must be a non-negative int")
        stores = list(self.net.stores)
        volume = {s: 0 for s in stores}
        for r in self.requests:
            volume[r.nearest_store] += 1
        total = sum(volume.values())
        placement = []
        if total == 0:
            for k in range(count):
                placement.append(stores[k % len(stores)])
        else:
            quotas = [(s, Fraction(count * volume[s], total))
                      for s in stores]
            floors = {s: int(q) for s, q in quotas}
            left = count - sum(floors.values())
            remainder_order = sorted(
                quotas, key=lambda sq: (-(sq[1] - int(sq[1])), sq[0]))
            for s, _q in remainder_order[:left]:
                floors[s] += 1
            for s in stores:
                placement.extend([s] * floors[s])
        placement.sort()
        for k, store in enumerate(placement):
            vid = f"f{k:04d}"
            self.vehicles[vid] = _Vehicle(vid, store, 0, persistent=True)

    # -- main loop -------------------------------------------------------

    def run(self) -> PoolingResult:
        delta = self.params.snapshot_period_s
        epoch = 0
        planned = 0
        while True:
            self._execute(epoch)
            self._retire(epoch)
            pending = self._pending(epoch)
            future = [t for t in self.placed_times if t > epoch]
            busy = any(v.busy(epoch) for v in self.vehicles.values())
            if not pending and not busy:
                if not future:
                    break
                nxt = future[0]
                epoch = -(-nxt // delta) * delta
                continue
            self._plan(epoch, pending)
            planned += 1
            epoch += delta
        self._finalize()
        outcomes = []
        for r in self.requests:
            if r.id in self.outcome_time:
                done = self.outcome_time[r.id]
                outcomes.append(RequestOutcome(
                    r.id, r.placed_at, True, self.outcome_vehicle[r.id],
                    self.outcome_task.get(r.id), done,
                    done - r.earliest_dropoff))
            else:
                outcomes.append(RequestOutcome(
                    r.id, r.placed_at, False, None, None, None, None))
        return PoolingResult(tuple(self.tasks), tuple(outcomes),
                             planned, self.params, self.fixed_fleet)

    def _finalize(self):
        for vid, v in sorted(self.vehicles.items()):
            if v.busy(10 ** 15):
                raise SolverError(
                    f"vehicle {vid} still busy after the horizon drained")
        for r in self.requests:
            if r.id not in self.outcome_time and r.id not in self.dropped:
                raise SolverError(
                    f"request {r.id} was neither delivered nor dropped")
            if self.fixed_fleet is None and r.id in self.dropped:
                raise SolverError(
                    f"request {r.id} dropped outside the fixed-fleet mode")

    # -- per-epoch phases --------------------------------------------------

    def _execute(self, epoch):
        for vid in sorted(self.vehicles):
            v = self.vehicles[vid]
            while v.plan and v.plan[0].arrival <= epoch:
                stop = v.plan.pop(0)
                v.executed.append(stop)
                if stop.kind == PICKUP:
                    v.onboard.add(stop.request)
                    self.picked[stop.request] = vid
                else:
                    v.onboard.discard(stop.request)
                    self.outcome_vehicle[stop.request] = vid
                    self.outcome_time[stop.request] = stop.completion
                v.anchor_vertex = stop.vertex
                v.anchor_time = stop.completion
                v.en_route = False
            if v.plan and v.anchor_time <= epoch:
                # Departed: the next committed vertex will be reached at
                # its planned arrival no matter how plans change later.
                v.anchor_vertex = v.plan[0].vertex
                v.anchor_time = v.plan[0].arrival
                v.en_route = True

    def _retire(self, epoch):
        for vid in sorted(self.vehicles):
            v = self.vehicles[vid]
            if v.plan or v.anchor_time > epoch:
                continue
            if v.onboard:
                raise SolverError(
                    f"vehicle {vid} idle with requests onboard")
            if v.persistent:
                if v.bout_vertex is not None:
                    self._close_task(
                        v, v.bout_vertex, v.bout_depart,
                        v.executed[v.bout_stop_lo:], v.via[v.bout_via_lo:])
                    v.bout_vertex = None
                    v.bout_depart = None
                    v.bout_stop_lo = len(v.executed)
                    v.bout_via_lo = len(v.via)
                continue
            del self.vehicles[vid]
            if not v.executed:
                # Never performed a service: leaves no trace in the
                # fleet accounting.
                continue
            self._close_task(v, v.spawn_vertex, v.spawn_time,
                             v.executed, v.via)

    def _close_task(self, v, start_vertex, start_time, stops, vias):
        if not stops and not vias:
            raise SolverError(f"vehicle {v.id}: empty task at close")
        waypoints = []
        si = vi = 0
        while si < len(stops) or vi < len(vias):
            take_stop = vi >= len(vias) or (
                si < len(stops) and stops[si].arrival <= vias[vi][0])
            if take_stop:
                s = stops[si]
                waypoints.append((s.arrival, s.completion, s.vertex))
                si += 1
            else:
                t, vert = vias[vi]
                waypoints.append((t, t, vert))
                vi += 1
        drive = 0
        prev_vertex = start_vertex
        prev_free = start_time
        for arrival, completion, vertex in waypoints:
            leg = self.oracle.time(prev_vertex, vertex)
            if leg < 0 or prev_free + leg != arrival:
                raise SolverError(
                    f"vehicle {v.id}: inconsistent waypoint timeline")
            drive += leg
            prev_vertex = vertex
            prev_free = completion
        delay = 0
        serves = []
        for s in stops:
            if s.kind == DROPOFF:
                serves.append(s.request)
                delay += s.completion - \
                    self.req_by_id[s.request].earliest_dropoff
        tid = len(self.tasks)
        task = Task(
            id=tid, vehicle=v.id,
            start_vertex=start_vertex, start_time=start_time,
            end_vertex=waypoints[-1][2], end_time=waypoints[-1][1],
            serves=tuple(sorted(serves)), stops=tuple(stops),
            via=tuple(vias), drive_s=drive, delay_s=delay)
        self.tasks.append(task)
        for rid in serves:
            self.outcome_task[rid] = tid
        return task

    def _pending(self, epoch):
        out = []
        for r in self.requests:
            if r.placed_at <= epoch and r.id not in self.picked \
                    and r.id not in self.dropped:
                out.append(r)
        return out

    # -- candidate generation ---------------------------------------------

    def _poi_setup(self, pending):
        pois = set(self.net.stores)
        for r in pending:
            pois.add(r.goal)
        for v in self.vehicles.values():
            pois.add(v.anchor_vertex)
            for s in v.plan:
                pois.add(s.vertex)
            for rid in v.onboard:
                pois.add(self.req_by_id[rid].goal)
        poi_list = sorted(pois)
        poi_idx = {p: k for k, p in enumerate(poi_list)}
        sel = np.array([self.net.index[p] for p in poi_list],
                       dtype=np.int64)
        mat = np.empty((len(poi_list), len(poi_list)), dtype=np.int64)
        for k, p in enumerate(poi_list):
            row = self.oracle.row(self.net.index[p])
            mat[k, :] = row[sel]
        stores_poi = np.array([poi_idx[s] for s in self.net.stores],
                              dtype=np.int64)
        return poi_idx, mat, stores_poi

    def _request_stops(self, r, poi_idx):
        pick = _SeqStop(r.id, 0, -1, "", self.params.t_load_s, 0, 0)
        drop = _SeqStop(r.id, 1, poi_idx[r.goal], r.goal,
                        self.params.t_deliver_s, r.deadline,
                        r.earliest_dropoff)
        return pick, drop

    def _expand(self, cand, r, anchor_poi, anchor_time, epoch,
                onboard0, poi_idx, mat, stores_poi, poi_names):
        """Best feasible insertion of request r into cand, or None."""
        verts, kinds, svc, ddl, early = cand.kernel_arrays()
        rows = kernels.enumerate_insertions(
            verts, kinds, svc, ddl, early,
            anchor_poi, anchor_time, epoch, onboard0,
            self.params.capacity, mat, stores_poi,
            poi_idx[r.goal], self.params.t_load_s,
            self.params.t_deliver_s, r.deadline, r.earliest_dropoff,
            self.params.alpha.numerator, self.params.alpha.denominator,
            self._ins_buf)
        if rows == 0:
            return None
        wd = self.params.alpha.denominator - self.params.alpha.numerator
        wf = self.params.alpha.numerator
        best = None
        best_cost = 0
        for k in range(rows):
            p, q, store, drive, delay, end = (int(x) for x
                                              in self._ins_buf[k])
            c = wd * delay + wf * drive
            if best is None or c < best_cost:
                best = (p, q, store, drive, delay, end)
                best_cost = c
        p, q, store, drive, delay, end = best
        pick = _SeqStop(r.id, 0, store, poi_names[store],
                        self.params.t_load_s, 0, 0)
        drop = _SeqStop(r.id, 1, poi_idx[r.goal], r.goal,
                        self.params.t_deliver_s, r.deadline,
                        r.earliest_dropoff)
        seq = cand.seq[:p] + (pick,) + cand.seq[p:q] + (drop,) \
            + cand.seq[q:]
        return _Cand(seq, cand.serves + (r.id,), r.id,
                     drive, delay, end, best_cost)

    def _generate(self, base, onboard0, anchor_poi, anchor_time, epoch,
                  pending, poi_idx, mat, stores_poi, poi_names):
        """Cheapest-insertion search, beam-limited per vehicle.

        Requests join a candidate in increasing id order, which builds
        every request subset at most once. After each wave the kept set
        is trimmed to the cheapest max_routes_per_vehicle candidates
        (scaled cost, then the served-id tuple), and only survivors are
        expanded further.
        """
        room = self.params.route_request_limit - onboard0
        cap = self.params.max_routes_per_vehicle
        cands = [base]
        frontier = [base]
        for _level in range(max(room, 0)):
            fresh = []
            for cand in frontier:
                if not cand.kept:
                    continue
                for r in pending:
                    if r.id <= cand.max_rid:
                        continue
                    child = self._expand(cand, r, anchor_poi, anchor_time,
                                         epoch, onboard0, poi_idx, mat,
                                         stores_poi, poi_names)
                    if child is not None:
                        fresh.append(child)
            if not fresh:
                break
            cands.extend(fresh)
            if len(cands) > cap:
                cands.sort(key=lambda c: (c.cost_scaled, c.serves))
                for c in cands[cap:]:
                    c.kept = False
                cands = cands[:cap]
            frontier = [c for c in fresh if c.kept]
        return cands

    def _continuation_candidate(self, v, anchor_poi, anchor_time, epoch,
                                poi_idx, mat):
        """The vehicle's committed remaining plan, re-evaluated as-is."""
        if not v.plan:
            return None
        seq = []
        serves = []
        for s in v.plan:
            r = self.req_by_id[s.request]
            if s.kind == PICKUP:
                seq.append(_SeqStop(r.id, 0, poi_idx[s.vertex], s.vertex,
                                    self.params.t_load_s, 0, 0))
                serves.append(r.id)
            else:
                seq.append(_SeqStop(r.id, 1, poi_idx[s.vertex], s.vertex,
                                    self.params.t_deliver_s, r.deadline,
                                    r.earliest_dropoff))
        cand = _Cand(tuple(seq), tuple(sorted(serves)),
                     max(serves, default=-1), 0, 0, 0, 0)
        verts, kinds, svc, ddl, early = cand.kernel_arrays()
        feasible, drive, delay, end = kernels.evaluate_sequence(
            verts, kinds, svc, ddl, early, anchor_poi, anchor_time,
            epoch, len(v.onboard), self.params.capacity, mat)
        if not feasible:
            raise SolverError(
                f"vehicle {v.id}: committed plan became infeasible")
        cand.drive = drive
        cand.delay = delay
        cand.end = end
        wd = self.params.alpha.denominator - self.params.alpha.numerator
        cand.cost_scaled = wd * delay + self.params.alpha.numerator * drive
        return cand

    def _base_candidate(self, v, anchor_poi, anchor_time, epoch,
                        poi_idx, mat):
        """Serve only what is onboard, in committed delivery order."""
        seq = []
        for s in v.plan:
            if s.kind == DROPOFF and s.request in v.onboard:
                r = self.req_by_id[s.request]
                seq.append(_SeqStop(r.id, 1, poi_idx[s.vertex], s.vertex,
                                    self.params.t_deliver_s, r.deadline,
                                    r.earliest_dropoff))
        cand = _Cand(tuple(seq), (), -1, 0, 0, 0, 0)
        verts, kinds, svc, ddl, early = cand.kernel_arrays()
        feasible, drive, delay, end = kernels.evaluate_sequence(
            verts, kinds, svc, ddl, early, anchor_poi, anchor_time,
            epoch, len(v.onboard), self.params.capacity, mat)
        if not feasible:
            raise SolverError(
                f"vehicle {v.id}: onboard delivery became infeasible")
        cand.drive = drive
        cand.delay = delay
        cand.end = end
        wd = self.params.alpha.denominator - self.params.alpha.numerator
        cand.cost_scaled = wd * delay + self.params.alpha.numerator * drive
        return cand

    # -- pricing and the snapshot problem -----------------------------------

    def _column_cost(self, cand, is_new_vehicle):
        alpha = self.params.alpha
        scaled = Fraction(10 * cand.cost_scaled, alpha.denominator)
        decis = round(scaled)
        if is_new_vehicle:
            decis += 10 * self.params.new_vehicle_penalty_s
        return decis

    def _plan(self, epoch, pending):
        poi_idx, mat, stores_poi = self._poi_setup(pending)
        poi_names = sorted(poi_idx)

        # One potential vehicle per unpicked pending request, parked at
        # the request's nearest store. Potentials sharing a store are
        # interchangeable until the assignment picks routes for them,
        # so candidates are generated once per store and offered under
        # a representative vehicle whose selection capacity equals the
        # group size; winners are mapped back to concrete ids below.
        store_groups = {}
        if self.fixed_fleet is None:
            for r in pending:
                store_groups.setdefault(r.nearest_store, []).append(r)
            for group in store_groups.values():
                group.sort(key=lambda r: r.id)

        # key (vehicle, serves) -> (cost, stop signature, cand, vehicle)
        colmap = {}

        def offer(vid, cand, is_new):
            serves = frozenset(cand.serves)
            mandatory = vid in mandatory_vehicles
            if not serves and not mandatory:
                return
            cost = self._column_cost(cand, is_new)
            sig = tuple((s.rid, s.kind, s.vertex) for s in cand.seq)
            key = (vid, serves)
            prev = colmap.get(key)
            if prev is None or (cost, sig) < (prev[0], prev[1]):
                colmap[key] = (cost, sig, cand, is_new)

        mandatory_vehicles = {vid for vid, v in self.vehicles.items()
                              if v.onboard}

        for vid in sorted(self.vehicles):
            v = self.vehicles[vid]
            anchor_poi = poi_idx[v.anchor_vertex]
            base = self._base_candidate(v, anchor_poi, v.anchor_time,
                                        epoch, poi_idx, mat)
            cands = self._generate(base, len(v.onboard), anchor_poi,
                                   v.anchor_time, epoch, pending,
                                   poi_idx, mat, stores_poi, poi_names)
            for cand in cands:
                offer(vid, cand, False)
            cont = self._continuation_candidate(v, anchor_poi,
                                                v.anchor_time, epoch,
                                                poi_idx, mat)
            if cont is not None:
                offer(vid, cont, False)

        rep_of_store = {}
        capacities = []
        for store in sorted(store_groups):
            group = store_groups[store]
            rep = f"p{epoch:07d}-{group[0].id:06d}"
            rep_of_store[store] = rep
            if len(group) > 1:
                capacities.append((rep, len(group)))
            anchor_poi = poi_idx[store]
            base = _Cand((), (), -1, 0, 0, epoch, 0)
            cands = self._generate(base, 0, anchor_poi, epoch, epoch,
                                   pending, poi_idx, mat, stores_poi,
                                   poi_names)
            for cand in cands:
                offer(rep, cand, True)
            # solo cover for every member keeps the snapshot feasible
            seen = {c.serves for c in cands if len(c.serves) == 1}
            for seed in group:
                if (seed.id,) in seen:
                    continue
                solo = self._expand(base, seed, anchor_poi, epoch, epoch,
                                    0, poi_idx, mat, stores_poi, poi_names)
                if solo is None:
                    raise SolverError(
                        f"request {seed.id}: no feasible solo route from "
                        f"its nearest store")
                offer(rep, solo, True)

        ordered = sorted(colmap.items(),
                         key=lambda kv: (kv[0][0], kv[1][0],
                                         tuple(sorted(kv[0][1]))))
        columns = []
        info = []
        for (vid, serves), (cost, _sig, cand, is_new) in ordered:
            columns.append(RouteColumn(len(columns), vid, serves, cost))
            info.append((vid, cand, is_new, None))
        if self.fixed_fleet is not None:
            for r in pending:
                vid = f"reject-{r.id:06d}"
                columns.append(RouteColumn(len(columns), vid,
                                           frozenset((r.id,)),
                                           REJECT_COST_DECIS))
                info.append((vid, None, False, r.id))

        instance = AssignmentInstance(
            tuple(columns), tuple(r.id for r in pending),
            frozenset(mandatory_vehicles), tuple(capacities))
        selected = solve_assignment(instance)

        chosen = {}
        new_routes = {}
        rejected = []
        for cid in selected:
            vid, cand, is_new, reject_rid = info[cid]
            if reject_rid is not None:
                rejected.append(reject_rid)
            elif is_new:
                new_routes.setdefault(vid, []).append(cand)
            else:
                chosen[vid] = cand

        for vid in sorted(self.vehicles):
            v = self.vehicles[vid]
            self._commit(v, chosen.get(vid), epoch, poi_idx, mat)
        for store in sorted(store_groups):
            winners = new_routes.get(rep_of_store[store], [])
            if not winners:
                continue
            self._enroll(store, store_groups[store], winners, epoch,
                         poi_idx, mat)
        for rid in rejected:
            self.dropped.add(rid)

    def _enroll(self, store, group, winners, epoch, poi_idx, mat):
        """Bind winning new-vehicle routes to concrete potential ids.

        A route serving the defining request of one of the store's
        potentials claims that id (the smallest such rid if several);
        remaining routes take the leftover ids cheapest first.
        """
        group_ids = [r.id for r in group]
        free = set(group_ids)
        paired = {}
        rest = []
        for cand in sorted(winners,
                           key=lambda c: (self._column_cost(c, True),
                                          tuple(sorted(c.serves)))):
            own = sorted(set(cand.serves) & free)
            if own:
                paired[own[0]] = cand
                free.discard(own[0])
            else:
                rest.append(cand)
        for rid in sorted(free):
            if not rest:
                break
            paired[rid] = rest.pop(0)
        if rest:
            raise SolverError(
                f"store {store}: more new routes selected than "
                f"potential vehicles")
        for rid in sorted(paired):
            pid = f"p{epoch:07d}-{rid:06d}"
            v = _Vehicle(pid, store, epoch)
            self.vehicles[pid] = v
            self._commit(v, paired[rid], epoch, poi_idx, mat)

    def _commit(self, v, cand, epoch, poi_idx, mat):
        if cand is None:
            new_plan = []
        else:
            verts, kinds, svc, ddl, early = cand.kernel_arrays()
            feasible, arrivals, completions, _drive, _delay = \
                kernels.schedule_sequence(
                    verts, kinds, svc, ddl, early,
                    poi_idx[v.anchor_vertex], v.anchor_time, epoch,
                    len(v.onboard), self.params.capacity, mat)
            if not feasible:
                raise SolverError(
                    f"vehicle {v.id}: selected route failed scheduling")
            new_plan = [
                Stop(s.rid, PICKUP if s.kind == 0 else DROPOFF, s.vertex,
                     int(arrivals[k]), int(completions[k]))
                for k, s in enumerate(cand.seq)]
        if v.en_route and (not new_plan
                           or new_plan[0].vertex != v.anchor_vertex):
            # Diverted: the committed passage happens anyway.
            v.via.append((v.anchor_time, v.anchor_vertex))
            v.en_route = False
        elif (not v.en_route and new_plan and v.via
              and v.via[-1] == (v.anchor_time, v.anchor_vertex)
              and new_plan[0].vertex == v.anchor_vertex):
            # Service re-attached at a passage previously recorded as
            # empty: the new first stop covers it, so the via entry
            # would double-count the arrival in the replay.
            v.via.pop()
            v.en_route = True
        v.plan = new_plan
        if v.persistent and cand is not None and v.bout_vertex is None:
            v.bout_vertex = v.anchor_vertex
            v.bout_depart = max(v.anchor_time, epoch)
            v.bout_stop_lo = len(v.executed)
            v.bout_via_lo = len(v.via)


def run_pooling(network: Network, requests, params: PoolingParams,
                *, fixed_fleet: Optional[int] = None,
                oracle: Optional[TravelTimeOracle] = None
                ) -> PoolingResult:
    """Pool requests into tasks with the rolling-horizon engine.

    With fixed_fleet=None the fleet is open: vehicles appear at stores
    when assigned work and each retiring vehicle yields one task, all
    requests served. With a fixed fleet, unservable requests are
    dropped and tasks are per-vehicle activity bouts.
    """
    engine = _Engine(network, requests, params,
                     fixed_fleet=fixed_fleet, oracle=oracle)
    return engine.run()


def build_solo_tasks(network: Network, requests, params: PoolingParams,
                     *, oracle: Optional[TravelTimeOracle] = None
                     ) -> PoolingResult:
    """One dedicated task per request, started the moment it arrives.

    Loading begins exactly at placement at the request's nearest store,
    so every delivery lands at its earliest possible time and all
    delays are zero. This is the no-pooling reference: fleet efficiency
    must then come entirely from chaining tasks back to back.
    """
    oracle = oracle if oracle is not None else TravelTimeOracle(network)
    reqs = sorted(requests, key=lambda r: r.id)
    if len({r.id for r in reqs}) != len(reqs):
        raise ValidationError("duplicate request ids")
    tasks = []
    outcomes = []
    for k, r in enumerate(sorted(reqs, key=lambda r: (r.placed_at, r.id))):
        store = r.nearest_store
        sp = oracle.time(store, r.goal)
        if sp < 0:
            raise ValidationError(
                f"request {r.id}: goal unreachable from {store!r}")
        pick_done = r.placed_at + params.t_load_s
        arrive = pick_done + sp
        done = arrive + params.t_deliver_s
        if done != r.earliest_dropoff:
            raise SolverError(
                f"request {r.id}: earliest dropoff mismatch")
        stops = (
            Stop(r.id, PICKUP, store, r.placed_at, pick_done),
            Stop(r.id, DROPOFF, r.goal, arrive, done),
        )
        tasks.append(Task(
            id=k, vehicle=f"s{k:06d}",
            start_vertex=store, start_time=r.placed_at,
            end_vertex=r.goal, end_time=done,
            serves=(r.id,), stops=stops, via=(),
            drive_s=sp, delay_s=0))
        outcomes.append(RequestOutcome(r.id, r.placed_at, True,
                                       f"s{k:06d}", k, done, 0))
    outcomes.sort(key=lambda o: o.request)
    return PoolingResult(tuple(tasks), tuple(outcomes), 0, params, None)
