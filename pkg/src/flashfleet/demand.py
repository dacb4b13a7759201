"""Demand model: catchment areas and request synthesis.

Store-level transaction counts are converted into individual delivery
requests: each store serves the vertices closest to it (its catchment
area), a configurable share of transactions becomes a request, goals
are drawn uniformly from the catchment area and placement times
uniformly from the transaction window. Everything is driven by a
seeded PCG64 generator so a (config, seed) pair reproduces the exact
request list on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import as_fraction
from .errors import ParseError, ValidationError
from .network import TravelTimeOracle

__all__ = [
    "TransactionRecord",
    "CatchmentArea",
    "Request",
    "load_transactions",
    "transactions_to_csv_lines",
    "compute_catchment_areas",
    "synthesize_requests",
    "build_request",
    "requests_to_csv_lines",
    "load_requests",
]


@dataclass(frozen=True)
class TransactionRecord:
    """Hourly transaction count for one store."""

    store: str
    window: int
    count: int


@dataclass(frozen=True)
class CatchmentArea:
    """Vertices whose nearest shopping store is ``store``.

    Nearness is measured in the delivery direction (store to vertex);
    ties go to the lexicographically smallest store id.
    """

    store: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class Request:
    """One delivery request.

    ``earliest_dropoff`` is the dropoff completion time of an immediate
    solo delivery from the nearest pickup store (placement + loading +
    shortest path + handover); the dropoff delay of any actual service
    is measured against it and must not exceed ``deadline``, which sits
    exactly the maximum delay above it.
    """

    id: int
    goal: str
    placed_at: int
    nearest_store: str
    earliest_dropoff: int
    deadline: int


def load_transactions(lines, name: str = "transactions"):
    """Parse a transactions CSV with header store,window,count."""
    records = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.split(",")]
        if not header_seen:
            if parts != ["store", "window", "count"]:
                raise ParseError(
                    f"{name}, line {lineno}: expected header "
                    f"'store,window,count', got {text!r}")
            header_seen = True
            continue
        if len(parts) != 3:
            raise ParseError(
                f"{name}, line {lineno}: expected 3 fields, got {text!r}")
        store, wtok, ctok = parts
        try:
            window = int(wtok)
            count = int(ctok)
        except ValueError:
            raise ParseError(
                f"{name}, line {lineno}: window and count must be "
                f"integers, got {text!r}") from None
        if window < 0 or count < 0:
            raise ParseError(
                f"{name}, line {lineno}: window and count must be "
                f"non-negative")
        records.append(TransactionRecord(store=store, window=window,
                                         count=count))
    if not header_seen:
        raise ParseError(f"{name}: missing header 'store,window,count'")
    return records


def compute_catchment_areas(oracle: TravelTimeOracle, stores):
    """Partition all vertices into per-store catchment areas.

    ``stores`` are the shopping locations demand originates from (they
    may differ from the network's pickup stores when pickup is
    restricted to a subset). Every vertex must be reachable from at
    least one of them.
    """
    net = oracle.network
    store_list = sorted(set(stores))
    missing = [s for s in store_list if s not in net.index]
    if missing:
        raise ValidationError(
            f"unknown store vertex {missing[0]!r}")
    if not store_list:
        raise ValidationError("store list must not be empty")
    n = net.num_vertices
    best_d = np.full(n, -1, dtype=np.int64)
    owner = np.full(n, -1, dtype=np.int64)
    for k, s in enumerate(store_list):
        row = oracle.row(net.index[s])
        reach = row >= 0
        take = reach & ((best_d < 0) | (row < best_d))
        best_d = np.where(take, row, best_d)
        owner = np.where(take, k, owner)
    uncovered = np.nonzero(owner < 0)[0]
    if uncovered.size:
        raise ValidationError(
            f"vertex {net.ids[int(uncovered[0])]!r} is not reachable "
            f"from any store")
    members: list[list[str]] = [[] for _ in store_list]
    for v in range(n):
        members[int(owner[v])].append(net.ids[v])
    return [CatchmentArea(store=s, members=tuple(sorted(m)))
            for s, m in zip(store_list, members)]


def build_request(req_id: int, goal: str, placed_at: int, *,
                  oracle: TravelTimeOracle, t_load_s: int,
                  t_deliver_s: int, max_delay_s: int) -> Request:
    """Derive the service-time fields of a request from the network."""
    store, sp = oracle.nearest_store(goal)
    earliest = placed_at + t_load_s + sp + t_deliver_s
    return Request(
        id=req_id,
        goal=goal,
        placed_at=placed_at,
        nearest_store=store,
        earliest_dropoff=earliest,
        deadline=earliest + max_delay_s,
    )


def synthesize_requests(transactions, areas, share, window_length: int,
                        seed: int, *, oracle: TravelTimeOracle,
                        t_load_s: int, t_deliver_s: int,
                        max_delay_s: int):
    """Draw a seeded request list from store transaction counts.

    Per record, round(count * share) requests are created (ties round
    to even; ``share`` is handled as an exact fraction so decimal
    shares never misround). Goals are uniform over the record's
    catchment area and placement times uniform over the record's
    window. Draw order: records in input order, goals before times
    within a record. Output is sorted by placement time with ties
    broken by (store id, draw order); ids are assigned in that order
    starting at 0.
    """
    share_frac = as_fraction(share)
    if share_frac < 0:
        raise ValidationError("share must be non-negative")
    if window_length <= 0:
        raise ValidationError("window_length must be positive")
    area_by_store = {a.store: a for a in areas}
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = []
    seq = 0
    for rec in transactions:
        n = int(round(Fraction(rec.count) * share_frac))
        if n == 0:
            continue
        area = area_by_store.get(rec.store)
        if area is None:
            raise ValidationError(
                f"transaction references store {rec.store!r} without a "
                f"catchment area")
        if not area.members:
            raise ValidationError(
                f"store {rec.store!r} has an empty catchment area but "
                f"positive demand")
        goal_idx = rng.integers(0, len(area.members), size=n)
        offsets = rng.integers(0, window_length, size=n)
        base = rec.window * window_length
        for k in range(n):
            placed = int(base + offsets[k])
            goal = area.members[int(goal_idx[k])]
            draws.append((placed, rec.store, seq, goal))
            seq += 1
    draws.sort(key=lambda d: (d[0], d[1], d[2]))
    requests = []
    for req_id, (placed, _store, _seq, goal) in enumerate(draws):
        requests.append(build_request(
            req_id, goal, placed, oracle=oracle, t_load_s=t_load_s,
            t_deliver_s=t_deliver_s, max_delay_s=max_delay_s))
    return requests


def transactions_to_csv_lines(records, comments=()):
    lines = [f"# {c}" for c in comments]
    lines.append("store,window,count")
    for rec in records:
        lines.append(f"{rec.store},{rec.window},{rec.count}")
    return lines


def requests_to_csv_lines(requests, comments=()):
    """Serialize requests; derived fields are recomputed on load."""
    lines = [f"# {c}" for c in comments]
    lines.append("id,goal,placed_at")
    for r in requests:
        lines.append(f"{r.id},{r.goal},{r.placed_at}")
    return lines


def load_requests(lines, *, oracle: TravelTimeOracle, t_load_s: int,
                  t_deliver_s: int, max_delay_s: int,
                  name: str = "requests"):
    """Parse a requests CSV and recompute the derived service fields."""
    header_seen = False
    rows = []
    ids = set()
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.split(",")]
        if not header_seen:
            if parts != ["id", "goal", "placed_at"]:
                raise ParseError(
                    f"{name}, line {lineno}: expected header "
                    f"'id,goal,placed_at', got {text!r}")
            header_seen = True
            continue
        if len(parts) != 3:
            raise ParseError(
                f"{name}, line {lineno}: expected 3 fields, got {text!r}")
        try:
            req_id = int(parts[0])
            placed = int(parts[2])
        except ValueError:
            raise ParseError(
                f"{name}, line {lineno}: id and placed_at must be "
                f"integers") from None
        if placed < 0:
            raise ParseError(
                f"{name}, line {lineno}: placed_at must be non-negative")
        if req_id in ids:
            raise ValidationError(
                f"{name}, line {lineno}: duplicate request id {req_id}")
        ids.add(req_id)
        rows.append((req_id, parts[1], placed))
    if not header_seen:
        raise ParseError(f"{name}: missing header 'id,goal,placed_at'")
    rows.sort(key=lambda r: (r[2], r[0]))
    return [build_request(rid, goal, placed, oracle=oracle,
                          t_load_s=t_load_s, t_deliver_s=t_deliver_s,
                          max_delay_s=max_delay_s)
            for rid, goal, placed in rows]
