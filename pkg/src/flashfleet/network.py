"""Road network model and shortest path travel times.

The network is a directed graph with positive integer edge weights in
seconds. A subset of vertices are pickup stores. Validation enforces
the operating assumptions of the rest of the pipeline: every vertex is
reachable from every store (deliveries can start anywhere), and from
every vertex at least one store is reachable (vehicles can always
return to a pickup location).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParseError, UnreachableError, ValidationError

__all__ = [
    "Network",
    "TravelTimeOracle",
    "load_network",
    "load_network_files",
    "parse_edge_lines",
    "parse_store_lines",
]


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    if pos >= 0:
        line = line[:pos]
    return line.strip()


def _parse_weight(token: str, name: str, lineno: int) -> int:
    try:
        w = int(token)
    except ValueError:
        try:
            w = round(float(token))  # round half to even
        except (ValueError, OverflowError):
            raise ParseError(
                f"{name}, line {lineno}: bad edge weight {token!r}") from None
    if w < 1:
        raise ParseError(
            f"{name}, line {lineno}: edge weight {token!r} rounds to "
            f"{w}, must be a positive number of seconds")
    return w


def parse_edge_lines(lines, name: str = "edges"):
    """Parse '<from> <to> <weight>' lines into a dict of min weights.

    Tokens are whitespace separated, '#' starts a comment. Parallel
    edges keep the smallest weight; self loops are dropped (a shortest
    path never uses them).
    """
    edges: dict[tuple[str, str], int] = {}
    vertices: set[str] = set()
    count = 0
    for lineno, raw in enumerate(lines, start=1):
        text = _strip_comment(raw)
        if not text:
            continue
        parts = text.split()
        if len(parts) != 3:
            raise ParseError(
                f"{name}, line {lineno}: expected '<from> <to> <weight>', "
                f"got {raw.strip()!r}")
        src, dst, wtok = parts
        w = _parse_weight(wtok, name, lineno)
        vertices.add(src)
        vertices.add(dst)
        count += 1
        if src == dst:
            continue
        key = (src, dst)
        old = edges.get(key)
        if old is None or w < old:
            edges[key] = w
    if count == 0:
        raise ParseError(f"{name}: no edges found")
    return edges, vertices


def parse_store_lines(lines, name: str = "stores"):
    """Parse one store id per line; '#' comments allowed; deduplicated."""
    stores: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        text = _strip_comment(raw)
        if not text:
            continue
        if len(text.split()) != 1:
            raise ParseError(
                f"{name}, line {lineno}: expected a single store id, "
                f"got {raw.strip()!r}")
        if text not in seen:
            seen.add(text)
            stores.append(text)
    if not stores:
        raise ParseError(f"{name}: no stores found")
    return stores


@dataclass(frozen=True)
class Network:
    """Immutable CSR road network with a set of pickup stores.

    Vertex ids are strings ordered lexicographically; ``index`` maps id
    to the CSR row. ``stores`` is sorted. Construct via load_network.
    """

    ids: tuple[str, ...]
    index: dict = field(repr=False)
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    stores: tuple[str, ...]
    store_idx: np.ndarray = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.ids)

    @property
    def num_edges(self) -> int:
        return int(self.indices.shape[0])

    def with_stores(self, stores) -> "Network":
        """Same graph with a different pickup store set (revalidated)."""
        subset = sorted(set(stores))
        missing = [s for s in subset if s not in self.index]
        if missing:
            raise ValidationError(f"unknown store vertex {missing[0]!r}")
        if not subset:
            raise ValidationError("store set must not be empty")
        net = Network(
            ids=self.ids,
            index=self.index,
            indptr=self.indptr,
            indices=self.indices,
            weights=self.weights,
            stores=tuple(subset),
            store_idx=np.array([self.index[s] for s in subset],
                               dtype=np.int64),
        )
        _validate_reachability(net)
        return net


def _build_csr(ids, edges):
    index = {vid: i for i, vid in enumerate(ids)}
    n = len(ids)
    rows = sorted(
        ((index[a], index[b], w) for (a, b), w in edges.items()),
        key=lambda t: (t[0], t[1]))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.zeros(len(rows), dtype=np.int64)
    weights = np.zeros(len(rows), dtype=np.int64)
    for k, (a, b, w) in enumerate(rows):
        indptr[a + 1] += 1
        indices[k] = b
        weights[k] = w
    np.cumsum(indptr, out=indptr)
    return index, indptr, indices, weights


def _validate_reachability(net: Network) -> None:
    n = net.num_vertices
    # Every store must reach every vertex.
    for s_idx, s_id in zip(net.store_idx, net.stores):
        row = kernels.dijkstra_row(net.indptr, net.indices, net.weights,
                                   int(s_idx))
        bad = np.nonzero(row < 0)[0]
        if bad.size:
            raise UnreachableError(
                f"vertex {net.ids[int(bad[0])]!r} is not reachable from "
                f"store {s_id!r}")
    # Every vertex must reach at least one store: run the stores on the
    # reversed graph and take the minimum.
    r_indptr, r_indices, r_weights = _reverse_csr(net)
    best = np.full(n, -1, dtype=np.int64)
    for s_idx in net.store_idx:
        row = kernels.dijkstra_row(r_indptr, r_indices, r_weights,
                                   int(s_idx))
        better = (best < 0) | ((row >= 0) & (row < best))
        best = np.where((row >= 0) & better, row, best)
    bad = np.nonzero(best < 0)[0]
    if bad.size:
        raise UnreachableError(
            f"no store is reachable from vertex {net.ids[int(bad[0])]!r}")


def _reverse_csr(net: Network):
    n = net.num_vertices
    indptr = np.zeros(n + 1, dtype=np.int64)
    m = net.num_edges
    indices = np.zeros(m, dtype=np.int64)
    weights = np.zeros(m, dtype=np.int64)
    src_of = np.repeat(np.arange(n, dtype=np.int64),
                       np.diff(net.indptr))
    order = np.lexsort((src_of, net.indices))
    rev_src = net.indices[order]
    indices[:] = src_of[order]
    weights[:] = net.weights[order]
    counts = np.bincount(rev_src, minlength=n)
    indptr[1:] = np.cumsum(counts)
    return indptr, indices, weights


def load_network(edge_lines, store_lines, *, edge_name: str = "edges",
                 store_name: str = "stores") -> Network:
    """Build and validate a Network from edge and store line streams."""
    edges, vertices = parse_edge_lines(edge_lines, edge_name)
    store_list = parse_store_lines(store_lines, store_name)
    missing = [s for s in store_list if s not in vertices]
    if missing:
        raise ValidationError(
            f"store {missing[0]!r} is not a vertex of the network")
    ids = tuple(sorted(vertices))
    index, indptr, indices, weights = _build_csr(ids, edges)
    stores = tuple(sorted(store_list))
    net = Network(
        ids=ids,
        index=index,
        indptr=indptr,
        indices=indices,
        weights=weights,
        stores=stores,
        store_idx=np.array([index[s] for s in stores], dtype=np.int64),
    )
    _validate_reachability(net)
    return net


def load_network_files(edges_path, stores_path) -> Network:
    with open(edges_path, "r", encoding="utf-8") as fh:
        edge_lines = fh.readlines()
    with open(stores_path, "r", encoding="utf-8") as fh:
        store_lines = fh.readlines()
    return load_network(edge_lines, store_lines,
                        edge_name=str(edges_path),
                        store_name=str(stores_path))


class TravelTimeOracle:
    """Memoized one-to-all shortest path queries over a Network.

    Rows are computed once per source vertex and cached; answers are
    identical with a cold or warm cache. The cache is only mutated
    under the GIL with plain dict assignment, so concurrent readers in
    threads see either the absent or the complete row.
    """

    def __init__(self, network: Network):
        self.network = network
        self._rows: dict[int, np.ndarray] = {}

    def row(self, src_idx: int) -> np.ndarray:
        """Distances from a vertex index to all vertices (-1 unreachable)."""
        row = self._rows.get(src_idx)
        if row is None:
            row = kernels.dijkstra_row(
                self.network.indptr, self.network.indices,
                self.network.weights, src_idx)
            row.setflags(write=False)
            self._rows[src_idx] = row
        return row

    def _idx(self, vertex_id: str) -> int:
        try:
            return self.network.index[vertex_id]
        except KeyError:
            raise ValidationError(
                f"unknown vertex {vertex_id!r}") from None

    def time_idx(self, src_idx: int, dst_idx: int) -> int:
        d = int(self.row(src_idx)[dst_idx])
        if d < 0:
            raise UnreachableError(
                f"no path from {self.network.ids[src_idx]!r} to "
                f"{self.network.ids[dst_idx]!r}")
        return d

    def time(self, src_id: str, dst_id: str) -> int:
        """Shortest travel time in seconds between two vertex ids."""
        return self.time_idx(self._idx(src_id), self._idx(dst_id))

    def nearest_store(self, goal_id: str):
        """Pickup store minimizing travel time toward ``goal_id``.

        Distance is measured in the delivery direction (store to goal);
        ties pick the lexicographically smallest store id. Returns
        (store_id, travel_time).
        """
        g = self._idx(goal_id)
        net = self.network
        best_d = -1
        best_s = None
        for s_id, s_idx in zip(net.stores, net.store_idx):
            d = int(self.row(int(s_idx))[g])
            if d < 0:
                continue
            if best_s is None or d < best_d:
                best_d = d
                best_s = s_id
        if best_s is None:
            raise UnreachableError(
                f"no store can reach goal {goal_id!r}")
        return best_s, best_d
