"""Synthetic scenario generator: grid road networks and demand tables.

Everything here is a pure function of its arguments, so a scenario is
reproducible from its config alone. Vertex names are zero padded to
keep lexicographic order equal to row-major grid order.
"""

from __future__ import annotations

from .demand import TransactionRecord
from .errors import ConfigError

__all__ = [
    "DEMAND_LEVELS",
    "vertex_name",
    "grid_edge_lines",
    "choose_store_vertices",
    "demand_profile",
    "build_transactions",
]

DEMAND_LEVELS = {"low": 1, "medium": 2, "high": 4}


def vertex_name(row: int, col: int) -> str:
    return f"n{row:02d}{col:02d}"


def grid_edge_lines(width: int, height: int, base_time_s: int):
    """Directed edge lines for a width x height grid.

    Each pair of 4-neighbours gets both directions at equal weight.
    Weights vary deterministically around the base so shortest paths
    are not all degenerate ties: horizontal edges add ((row + col) % 3)
    * 10 seconds, vertical ones ((2 * row + col) % 3) * 10.
    """
    if width < 1 or height < 1 or width * height < 2:
        raise ConfigError("grid must contain at least two vertices")
    if base_time_s < 1:
        raise ConfigError("edge base time must be positive")
    lines = []
    for r in range(height):
        for c in range(width):
            v = vertex_name(r, c)
            if c + 1 < width:
                w = base_time_s + ((r + c) % 3) * 10
                u = vertex_name(r, c + 1)
                lines.append(f"{v} {u} {w}")
                lines.append(f"{u} {v} {w}")
            if r + 1 < height:
                w = base_time_s + ((2 * r + c) % 3) * 10
                u = vertex_name(r + 1, c)
                lines.append(f"{v} {u} {w}")
                lines.append(f"{u} {v} {w}")
    return lines


def choose_store_vertices(width: int, height: int, count: int):
    """Evenly spread store vertices along the row-major cell order."""
    cells = width * height
    if not 1 <= count <= cells:
        raise ConfigError(
            f"store count must be between 1 and {cells}, got {count}")
    if count == 1:
        idx = [cells // 2]
    else:
        # strictly increasing for count <= cells, hence no duplicates
        idx = [(k * (cells - 1)) // (count - 1) for k in range(count)]
    return [vertex_name(i // width, i % width) for i in idx]


def demand_profile(windows: int):
    """Bimodal per-window base counts with noon and evening peaks."""
    if windows < 1:
        raise ConfigError("horizon must span at least one window")
    noon = windows // 3
    evening = (3 * windows) // 4
    prof = []
    for w in range(windows):
        d = min(abs(w - noon), abs(w - evening))
        prof.append(max(8 - 2 * d, 1))
    return prof


def build_transactions(stores, windows: int, level: str):
    """Hourly transaction records for each store.

    Every store follows the same bimodal profile scaled by the demand
    level; differences between stores come from their catchment sizes
    once requests are drawn.
    """
    if level not in DEMAND_LEVELS:
        raise ConfigError(
            f"unknown demand level {level!r}; expected one of "
            f"{', '.join(sorted(DEMAND_LEVELS))}")
    mult = DEMAND_LEVELS[level]
    prof = demand_profile(windows)
    records = []
    for store in stores:
        for w, base in enumerate(prof):
            records.append(TransactionRecord(store, w, base * mult))
    return records
