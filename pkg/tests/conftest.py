import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from flashfleet.demand import load_requests
from flashfleet.network import TravelTimeOracle, load_network
from flashfleet.pooling import PoolingParams


def grid3_edge_lines():
    """3x3 bidirectional grid, every edge 50 s; used all over the suite."""
    lines = []
    for r in range(3):
        for c in range(3):
            v = f"g{r}{c}"
            if c + 1 < 3:
                u = f"g{r}{c + 1}"
                lines += [f"{v} {u} 50", f"{u} {v} 50"]
            if r + 1 < 3:
                u = f"g{r + 1}{c}"
                lines += [f"{v} {u} 50", f"{u} {v} 50"]
    return lines


@pytest.fixture(scope="session")
def grid3():
    return load_network(grid3_edge_lines(), ["g00", "g22"])


@pytest.fixture(scope="session")
def grid3_oracle(grid3):
    return TravelTimeOracle(grid3)


@pytest.fixture(scope="session")
def smoke_requests(grid3_oracle):
    """Five requests whose full engine timelines are pinned in tests."""
    rows = [
        "id,goal,placed_at",
        "0,g11,0",
        "1,g21,30",
        "2,g01,400",
        "3,g12,2000",
        "4,g10,2030",
    ]
    return load_requests(rows, oracle=grid3_oracle, t_load_s=60,
                         t_deliver_s=60, max_delay_s=300)


@pytest.fixture()
def default_params():
    return PoolingParams()
