"""Deterministic fleet sizing for flash delivery services.

The pipeline pools delivery requests into multi-request vehicle tasks
(rolling-horizon route optimization), chains tasks into per-vehicle
operational plans (minimum-cost matching), and reports fleet size,
traffic, and delay KPIs for several dispatch strategies.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
