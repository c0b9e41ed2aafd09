"""Runtime configuration shared by the enumeration code."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 10**6

# Rings up to this size get full add/mul tables.
TABLE_MAX = 2048

# Rings beyond this size are refused outright.
RING_MAX = 1 << 16


def budget() -> int:
    """Enumeration budget, overridable through BTLAB_BUDGET."""
    raw = os.environ.get("BTLAB_BUDGET")
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_BUDGET
    return max(1, value)
