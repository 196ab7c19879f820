"""Size bounds shared by the builders and searches.

The classification size bound (largest carrier enumerated) can be
overridden with the ``HYPERFORGE_BOUND`` environment variable; every bound
can also be passed per call as a keyword argument.
"""

import os

RING_SIZE_BOUND = 4096
EXPLICIT_CARRIER_BOUND = 400
IDEAL_SCAN_BOUND = 2048
K_EXTENSION_BOUND = 8
S_EXTENSION_BOUND = 9
DIFFERENCE_SET_BOUND = 200
SANDBOX_RING_BOUND = 1 << 20
HOM_SEARCH_BUDGET = 1_000_000


def env_bound(default):
    """Return ``HYPERFORGE_BOUND`` when set, else ``default``."""
    raw = os.environ.get("HYPERFORGE_BOUND")
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"HYPERFORGE_BOUND must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("HYPERFORGE_BOUND must be positive")
    return value
