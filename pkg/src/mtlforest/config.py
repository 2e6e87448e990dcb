"""Size caps for the enumeration-heavy operations.

All caps can be raised per call; MTLFOREST_CAP raises the element cap
globally for a process (useful for the CLI, which otherwise keeps the
conservative defaults).
"""

import os

MAX_FOREST_NODES = 12      # downset enumeration is exponential in nodes
MAX_PRODUCT_ELEMENTS = 512  # forest products and other enumerated algebras
MAX_CHAIN_ENUM = 6          # chain oracle: exhaustive tables get big fast


def element_cap(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("MTLFOREST_CAP")
    if env:
        return max(int(env), MAX_PRODUCT_ELEMENTS)
    return MAX_PRODUCT_ELEMENTS


def node_cap(override: int | None = None) -> int:
    if override is not None:
        return override
    return MAX_FOREST_NODES
