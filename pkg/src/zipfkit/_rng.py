"""Deterministic random-stream derivation.

Every Monte Carlo routine in this package derives its generators from an
integer seed plus a structured key, so results are reproducible bit for bit
and do not depend on evaluation order or worker count.
"""

from __future__ import annotations

import numpy as np


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    return np.random.default_rng([int(seed), *(int(k) for k in key)])


def derived_seed(seed: int, *key: int) -> int:
    """Collapse (seed, *key) into a single integer seed for downstream use."""
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in key)])
    return int(ss.generate_state(1, np.uint64)[0])
