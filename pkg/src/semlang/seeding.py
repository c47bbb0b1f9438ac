"""Deterministic derivation of per-task RNG seeds from one run seed.

All randomness in a run flows from a single integer seed. Independent work
units (per-language trainers, per-restart k-means, permutation tests) derive
their own seeds as ``derived_seed(seed, role)`` where ``role`` is a short
string naming the unit, e.g. ``"mono:en"`` or ``"kmeans:restart:3"``. The
derivation is SHA-256 over ``"{seed}:{role}"``, so any artifact can be
re-derived in isolation without replaying the rest of the run.
"""

import hashlib


def derived_seed(seed: int, role: str) -> int:
    """Return a deterministic 63-bit seed for the given role string."""
    digest = hashlib.sha256(f"{seed}:{role}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFF_FFFF_FFFF_FFFF
