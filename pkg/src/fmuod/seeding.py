"""Deterministic derivation of child seeds and generators.

Every random draw in the package flows through a generator built from an
explicit integer key, so results never depend on call order, scheduling or
worker counts.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidConfig


def _check_key(key: tuple[int, ...]) -> list[int]:
    if not key:
        raise InvalidConfig("seed key must not be empty")
    parts = []
    for part in key:
        as_int = int(part)
        if as_int != part or as_int < 0:
            raise InvalidConfig("seed key parts must be non-negative integers")
        parts.append(as_int)
    return parts


def child_seed(*key: int) -> int:
    """A reproducible integer seed derived from the key parts."""
    seq = np.random.SeedSequence(_check_key(key))
    return int(seq.generate_state(1, np.uint64)[0])


def child_rng(*key: int) -> np.random.Generator:
    """A reproducible generator derived from the key parts."""
    return np.random.default_rng(np.random.SeedSequence(_check_key(key)))
