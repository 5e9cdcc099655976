"""Seeded generators. Every stochastic call takes an explicit generator."""
from __future__ import annotations

import numpy as np


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def spawn(seed: int | None, count: int) -> list[np.random.Generator]:
    """Independent child streams derived from one seed."""
    seqs = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(s)) for s in seqs]
