"""Shared sampling helpers for the test suite."""

import numpy as np

from assoc2x2 import ContingencyTable, JointDistribution


def interior_distribution(rng: np.random.Generator, min_cell: float = 1e-4) -> JointDistribution:
    """Dirichlet draw with every cell at least ``min_cell``."""
    while True:
        cells = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
        if cells.min() >= min_cell:
            return JointDistribution(*(float(p) for p in cells))


def product_distribution(u: float, v: float) -> JointDistribution:
    """Independence distribution with first margins u (rows) and v (columns)."""
    return JointDistribution(u * v, u * (1.0 - v), (1.0 - u) * v, (1.0 - u) * (1.0 - v))


def random_table(rng: np.random.Generator, n_low: int = 20, n_high: int = 400) -> ContingencyTable:
    """Multinomial table with positive margins from a random distribution."""
    while True:
        q = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
        n = int(rng.integers(n_low, n_high + 1))
        counts = rng.multinomial(n, q)
        t = ContingencyTable(*(int(c) for c in counts))
        if t.min_margin > 0:
            return t
