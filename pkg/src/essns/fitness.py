"""Jaccard agreement between a fire map and the observed fire line."""
from __future__ import annotations

import numpy as np

from .landscape import FireMap, check_same_grid


def jaccard_fitness(real: FireMap, sim: FireMap, preburned: FireMap) -> float:
    """Jaccard index of the newly burned cells of ``real`` and ``sim``.

    Cells already burned in ``preburned`` are removed from both sets before
    comparing. Two empty sets are a perfect match and score 1.0.
    """
    check_same_grid(real, sim, preburned)
    keep = ~preburned.burned
    a = real.burned & keep
    b = sim.burned & keep
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a & b)) / union
