"""Poisson catalog simulation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import MutationCatalog, as_nonneg, make_rng


@dataclass(frozen=True)
class SimSpec:
    """Signatures ``h`` (M x K, columns summing to one), expected exposures
    ``w`` (K x N) and the RNG seed."""

    h: np.ndarray
    w: np.ndarray
    seed: int = 0
    feature_labels: Optional[Sequence[str]] = None

    def __post_init__(self):
        h = as_nonneg(self.h, "signature matrix")
        w = as_nonneg(self.w, "exposure matrix")
        if h.shape[1] != w.shape[0]:
            raise ValueError(f"signatures {h.shape} and exposures {w.shape} disagree on K")
        sums = h.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-12)
        if bad.size:
            raise ValueError(f"signature column {bad[0]} sums to {sums[bad[0]]!r}, expected 1")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", w)

    @property
    def mean(self) -> np.ndarray:
        return self.h @ self.w


def simulate_poisson(spec: SimSpec) -> MutationCatalog:
    """Draw ``v_ij ~ Poisson((H W)_ij)`` independently."""
    counts = make_rng(spec.seed).poisson(spec.mean).astype(np.float64)
    return MutationCatalog.from_matrix(counts, spec.feature_labels)


def paper_example_spec(seed: int = 0) -> SimSpec:
    """Two signatures over six mutation types and 30 samples in three exposure groups."""
    h1 = np.array([2, 2, 1, 1, 0, 0], dtype=np.float64) / 6
    h2 = np.array([0, 0, 0, 1, 1, 1], dtype=np.float64) / 3
    w = np.repeat(np.array([[180.0, 100.0, 20.0], [20.0, 100.0, 180.0]]), 10, axis=1)
    return SimSpec(np.column_stack([h1, h2]), w, seed)
