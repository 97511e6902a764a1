"""Convex NMF, ``V ~ V W1 W2``, fitted with square-root multiplicative updates.

The basis ``H = V W1`` is a non-negative combination of data columns.  The
updates touch ``V`` only through the Gram matrix ``G = V^T V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (EPS_DENOM, FactorModel, FitConfig, Method, as_nonneg, check_fit_input,
                   child_seed, frobenius_loss, init_uniform, iterate_to_tolerance)


@dataclass(frozen=True)
class ConvexFactors:
    w1: np.ndarray  # N x K column-mixing weights
    w2: np.ndarray  # K x N sample weights

    def __post_init__(self):
        w1 = as_nonneg(self.w1, "W1")
        w2 = as_nonneg(self.w2, "W2")
        if w1.shape[1] != w2.shape[0] or w1.shape[0] != w2.shape[1]:
            raise ValueError(f"W1 {w1.shape} and W2 {w2.shape} are not N x K and K x N")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    def basis(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.float64) @ self.w1


def initial_convex_factors(n: int, k: int, seed) -> ConvexFactors:
    """Uniform [0, 1) (W1, W2) drawn from streams 0 and 1 of ``seed``.

    AE-NMF draws its encoder/decoder from the same streams, and NMF its
    weight matrix from stream 1, so a shared seed gives a shared start.
    """
    return ConvexFactors(init_uniform(n, k, child_seed(seed, 0)),
                         init_uniform(k, n, child_seed(seed, 1)))


def cnmf_update(w1, w2, gram):
    """One sweep of the convex-NMF updates; ``w2`` uses the freshly updated ``w1``."""
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    gram = np.asarray(gram, dtype=np.float64)
    n, k = w1.shape
    if gram.shape != (n, n) or w2.shape != (k, n):
        raise ValueError(f"inconsistent shapes: w1 {w1.shape}, w2 {w2.shape}, gram {gram.shape}")
    gw2t = gram @ w2.T
    w1 = w1 * np.sqrt(gw2t / (gram @ w1 @ (w2 @ w2.T) + EPS_DENOM))
    gw1 = gram @ w1
    w2t = w2.T * np.sqrt(gw1 / (w2.T @ (w1.T @ gw1) + EPS_DENOM))
    return w1, w2t.T


def cnmf_fit(v, config: FitConfig, init: Optional[ConvexFactors] = None) -> FactorModel:
    """Fit convex NMF; the returned model has ``h = V W1`` and ``w = W2``."""
    v = check_fit_input(v, config)
    m, n = v.shape
    if init is None:
        init = initial_convex_factors(n, config.k, config.seed)
    elif not isinstance(init, ConvexFactors):
        init = ConvexFactors(*init)
    if init.w1.shape != (n, config.k):
        raise ValueError(f"initial W1 {init.w1.shape} does not match N={n}, k={config.k}")

    gram = v.T @ v
    state = [init.w1, init.w2]

    def step():
        state[0], state[1] = cnmf_update(state[0], state[1], gram)
        return frobenius_loss(v, (v @ state[0]) @ state[1])

    trace, converged, iters = iterate_to_tolerance(
        step, frobenius_loss(v, v @ init.w1 @ init.w2), config)
    w1, w2 = state
    return FactorModel(Method.CNMF, v @ w1, w2, trace, converged, iters, w1=w1)
