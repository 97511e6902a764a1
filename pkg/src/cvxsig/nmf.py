"""Standard NMF fitted with Lee-Seung multiplicative updates (Frobenius loss)."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import (EPS_DENOM, FactorModel, FitConfig, Method, as_nonneg, check_fit_input,
                   child_seed, frobenius_loss, init_uniform, iterate_to_tolerance)


def nmf_update(h, w, v):
    """One multiplicative sweep: update ``h`` and then ``w`` using the new ``h``.

    Parameters
    ----------
    h : ndarray, shape (M, K)
    w : ndarray, shape (K, N)
    v : ndarray, shape (M, N)

    Returns
    -------
    (h_new, w_new)
    """
    h = np.asarray(h, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if h.shape[0] != v.shape[0] or w.shape[1] != v.shape[1] or h.shape[1] != w.shape[0]:
        raise ValueError(f"inconsistent shapes: h {h.shape}, w {w.shape}, v {v.shape}")
    wwt = w @ w.T
    h = h * (v @ w.T) / (h @ wwt + EPS_DENOM)
    hth = h.T @ h
    w = w * (h.T @ v) / (hth @ w + EPS_DENOM)
    return h, w


def nmf_fit(v, config: FitConfig, init: Optional[tuple] = None) -> FactorModel:
    """Fit ``V ~ H W`` from a uniform [0, 1) start (or the explicit ``init``)."""
    v = check_fit_input(v, config)
    m, n = v.shape
    if init is None:
        h = init_uniform(m, config.k, child_seed(config.seed, 0))
        w = init_uniform(config.k, n, child_seed(config.seed, 1))
    else:
        h = as_nonneg(init[0], "initial H")
        w = as_nonneg(init[1], "initial W")
        if h.shape != (m, config.k) or w.shape != (config.k, n):
            raise ValueError(f"initial factors {h.shape}, {w.shape} do not fit V {v.shape}, k={config.k}")

    state = [h, w]

    def step():
        state[0], state[1] = nmf_update(state[0], state[1], v)
        return frobenius_loss(v, state[0] @ state[1])

    trace, converged, iters = iterate_to_tolerance(step, frobenius_loss(v, h @ w), config)
    return FactorModel(Method.NMF, state[0], state[1], trace, converged, iters)
