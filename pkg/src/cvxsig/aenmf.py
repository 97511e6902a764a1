"""Shallow linear non-negative autoencoder (AE-NMF) trained with Adam.

With zero biases and identity activations the reconstruction is
``V |W_enc| |W_dec|``, i.e. convex NMF with ``W1 = |W_enc|`` and
``W2 = |W_dec|``.  Training is full-batch gradient descent on
``0.5 * ||V - V_hat||_F^2``; the reported loss trace uses the averaged
Frobenius loss like the other methods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cnmf import ConvexFactors, initial_convex_factors
from .core import (FactorModel, FitConfig, Method, NonNegScheme, check_fit_input,
                   frobenius_loss, iterate_to_tolerance)

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros_like(cls, param) -> "AdamState":
        return cls(np.zeros_like(param, dtype=np.float64), np.zeros_like(param, dtype=np.float64), 0)


@dataclass(frozen=True)
class AeParams:
    w_enc: np.ndarray  # N x K, raw (may be negative under FP schemes)
    w_dec: np.ndarray  # K x N


def adam_step(param, grad, state: AdamState, lr: float):
    """One bias-corrected Adam update. Returns ``(new_param, new_state)``."""
    param = np.asarray(param, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if param.shape != grad.shape or state.m.shape != param.shape:
        raise ValueError(f"shape mismatch: param {param.shape}, grad {grad.shape}, state {state.m.shape}")
    t = state.t + 1
    m = BETA1 * state.m + (1 - BETA1) * grad
    v = BETA2 * state.v + (1 - BETA2) * grad * grad
    m_hat = m / (1 - BETA1 ** t)
    v_hat = v / (1 - BETA2 ** t)
    return param - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS), AdamState(m, v, t)


def _effective(w, scheme: NonNegScheme) -> np.ndarray:
    if scheme is NonNegScheme.FP_ABS:
        return np.abs(w)
    if scheme is NonNegScheme.FP_PG:
        return np.maximum(w, 0.0)
    return w


def _effective_grad(w, scheme: NonNegScheme) -> np.ndarray:
    # derivative of the effective-weight map, 0 at the kink
    if scheme is NonNegScheme.FP_ABS:
        return np.sign(w)
    if scheme is NonNegScheme.FP_PG:
        return (w > 0).astype(np.float64)
    return np.ones_like(w)


def effective_weights(params: AeParams, scheme) -> tuple[np.ndarray, np.ndarray]:
    """Non-negative (encoder, decoder) matrices actually used in the forward pass."""
    scheme = NonNegScheme(scheme)
    return _effective(params.w_enc, scheme), _effective(params.w_dec, scheme)


def forward(v, params: AeParams, scheme) -> np.ndarray:
    """Reconstruction ``V @ enc @ dec`` with the scheme's effective weights."""
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[1]
    if params.w_enc.shape[0] != n or params.w_dec.shape[1] != n or params.w_enc.shape[1] != params.w_dec.shape[0]:
        raise ValueError(f"inconsistent shapes: V {v.shape}, W_enc {params.w_enc.shape}, W_dec {params.w_dec.shape}")
    enc, dec = effective_weights(params, scheme)
    return (v @ enc) @ dec


def objective_and_gradient(v, params: AeParams, scheme):
    """``0.5 * ||V - forward(V)||_F^2`` and its gradient w.r.t. the raw weights."""
    scheme = NonNegScheme(scheme)
    v = np.asarray(v, dtype=np.float64)
    enc = _effective(params.w_enc, scheme)
    dec = _effective(params.w_dec, scheme)
    code = v @ enc
    resid = code @ dec - v
    g_dec = code.T @ resid
    g_enc = v.T @ (resid @ dec.T)
    g_enc = g_enc * _effective_grad(params.w_enc, scheme)
    g_dec = g_dec * _effective_grad(params.w_dec, scheme)
    return 0.5 * float(np.sum(resid * resid)), g_enc, g_dec


def _project(w, scheme: NonNegScheme) -> np.ndarray:
    if scheme is NonNegScheme.PG:
        return np.maximum(w, 0.0)
    if scheme is NonNegScheme.ABS:
        return np.abs(w)
    return w


def aenmf_fit(v, config: FitConfig, init=None) -> FactorModel:
    """Train AE-NMF with Adam from a uniform [0, 1) start or an explicit
    ``(W_enc, W_dec)`` / :class:`ConvexFactors` initialization.

    Adam is not monotone, so the weights with the lowest training loss seen
    are returned (``best_iter``).  The model exposes effective weights:
    ``h = V enc``, ``w = dec`` and ``w1 = enc``; raw weights are in
    ``extra["raw"]``.
    """
    v = check_fit_input(v, config)
    m, n = v.shape
    scheme = config.nonneg_scheme
    if init is None:
        init = initial_convex_factors(n, config.k, config.seed)
    if isinstance(init, ConvexFactors):
        init = AeParams(init.w1, init.w2)
    elif not isinstance(init, AeParams):
        init = AeParams(np.asarray(init[0], dtype=np.float64), np.asarray(init[1], dtype=np.float64))
    if init.w_enc.shape != (n, config.k) or init.w_dec.shape != (config.k, n):
        raise ValueError(f"initial weights {init.w_enc.shape}, {init.w_dec.shape} do not match N={n}, k={config.k}")

    enc_raw = _project(np.array(init.w_enc, dtype=np.float64), scheme)
    dec_raw = _project(np.array(init.w_dec, dtype=np.float64), scheme)
    lr = config.learning_rate
    state = {
        "enc": enc_raw, "dec": dec_raw,
        "s_enc": AdamState.zeros_like(enc_raw), "s_dec": AdamState.zeros_like(dec_raw),
    }

    def step():
        params = AeParams(state["enc"], state["dec"])
        _, g_enc, g_dec = objective_and_gradient(v, params, scheme)
        enc, state["s_enc"] = adam_step(state["enc"], g_enc, state["s_enc"], lr)
        dec, state["s_dec"] = adam_step(state["dec"], g_dec, state["s_dec"], lr)
        state["enc"] = _project(enc, scheme)
        state["dec"] = _project(dec, scheme)
        state["t"] += 1
        loss = frobenius_loss(v, forward(v, AeParams(state["enc"], state["dec"]), scheme))
        if loss < state["best"][0]:
            state["best"] = (loss, state["t"], state["enc"], state["dec"])
        return loss

    initial = frobenius_loss(v, forward(v, AeParams(enc_raw, dec_raw), scheme))
    state["t"] = 0
    state["best"] = (initial, 0, enc_raw, dec_raw)
    trace, converged, iters = iterate_to_tolerance(step, initial, config)
    _, best_iter, best_enc, best_dec = state["best"]
    raw = AeParams(best_enc, best_dec)
    enc, dec = effective_weights(raw, scheme)
    return FactorModel(Method.AENMF, v @ enc, dec, trace, converged, iters, w1=enc,
                       best_iter=best_iter, extra={"raw": raw, "scheme": scheme})


__all__ = ["AdamState", "AeParams", "adam_step", "effective_weights", "forward",
           "objective_and_gradient", "aenmf_fit"]
