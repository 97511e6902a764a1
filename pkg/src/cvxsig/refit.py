"""Refitting exposures of held-out samples against a fixed basis."""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls as _scipy_nnls

from .core import as_nonneg, frobenius_loss


def _check_basis(h) -> np.ndarray:
    h = as_nonneg(h, "basis")
    zero = np.flatnonzero(~np.any(h > 0, axis=0))
    if zero.size:
        raise ValueError(f"degenerate basis: column {zero[0]} is all zero")
    return h


def nnls(h, v_col) -> np.ndarray:
    """``argmin_{w >= 0} ||h w - v||_2`` (Lawson-Hanson active set)."""
    h = _check_basis(h)
    v_col = np.asarray(v_col, dtype=np.float64).ravel()
    if v_col.shape[0] != h.shape[0]:
        raise ValueError(f"basis has {h.shape[0]} rows but vector has {v_col.shape[0]}")
    if np.any(v_col < 0):
        raise ValueError("target vector has negative entries")
    w, _ = _scipy_nnls(h, v_col, maxiter=50 * h.shape[1] + 100)
    return np.maximum(w, 0.0)


def refit_weights(h, v_test) -> np.ndarray:
    """Column-wise :func:`nnls`; returns a K x N_test weight matrix."""
    h = _check_basis(h)
    v_test = as_nonneg(v_test, "test matrix")
    if v_test.shape[0] != h.shape[0]:
        raise ValueError(f"basis {h.shape} and test matrix {v_test.shape} disagree on M")
    return np.column_stack([nnls(h, v_test[:, j]) for j in range(v_test.shape[1])])


def test_error(h, v_test) -> float:
    """Averaged Frobenius loss of ``v_test`` against its refit reconstruction."""
    v_test = as_nonneg(v_test, "test matrix")
    return frobenius_loss(v_test, np.asarray(h, dtype=np.float64) @ refit_weights(h, v_test))


test_error.__test__ = False  # not a pytest test when imported into test modules
