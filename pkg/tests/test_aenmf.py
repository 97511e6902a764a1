import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvxsig.aenmf import (AdamState, AeParams, adam_step, aenmf_fit, effective_weights, forward,
                          objective_and_gradient)
from cvxsig.cnmf import cnmf_fit
from cvxsig.core import FitConfig, Method, NonNegScheme
from cvxsig.metrics import match_signatures
from oracles import adam_trace, naive_matmul

SCHEMES = list(NonNegScheme)


def test_effective_weights_per_scheme():
    p = AeParams(np.array([[-0.3, 0.2]]), np.array([[0.5], [-0.1]]))
    enc, dec = effective_weights(p, "FP_ABS")
    assert enc[0, 0] == 0.3 and dec[1, 0] == 0.1
    enc, dec = effective_weights(p, "FP_PG")
    assert enc[0, 0] == 0.0 and dec[1, 0] == 0.0
    for scheme in ("PG", "ABS"):
        enc, dec = effective_weights(p, scheme)
        assert enc is p.w_enc and dec is p.w_dec


@pytest.mark.parametrize("scheme", SCHEMES)
def test_effective_is_identity_on_orthant(scheme, rng):
    p = AeParams(rng.random((4, 2)), rng.random((2, 4)))
    enc, dec = effective_weights(p, scheme)
    np.testing.assert_array_equal(enc, p.w_enc)
    np.testing.assert_array_equal(dec, p.w_dec)


def test_forward_identity_weights(rng):
    v = rng.random((3, 4))
    out = forward(v, AeParams(np.eye(4), np.eye(4)), "FP_ABS")
    np.testing.assert_allclose(out, v)


def test_forward_fp_abs_equals_abs_copy(rng):
    v = rng.random((5, 6))
    p = AeParams(rng.standard_normal((6, 2)), rng.standard_normal((2, 6)))
    q = AeParams(np.abs(p.w_enc), np.abs(p.w_dec))
    np.testing.assert_array_equal(forward(v, p, "FP_ABS"), forward(v, q, "FP_ABS"))
    # convex NMF reconstruction with W1 = |W_enc|, W2 = |W_dec|
    np.testing.assert_allclose(forward(v, p, "FP_ABS"), v @ q.w_enc @ q.w_dec, rtol=1e-14)


def test_forward_matches_triple_loop(rng):
    v = rng.random((5, 7))
    p = AeParams(rng.standard_normal((7, 3)), rng.standard_normal((3, 7)))
    ref = naive_matmul(naive_matmul(v, np.abs(p.w_enc)), np.abs(p.w_dec))
    np.testing.assert_allclose(forward(v, p, "FP_ABS"), ref, atol=1e-10)


def test_forward_shape_check():
    with pytest.raises(ValueError):
        forward(np.ones((3, 4)), AeParams(np.ones((5, 2)), np.ones((2, 4))), "FP_ABS")


@given(st.integers(0, 5), st.integers(0, 1))
def test_fp_abs_loss_invariant_to_sign_flip(i, j):
    rng = np.random.default_rng(i * 7 + j)
    v = rng.random((4, 6))
    p = AeParams(rng.standard_normal((6, 2)), rng.standard_normal((2, 6)))
    enc = p.w_enc.copy()
    enc[i, j] *= -1
    a = objective_and_gradient(v, p, "FP_ABS")[0]
    b = objective_and_gradient(v, AeParams(enc, p.w_dec), "FP_ABS")[0]
    assert a == pytest.approx(b, rel=1e-14)


def test_adam_zero_gradient_keeps_param():
    p = np.array([0.3, -1.0])
    out, state = adam_step(p, np.zeros(2), AdamState.zeros_like(p), 1e-4)
    np.testing.assert_array_equal(out, p)
    assert state.t == 1


def test_adam_first_step_is_lr_times_sign():
    p = np.array([0.5])
    out, _ = adam_step(p, np.ones(1), AdamState.zeros_like(p), 1e-4)
    assert out[0] - p[0] == pytest.approx(-1e-4, rel=1e-7)


def test_adam_three_step_trace():
    p = np.array([1.0])
    state = AdamState.zeros_like(p)
    got = []
    for g in (1.0, 2.0, -1.0):
        p, state = adam_step(p, np.array([g]), state, 1e-3)
        got.append(p[0])
    np.testing.assert_allclose(got, adam_trace(1.0, [1.0, 2.0, -1.0], 1e-3), atol=1e-12, rtol=0)
    assert state.t == 3 and np.all(state.v >= 0)


def _numeric_grad(v, enc, dec, scheme, step=1e-5):
    g_enc, g_dec = np.zeros_like(enc), np.zeros_like(dec)
    for arr, out in ((enc, g_enc), (dec, g_dec)):
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + step
            up = objective_and_gradient(v, AeParams(enc, dec), scheme)[0]
            arr[idx] = orig - step
            down = objective_and_gradient(v, AeParams(enc, dec), scheme)[0]
            arr[idx] = orig
            out[idx] = (up - down) / (2 * step)
    return g_enc, g_dec


@pytest.mark.parametrize("scheme", ["FP_ABS", "FP_PG", "PG"])
def test_gradient_matches_finite_differences(scheme, rng):
    v = rng.random((6, 10))
    enc = rng.random((10, 2)) * np.where(rng.random((10, 2)) < 0.3, -1, 1)
    dec = rng.random((2, 10)) * np.where(rng.random((2, 10)) < 0.3, -1, 1)
    if scheme == "PG":
        enc, dec = np.abs(enc), np.abs(dec)
    _, g_enc, g_dec = objective_and_gradient(v, AeParams(enc, dec), scheme)
    n_enc, n_dec = _numeric_grad(v, enc.copy(), dec.copy(), scheme)
    for g, n in ((g_enc, n_enc), (g_dec, n_dec)):
        mask = np.abs(g) > 1e-8
        assert np.max(np.abs(g[mask] - n[mask]) / np.abs(g[mask])) <= 1e-4


@pytest.mark.parametrize("scheme", SCHEMES)
def test_exposed_factors_non_negative(scheme, rng):
    v = rng.random((6, 10)) * 20
    fit = aenmf_fit(v, FitConfig(k=2, seed=1, max_iters=300, nonneg_scheme=scheme, learning_rate=1e-2))
    assert fit.method is Method.AENMF
    assert fit.h.min() >= 0 and fit.w.min() >= 0
    np.testing.assert_allclose(fit.h, v @ fit.w1)
    raw = fit.extra["raw"]
    if scheme in (NonNegScheme.PG, NonNegScheme.ABS):
        assert raw.w_enc.min() >= 0 and raw.w_dec.min() >= 0


def test_loss_decreases_over_windows(rng):
    v = rng.random((6, 10)) * 20
    fit = aenmf_fit(v, FitConfig(k=2, seed=2, max_iters=1000))
    trace = fit.loss_trace
    for start in range(0, 900, 100):
        assert trace[start + 100] < trace[start]


def test_deterministic(rng):
    v = rng.random((6, 10))
    a = aenmf_fit(v, FitConfig(k=2, seed=3, max_iters=200))
    b = aenmf_fit(v, FitConfig(k=2, seed=3, max_iters=200))
    assert np.array_equal(a.h, b.h) and np.array_equal(a.loss_trace, b.loss_trace)


def test_close_to_cnmf_on_exact_convex_structure(rng):
    base = rng.random((7, 2)) + 0.2
    v = np.repeat(base, 3, axis=1) * 10
    config = FitConfig(k=2, seed=0, max_iters=60000)
    ae = aenmf_fit(v, config)
    cn = cnmf_fit(v, config)
    scale = v.mean()
    # both approach an exact reconstruction and agree on the basis
    assert ae.final_loss < 1e-4 * scale and cn.final_loss < 1e-4 * scale
    assert match_signatures(ae.h, cn.h).acs > 0.9999


def test_init_shape_checked(rng):
    with pytest.raises(ValueError):
        aenmf_fit(rng.random((4, 6)), FitConfig(k=2), init=(np.ones((5, 2)), np.ones((2, 6))))
