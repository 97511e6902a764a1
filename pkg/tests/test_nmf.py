import numpy as np
import pytest

from cvxsig.core import FitConfig, Method, frobenius_loss
from cvxsig.nmf import nmf_fit, nmf_update
from cvxsig.sim import paper_example_spec, simulate_poisson


def test_fixed_point_at_exact_factorization(rng):
    h, w = rng.random((6, 2)) + 0.1, rng.random((2, 10)) + 0.1
    h2, w2 = nmf_update(h, w, h @ w)
    np.testing.assert_allclose(h2, h, rtol=1e-12)
    np.testing.assert_allclose(w2, w, rtol=1e-12)


def test_scalar_sweep_by_hand():
    h, w = nmf_update([[1.0]], [[1.0]], [[4.0]])
    # h: 1 * (4*1) / (1*1*1) = 4; w: 1 * (4*4) / (4*4*1) = 1
    assert h[0, 0] == pytest.approx(4.0)
    assert w[0, 0] == pytest.approx(1.0)


def test_loss_monotone_over_200_sweeps(rng):
    v = rng.random((6, 10)) * 10
    h, w = rng.random((6, 2)), rng.random((2, 10))
    prev = frobenius_loss(v, h @ w)
    for _ in range(200):
        h, w = nmf_update(h, w, v)
        assert h.min() >= 0 and w.min() >= 0
        cur = frobenius_loss(v, h @ w)
        assert cur <= prev * (1 + 1e-10)
        prev = cur


def test_update_shape_check():
    with pytest.raises(ValueError):
        nmf_update(np.ones((3, 2)), np.ones((2, 4)), np.ones((3, 5)))


def test_rank_one_recovered(rng):
    v = np.outer(rng.random(8) + 0.5, rng.random(12) + 0.5)
    fit = nmf_fit(v, FitConfig(k=1, seed=1, max_iters=20000))
    assert fit.final_loss < 1e-6 * v.mean()


def test_deterministic(rng):
    v = rng.random((6, 12))
    a = nmf_fit(v, FitConfig(k=2, seed=5, max_iters=300))
    b = nmf_fit(v, FitConfig(k=2, seed=5, max_iters=300))
    assert np.array_equal(a.h, b.h) and np.array_equal(a.w, b.w)
    assert np.array_equal(a.loss_trace, b.loss_trace)


def test_trace_monotone_and_flags(rng):
    v = rng.random((6, 12))
    fit = nmf_fit(v, FitConfig(k=3, seed=2, max_iters=50))
    assert fit.method is Method.NMF
    assert not fit.converged and fit.iters_run == 50 and len(fit.loss_trace) == 51
    assert np.all(np.diff(fit.loss_trace) <= fit.loss_trace[:-1] * 1e-10)
    assert fit.n_params == 6 * 3 + 3 * 12


def test_degenerate_input_rejected():
    with pytest.raises(ValueError, match="degenerate input"):
        nmf_fit(np.zeros((4, 5)), FitConfig(k=2))


def test_explicit_init_and_scale_gauge(rng):
    v = rng.random((5, 9))
    h0, w0 = rng.random((5, 2)), rng.random((2, 9))
    fit = nmf_fit(v, FitConfig(k=2, max_iters=1), init=(h0, w0))
    ref = nmf_update(h0, w0, v)
    np.testing.assert_array_equal(fit.h, ref[0])
    # (cH, W/c) reconstructs identically
    np.testing.assert_allclose((3 * fit.h) @ (fit.w / 3), fit.h @ fit.w, rtol=1e-12)


def test_paper_example_nmf_beats_convex_methods():
    from cvxsig.aenmf import aenmf_fit
    from cvxsig.cnmf import cnmf_fit
    v = simulate_poisson(paper_example_spec(3)).matrix
    config = FitConfig(k=2, seed=3, max_iters=60000)
    nmf = nmf_fit(v, config).final_loss
    assert nmf <= cnmf_fit(v, config).final_loss
    assert nmf <= aenmf_fit(v, config).final_loss
