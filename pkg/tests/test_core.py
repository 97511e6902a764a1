import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cvxsig.core import (FitConfig, MutationCatalog, NonNegScheme, child_seed, frobenius_loss,
                         init_uniform, iterate_to_tolerance)
from oracles import naive_frobenius

small = st.floats(0, 1e3, allow_nan=False, allow_infinity=False)


def pair(shape):
    return st.tuples(arrays(np.float64, shape, elements=small), arrays(np.float64, shape, elements=small))


def test_loss_identity():
    v = np.arange(12.0).reshape(3, 4)
    assert frobenius_loss(v, v) == 0.0


def test_loss_345():
    assert frobenius_loss([[3, 0], [0, 4]], np.zeros((2, 2))) == 1.25


def test_loss_matches_naive_loops(rng):
    a, b = rng.random((6, 30)), rng.random((6, 30))
    assert abs(frobenius_loss(a, b) - naive_frobenius(a.tolist(), b.tolist())) < 1e-12


def test_loss_shape_mismatch_names_both():
    with pytest.raises(ValueError, match=r"\(2, 3\).*\(3, 2\)"):
        frobenius_loss(np.zeros((2, 3)), np.zeros((3, 2)))


@given(pair((3, 4)))
def test_loss_symmetric(ab):
    a, b = ab
    assert frobenius_loss(a, b) == frobenius_loss(b, a)


@given(pair((3, 4)))
def test_loss_zero_iff_equal(ab):
    a, b = ab
    assert (frobenius_loss(a, b) == 0) == np.array_equal(a, b)


@given(pair((2, 5)), st.floats(0, 100))
def test_loss_scales_linearly(ab, c):
    a, b = ab
    assert frobenius_loss(c * a, c * b) == pytest.approx(c * frobenius_loss(a, b), rel=1e-9, abs=1e-9)


def test_init_uniform_deterministic():
    assert np.array_equal(init_uniform(5, 7, 3), init_uniform(5, 7, 3))
    assert not np.array_equal(init_uniform(5, 7, 3), init_uniform(5, 7, 4))


def test_init_uniform_range_and_mean():
    x = init_uniform(1000, 1000, 99)
    assert x.min() >= 0 and x.max() < 1
    assert 0.49 <= x.mean() <= 0.51


def test_child_seeds_are_independent_streams():
    a = init_uniform(3, 3, child_seed(7, 0))
    b = init_uniform(3, 3, child_seed(7, 1))
    assert not np.array_equal(a, b)
    assert np.array_equal(a, init_uniform(3, 3, child_seed(7, 0)))


def test_init_uniform_rejects_empty():
    with pytest.raises(ValueError):
        init_uniform(0, 3, 1)


@pytest.mark.parametrize("kwargs", [dict(k=0), dict(k=2, max_iters=0), dict(k=2, rel_tol=0),
                                    dict(k=2, learning_rate=-1.0), dict(k=2, nonneg_scheme="nope")])
def test_fitconfig_validation(kwargs):
    with pytest.raises(ValueError):
        FitConfig(**kwargs)


def test_fitconfig_scheme_coerced():
    assert FitConfig(k=2, nonneg_scheme="PG").nonneg_scheme is NonNegScheme.PG
    with pytest.raises(ValueError, match="exceeds"):
        FitConfig(k=5).check_shape(4, 10)


def test_catalog_validation():
    MutationCatalog.from_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError, match="negative"):
        MutationCatalog.from_matrix([[1, -2], [3, 4]])
    with pytest.raises(ValueError, match="integer"):
        MutationCatalog.from_matrix([[1, 2.5], [3, 4]])
    with pytest.raises(ValueError, match="duplicate"):
        MutationCatalog(np.ones((2, 2)), ("a", "a"), ("x", "y"))
    with pytest.raises(ValueError, match="labels"):
        MutationCatalog(np.ones((2, 2)), ("a",), ("x", "y"))


def test_catalog_select_samples_keeps_ids_unique():
    cat = MutationCatalog.from_matrix(np.arange(6.0).reshape(2, 3))
    sub = cat.select_samples([0, 0, 2])
    assert sub.sample_ids == ("s1", "s1#1", "s3")
    assert np.array_equal(sub.matrix, cat.matrix[:, [0, 0, 2]])


def test_iterate_stops_on_relative_change():
    losses = iter([10.0, 5.0, 5.0, 1.0])
    trace, converged, iters = iterate_to_tolerance(lambda: next(losses), 20.0, FitConfig(k=1, max_iters=10))
    assert converged and iters == 3
    assert list(trace) == [20.0, 10.0, 5.0, 5.0]


def test_iterate_first_step_never_terminates():
    trace, converged, iters = iterate_to_tolerance(lambda: 1.0, 1.0, FitConfig(k=1, max_iters=1))
    assert not converged and iters == 1 and len(trace) == 2
