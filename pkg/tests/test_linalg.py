"""Tests for the dense linear algebra primitives and moment estimation."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from affine_transport import (
    IndefiniteMatrix,
    NonFinite,
    NotSymmetric,
    SingularMatrix,
    TooFewSamples,
    estimate_moments,
    spd_inv_sqrt,
    spd_sqrt,
    svd,
)
from helpers import random_spd

seeds = st.integers(0, 2**32 - 1)


def test_sqrt_identity():
    np.testing.assert_allclose(spd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)


def test_sqrt_diagonal():
    np.testing.assert_allclose(
        spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12
    )


def test_sqrt_reconstructs_two_by_two():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    # eigenvalues 1 and 3 along (1,-1) and (1,1)
    np.testing.assert_allclose(np.linalg.eigvalsh(m), [1.0, 3.0], atol=1e-12)
    s = spd_sqrt(m)
    assert np.linalg.norm(s @ s - m) <= 1e-8 * (1.0 + np.linalg.norm(m))


def test_sqrt_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        spd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_sqrt_rejects_indefinite():
    with pytest.raises(IndefiniteMatrix):
        spd_sqrt(np.diag([1.0, -0.1]))


def test_inv_sqrt_identity():
    np.testing.assert_allclose(spd_inv_sqrt(np.eye(2)), np.eye(2), atol=1e-12)


def test_inv_sqrt_diagonal():
    np.testing.assert_allclose(
        spd_inv_sqrt(np.diag([4.0, 16.0])), np.diag([0.5, 0.25]), atol=1e-12
    )


def test_inv_sqrt_rejects_near_singular():
    with pytest.raises(SingularMatrix):
        spd_inv_sqrt(np.diag([1.0, 1e-15]))


def test_inv_sqrt_rejects_exactly_singular():
    with pytest.raises(SingularMatrix):
        spd_inv_sqrt(np.diag([1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_sqrt_squares_back(seed, d):
    m = random_spd(np.random.default_rng(seed), d)
    s = spd_sqrt(m)
    assert np.linalg.norm(s @ s - m) <= 1e-8 * (1.0 + np.linalg.norm(m))
    assert np.linalg.eigvalsh(s)[0] >= 0.0


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_inv_sqrt_whitens(seed, d):
    m = random_spd(np.random.default_rng(seed), d)
    s = spd_inv_sqrt(m)
    assert np.linalg.norm(s @ m @ s - np.eye(d)) <= 1e-6 * d


def test_svd_identity():
    u, s, v = svd(np.eye(2))
    np.testing.assert_allclose(s, [1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(u @ np.diag(s) @ v.T, np.eye(2), atol=1e-12)


def test_svd_signed_diagonal():
    _, s, _ = svd(np.diag([3.0, -2.0]))
    np.testing.assert_allclose(s, [3.0, 2.0], atol=1e-12)


def test_svd_rank_one():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(4)
    b = rng.standard_normal(3)
    _, s, _ = svd(np.outer(a, b))
    np.testing.assert_allclose(s[0], np.linalg.norm(a) * np.linalg.norm(b), rtol=1e-12)
    np.testing.assert_allclose(s[1:], 0.0, atol=1e-12)


def test_svd_rejects_non_finite():
    with pytest.raises(NonFinite):
        svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 64), st.integers(1, 64))
def test_svd_round_trip(seed, rows, cols):
    m = np.random.default_rng(seed).standard_normal((rows, cols))
    u, s, v = svd(m)
    assert np.linalg.norm(u @ np.diag(s) @ v.T - m) <= 1e-8 * (1.0 + np.linalg.norm(m))
    assert np.all(np.diff(s) <= 0.0)


def test_moments_two_points():
    est = estimate_moments(np.array([[0.0, 0.0], [2.0, 0.0]]))
    np.testing.assert_allclose(est.mean, [1.0, 0.0], atol=1e-15)
    # 1/n divisor: covariance diag(1, 0) before the ridge
    np.testing.assert_allclose(est.covariance, np.diag([1.0, 0.0]), atol=1e-8)
    assert est.covariance[1, 1] > 0.0
    assert est.sample_count == 2


def test_moments_repeated_point():
    est = estimate_moments(np.tile([3.0, -1.0], (5, 1)))
    np.testing.assert_allclose(est.covariance, 1e-10 * np.eye(2), rtol=1e-12)


def test_moments_one_dimensional_input():
    est = estimate_moments(np.array([0.0, 2.0]))
    assert est.dim == 1
    np.testing.assert_allclose(est.mean, [1.0])
    np.testing.assert_allclose(est.covariance, [[1.0]], atol=1e-8)


def test_moments_concentration():
    draws = np.random.default_rng(20260822).standard_normal((100000, 3))
    est = estimate_moments(draws)
    assert np.linalg.norm(est.covariance - np.eye(3)) <= 0.05


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5))
def test_moments_translation_equivariant(seed, d):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((100, d))
    v = rng.uniform(-2.0, 2.0, size=d)
    base = estimate_moments(x)
    shifted = estimate_moments(x + v)
    np.testing.assert_allclose(shifted.mean, base.mean + v, atol=1e-12)
    np.testing.assert_allclose(shifted.covariance, base.covariance, atol=1e-12)


def test_moments_rejects_single_sample():
    with pytest.raises(TooFewSamples):
        estimate_moments(np.zeros((1, 2)))


def test_moments_rejects_non_finite():
    with pytest.raises(NonFinite):
        estimate_moments(np.array([[0.0], [np.inf]]))
