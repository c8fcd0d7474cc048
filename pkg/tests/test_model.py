import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import null_space
from scipy.stats import binom

from storesize.errors import ValidationError
from storesize.model import (
    PhysicalUnits,
    SystemModel,
    UserModel,
    build_generator,
    capacity_headroom,
    from_normalized_storage,
    stationary_distribution,
    to_normalized,
)


def test_user_model_probability():
    assert UserModel(2.0).p == pytest.approx(2 / 3, rel=1e-15)
    assert UserModel(0.5).p == pytest.approx(1 / 3, rel=1e-15)
    assert UserModel.from_on_probability(1 / 3).chi == pytest.approx(0.5)


@pytest.mark.parametrize("chi", [0.0, -1.0, math.inf, math.nan])
def test_user_model_rejects_bad_chi(chi):
    with pytest.raises(ValidationError):
        UserModel(chi)


@pytest.mark.parametrize("kwargs", [dict(n_users=0), dict(n_users=2.5), dict(capacity=-1.0)])
def test_system_model_validation(kwargs):
    base = dict(n_users=2, user=UserModel(1.0), capacity=1.5)
    base.update(kwargs)
    with pytest.raises(ValidationError):
        SystemModel(**base)


def test_generator_single_user():
    M = build_generator(SystemModel.from_params(1, 2.0, 0.9))
    np.testing.assert_array_equal(M, [[-2.0, 2.0], [1.0, -1.0]])


def test_generator_two_users():
    M = build_generator(SystemModel.from_params(2, 1.0, 1.5))
    np.testing.assert_array_equal(M, [[-2, 2, 0], [1, -2, 1], [0, 2, -2]])


@given(n=st.integers(1, 60), chi=st.floats(0.01, 20.0))
@settings(max_examples=50, deadline=None)
def test_generator_structure(n, chi):
    M = build_generator(SystemModel.from_params(n, chi, 0.0))
    assert M.shape == (n + 1, n + 1)
    off = M - np.diag(np.diag(M))
    # diagonal is the exact negation of the off-diagonal row sum
    assert np.all(np.diag(M) == -off.sum(axis=1))
    assert np.abs(M.sum(axis=1)).max() <= 4e-16 * np.abs(M).max()
    assert np.all(off >= 0)
    assert np.all(np.triu(M, 2) == 0) and np.all(np.tril(M, -2) == 0)
    # up-rate (N-j)chi, down-rate j
    j = np.arange(n)
    np.testing.assert_allclose(np.diag(M, 1), (n - j) * chi)
    np.testing.assert_allclose(np.diag(M, -1), j + 1)


def test_stationary_examples():
    np.testing.assert_allclose(stationary_distribution(SystemModel.from_params(1, 2.0, 0.9)), [1 / 3, 2 / 3])
    np.testing.assert_allclose(stationary_distribution(SystemModel.from_params(2, 1.0, 1.5)), [0.25, 0.5, 0.25])


def test_stationary_matches_null_space_oracle():
    model = SystemModel.from_params(5, 0.5, 2.5)
    M = build_generator(model)
    ns = null_space(M.T)[:, 0]
    ns = ns / ns.sum()
    pi = stationary_distribution(model)
    np.testing.assert_allclose(pi, ns, rtol=1e-10)
    np.testing.assert_allclose(pi, binom.pmf(np.arange(6), 5, 1 / 3), rtol=1e-12)
    assert np.abs(pi @ M).max() <= 1e-12


@given(n=st.integers(1, 1000), chi=st.floats(0.05, 10.0))
@settings(max_examples=40, deadline=None)
def test_stationary_is_binomial(n, chi):
    model = SystemModel.from_params(n, chi, 0.0)
    pi = stationary_distribution(model)
    assert np.all(pi >= 0)
    assert pi.sum() == pytest.approx(1.0, abs=1e-12)
    ref = binom.pmf(np.arange(n + 1), n, model.p)
    big = ref > 1e-250
    np.testing.assert_allclose(pi[big], ref[big], rtol=1e-10)
    assert np.abs(pi @ build_generator(model)).max() <= 1e-12 * n


def test_headroom():
    assert capacity_headroom(SystemModel(400, UserModel(0.5), 147.32)) == pytest.approx(0.035, abs=5e-5)
    assert capacity_headroom(SystemModel.from_params(2, 1.0, 1.5)) == pytest.approx(0.25)
    boundary = SystemModel.from_params(3, 0.5, 1.0)
    assert capacity_headroom(boundary) == pytest.approx(0.0, abs=1e-15)
    assert not boundary.stable()


@given(n=st.integers(1, 200), chi=st.floats(0.05, 10.0), c=st.floats(0.0, 300.0))
@settings(max_examples=60, deadline=None)
def test_stability_iff_positive_headroom(n, chi, c):
    model = SystemModel.from_params(n, chi, c)
    headroom = capacity_headroom(model)
    if abs(headroom) > 1e-12:
        assert model.stable() == (headroom > 0)


def test_units():
    units = PhysicalUnits(rp_kw=10.0, mean_on_hours=0.5)
    assert from_normalized_storage(units, 9.0) == 45.0
    assert from_normalized_storage(units, 0.0) == 0.0
    ident = PhysicalUnits(1.0, 1.0)
    assert from_normalized_storage(ident, 3.7) == 3.7
    model = to_normalized(units, 400, 1473.2, chi=0.5)
    assert model.capacity == pytest.approx(147.32)
    assert to_normalized(ident, 4, 2.5, chi=1.0).capacity == 2.5


@pytest.mark.parametrize("rp, hours", [(0.0, 1.0), (1.0, -2.0)])
def test_units_reject_nonpositive(rp, hours):
    with pytest.raises(ValidationError):
        PhysicalUnits(rp, hours)
