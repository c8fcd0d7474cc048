import numpy as np
import pytest
from scipy.stats import binom

from storesize.errors import InvalidConfig, Unstable
from storesize.model import SystemModel
from storesize.simulator import (
    SimConfig,
    SimEstimate,
    compare_exact_vs_sim,
    replication_rng,
    simulate,
    simulate_loss_fraction,
    simulate_occupancy,
    simulate_outage,
    simulate_outage_curve,
)
from storesize.spectral import outage_probability, solve_spectrum

SHORT = dict(horizon=2e4, warmup=500.0, replications=8)


def test_reproducible_bit_identical(two_user):
    cfg = SimConfig(two_user, b=0.5, seed=42, **SHORT)
    a, b = simulate_outage(cfg), simulate_outage(cfg)
    assert a.samples == b.samples and a.mean == b.mean
    other = simulate_outage(SimConfig(two_user, b=0.5, seed=43, **SHORT))
    assert other.samples != a.samples


def test_replication_streams_independent_of_count(two_user):
    few = simulate_outage(SimConfig(two_user, b=0.5, seed=3, horizon=5e3, warmup=100.0, replications=3))
    many = simulate_outage(SimConfig(two_user, b=0.5, seed=3, horizon=5e3, warmup=100.0, replications=6))
    assert many.samples[:3] == few.samples
    x = replication_rng(3, 1).random(4)
    assert np.array_equal(x, replication_rng(3, 1).random(4))


def test_occupancy_is_binomial():
    model = SystemModel.from_params(10, 0.5, 4.5)
    mean, err = simulate_occupancy(SimConfig(model, b=1.0, seed=1, **SHORT))
    pi = binom.pmf(np.arange(11), 10, model.p)
    assert mean.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(mean - pi) <= 4 * err + 1e-4)


@pytest.mark.parametrize("params", [(2, 1.0, 1.5), (5, 0.5, 2.5)])
def test_curve_agrees_with_exact(params):
    model = SystemModel.from_params(*params)
    b = [0.0, 0.5, 1.0, 2.0]
    exact = outage_probability(solve_spectrum(model), b)
    for ex, est in zip(exact, simulate_outage_curve(SimConfig(model, b=0.0, seed=5, **SHORT), b)):
        assert abs(est.mean - ex) <= 4 * est.stderr + 1e-4


def test_no_overload_means_no_outage():
    model = SystemModel.from_params(3, 0.5, 3.5)
    est = simulate_outage(SimConfig(model, b=0.0, seed=0, horizon=2e3, warmup=10.0, replications=2))
    assert est.mean == 0.0 and est.stderr == 0.0
    loss = simulate_loss_fraction(SimConfig(model, b=0.0, seed=0, horizon=2e3, warmup=10.0, replications=2,
                                            metric="loss_fraction"))
    assert loss.mean == 0.0


def test_loss_fraction_without_storage_matches_excess_demand(two_user):
    # with b = 0 the unserved energy is E[(i - C)+] / E[i]
    pi = binom.pmf(np.arange(3), 2, two_user.p)
    expect = (pi * np.maximum(np.arange(3) - 1.5, 0)).sum() / (pi * np.arange(3)).sum()
    est = simulate(SimConfig(two_user, b=0.0, seed=2, metric="loss_fraction", **SHORT))
    assert abs(est.mean - expect) <= 4 * est.stderr + 1e-4


def test_loss_fraction_decreases_with_storage(two_user):
    vals = [simulate_loss_fraction(SimConfig(two_user, b=b, seed=9, **SHORT)).mean for b in (0.0, 0.5, 2.0)]
    assert vals[0] > vals[1] > vals[2] >= 0


def test_unstable_model_rejected():
    with pytest.raises(Unstable):
        simulate_outage(SimConfig(SystemModel.from_params(4, 1.0, 1.5), b=1.0))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(horizon=10.0, warmup=20.0),
        dict(replications=1),
        dict(replications=2.5),
        dict(b=-1.0),
        dict(metric="energy"),
        dict(seed=-1),
        dict(horizon=float("inf")),
    ],
)
def test_config_validation(two_user, kwargs):
    base = dict(model=two_user, b=1.0)
    base.update(kwargs)
    with pytest.raises(InvalidConfig):
        SimConfig(**base)


def test_estimate_from_samples():
    est = SimEstimate.from_samples([1.0, 2.0, 3.0], 30.0, 7)
    assert est.mean == 2.0
    assert est.stderr == pytest.approx(1 / np.sqrt(3))
    assert est.ci95[0] < 2.0 < est.ci95[1]


def test_compare_rows_and_floor(two_user):
    rows = compare_exact_vs_sim([(two_user, [0.0, 6.0])], horizon=5e3, warmup=100.0, replications=4, seed=1)
    assert rows == compare_exact_vs_sim([(two_user, [0.0, 6.0])], horizon=5e3, warmup=100.0, replications=4,
                                        seed=1)
    first, rare = rows
    assert not first["stderr_floored"]
    assert first["z"] == pytest.approx((first["sim_mean"] - first["exact"]) / first["sim_stderr"])
    if rare["sim_stderr"] == 0:
        assert rare["stderr_floored"]
        assert np.isfinite(rare["z"])
