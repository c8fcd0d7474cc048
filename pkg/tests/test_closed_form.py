import math

import pytest
from scipy.optimize import bisect

from storesize.closed_form import single_user_outage, single_user_size, single_user_spectrum
from storesize.errors import DomainError, Unstable, ValidationError


def test_spectrum_example():
    z1, a1 = single_user_spectrum(0.5, 0.8)
    assert z1 == pytest.approx(-4.375, rel=1e-15)
    assert a1 == pytest.approx(-0.5 / 1.2, rel=1e-15)


def test_spectrum_near_stability_boundary():
    chi = 0.5
    p = chi / (1 + chi)
    z_prev = -math.inf
    for gap in (1e-1, 1e-2, 1e-4, 1e-6):
        z1, _ = single_user_spectrum(chi, p + gap)
        assert z_prev < z1 < 0
        z_prev = z1
    assert abs(z_prev) < 1e-4


def test_errors():
    with pytest.raises(Unstable):
        single_user_spectrum(2.0, 0.5)
    with pytest.raises(DomainError):
        single_user_spectrum(0.5, 1.2)
    with pytest.raises(ValidationError):
        single_user_spectrum(-1.0, 0.5)
    with pytest.raises(ValidationError):
        single_user_size(0.5, 0.8, 1.5)


def test_outage_examples():
    assert single_user_outage(0.5, 0.8, 0.0) == pytest.approx(0.416666666666667, rel=1e-14)
    assert single_user_outage(0.5, 0.8, 1e3) == 0.0
    assert single_user_outage(0.5, 0.8, 0.8525031884) == pytest.approx(0.01, rel=1e-9)


def test_size_example_against_bisection():
    # oracle: invert the outage numerically, without the log formula
    oracle = bisect(lambda b: single_user_outage(0.5, 0.8, b) - 0.01, 0.0, 50.0, xtol=1e-15, rtol=1e-15)
    assert single_user_size(0.5, 0.8, 0.01) == pytest.approx(oracle, rel=1e-12)
    assert single_user_size(0.5, 0.8, 0.01) == pytest.approx(0.8525031882592, rel=1e-12)


def test_size_clamps_to_zero():
    assert single_user_size(0.5, 0.8, 0.5) == 0.0
    assert single_user_size(0.5, 0.8, 0.5 / 1.2) == 0.0


def _stable_grid():
    for chi in (0.2, 0.5, 1.0, 2.0):
        p = chi / (1 + chi)
        for frac in (0.2, 0.5, 0.8):
            yield chi, p + frac * (1 - p)


@pytest.mark.parametrize("chi, c", list(_stable_grid()))
@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_round_trip(chi, c, eps):
    b = single_user_size(chi, c, eps)
    if b > 0:
        assert single_user_outage(chi, c, b) == pytest.approx(eps, rel=1e-10)
    else:
        assert single_user_outage(chi, c, 0.0) <= eps


def test_size_monotone():
    for chi, c in _stable_grid():
        sizes = [single_user_size(chi, c, e) for e in (1e-4, 1e-3, 1e-2, 1e-1)]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    for chi in (0.2, 0.5, 1.0, 2.0):
        p = chi / (1 + chi)
        cs = [p + f * (1 - p) for f in (0.1, 0.3, 0.5, 0.7, 0.9)]
        sizes = [single_user_size(chi, c, 1e-3) for c in cs]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))
