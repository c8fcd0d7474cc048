import math

import mpmath as mp
import numpy as np
import pytest

from storesize.asymptotic import (
    asymptotic_outage,
    comparison_table,
    helper_f,
    helper_u,
    morrison_params,
)
from storesize.errors import DomainError, Unstable
from storesize.model import SystemModel

# 50-digit re-evaluation of the helper formulas at lam=0.5, s=0.3683
GOLDEN = {
    "f": 0.00030145777626563939,
    "u": 0.28482215585120825,
    "phi": 0.11529959987151878,
    "k": 0.69250164437623328,
    "psi": -0.0008075599671200644,
    "g": 0.11363236385999797,
}
GOLDEN_OUTAGE_N400 = {0.0: 4.8963341641447021e-21, 5.0: 7.6783960062344108e-22}


def _mp_helpers(s, lam):
    with mp.workdps(50):
        s, lam = mp.mpf(s), mp.mpf(lam)
        q = s + lam * (1 - s)
        ex = s * (1 + lam) - lam
        f = mp.log(s / (lam * (1 - s))) - 2 * ex / q
        u = ex / (s * (1 - lam))
        phi = s * mp.log(s) + (1 - s) * mp.log(1 - s) - s * mp.log(s) + mp.log(1 + lam)
        k = (1 - lam) + lam * (1 - 2 * s) / q
        psi = (2 * s - 1) * ex**3 / (s * (1 - s) ** 2 * q**3)
        g = k + mp.mpf("0.5") * q * psi * (1 - s) / f
        return {name: float(v) for name, v in dict(f=f, u=u, phi=phi, k=k, psi=psi, g=g).items()}


def _model(n=400, lam=0.5, s=0.3683):
    return SystemModel.from_params(n, lam, s * n)


def test_helpers_match_golden_snapshot():
    params = morrison_params(_model())
    for name, value in GOLDEN.items():
        assert getattr(params, name) == pytest.approx(value, rel=1e-9), name


@pytest.mark.parametrize("lam, s", [(0.5, 0.3683), (0.5, 0.45), (2.0, 0.8), (0.25, 0.3)])
def test_helpers_match_high_precision(lam, s):
    params = morrison_params(SystemModel.from_params(100, lam, s * 100))
    ref = _mp_helpers(s, lam)
    for name, value in ref.items():
        assert getattr(params, name) == pytest.approx(value, rel=1e-8), name


def test_u_vanishes_at_mean_demand():
    lam = 0.5
    assert helper_u(lam / (1 + lam), lam) == pytest.approx(0.0, abs=1e-16)
    assert helper_f(lam / (1 + lam), lam) == pytest.approx(0.0, abs=1e-15)


def test_lam_one_is_a_domain_error():
    with pytest.raises(DomainError) as info:
        morrison_params(SystemModel.from_params(100, 1.0, 60.0))
    assert info.value.helper == "u"


def test_rejects_unstable_and_out_of_range():
    with pytest.raises(Unstable):
        morrison_params(SystemModel.from_params(100, 0.5, 30.0))
    with pytest.raises(DomainError):
        morrison_params(SystemModel.from_params(100, 0.5, 100.0))


def test_outage_golden():
    model = _model()
    for x, value in GOLDEN_OUTAGE_N400.items():
        assert asymptotic_outage(model, x) == pytest.approx(value, rel=1e-8)


def test_zero_buffer_prefactor():
    model = _model()
    p = morrison_params(model)
    expect = 0.5 * math.sqrt(p.u / (math.pi * p.f * p.q * 400)) * math.exp(-400 * p.phi)
    assert asymptotic_outage(model, 0.0) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("n", [400, 500, 600, 700, 800])
def test_positive_and_decreasing_on_fig2_grid(n):
    xs = np.linspace(0, 15, 31)
    vals = asymptotic_outage(_model(n), xs)
    assert np.all(vals > 0) and np.all(np.isfinite(vals))
    assert np.all(np.diff(vals) < 0)


def test_decreasing_in_population():
    xs = [0.0, 5.0, 10.0]
    for x in xs:
        vals = [asymptotic_outage(_model(n), x) for n in (400, 500, 600, 700, 800)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_comparison_table():
    rows = comparison_table(_model(), [0.0, 5.0])
    assert [r["x"] for r in rows] == [0.0, 5.0]
    assert rows[1]["kappa"] == pytest.approx(5.0 / 400)
    assert rows[0]["exact"] == pytest.approx(0.12478406481337, rel=1e-9)
    assert rows[0]["ratio"] == pytest.approx(rows[0]["asymptotic"] / rows[0]["exact"])
