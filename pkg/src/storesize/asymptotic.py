"""Large-N approximation of the outage probability.

The helper functions below are coded exactly as they are commonly printed
for the many-source On/Off fluid queue, with time in mean On durations:

    f   = log(s / (lam (1 - s))) - 2 (s (1 + lam) - lam) / (s + lam (1 - s))
    u   = (s (1 + lam) - lam) / (s (1 - lam))
    phi = s log s + (1 - s) log(1 - s) - s log s + log(1 + lam)
    k   = (1 - lam) + lam (1 - 2 s) / (s + lam (1 - s))
    psi = (2 s - 1) (s (1 + lam) - lam)^3 / (s (1 - s)^2 (s + lam (1 - s))^3)
    g   = k + 0.5 (s + lam (1 - s)) psi (1 - s) / f

    P(S > x) ~ 0.5 sqrt(u / (pi f q N)) exp(-N phi - g x) exp(-2 sqrt(f q N x)),
    q = s + lam (1 - s),  s = C / N.

No term is "repaired".  ``phi`` contains ``+s log s ... - s log s`` which
cancels, and ``u`` is undefined at ``lam = 1``; both are kept as printed,
so the approximation can be far from the exact value.  Use
:func:`comparison_table` to quantify the gap against the exact solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, Unstable
from .model import SystemModel

__all__ = [
    "AsymptoticParams",
    "morrison_params",
    "asymptotic_outage",
    "comparison_table",
    "helper_f",
    "helper_u",
    "helper_phi",
    "helper_k",
    "helper_psi",
    "helper_g",
]


@dataclass(frozen=True)
class AsymptoticParams:
    sigma: float
    lam: float
    n_users: int
    f: float
    u: float
    phi: float
    g: float
    k: float
    psi: float

    @property
    def upsilon(self) -> float:
        return self.sigma - self.lam / (1.0 + self.lam)

    @property
    def q(self) -> float:
        return self.sigma + self.lam * (1.0 - self.sigma)


def _log(value: float, helper: str) -> float:
    if not value > 0:
        raise DomainError(f"log argument {value!r} <= 0 in helper {helper!r}", helper=helper)
    return math.log(value)


def _div(num: float, den: float, helper: str) -> float:
    if den == 0:
        raise DomainError(f"zero denominator in helper {helper!r}", helper=helper)
    return num / den


def helper_f(s: float, lam: float) -> float:
    q = s + lam * (1.0 - s)
    return _log(_div(s, lam * (1.0 - s), "f"), "f") - 2.0 * _div(s * (1.0 + lam) - lam, q, "f")


def helper_u(s: float, lam: float) -> float:
    return _div(s * (1.0 + lam) - lam, s * (1.0 - lam), "u")


def helper_phi(s: float, lam: float) -> float:
    return s * _log(s, "phi") + (1.0 - s) * _log(1.0 - s, "phi") - s * _log(s, "phi") + _log(1.0 + lam, "phi")


def helper_k(s: float, lam: float) -> float:
    return (1.0 - lam) + _div(lam * (1.0 - 2.0 * s), s + lam * (1.0 - s), "k")


def helper_psi(s: float, lam: float) -> float:
    q = s + lam * (1.0 - s)
    return _div((2.0 * s - 1.0) * (s * (1.0 + lam) - lam) ** 3, s * (1.0 - s) ** 2 * q**3, "psi")


def helper_g(s: float, lam: float) -> float:
    # "psi(1 - s)" read as the product psi * (1 - s)
    q = s + lam * (1.0 - s)
    return helper_k(s, lam) + 0.5 * q * _div(helper_psi(s, lam) * (1.0 - s), helper_f(s, lam), "g")


def morrison_params(model: SystemModel) -> AsymptoticParams:
    """Evaluate the helper functions for ``s = C/N`` and ``lam = chi``."""
    s = model.sigma
    lam = model.chi
    if not 0.0 < s < 1.0:
        raise DomainError(f"capacity per user must lie in (0, 1), got {s!r}", helper="sigma")
    if not s - lam / (1.0 + lam) > 0:
        raise Unstable(f"capacity per user {s:.12g} is not above mean demand {lam / (1 + lam):.12g}")

    params = AsymptoticParams(
        sigma=s,
        lam=lam,
        n_users=model.n_users,
        f=helper_f(s, lam),
        u=helper_u(s, lam),
        phi=helper_phi(s, lam),
        g=helper_g(s, lam),
        k=helper_k(s, lam),
        psi=helper_psi(s, lam),
    )
    for name in ("f", "u", "phi", "g", "k", "psi"):
        if not math.isfinite(getattr(params, name)):
            raise DomainError(f"helper {name!r} is not finite", helper=name)
    return params


def asymptotic_outage(model: SystemModel, x, params: AsymptoticParams | None = None):
    """Approximate ``P(S > x)`` for total normalized buffer ``x``."""
    if params is None:
        params = morrison_params(model)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("buffer size must be nonnegative", helper="x")
    n = params.n_users
    fqn = params.f * params.q * n
    radicand = params.u / (math.pi * fqn) if fqn != 0 else -1.0
    if not radicand >= 0:
        raise DomainError(f"negative square-root argument {radicand!r} in prefactor", helper="prefactor")
    if fqn < 0:
        raise DomainError("negative square-root argument in x-dependent term", helper="f")
    value = (
        0.5
        * math.sqrt(radicand)
        * np.exp(-n * params.phi - params.g * x_arr)
        * np.exp(-2.0 * np.sqrt(fqn * x_arr))
    )
    return float(value) if value.ndim == 0 else value


def comparison_table(model: SystemModel, xs) -> list[dict]:
    """Asymptotic vs exact outage at each buffer size in ``xs``."""
    from .spectral import outage_probability, solve_spectrum

    xs = np.asarray(xs, dtype=float)
    approx = np.atleast_1d(asymptotic_outage(model, xs))
    exact = np.atleast_1d(outage_probability(solve_spectrum(model), xs))
    rows = []
    for x, a, e in zip(xs, approx, exact):
        rows.append(
            {
                "N": model.n_users,
                "chi": model.chi,
                "sigma": model.sigma,
                "x": float(x),
                "kappa": float(x) / model.n_users,
                "asymptotic": float(a),
                "exact": float(e),
                "ratio": float(a / e) if e > 0 else math.nan,
            }
        )
    return rows
