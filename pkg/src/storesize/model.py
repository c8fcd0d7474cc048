"""On/Off consumer population and its birth-death background chain.

All quantities are normalized: time is measured in mean On durations
(1/mu) and power in per-user peak demand R_p.  The Off->On rate of one
consumer is then ``chi = lambda / mu`` and the On->Off rate is 1, so a
state with ``i`` active consumers fills the storage deficit at rate
``i - C``.

States are indexed ``0..N`` (number of active consumers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError

__all__ = [
    "UserModel",
    "SystemModel",
    "PhysicalUnits",
    "build_generator",
    "stationary_distribution",
    "log_stationary_distribution",
    "capacity_headroom",
    "to_normalized",
    "from_normalized_storage",
]


@dataclass(frozen=True)
class UserModel:
    """A single On/Off consumer.

    Parameters
    ----------
    chi : float
        Ratio of the request rate to the service rate, lambda / mu.
    """

    chi: float

    def __post_init__(self):
        if not (math.isfinite(self.chi) and self.chi > 0):
            raise ValidationError(f"chi must be a positive finite number, got {self.chi!r}")

    @property
    def p(self) -> float:
        """Stationary On-probability chi / (1 + chi)."""
        return self.chi / (1.0 + self.chi)

    @classmethod
    def from_on_probability(cls, p: float) -> "UserModel":
        if not 0.0 < p < 1.0:
            raise ValidationError(f"on-probability must lie in (0, 1), got {p!r}")
        return cls(chi=p / (1.0 - p))


@dataclass(frozen=True)
class SystemModel:
    """``n_users`` identical consumers sharing a grid feed of ``capacity``."""

    n_users: int
    user: UserModel
    capacity: float

    def __post_init__(self):
        if isinstance(self.n_users, bool) or int(self.n_users) != self.n_users or self.n_users < 1:
            raise ValidationError(f"n_users must be a positive integer, got {self.n_users!r}")
        object.__setattr__(self, "n_users", int(self.n_users))
        if not (math.isfinite(self.capacity) and self.capacity >= 0):
            raise ValidationError(f"capacity must be a nonnegative finite number, got {self.capacity!r}")

    @classmethod
    def from_params(cls, n_users: int, chi: float, capacity: float) -> "SystemModel":
        return cls(n_users=n_users, user=UserModel(chi), capacity=float(capacity))

    @property
    def chi(self) -> float:
        return self.user.chi

    @property
    def p(self) -> float:
        return self.user.p

    @property
    def mean_demand(self) -> float:
        return self.n_users * self.user.p

    @property
    def sigma(self) -> float:
        """Grid power per consumer, C / N."""
        return self.capacity / self.n_users

    def stable(self) -> bool:
        return self.mean_demand < self.capacity

    def with_capacity(self, capacity: float) -> "SystemModel":
        return replace(self, capacity=float(capacity))

    def with_users(self, n_users: int) -> "SystemModel":
        return replace(self, n_users=n_users)


@dataclass(frozen=True)
class PhysicalUnits:
    """Scale factors back to physical units (kW, hours)."""

    rp_kw: float
    mean_on_hours: float

    def __post_init__(self):
        for name in ("rp_kw", "mean_on_hours"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be strictly positive, got {value!r}")


def _rates(model: SystemModel):
    n = model.n_users
    j = np.arange(n + 1, dtype=float)
    up = (n - j[:-1]) * model.chi  # j -> j+1
    down = j[1:]  # j+1 -> j
    return up, down


def build_generator(model: SystemModel) -> np.ndarray:
    """Tridiagonal generator of the number of active consumers.

    Rows sum to zero exactly: the diagonal is built by negating the
    off-diagonal sums.
    """
    up, down = _rates(model)
    M = np.diag(up, 1) + np.diag(down, -1)
    M[np.diag_indices_from(M)] = -M.sum(axis=1)
    return M


def log_stationary_distribution(model: SystemModel) -> np.ndarray:
    """Natural log of Binomial(N, p) probabilities, safe for large N."""
    n = model.n_users
    j = np.arange(n + 1, dtype=float)
    log_p = math.log(model.chi) - math.log1p(model.chi)
    log_q = -math.log1p(model.chi)
    log_binom = gammaln(n + 1.0) - gammaln(j + 1.0) - gammaln(n - j + 1.0)
    return log_binom + j * log_p + (n - j) * log_q


def stationary_distribution(model: SystemModel) -> np.ndarray:
    """Stationary law of the birth-death chain, i.e. Binomial(N, p).

    Evaluated in the log domain, so far-tail entries underflow to zero
    gracefully instead of producing NaNs.
    """
    pi = np.exp(log_stationary_distribution(model))
    return pi / pi.sum()


def capacity_headroom(model: SystemModel) -> float:
    """Per-user grid power above mean demand, ``C/N - p``."""
    return model.capacity / model.n_users - model.p


def to_normalized(units: PhysicalUnits, n: int, grid_kw: float, chi: float) -> SystemModel:
    if not (math.isfinite(grid_kw) and grid_kw >= 0):
        raise ValidationError(f"grid_kw must be nonnegative, got {grid_kw!r}")
    return SystemModel.from_params(n, chi, grid_kw / units.rp_kw)


def from_normalized_storage(units: PhysicalUnits, b_norm: float) -> float:
    """Convert a storage size in ``R_p / mu`` units to kWh."""
    if b_norm < 0:
        raise ValidationError(f"storage size must be nonnegative, got {b_norm!r}")
    return b_norm * units.rp_kw * units.mean_on_hours
