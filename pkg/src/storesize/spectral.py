"""Exact stationary backlog distribution of the shared storage.

The stationary joint distribution ``F_i(x) = P(S <= x, i users On)``
solves ``F'(x) D = F(x) M`` where ``M`` is the birth-death generator and
``D = diag(i - C)`` the drift.  Its bounded solution is

    F(x) = pi + sum_k alpha_k phi_k exp(z_k x),     z_k < 0,

with ``z_k phi_k D = phi_k M`` and the coefficients fixed by
``F_j(0) = 0`` in every overload state ``j > C`` (the backlog cannot sit
at zero while demand exceeds supply).

Numerics
--------
The chain is reversible, so ``M`` is similar to a symmetric matrix via
``diag(sqrt(pi))``.  Scaling further by ``|D|^(-1/2)`` turns the left
eigenproblem into ``J A w = z w`` with ``A`` symmetric negative
semidefinite and ``J = sign(D)``.  Everything (eigenvectors, boundary
system) is solved in these balanced coordinates, which keeps the boundary
system condition number O(1) even at N ~ 10^3, where the raw eigenvectors
of ``M D^-1`` span hundreds of orders of magnitude.

Two eigen-solvers are available:

``"tridiagonal"`` (default)
    ``-A = L L^T`` with ``L`` bidiagonal, so the nonzero spectrum of
    ``J A`` equals that of the symmetric tridiagonal ``-L^T J L``.
    Eigenvalues are real by construction.
``"dense"``
    Dense nonsymmetric eigendecomposition of the balanced ``J A``.
    Kept as an independent route; complex eigenvalues raise
    :class:`NumericalInstability`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import DriftSingular, NumericalInstability, StoresizeError, Unstable, ValidationError
from .model import SystemModel, build_generator, log_stationary_distribution, stationary_distribution

__all__ = [
    "INTEGER_TOL",
    "DriftMatrix",
    "SpectralSolution",
    "CapacityMixture",
    "drift_matrix",
    "solve_spectrum",
    "cdf",
    "outage_probability",
    "outage_probability_mixture",
    "eigen_residuals",
]

INTEGER_TOL = 1e-9
IMAG_TOL = 1e-8
COND_WARN = 1e12


@dataclass(frozen=True, eq=False)
class DriftMatrix:
    diagonal: np.ndarray

    def toarray(self) -> np.ndarray:
        return np.diag(self.diagonal)


def drift_matrix(model: SystemModel) -> DriftMatrix:
    """Diagonal drift ``i - C`` of the backlog in each state.

    Raises :class:`DriftSingular` if ``C`` is within ``INTEGER_TOL`` of an
    integer in ``[0, N]``; callers may retry with a nudged capacity.
    """
    c = model.capacity
    nearest = round(c)
    if 0 <= nearest <= model.n_users and abs(c - nearest) <= INTEGER_TOL:
        raise DriftSingular(
            f"capacity {c!r} is within {INTEGER_TOL:g} of the integer {nearest}; "
            f"state {nearest} has zero drift",
            capacity=c,
            state=int(nearest),
        )
    return DriftMatrix(np.arange(model.n_users + 1, dtype=float) - c)


@dataclass(frozen=True, eq=False)
class SpectralSolution:
    """Spectral representation of the stationary backlog distribution.

    ``eigenvalues[0] == 0`` with ``eigenvectors[0] == pi``; the remaining
    entries are the negative eigenvalues in ascending order.  Each
    non-trivial eigenvector is scaled so its largest-magnitude entry is +1, and
    ``coefficients[k]`` pairs with ``eigenvalues[k + 1]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    coefficients: np.ndarray
    pi: np.ndarray
    capacity: float
    n_users: int
    condition: float = 1.0

    def __post_init__(self):
        for name in ("eigenvalues", "eigenvectors", "coefficients", "pi"):
            getattr(self, name).setflags(write=False)
        # weight of each exponential in P(S > x)
        mass = -self.coefficients * self.eigenvectors[1:].sum(axis=1)
        mass.setflags(write=False)
        object.__setattr__(self, "_tail_weights", mass)

    @property
    def decay_rates(self) -> np.ndarray:
        """Negative eigenvalues (excludes ``z0 = 0``)."""
        return self.eigenvalues[1:]

    @property
    def tail_weights(self) -> np.ndarray:
        return self._tail_weights

    @property
    def n_negative(self) -> int:
        return len(self.coefficients)


def _trivial_solution(model: SystemModel) -> SpectralSolution:
    pi = stationary_distribution(model)
    return SpectralSolution(
        eigenvalues=np.zeros(1),
        eigenvectors=pi[None, :].copy(),
        coefficients=np.zeros(0),
        pi=pi,
        capacity=model.capacity,
        n_users=model.n_users,
    )


def _balanced_tridiagonal(model: SystemModel, d: np.ndarray):
    """Negative eigenpairs of ``J A`` via the symmetric tridiagonal route."""
    n = model.n_users
    j = np.arange(n + 1, dtype=float)
    up = (n - j[:-1]) * model.chi
    down = j[1:]
    # -S = B B^T, column e of B is sqrt(up_e) e_e - sqrt(down_{e+1}) e_{e+1}
    diag = -(up / d[:-1] + down / d[1:])
    off = np.sqrt(down[:-1] * up[1:]) / d[1:-1]
    z, V = sla.eigh_tridiagonal(diag, off)
    neg = z < 0
    z, V = z[neg], V[:, neg]
    BV = np.zeros((n + 1, V.shape[1]))
    BV[:-1] += np.sqrt(up)[:, None] * V
    BV[1:] -= np.sqrt(down)[:, None] * V
    W = -(np.sign(d) / np.sqrt(np.abs(d)))[:, None] * BV / z[None, :]
    return z, W


def _balanced_dense(model: SystemModel, d: np.ndarray):
    """Negative eigenpairs of ``J A`` via a dense nonsymmetric solve."""
    n = model.n_users
    j = np.arange(n + 1, dtype=float)
    up = (n - j[:-1]) * model.chi
    down = j[1:]
    s = 1.0 / np.sqrt(np.abs(d))
    sym_off = np.sqrt(up * down) * s[:-1] * s[1:]
    sym_diag = -(np.r_[up, 0.0] + np.r_[0.0, down]) * s * s
    A = np.diag(sym_diag) + np.diag(sym_off, 1) + np.diag(sym_off, -1)
    z, W = np.linalg.eig(np.sign(d)[:, None] * A)
    scale = np.abs(z).max()
    n_over = int(np.count_nonzero(d > 0))
    order = np.argsort(z.real)
    keep = order[:n_over]
    if n_over and np.abs(z[keep].imag).max() > IMAG_TOL * scale:
        raise NumericalInstability(
            f"complex eigenvalue with |Im z| = {np.abs(z[keep].imag).max():.3g} "
            f"(N={n}, C={model.capacity})"
        )
    return z[keep].real, W[:, keep].real


def _solve_boundary(boundary: np.ndarray, rhs: np.ndarray):
    """LU solve with a LAPACK 1-norm condition estimate."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(boundary, check_finite=False)
    anorm = np.abs(boundary).sum(axis=0).max()
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    cond = 1.0 / rcond if rcond > 0 else math.inf
    if info != 0 or not math.isfinite(cond) or cond > 1e15:
        raise NumericalInstability(f"boundary system is singular (condition estimate {cond:.3g})")
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned boundary system (condition {cond:.3g})", RuntimeWarning, stacklevel=3)
    return cond, sla.lu_solve((lu, piv), rhs, check_finite=False)


_SOLVERS = {"tridiagonal": _balanced_tridiagonal, "dense": _balanced_dense}


def solve_spectrum(model: SystemModel, solver: str = "tridiagonal") -> SpectralSolution:
    """Eigenvalues, eigenvectors and boundary coefficients for ``model``.

    Raises
    ------
    Unstable
        If ``N p >= C``.
    DriftSingular
        If ``C`` is (numerically) an integer below ``N``.
    NumericalInstability
        On complex spectrum (dense solver), a wrong count of negative
        eigenvalues or a singular boundary system.
    """
    if solver not in _SOLVERS:
        raise ValidationError(f"unknown solver {solver!r}; expected one of {sorted(_SOLVERS)}")
    if not model.stable():
        raise Unstable(
            f"mean demand N*p = {model.mean_demand:.12g} is not below capacity C = {model.capacity:.12g}"
        )
    if model.capacity >= model.n_users:
        return _trivial_solution(model)

    d = drift_matrix(model).diagonal
    over = d > 0
    n_over = int(np.count_nonzero(over))

    z, W = _SOLVERS[solver](model, d)
    if len(z) != n_over:
        raise NumericalInstability(
            f"found {len(z)} negative eigenvalues but {n_over} overload states "
            f"(N={model.n_users}, C={model.capacity})"
        )
    order = np.argsort(z)
    z, W = z[order], W[:, order]
    W = W / np.linalg.norm(W, axis=0)

    log_pi = log_stationary_distribution(model)
    sqrt_pi = np.exp(0.5 * log_pi)
    abs_d = np.abs(d)

    # F_j(0) = 0 on overload states, written in balanced coordinates
    boundary = W[over]
    rhs = -sqrt_pi[over] * np.sqrt(abs_d[over])
    cond, alpha_w = _solve_boundary(boundary, rhs)

    # back to the original coordinates phi = w * sqrt(pi) / sqrt|d|
    phi = W * (sqrt_pi / np.sqrt(abs_d))[:, None]
    peak = np.abs(phi).argmax(axis=0)
    scale = phi[peak, np.arange(phi.shape[1])]  # signed, so the peak entry is +1
    phi = phi / scale
    alpha = alpha_w * scale

    pi = stationary_distribution(model)
    return SpectralSolution(
        eigenvalues=np.r_[0.0, z],
        eigenvectors=np.vstack([pi, phi.T]),
        coefficients=alpha,
        pi=pi,
        capacity=model.capacity,
        n_users=model.n_users,
        condition=cond,
    )


def cdf(sol: SpectralSolution, x: float):
    """Per-state ``F_i(x)`` and the total ``P(S <= x)``."""
    if x < 0:
        raise ValidationError(f"x must be nonnegative, got {x!r}")
    if sol.n_negative == 0:
        F = sol.pi.copy()
    else:
        F = sol.pi + (sol.coefficients * np.exp(sol.decay_rates * x)) @ sol.eigenvectors[1:]
    total = float(F.sum())
    if -1e-12 < total < 0.0:
        total = 0.0
    elif 1.0 < total < 1.0 + 1e-12:
        total = 1.0
    return F, total


def outage_probability(sol: SpectralSolution, b):
    """``P(S > b)``; accepts a scalar or an array of thresholds."""
    b_arr = np.asarray(b, dtype=float)
    if np.any(b_arr < 0):
        raise ValidationError("storage size b must be nonnegative")
    if sol.n_negative == 0:
        out = np.zeros_like(b_arr)
    else:
        out = np.exp(np.multiply.outer(b_arr, sol.decay_rates)) @ sol.tail_weights
        out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CapacityMixture:
    """Discrete distribution of grid capacity values (in R_p units)."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(c), float(w)) for c, w in self.components)
        if not comps:
            raise ValidationError("capacity mixture needs at least one component")
        if any(w <= 0 for _, w in comps):
            raise ValidationError("mixture weights must be positive")
        total = math.fsum(w for _, w in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> "CapacityMixture":
        return cls(tuple(pairs))

    @property
    def capacities(self) -> np.ndarray:
        return np.array([c for c, _ in self.components])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.components])


def outage_probability_mixture(model_base: SystemModel, mix: CapacityMixture, b, solver: str = "tridiagonal"):
    """Outage averaged over a time-varying grid capacity.

    Each component is solved independently with ``C = c_j``; errors are
    re-raised with the component index and capacity in the message.
    """
    total = 0.0
    for idx, (c, w) in enumerate(mix.components):
        try:
            sol = solve_spectrum(model_base.with_capacity(c), solver=solver)
        except StoresizeError as exc:
            err = type(exc)(f"mixture component {idx} (C={c!r}): {exc}")
            err.component = idx
            raise err from exc
        total = total + w * outage_probability(sol, b)
    return total


def eigen_residuals(model: SystemModel, sol: SpectralSolution) -> np.ndarray:
    """Relative residual ``||z phi D - phi M||_inf / ||phi M||_inf`` per pair.

    Computed with the raw (unbalanced) ``M`` and ``D``.
    """
    if sol.n_negative == 0:
        return np.zeros(0)
    M = build_generator(model)
    d = np.arange(model.n_users + 1, dtype=float) - model.capacity
    phi = sol.eigenvectors[1:]
    lhs = sol.decay_rates[:, None] * phi * d[None, :]
    rhs = phi @ M
    return np.abs(lhs - rhs).max(axis=1) / np.abs(rhs).max(axis=1)
