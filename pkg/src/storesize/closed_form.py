"""Analytic single-consumer (N = 1) solution.

With one consumer the drift is ``-c`` (Off) or ``1 - c`` (On), and the
backlog distribution has a single exponential term:

    P(S > x) = -alpha1 * exp(z1 * x),
    z1 = chi / c - 1 / (1 - c),      alpha1 = -chi / (c (1 + chi)),

where alpha1 is taken with eigenvector ``[1 - c, c]``.
"""

from __future__ import annotations

import math

from .errors import DomainError, Unstable, ValidationError

__all__ = ["single_user_spectrum", "single_user_outage", "single_user_size"]


def _check(chi: float, c: float) -> None:
    if not chi > 0:
        raise ValidationError(f"chi must be positive, got {chi!r}")
    if not 0.0 < c < 1.0:
        raise DomainError(f"single-user capacity must lie in (0, 1), got {c!r}", helper="c")
    p = chi / (1.0 + chi)
    if not p < c:
        raise Unstable(f"on-probability {p:.12g} is not below capacity {c:.12g}")


def single_user_spectrum(chi: float, c: float) -> tuple[float, float]:
    """Return ``(z1, alpha1)``."""
    _check(chi, c)
    z1 = chi / c - 1.0 / (1.0 - c)
    alpha1 = -chi / (c * (1.0 + chi))
    return z1, alpha1


def single_user_outage(chi: float, c: float, b: float) -> float:
    if b < 0:
        raise ValidationError(f"b must be nonnegative, got {b!r}")
    z1, alpha1 = single_user_spectrum(chi, c)
    return -alpha1 * math.exp(z1 * b)


def single_user_size(chi: float, c: float, epsilon: float) -> float:
    """Smallest ``B >= 0`` with ``P(S > B) <= epsilon``.

    Uses the log inversion; if no storage is needed (``-alpha1 <= epsilon``)
    the inversion would be negative and 0 is returned instead.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    _, alpha1 = single_user_spectrum(chi, c)
    if -alpha1 <= epsilon:
        return 0.0
    return c * (1.0 - c) / (chi - chi * c - c) * math.log(epsilon * c * (1.0 + chi) / chi)
