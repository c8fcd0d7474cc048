"""Storage and grid-capacity sizing by monotone bisection, plus sweeps."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotic import asymptotic_outage, morrison_params
from .closed_form import single_user_outage
from .errors import (
    InfeasibleTarget,
    NoConvergence,
    StoresizeError,
    Unstable,
    ValidationError,
)
from .model import SystemModel, UserModel
from .spectral import INTEGER_TOL, outage_probability, solve_spectrum

__all__ = [
    "METHODS",
    "NUDGE",
    "SizingResult",
    "CapacityResult",
    "ContourPoint",
    "Axis",
    "SweepSpec",
    "outage_function",
    "size_storage",
    "size_capacity",
    "contour",
    "grid_savings",
    "ess_savings_vs_baseline",
    "sweep",
    "thread_count",
]

METHODS = ("exact", "closed_form", "asymptotic")
NUDGE = 1e-6
MAX_ITER = 200


@dataclass(frozen=True)
class SizingResult:
    b_eps: float
    achieved_outage: float
    iterations: int
    perturbed_capacity: float | None = None
    method: str = "exact"


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    achieved_outage: float
    iterations: int
    perturbations: tuple = ()


def _near_integer(c: float, n: int) -> bool:
    nearest = round(c)
    return 0 <= nearest <= n and abs(c - nearest) <= INTEGER_TOL


def _nudged(model: SystemModel) -> tuple[SystemModel, float | None]:
    if model.capacity < model.n_users and _near_integer(model.capacity, model.n_users):
        c = model.capacity + NUDGE
        return model.with_capacity(c), c
    return model, None


def outage_function(model: SystemModel, method: str = "exact") -> Callable[[float], float]:
    """Return ``b -> P(S > b)`` for ``model`` under the chosen method."""
    if method == "exact":
        sol = solve_spectrum(model)
        return lambda b: outage_probability(sol, b)
    if method == "closed_form":
        if model.n_users != 1:
            raise ValidationError("closed_form method only applies to a single user (n=1)")
        if model.capacity >= 1:
            return lambda b: 0.0
        return lambda b: single_user_outage(model.chi, model.capacity, b)
    if method == "asymptotic":
        params = morrison_params(model)
        return lambda b: asymptotic_outage(model, b, params)
    raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")


def _invert(outage: Callable[[float], float], epsilon: float) -> tuple[float, float, int]:
    """Smallest b with outage(b) <= epsilon for a nonincreasing outage."""
    p0 = outage(0.0)
    if p0 <= epsilon:
        return 0.0, p0, 0
    lo, hi = 0.0, 1.0
    iterations = 0
    p_hi = outage(hi)
    while not p_hi < epsilon:
        lo, hi = hi, 2.0 * hi
        p_hi = outage(hi)
        iterations += 1
        if iterations >= MAX_ITER or not math.isfinite(hi):
            raise NoConvergence(f"could not bracket epsilon={epsilon!r}; outage({hi!r}) = {p_hi!r}")
    while iterations < MAX_ITER:
        iterations += 1
        mid = 0.5 * (lo + hi)
        p_mid = outage(mid)
        if abs(p_mid - epsilon) <= 1e-13 * epsilon:
            return mid, p_mid, iterations
        if p_mid > epsilon:
            lo = mid
        else:
            hi, p_hi = mid, p_mid
        if hi - lo <= 1e-13 * hi:
            return hi, p_hi, iterations
    raise NoConvergence(f"bisection did not converge in {MAX_ITER} iterations")


def size_storage(model: SystemModel, epsilon: float, method: str = "exact") -> SizingResult:
    """epsilon-outage storage size: the smallest ``B >= 0`` with ``P(S > B) <= epsilon``.

    A capacity sitting on an integer is nudged up by ``NUDGE``; the value
    actually used is reported as ``perturbed_capacity``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")
    if not model.stable():
        raise Unstable(f"mean demand {model.mean_demand:.12g} is not below capacity {model.capacity:.12g}")
    if model.capacity >= model.n_users:
        return SizingResult(0.0, 0.0, 0, None, method)
    used, perturbed = _nudged(model) if method == "exact" else (model, None)
    b, p, iterations = _invert(outage_function(used, method), epsilon)
    return SizingResult(b, float(p), iterations, perturbed, method)


def size_capacity(
    n: int,
    user: UserModel,
    b: float,
    epsilon: float,
    method: str = "exact",
    xtol: float = 1e-9,
) -> CapacityResult:
    """Smallest grid capacity ``C`` with ``P(S > b) <= epsilon``.

    Bisects over ``(N p, N)``; ``C >= N`` is always feasible because demand
    can then never exceed supply.  Test points on an integer are nudged
    up by ``NUDGE`` and listed in ``perturbations``.
    """
    if not b >= 0:
        raise ValidationError(f"b must be nonnegative, got {b!r}")
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    base = SystemModel(n_users=n, user=user, capacity=float(n))
    lo, hi = n * user.p, float(n)
    p_hi = 0.0
    perturbations = []
    iterations = 0
    tol = xtol * n
    while hi - lo > tol:
        iterations += 1
        if iterations > MAX_ITER:
            raise NoConvergence(f"capacity bisection did not converge in {MAX_ITER} iterations")
        mid = 0.5 * (lo + hi)
        if _near_integer(mid, n):
            mid += NUDGE
            perturbations.append(mid)
            if mid >= hi:
                break
        p_mid = outage_function(base.with_capacity(mid), method)(b)
        if p_mid <= epsilon:
            hi, p_hi = mid, p_mid
        else:
            lo = mid
    if hi >= n and p_hi > epsilon:  # pragma: no cover - C = N has zero outage
        raise InfeasibleTarget(f"epsilon={epsilon!r} not reachable even at C=N")
    return CapacityResult(hi, float(p_hi), iterations, tuple(perturbations))


@dataclass(frozen=True)
class ContourPoint:
    capacity: float
    b_eps: float
    achieved_outage: float = math.nan
    perturbed_capacity: float | None = None
    error: str | None = None


def contour(n: int, user: UserModel, epsilon: float, capacity_grid, method: str = "exact") -> list[ContourPoint]:
    """(C, B(epsilon)) trade-off curve; per-point failures are recorded, not raised."""
    points = []
    for c in capacity_grid:
        c = float(c)
        try:
            res = size_storage(SystemModel(n_users=n, user=user, capacity=c), epsilon, method)
        except StoresizeError as exc:
            points.append(ContourPoint(c, math.nan, error=f"{type(exc).__name__}: {exc}"))
            continue
        points.append(ContourPoint(c, res.b_eps, res.achieved_outage, res.perturbed_capacity))
    return points


def grid_savings(n: int, user: UserModel, b: float, epsilon: float, method: str = "exact") -> float:
    """Percent grid power saved against peak provisioning ``N * R_p``."""
    c_needed = size_capacity(n, user, b, epsilon, method).capacity
    return 100.0 * (n - c_needed) / n


def ess_savings_vs_baseline(
    n_list, user: UserModel, capacity_per_user: float, epsilon: float, baseline_n: int = 10, method: str = "exact"
) -> list[tuple[int, float]]:
    """Percent per-user storage saved relative to a ``baseline_n`` community."""

    def per_user(n):
        return size_storage(SystemModel(n_users=n, user=user, capacity=capacity_per_user * n), epsilon, method).b_eps / n

    base = per_user(baseline_n)
    out = []
    for n in n_list:
        b = base if n == baseline_n else per_user(n)
        pct = 100.0 * (1.0 - b / base) if base > 0 else math.nan
        out.append((int(n), pct))
    return out


# --- sweeps ---------------------------------------------------------------

SWEEP_PARAMS = ("n", "chi", "capacity", "sigma", "b", "epsilon")
TARGETS = ("outage", "size", "capacity", "savings")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int = 1
    values_override: tuple | None = None

    def __post_init__(self):
        if self.name not in SWEEP_PARAMS:
            raise ValidationError(f"unknown sweep axis {self.name!r}; expected one of {SWEEP_PARAMS}")
        if self.values_override is None:
            if self.points < 1:
                raise ValidationError(f"axis {self.name!r} needs at least one point")
            if self.stop < self.start:
                raise ValidationError(f"axis {self.name!r} has max < min")

    @classmethod
    def of(cls, name: str, values) -> "Axis":
        values = tuple(values)
        if not values:
            raise ValidationError(f"axis {name!r} is empty")
        return cls(name, values[0], values[-1], len(values), values)

    def values(self) -> list:
        if self.values_override is not None:
            vals = list(self.values_override)
        elif self.points == 1:
            vals = [self.start]
        else:
            vals = list(np.linspace(self.start, self.stop, self.points))
        if self.name == "n":
            vals = [int(round(v)) for v in vals]
        return [float(v) if self.name != "n" else v for v in vals]


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    fixed: dict = field(default_factory=dict)
    target: str = "outage"
    method: str = "exact"

    def __post_init__(self):
        if not self.axes:
            raise ValidationError("sweep needs at least one axis")
        if self.target not in TARGETS:
            raise ValidationError(f"unknown target {self.target!r}; expected one of {TARGETS}")
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}; expected one of {METHODS}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate sweep axis")
        for key in self.fixed:
            if key not in SWEEP_PARAMS:
                raise ValidationError(f"unknown fixed parameter {key!r}")
        given = set(names) | set(self.fixed)
        if "capacity" in given and "sigma" in given:
            raise ValidationError("give either capacity or sigma, not both")
        required = {"n", "chi"}
        if self.target in ("outage", "size"):
            required.add("capacity|sigma")
        if self.target in ("outage", "capacity", "savings"):
            required.add("b")
        if self.target in ("size", "capacity", "savings"):
            required.add("epsilon")
        for req in required:
            if not any(r in given for r in req.split("|")):
                raise ValidationError(f"sweep for target {self.target!r} is missing parameter {req!r}")

    def points(self) -> list[dict]:
        grids = [a.values() for a in self.axes]
        rows = []
        for combo in itertools.product(*grids):
            params = dict(self.fixed)
            params.update(zip((a.name for a in self.axes), combo))
            rows.append(params)
        return rows


def thread_count() -> int:
    raw = os.environ.get("STORESIZE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"STORESIZE_THREADS must be an integer, got {raw!r}") from None


def _sweep_point(params: dict, target: str, method: str) -> dict:
    n = int(params["n"])
    user = UserModel(float(params["chi"]))
    row = {"N": n, "chi": user.chi}
    notes = []
    if "sigma" in params:
        capacity = float(params["sigma"]) * n
    else:
        capacity = params.get("capacity")
    row.update(
        C=capacity,
        sigma=capacity / n if capacity is not None else None,
        b=params.get("b"),
        epsilon=params.get("epsilon"),
    )
    if target == "outage":
        model = SystemModel(n_users=n, user=user, capacity=capacity)
        if not model.stable():
            raise Unstable(f"mean demand {model.mean_demand:.12g} is not below capacity {capacity:.12g}")
        used, perturbed = _nudged(model) if method == "exact" else (model, None)
        if perturbed is not None:
            notes.append(f"C nudged to {perturbed:.12g}")
        row["value"] = float(outage_function(used, method)(float(params["b"])))
    elif target == "size":
        res = size_storage(SystemModel(n_users=n, user=user, capacity=capacity), float(params["epsilon"]), method)
        if res.perturbed_capacity is not None:
            notes.append(f"C nudged to {res.perturbed_capacity:.12g}")
        row["b"] = res.b_eps
        row["value"] = res.b_eps
    else:
        res = size_capacity(n, user, float(params["b"]), float(params["epsilon"]), method)
        if res.perturbations:
            notes.append(f"{len(res.perturbations)} integer capacity test point(s) nudged by {NUDGE:g}")
        row["C"] = res.capacity
        row["sigma"] = res.capacity / n
        row["value"] = res.capacity if target == "capacity" else 100.0 * (n - res.capacity) / n
    row["notes"] = "; ".join(notes)
    return row


def sweep(spec: SweepSpec, threads: int | None = None) -> list[dict]:
    """Evaluate ``spec.target`` on the product grid of ``spec.axes``.

    Rows come back in lexicographic axis order whatever the thread count;
    a failing point yields a row with ``error`` set instead of raising.
    """
    points = spec.points()

    def run(params):
        try:
            row = _sweep_point(params, spec.target, spec.method)
            row["error"] = ""
        except StoresizeError as exc:
            row = {"N": params.get("n"), "chi": params.get("chi"), "C": params.get("capacity"),
                   "sigma": params.get("sigma"), "b": params.get("b"), "epsilon": params.get("epsilon"),
                   "value": math.nan, "notes": "", "error": f"{type(exc).__name__}: {exc}"}
        row["target"] = spec.target
        row["method"] = spec.method
        return row

    threads = thread_count() if threads is None else threads
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, points))
    return [run(p) for p in points]
