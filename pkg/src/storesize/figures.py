"""Plot-ready datasets for the standard figure presets.

Each builder returns ``(columns, rows)``.  All presets pin the consumer
model to ``chi = 0.5`` (On-probability 1/3, so ``C = 0.3683 N`` sits
0.035 per user above mean demand) unless ``chi`` is passed explicitly;
the choice is written into every row's ``notes``.
"""

from __future__ import annotations

import numpy as np

from .errors import StoresizeError
from .model import SystemModel, UserModel
from .sizing import NUDGE, _nudged, contour, ess_savings_vs_baseline, size_capacity, size_storage
from .spectral import outage_probability, solve_spectrum

__all__ = ["PRESETS", "FIGURE_CHI", "FIG2_SIGMA", "build_preset"]

FIGURE_CHI = 0.5
FIG2_SIGMA = 0.3683
EPSILONS = (0.1, 0.05, 0.01)


def _note(chi: float) -> str:
    if chi == FIGURE_CHI:
        return "figure preset pins chi=0.5 (p=1/3)"
    return f"chi={chi:g} overrides the figure default 0.5"


def fig2(chi: float = FIGURE_CHI, n_values=(400, 500, 600, 700, 800), b_grid=None, epsilons=EPSILONS):
    """Outage vs storage size for growing communities at ``C = 0.3683 N``."""
    columns = ["N", "chi", "C", "B", "epsilon", "p_outage", "method", "kind", "notes"]
    b_grid = np.linspace(0.0, 15.0, 31) if b_grid is None else np.asarray(b_grid, dtype=float)
    user = UserModel(chi)
    rows = []
    for n in n_values:
        model = SystemModel(n_users=n, user=user, capacity=FIG2_SIGMA * n)
        sol = solve_spectrum(model)
        for b, p in zip(b_grid, outage_probability(sol, b_grid)):
            rows.append(dict(N=n, chi=chi, C=model.capacity, B=b, epsilon=None, p_outage=p,
                             method="exact", kind="curve", notes=_note(chi)))
        for eps in epsilons:
            res = size_storage(model, eps)
            rows.append(dict(N=n, chi=chi, C=model.capacity, B=res.b_eps, epsilon=eps,
                             p_outage=res.achieved_outage, method="exact", kind="size", notes=_note(chi)))
    return columns, rows


def fig3(chi: float = FIGURE_CHI, n_values=(100, 200, 400, 800), sigma_grid=None, b: float = 5.0):
    """Outage at fixed storage ``B`` as the grid power per user grows."""
    columns = ["N", "chi", "sigma", "C", "B", "p_outage", "method", "notes"]
    sigma_grid = np.linspace(0.34, 0.42, 17) if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
    user = UserModel(chi)
    rows = []
    for n in n_values:
        for s in sigma_grid:
            model, perturbed = _nudged(SystemModel(n_users=n, user=user, capacity=float(s) * n))
            notes = [_note(chi)]
            if perturbed is not None:
                notes.append(f"C nudged by {NUDGE:g}")
            p = outage_probability(solve_spectrum(model), b)
            rows.append(dict(N=n, chi=chi, sigma=float(s), C=model.capacity, B=b, p_outage=p,
                             method="exact", notes="; ".join(notes)))
    return columns, rows


def fig4(chi: float = FIGURE_CHI, n: int = 500, sigma_grid=None, epsilons=EPSILONS):
    """(C, B) contours of equal outage for a fixed community."""
    columns = ["N", "chi", "epsilon", "C", "sigma", "B", "p_outage", "method", "error", "notes"]
    sigma_grid = np.linspace(0.345, 0.40, 20) if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
    user = UserModel(chi)
    rows = []
    for eps in epsilons:
        for pt in contour(n, user, eps, sigma_grid * n):
            notes = [_note(chi)]
            if pt.perturbed_capacity is not None:
                notes.append(f"C nudged to {pt.perturbed_capacity:.12g}")
            rows.append(dict(N=n, chi=chi, epsilon=eps, C=pt.capacity, sigma=pt.capacity / n, B=pt.b_eps,
                             p_outage=pt.achieved_outage, method="exact", error=pt.error or "",
                             notes="; ".join(notes)))
    return columns, rows


def fig5(chi: float = FIGURE_CHI, n_values=(50, 100, 200, 400, 800), b: float = 5.0, epsilons=EPSILONS):
    """Grid power saved against peak provisioning at fixed storage."""
    columns = ["N", "chi", "B", "epsilon", "C", "sigma", "savings_pct", "p_outage", "method", "notes"]
    user = UserModel(chi)
    rows = []
    for eps in epsilons:
        for n in n_values:
            res = size_capacity(n, user, b, eps)
            notes = [_note(chi)]
            if res.perturbations:
                notes.append(f"{len(res.perturbations)} capacity test point(s) nudged by {NUDGE:g}")
            rows.append(dict(N=n, chi=chi, B=b, epsilon=eps, C=res.capacity, sigma=res.capacity / n,
                             savings_pct=100.0 * (n - res.capacity) / n, p_outage=res.achieved_outage,
                             method="exact", notes="; ".join(notes)))
    return columns, rows


def fig6(chi: float = FIGURE_CHI, n_values=(10, 20, 50, 100, 200, 400, 800), sigma: float = FIG2_SIGMA,
         epsilons=EPSILONS):
    """Per-user storage saved relative to a 10-user community."""
    columns = ["N", "chi", "sigma", "C", "epsilon", "B", "B_per_user", "savings_pct", "method", "notes"]
    user = UserModel(chi)
    rows = []
    for eps in epsilons:
        savings = dict(ess_savings_vs_baseline(n_values, user, sigma, eps))
        for n in n_values:
            model = SystemModel(n_users=n, user=user, capacity=sigma * n)
            b = size_storage(model, eps).b_eps
            rows.append(dict(N=n, chi=chi, sigma=sigma, C=model.capacity, epsilon=eps, B=b, B_per_user=b / n,
                             savings_pct=savings[n], method="exact", notes=_note(chi)))
    return columns, rows


PRESETS = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6}


def build_preset(name: str, chi: float = FIGURE_CHI):
    try:
        builder = PRESETS[name]
    except KeyError:
        raise StoresizeError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    return builder(chi=chi)
