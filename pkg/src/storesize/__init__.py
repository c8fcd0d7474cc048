"""Shared energy-storage sizing for a population of On/Off consumers.

Quick start::

    from storesize import SystemModel, size_storage
    model = SystemModel.from_params(n_users=400, chi=0.5, capacity=0.3683 * 400)
    size_storage(model, epsilon=0.01).b_eps
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    DriftSingular,
    InfeasibleTarget,
    InvalidConfig,
    NoConvergence,
    NumericalError,
    NumericalInstability,
    StoresizeError,
    Unstable,
    ValidationError,
)
from .model import (  # noqa: E402
    PhysicalUnits,
    SystemModel,
    UserModel,
    build_generator,
    capacity_headroom,
    from_normalized_storage,
    stationary_distribution,
    to_normalized,
)
from .spectral import (  # noqa: E402
    CapacityMixture,
    SpectralSolution,
    cdf,
    drift_matrix,
    outage_probability,
    outage_probability_mixture,
    solve_spectrum,
)
from .closed_form import single_user_outage, single_user_size, single_user_spectrum  # noqa: E402
from .asymptotic import asymptotic_outage, morrison_params  # noqa: E402
from .sizing import (  # noqa: E402
    contour,
    ess_savings_vs_baseline,
    grid_savings,
    size_capacity,
    size_storage,
    sweep,
)
