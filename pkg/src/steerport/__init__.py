"""EPR steering and teleportation fidelity for two- and three-qubit states."""

from .correlations import (
    concurrence,
    correlation_matrix,
    fully_entangled_fraction,
    is_steerable_3setting,
    n_value,
    pauli_decompose,
    steering_observable,
)
from .states import (
    MemsParams,
    RandomSource,
    ThreeQubitPure,
    XStateParams,
    mems_rank2,
    mems_rank3,
    x_state,
)
from .teleport import (
    avg_fidelity_standard,
    fidelity_bounds_concurrence,
    fidelity_upper_bound_steering,
    optimal_strategy,
    simulate_teleportation,
)
from .tripartite import tripartite_profile

__version__ = "0.1.0"
