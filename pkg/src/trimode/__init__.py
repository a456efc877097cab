"""Three-mode Gaussian states of light.

Phase-space simulation of optical state engineering, entanglement sharing
(log-negativity, Gaussian contangle and its residual), teleportation
networks, telecloning and local thermal decoherence.
"""

from . import decoherence, entanglement, phase_space, protocols, states
from .decoherence import BathParams, classical_crossing_time, entanglement_vanishing_time, evolve_thermal, fidelity_decay_curve
from .entanglement import (
    EntanglementReport,
    SeparabilityClass,
    analyze,
    classify_noisy_ghzw,
    log_negativity,
    residual_contangle_basset,
    residual_contangle_ghzw,
    residual_contangle_noisy_ghzw,
    residual_gaussian_contangle,
    triangle_check,
)
from .errors import (
    InvalidArgumentError,
    InvalidStateError,
    NoSolutionError,
    NumericalDomainError,
    TrimodeError,
    UnsupportedStateError,
)
from .phase_space import ModePartition, check_physical, symplectic_eigenvalues
from .protocols import (
    FidelityReport,
    TelecloningWindow,
    assisted_network_fidelity,
    asymmetric_feasibility,
    optimal_asymmetric_family,
    telecloning_asymmetric_fidelities,
    telecloning_symmetric_fidelity,
    teleport_fidelity,
)
from .states import (
    GHZW,
    AllotmentRaw,
    ArbitraryPure,
    BassetHound,
    NoisyGHZW,
    StateSpec,
    TState,
    TwoModeSqueezed,
    allotment,
    basset_hound,
    ghzw,
    noisy_ghzw,
    random_pure_sample,
    solve_allotment_params,
    t_state,
)

__version__ = "0.1.0"
