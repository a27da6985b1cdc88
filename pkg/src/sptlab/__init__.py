"""Phase-diagram engine for superradiant phase transitions.

Mean-field Landau potentials for three light-matter families, global
minimization with closed-form candidates, radial phase-boundary tracing
with transition-order classification, truncated-Fock-space exact
diagonalization at finite frequency ratio, and the spectral
self-consistency criterion for the critical inter-cavity hopping.
"""

from .models import (
    AnisotropicRabiStark,
    Model,
    ModelSpec,
    MultimodeDicke12,
    RabiStarkHubbard,
    Stability,
    coupling_magnitude,
    coupling_vector,
    from_coupling_vector,
    stability_check,
)
from .landau import (
    PotentialValue,
    gradient,
    phi_batch,
    phi_reduced,
    potential,
    radial_identity_residual,
)
from .optimizer import (
    MinimizeResult,
    OracleResult,
    brute_force_oracle,
    hessian_check,
    minimize,
)
from .phases import (
    BoundaryCrossing,
    PhasePoint,
    analytic_boundary,
    analytic_radial_crossing,
    classify,
    closed_form_order_parameter,
    first_order_jump,
    model_params,
    radial_boundary,
    sweep,
)
from .fock import (
    Basis,
    ConvergenceReport,
    EDConfig,
    SpectralResult,
    build_hamiltonian,
    lowest_eigenpairs,
    parity_expectations,
    quadrature_components,
    rescaled_photon_numbers,
    truncation_convergence,
)
from .hopping import (
    HoppingComparison,
    SelfConsistentResult,
    compare_with_meanfield,
    critical_hopping,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # models
    "Model",
    "ModelSpec",
    "MultimodeDicke12",
    "RabiStarkHubbard",
    "AnisotropicRabiStark",
    "Stability",
    "coupling_vector",
    "coupling_magnitude",
    "from_coupling_vector",
    "stability_check",
    # landau
    "PotentialValue",
    "potential",
    "gradient",
    "phi_batch",
    "phi_reduced",
    "radial_identity_residual",
    # optimizer
    "MinimizeResult",
    "OracleResult",
    "minimize",
    "hessian_check",
    "brute_force_oracle",
    # phases
    "PhasePoint",
    "BoundaryCrossing",
    "classify",
    "model_params",
    "analytic_boundary",
    "analytic_radial_crossing",
    "radial_boundary",
    "closed_form_order_parameter",
    "first_order_jump",
    "sweep",
    # fock
    "EDConfig",
    "Basis",
    "SpectralResult",
    "ConvergenceReport",
    "build_hamiltonian",
    "lowest_eigenpairs",
    "rescaled_photon_numbers",
    "quadrature_components",
    "parity_expectations",
    "truncation_convergence",
    # hopping
    "SelfConsistentResult",
    "HoppingComparison",
    "critical_hopping",
    "compare_with_meanfield",
]
