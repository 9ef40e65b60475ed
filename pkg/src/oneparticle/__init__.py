"""One-particle open-system toolkit.

Density matrices on C + C^n with a distinguished vacuum, their partial traces
and entanglement tests, the mutual-information decomposition, and
zero-temperature GKSL dynamics solved through the dissipative propagator,
with a brute-force full-tensor-space oracle for cross-validation.
"""

from ._kernels import HAVE_COMPILED
from .dynamics import (
    GKSLModel,
    Propagator,
    accretive_matrix,
    evolve_state,
    evolve_state_grid,
    homogeneous_ground_population,
    integrate_direct,
    propagate,
    propagate_grid,
    pure_state_evolution,
)
from .errors import (
    DimensionError,
    DimensionGuardError,
    DomainError,
    NumericalError,
    OneParticleError,
    ValidationError,
)
from .information import (
    ClassicalDistribution,
    MutualInfoReport,
    entropy_scalar,
    markov_decay_curve,
    mutual_information,
    mutual_information_instrument,
    shannon_entropy,
    von_neumann_entropy,
)
from .integrators import StepPolicy
from .linalg import (
    HermitianEigenSystem,
    hermitian_eigs,
    matrix_exponential,
    matrix_function,
    operator_norm,
)
from .moments import (
    MomentState,
    evolve_moments,
    evolve_moments_grid,
    make_moment_state,
    propagator_closed_form,
)
from .oracle import (
    FullState,
    ModeOperatorSet,
    build_operators,
    embed_density,
    embed_pure,
    full_partial_trace,
    integrate_second_quantized,
    moments_from_full,
    one_particle_block,
    schmidt,
    top_level_leakage,
)
from .reduction import (
    IndexSet,
    QuantumOperation,
    ReducedState,
    SeparabilityVerdict,
    SeparableDecomposition,
    generalized_reduce,
    pure_state_entangled,
    schmidt_coefficients,
    separability_check,
    separable_decomposition,
    trace_out,
)
from .states import (
    OneParticlePureState,
    OneParticleState,
    assemble,
    disassemble,
    from_excited_block,
    is_strictly_one_particle,
    make_pure_state,
    make_state,
    pure_to_density,
    vacuum_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
