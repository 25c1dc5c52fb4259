"""Two non-identical two-level atoms coupled to one cavity mode."""
from .core import (
    AtomPair,
    CoherentField,
    SystemConfig,
    coherent_amplitudes,
    excited_state,
    ground_state,
    partial_entangled_preparation,
    product_preparation,
    truncation_level,
)
from .errors import (
    CavityPairError,
    InvalidInputError,
    NumericalDomainError,
    OptimizationError,
    TruncationError,
    TruncationWarning,
    ValidationError,
)
from .evolution import (
    JointState,
    SingleQubitDensity,
    TwoQubitDensity,
    evolve_exact,
    evolve_paper_mode,
    reduce_single,
    reduce_two_qubit,
)
from .measures import (
    InfoReport,
    PptReport,
    degree_of_entanglement,
    impurity,
    info_report,
    local_fidelity_max,
    local_information,
    nonlocal_information,
    partial_transpose,
)
from .propagator import (
    BlockFrequencies,
    BlockPropagator,
    block_frequencies,
    block_hamiltonian,
    propagator_analytic,
    propagator_discrepancy,
    propagator_spectral,
)
from .sweep import MetricsRow, SweepConfig, emit, figure_preset, run_sweep

__version__ = "0.1.0"
