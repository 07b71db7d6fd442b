"""Circuit encodings of the potential-energy propagator ``e^{-iV(x)t}`` on a qubit lattice."""

from .circuit import (
    CCPhase,
    CNOT,
    CPhase,
    Circuit,
    GateCounts,
    GlobalPhase,
    Phase,
    Rz,
    cancel_adjacent_cnots,
    count_gates,
    export_qasm,
)
from .potential import (
    NAI,
    DecayExp,
    PotentialGrid,
    RittnerExp,
    ShiftedExp,
    Tabulated,
    sample_model,
    state_index_label,
)
from .recon import compare, reconstruct_potential
from .sim import (
    DiagonalUnitary,
    NoiseModel,
    StateVector,
    apply_gate,
    circuit_diagonal,
    evolve,
    evolve_noisy,
    fidelity_exact,
    sample_counts,
    swap_test,
)
from .synth_hadamard import Ordering, cnot_count_bound, mask_to_string, synthesize_exact
from .synth_poly import (
    build_incidence,
    gate_complexity,
    solve_least_squares,
    synthesize_poly,
    triangular_reorder,
)
from .walsh import WalshSpectrum, analyze, basis_vector, synthesize

__version__ = "0.1.0"
