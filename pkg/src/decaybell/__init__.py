"""Entanglement and three-party Bell non-locality of spin states in X -> ABC decays."""
from .bell import (
    AxisSet,
    ObservableKind,
    OptResult,
    evaluate,
    optimize_b442,
    optimize_b442_sym,
    optimize_mermin,
    optimize_svetlichny,
    reconstruct_b442_axes,
)
from .entanglement import (
    EntanglementReport,
    concurrence_one_other,
    concurrence_pair,
    f3,
    report,
    three_tangle,
)
from .errors import (
    AllAmplitudesVanish,
    AxisCountMismatch,
    DecayBellError,
    DegenerateFrame,
    DegenerateKinematics,
    EmptyKeepSet,
    NumericalConsistencyError,
    UnphysicalAngles,
)
from .kinematics import DecayAngles, MomentumTriple, physical_region, solve_momenta
from .states import (
    CorrelationTensor,
    ScalarCouplings,
    SpinDirection,
    SpinState,
    TensorCouplings,
    VectorCouplings,
    correlation_tensor,
    decay_state,
    density_matrix,
    ghz_state,
    permute_qubits,
    reduce,
    scalar_state,
    spin_direction_from_rotation,
    tensor_state,
    vector_state,
    w_state,
)

__version__ = "0.1.0"
