from modules.densmat.channel import (
    ChannelValidationError, QuantumChannel, completeness_deviation, identity_channel, reset_kraus, twirl_channel
)
from modules.densmat.gates import GATE_KINDS, GateOp, hadamard_sequence
from modules.densmat.state import (
    BELL_VECTORS, CapacityError, DegenerateBranchError, DensityMatrix, DomainError,
    apply_channel, apply_operator, apply_unitary, coincidence_branch, fidelity_to_bell,
    make_bell_diagonal, make_werner, measure_zz_coincidence, new_ground_state, partial_trace,
    product_state, reduce_to, reset_qubits, set_max_qubits, tensor
)
