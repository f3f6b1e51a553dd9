from modules.protocols.registry import (
    PROTOCOLS, ConstructionError, ProtocolSpec, find_protocol, get_protocol_cls, protocol_registry, register_protocol
)
from modules.protocols import families  # noqa: F401
from modules.protocols.analytic import analytic_bbpssw, analytic_dejmps, bbpssw_success, nested_oracle
from modules.protocols.circuit import (
    CircuitBuilder, TimedCircuit, build_ep_generation, build_protocol_circuit, estimate_duration, slot_pair
)
from modules.protocols.execution import (
    BlockState, CircuitExecutor, ProtocolRunner, PurifyOutcome, run_protocol
)
from modules.protocols.generation import (
    CalibrationRangeError, DelayCalibrator, EPSource, calibrate_delay_for_fidelity, raw_ep_fidelity, raw_ep_state
)
