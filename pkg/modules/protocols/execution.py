import itertools
import warnings
from typing import Dict, List, Sequence, Tuple

import numpy as np

from modules.densmat.channel import QuantumChannel, twirl_channel
from modules.densmat.gates import GateOp
from modules.densmat.state import (
    DEGENERATE_PROB, DegenerateBranchError, DensityMatrix, DomainError, apply_channel, apply_operator,
    coincidence_branch, fidelity_to_bell, make_werner, partial_trace, product_state, reduce_to, tensor
)
from modules.protocols.circuit import TimedCircuit, build_protocol_circuit, slot_pair
from modules.protocols.generation import CalibrationRangeError, DelayCalibrator, EPSource
from modules.protocols.registry import ProtocolSpec


class PurifyOutcome:
    """
    :param reachable: False when the input fidelity cannot be prepared, so the protocol never ran
    """

    def __init__(self, f_out: float, success_prob: float, duration: float, reachable: bool = True):
        self.f_out = float(f_out)
        self.success_prob = float(success_prob)
        self.duration = float(duration)
        self.reachable = reachable

    @property
    def failed(self) -> bool:
        return self.success_prob == 0.

    def to_dict(self) -> dict:
        return {
            'f_out': self.f_out, 'success_prob': self.success_prob, 'duration': self.duration,
            'reachable': self.reachable,
        }

    def __repr__(self):
        return f'PurifyOutcome(f_out={self.f_out:.6f}, success={self.success_prob:.6f}, duration={self.duration:.4g})'


class BlockState:
    """
    Exact state of a wide register kept as a product of dense blocks. Blocks merge when an op couples
    them; measured or reset qubits leave their block at once.
    """

    def __init__(self):
        self._ids = itertools.count()
        self.blocks: Dict[int, Tuple[List[int], DensityMatrix]] = {}
        self.owner: Dict[int, int] = {}

    def _new_block(self, qubits: Sequence[int], state: DensityMatrix):
        bid = next(self._ids)
        self.blocks[bid] = (list(qubits), state)
        for q in qubits:
            self.owner[q] = bid

    def ensure(self, qubit: int):
        if qubit not in self.owner:
            self._new_block([qubit], product_state([(1., 0.)]))

    def gather(self, targets: Sequence[int]) -> Tuple[int, List[int]]:
        for q in targets:
            self.ensure(q)
        bids = []
        for q in targets:
            if self.owner[q] not in bids:
                bids.append(self.owner[q])
        bid = bids[0]
        for other in bids[1:]:
            qubits, state = self.blocks[bid]
            other_qubits, other_state = self.blocks.pop(other)
            self.blocks[bid] = (qubits + other_qubits, tensor(state, other_state))
            for q in other_qubits:
                self.owner[q] = bid
        qubits = self.blocks[bid][0]
        return bid, [qubits.index(q) for q in targets]

    def update(self, bid: int, state: DensityMatrix):
        self.blocks[bid] = (self.blocks[bid][0], state)

    def state_of(self, bid: int) -> DensityMatrix:
        return self.blocks[bid][1]

    def discard(self, qubit: int):
        if qubit not in self.owner:
            return
        bid = self.owner.pop(qubit)
        qubits, state = self.blocks[bid]
        if len(qubits) == 1:
            del self.blocks[bid]
            return
        local = qubits.index(qubit)
        self.blocks[bid] = ([q for q in qubits if q != qubit], partial_trace(state, [local]))

    def replace(self, qubits: Sequence[int], state: DensityMatrix):
        for q in qubits:
            self.discard(q)
        self._new_block(qubits, state)

    def apply_operator(self, matrix: np.ndarray, targets: Sequence[int]):
        bid, local = self.gather(targets)
        self.update(bid, apply_operator(self.state_of(bid), matrix, local))

    def apply_channel(self, channel: QuantumChannel, targets: Sequence[int]):
        bid, local = self.gather(targets)
        self.update(bid, apply_channel(self.state_of(bid), channel, local))

    def measure_pair(self, pair: Tuple[int, int], confusion: Dict[int, Tuple[float, float]]) -> float:
        bid, local = self.gather(pair)
        qubits, state = self.blocks[bid]
        local_confusion = {local[i]: confusion[q] for i, q in enumerate(pair)}
        branch = coincidence_branch(state, [tuple(local)], local_confusion)
        weight = float(np.trace(branch).real)
        prob = weight / state.trace_weight
        if prob < DEGENERATE_PROB:
            raise DegenerateBranchError(f'Coincidence on pair {tuple(pair)} has probability {prob:.3e}.')
        rest = [q for q in qubits if q not in pair]
        for q in pair:
            del self.owner[q]
        if rest:
            self.blocks[bid] = (rest, DensityMatrix(branch / weight, check=False))
        else:
            del self.blocks[bid]
        return min(prob, 1.)

    def reduced(self, qubits: Sequence[int]) -> DensityMatrix:
        bid, local = self.gather(qubits)
        return reduce_to(self.state_of(bid), local)


class CircuitExecutor:
    """
    Runs a TimedCircuit under a noise model.

    :param noise: NoiseModel
    :param raw_state: when given, every raw EP fragment is replaced by this two-qubit state
    """

    def __init__(self, noise, raw_state: DensityMatrix = None):
        self.noise = noise
        self.raw_state = raw_state
        self.twirl = twirl_channel()

    def _apply(self, state: BlockState, op: GateOp) -> float:
        kind = op.kind
        if op.tag == 'generate' and self.raw_state is not None:
            if kind == 'cx':
                state.replace(op.targets, self.raw_state)
            return 1.
        if op.is_unitary:
            state.apply_operator(op.matrix(), op.targets)
            if not op.ideal:
                for channel, targets in self.noise.gate_steps(kind, op.targets):
                    state.apply_channel(channel, targets)
        elif kind == 'delay':
            q = op.targets[0]
            if op.duration > 0 and self.noise.config.qubit(q).has_thermal:
                state.apply_channel(self.noise.idle_channel(q, op.duration), [q])
        elif kind == 'twirl':
            state.apply_channel(self.twirl, op.targets)
        elif kind == 'reset':
            q = op.targets[0]
            p = 0. if op.ideal else self.noise.reset_error(q)
            state.replace([q], product_state([(1. - p, p)]))
        elif kind == 'measure':
            confusion = {
                q: (0., 0.) if op.ideal else self.noise.confusion(q) for q in op.targets
            }
            return state.measure_pair(op.targets, confusion)
        else:
            raise ValueError(f'Cannot execute gate kind \'{kind}\'.')
        return 1.

    def run(self, circuit: TimedCircuit) -> Tuple[DensityMatrix, float]:
        """
        :return: kept-pair state, product of accepted-branch probabilities
        """
        state = BlockState()
        success = 1.
        for op in circuit.causal_ops:
            success *= self._apply(state, op)
        return state.reduced(circuit.kept_pair), success


def _input_delay(noise, calibrator: DelayCalibrator, f_in: float):
    def delay(slot: int, reused: bool) -> float:
        qubits = slot_pair(slot)
        try:
            return calibrator(qubits, reused, f_in)
        except CalibrationRangeError as e:
            if reused and f_in > e.upper:
                warnings.warn(
                    f'Reset error caps the raw EP fidelity of reused qubits {qubits} at {e.upper:.6g}; '
                    f'using zero delay instead of reaching {f_in:.6g}.', category=UserWarning
                )
                return 0.
            raise
    return delay


def run_protocol(
        f_in: float, spec: ProtocolSpec, noise, ep_source: EPSource, raw_state: DensityMatrix = None,
        calibrator: DelayCalibrator = None
) -> PurifyOutcome:
    """
    Simulate one protocol attempt.

    :param f_in: raw EP fidelity, reached by tuning the generation delay
    :param raw_state: explicit two-qubit input; skips the delay tuning (oracle mode)
    :param calibrator: shared DelayCalibrator, one is created when None
    """
    oracle = raw_state is not None or not noise.has_thermal(range(spec.qubits_needed))
    if oracle:
        raw_state = make_werner(f_in) if raw_state is None else raw_state
        input_delay = 0.
    else:
        calibrator = DelayCalibrator(noise) if calibrator is None else calibrator
        input_delay = _input_delay(noise, calibrator, f_in)
    circuit = build_protocol_circuit(spec, ep_source, input_delay=input_delay, timing=noise)
    executor = CircuitExecutor(noise, raw_state=raw_state if oracle else None)
    try:
        kept, success = executor.run(circuit)
    except DegenerateBranchError:
        return PurifyOutcome(0., 0., circuit.total_duration)
    return PurifyOutcome(fidelity_to_bell(kept.normalized()), success, circuit.total_duration)


class ProtocolRunner:
    """
    run_protocol bound to one noise model and EP source, memoized on (protocol, input fidelity).
    Baselines evaluated on the same scenario share one runner. An input fidelity the raw EP
    preparation cannot produce yields an unreachable outcome instead of an error.
    """

    def __init__(self, noise, ep_source: EPSource):
        self.noise = noise
        self.ep_source = ep_source
        self.calibrator = DelayCalibrator(noise)
        self._cache: Dict[tuple, PurifyOutcome] = {}
        self._unreachable = set()

    def __call__(self, f_in: float, spec: ProtocolSpec) -> PurifyOutcome:
        key = (spec.key(), round(f_in, 12))
        if key not in self._cache:
            try:
                outcome = run_protocol(f_in, spec, self.noise, self.ep_source, calibrator=self.calibrator)
            except (CalibrationRangeError, DomainError) as e:
                if round(f_in, 12) not in self._unreachable:
                    warnings.warn(f'{spec.name} cannot run at f_in={f_in:.6g}: {e}', category=UserWarning)
                self._unreachable.add(round(f_in, 12))
                outcome = PurifyOutcome(f_in, 0., 0., reachable=False)
            self._cache[key] = outcome
        return self._cache[key]
