import math
from typing import Callable, List, Sequence, Tuple, Union

from modules.densmat.gates import GateOp, hadamard_sequence
from modules.protocols.generation import EPSource, fragment_ops
from modules.protocols.registry import ConstructionError, ProtocolSpec

TIME_EPS = 1e-15

Pair = Tuple[int, int]


def slot_pair(slot: int) -> Pair:
    """
    Slot k holds qubits (2k, 2k + 1): node A gets the even qubit, node B the odd one.
    """
    return 2 * slot, 2 * slot + 1


class TimedCircuit:
    """
    A protocol lowered to time-stamped basis ops.

    :param causal_ops: ops in construction order; per qubit this is also time order
    """

    def __init__(
            self, num_qubits: int, causal_ops: List[GateOp], measured_pairs: List[Pair], kept_pair: Pair,
            spec: ProtocolSpec = None
    ):
        self.num_qubits = num_qubits
        self.causal_ops = causal_ops
        self.ops = sorted(causal_ops, key=lambda op: op.start_time)
        self.measured_pairs = measured_pairs
        self.kept_pair = kept_pair
        self.spec = spec
        self.total_duration = max((op.end_time for op in causal_ops), default=0.)
        assert kept_pair not in measured_pairs, f'Kept pair {kept_pair} is measured.'

    def ops_on(self, qubit: int) -> List[GateOp]:
        return [op for op in self.causal_ops if qubit in op.targets]

    def idle_time(self, qubit: int, include_generation: bool = False) -> float:
        return sum(
            op.duration for op in self.ops_on(qubit)
            if op.kind == 'delay' and (include_generation or op.tag != 'generate')
        )

    def overlaps(self) -> List[Tuple[GateOp, GateOp]]:
        clashes = []
        for q in range(self.num_qubits):
            ops = self.ops_on(q)
            for prev, nxt in zip(ops, ops[1:]):
                if nxt.start_time < prev.end_time - TIME_EPS:
                    clashes.append((prev, nxt))
        return clashes

    def format_listing(self) -> str:
        lines = [f'# {self.spec.name if self.spec else "circuit"}: {self.num_qubits} qubits, '
                 f'kept {self.kept_pair}, duration {self.total_duration:.6g} s']
        for op in self.ops:
            targets = ','.join(str(t) for t in op.targets)
            suffix = f'  [{op.tag}]' if op.tag else ''
            lines.append(f'{op.start_time:.6e}  {op.label():<14s} {targets}{suffix}')
        return '\n'.join(lines)


class CircuitBuilder:
    """
    As-soon-as-possible scheduler. Idle gaps on qubits that hold a live EP are filled with Delay ops;
    measured qubits stay dead until regenerated.

    :param timing: (kind, targets) -> seconds; None makes every op instantaneous
    :param input_delay: tuning delay of raw EP fragments, seconds or (slot, reused) -> seconds
    """

    def __init__(
            self, num_qubits: int, ep_source: EPSource, timing: Callable = None,
            input_delay: Union[float, Callable] = 0., reuse: bool = False
    ):
        self.num_qubits = num_qubits
        self.ep_source = ep_source
        self.timing = timing
        self.input_delay = input_delay
        self.reuse = reuse
        self.free_at = [0.] * num_qubits
        self.live = [False] * num_qubits
        self.ops: List[GateOp] = []
        self.measured_pairs: List[Pair] = []
        self.ep_count = 0
        self.num_slots = 0
        self.free_slots: List[int] = []

    def duration(self, kind: str, targets: Sequence[int]) -> float:
        return 0. if self.timing is None else float(self.timing(kind, tuple(targets)))

    def _check(self, targets):
        for q in targets:
            if not 0 <= q < self.num_qubits:
                raise ConstructionError(f'Qubit {q} outside the {self.num_qubits}-qubit buffer.')

    def pad(self, qubit: int, until: float):
        gap = until - self.free_at[qubit]
        if self.live[qubit] and gap > TIME_EPS:
            self.ops.append(GateOp('delay', [qubit], start_time=self.free_at[qubit], param=gap))
        self.free_at[qubit] = max(self.free_at[qubit], until)

    def add(self, kind: str, targets: Sequence[int], param: float = None, ideal: bool = False) -> GateOp:
        targets = tuple(targets)
        self._check(targets)
        start = max(self.free_at[q] for q in targets)
        for q in targets:
            self.pad(q, start)
        duration = 0. if ideal else self.duration(kind, targets)
        op = GateOp(kind, targets, start_time=start, duration=duration, param=param, ideal=ideal)
        self.ops.append(op)
        for q in targets:
            self.free_at[q] = op.end_time
        return op

    def bilateral(self, kind: str, control: Pair, target: Pair):
        self.add(kind, [control[0], target[0]])
        self.add(kind, [control[1], target[1]])

    def hadamard(self, qubit: int):
        for kind, param in hadamard_sequence():
            self.add(kind, [qubit], param=param)

    def measure(self, pair: Pair) -> GateOp:
        op = self.add('measure', pair)
        for q in pair:
            self.live[q] = False
        self.measured_pairs.append(tuple(pair))
        return op

    def allocate(self) -> Tuple[int, bool]:
        if self.reuse and self.free_slots:
            slot = min(self.free_slots)
            self.free_slots.remove(slot)
            return slot, True
        slot = self.num_slots
        self.num_slots += 1
        return slot, False

    def release(self, slot: int):
        if self.reuse:
            self.free_slots.append(slot)

    def _tuning_delay(self, slot: int, reused: bool) -> float:
        if callable(self.input_delay):
            return float(self.input_delay(slot, reused))
        return float(self.input_delay)

    def generate(self, slot: int, reused: bool) -> float:
        """
        Emit one raw EP fragment on the slot; it ends when the EP arrives.

        :return: arrival time
        """
        a, b = slot_pair(slot)
        self._check((a, b))
        self.ep_count += 1
        delay = self._tuning_delay(slot, reused)
        arrival = self.ep_source.arrival_time(self.ep_count)
        if reused:
            for q in (a, b):
                self.add('reset', [q])
            ready = max(self.free_at[a], self.free_at[b])
            arrival = max(arrival, ready + delay)
            tau = self.ep_source.tau
            if tau > 0:
                arrival = tau * math.ceil(arrival / tau - 1e-9)
        self.ops.extend(fragment_ops((a, b), arrival - delay, delay))
        for q in (a, b):
            self.free_at[q] = arrival
            self.live[q] = True
        return arrival

    def produce(self, protocol, level: int, rounds: int) -> int:
        """
        Depth-first nesting: a level-L pair is built from protocol.copies level-(L-1) pairs.
        """
        if level == 0:
            slot, reused = self.allocate()
            self.generate(slot, reused)
            return slot
        kept = self.produce(protocol, level - 1, rounds)
        ancillas = [self.produce(protocol, level - 1, rounds) for _ in range(protocol.copies - 1)]
        protocol.apply_round(self, slot_pair(kept), [slot_pair(s) for s in ancillas], last_round=level == rounds)
        for s in ancillas:
            self.release(s)
        return kept

    def finish(self, kept: Pair, spec: ProtocolSpec = None) -> TimedCircuit:
        end = max((op.end_time for op in self.ops), default=0.)
        for q in kept:
            self.pad(q, end)
        return TimedCircuit(self.num_qubits, self.ops, self.measured_pairs, tuple(kept), spec=spec)


def build_ep_generation(delay_t: float) -> TimedCircuit:
    """
    Stand-alone two-qubit raw EP fragment starting at time 0.
    """
    if delay_t < 0:
        raise ConstructionError(f'Delay must be non-negative, got {delay_t}.')
    return TimedCircuit(2, fragment_ops((0, 1), 0., delay_t), [], (0, 1))


def _resolve_timing(timing):
    if hasattr(timing, 'gate_length'):
        return timing.gate_length
    if hasattr(timing, 'duration_of'):
        return timing.duration_of
    return timing


def build_protocol_circuit(
        spec: ProtocolSpec, ep_source: EPSource, input_delay: Union[float, Callable] = 0., timing=None
) -> TimedCircuit:
    """
    :param timing: DeviceConfig, NoiseModel or (kind, targets) -> seconds; None for instantaneous ops
    """
    protocol = spec.build()
    if protocol.copies != spec.copies:
        raise ConstructionError(f'{spec.name}: spec expects {spec.copies} copies, family uses {protocol.copies}.')
    builder = CircuitBuilder(
        spec.qubits_needed, ep_source, timing=_resolve_timing(timing), input_delay=input_delay, reuse=spec.reuse
    )
    kept_slot = builder.produce(protocol, spec.rounds, spec.rounds)
    assert builder.num_slots * 2 <= spec.qubits_needed, \
        f'{spec.name} used {builder.num_slots} slots, more than {spec.qubits_needed} qubits allow.'
    assert builder.ep_count == spec.ep_demand, \
        f'{spec.name} generated {builder.ep_count} EPs, expected {spec.ep_demand}.'
    return builder.finish(slot_pair(kept_slot), spec=spec)


def estimate_duration(spec: ProtocolSpec, config, ep_source: EPSource) -> float:
    """
    Critical path with the device's gate and readout lengths and untuned raw EPs.
    """
    return build_protocol_circuit(spec, ep_source, input_delay=0., timing=config).total_duration
