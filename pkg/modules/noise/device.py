import json
import math
import pathlib
import warnings
from typing import Dict, List, Optional, Sequence, Tuple, Union

from modules.noise.channels import PhysicalityError

QUBIT_FIELDS = ('t1', 't2', 'readout_length', 'prob_meas0_prep1', 'prob_meas1_prep0')
GATE_FIELDS = ('name', 'qubits', 'gate_error', 'gate_length')
TOP_FIELDS = ('qubits', 'gates', 'coupling_map')
OPTIONAL_TOP_FIELDS = ('name', 'description')

# gate kinds of a timed circuit -> calibration entries, first match wins
GATE_CALIBRATION = {
    'rz': ('rz',),
    's': ('rz',),
    'sdg': ('rz',),
    'sx': ('sx',),
    'x': ('x', 'sx'),
    'cx': ('cx',),
    'reset': ('reset',),
}


class SchemaError(ValueError):
    pass


def _as_time(value) -> float:
    # null stands for an infinite coherence time
    return math.inf if value is None else float(value)


class QubitProperties:
    def __init__(self, t1: float, t2: float, readout_length: float, prob_meas0_prep1: float, prob_meas1_prep0: float):
        self.t1 = float(t1)
        self.t2 = float(t2)
        self.readout_length = float(readout_length)
        self.prob_meas0_prep1 = float(prob_meas0_prep1)
        self.prob_meas1_prep0 = float(prob_meas1_prep0)

    @property
    def confusion(self) -> Tuple[float, float]:
        """
        (p01, p10) = (P(read 1 | prep 0), P(read 0 | prep 1))
        """
        return self.prob_meas1_prep0, self.prob_meas0_prep1

    @property
    def has_thermal(self) -> bool:
        return math.isfinite(self.t1) or math.isfinite(self.t2)

    def to_dict(self) -> dict:
        return {
            't1': None if math.isinf(self.t1) else self.t1,
            't2': None if math.isinf(self.t2) else self.t2,
            'readout_length': self.readout_length,
            'prob_meas0_prep1': self.prob_meas0_prep1,
            'prob_meas1_prep0': self.prob_meas1_prep0,
        }


class GateProperties:
    def __init__(self, name: str, qubits: Sequence[int], gate_error: float, gate_length: float):
        self.name = str(name)
        self.qubits = tuple(int(q) for q in qubits)
        self.gate_error = float(gate_error)
        self.gate_length = float(gate_length)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'qubits': list(self.qubits),
            'gate_error': self.gate_error,
            'gate_length': self.gate_length,
        }

    def __repr__(self):
        return f'GateProperties({self.name}{list(self.qubits)}, err={self.gate_error:.3g}, len={self.gate_length:.3g})'


class DeviceConfig:
    """
    Calibrated hardware parameters of one device. Device qubit q hosts circuit qubit q.
    Durations in seconds, probabilities dimensionless.
    """

    def __init__(
            self, qubits: List[QubitProperties], gates: List[GateProperties],
            coupling_map: List[Tuple[int, int]], name: str = 'device'
    ):
        self.qubits = list(qubits)
        self.gates = list(gates)
        self.coupling_map = [tuple(int(q) for q in edge) for edge in coupling_map]
        self.name = name
        self._index = {}
        for gate in self.gates:
            self._index.setdefault((gate.name, gate.qubits), gate)
        self._validate()

    def _validate(self):
        for i, q in enumerate(self.qubits):
            if not q.t1 > 0:
                raise PhysicalityError(f'Qubit {i}: T1 must be positive, got {q.t1}.')
            if not q.t2 > 0:
                raise PhysicalityError(f'Qubit {i}: T2 must be positive, got {q.t2}.')
            if math.isfinite(q.t2) and q.t2 > 2. * q.t1 * (1. + 1e-12):
                raise PhysicalityError(f'Qubit {i}: T2={q.t2} exceeds 2*T1={2. * q.t1}.')
            for field in ('prob_meas0_prep1', 'prob_meas1_prep0'):
                value = getattr(q, field)
                if not 0. <= value <= 1.:
                    raise PhysicalityError(f'Qubit {i}: {field} must lie in [0, 1], got {value}.')
            if q.readout_length < 0:
                raise PhysicalityError(f'Qubit {i}: readout_length must be non-negative, got {q.readout_length}.')
        for gate in self.gates:
            if not 0. <= gate.gate_error <= 1.:
                raise PhysicalityError(f'Gate {gate.name}{list(gate.qubits)}: gate_error {gate.gate_error} not in [0, 1].')
            if gate.gate_length < 0:
                raise PhysicalityError(f'Gate {gate.name}{list(gate.qubits)}: negative gate_length {gate.gate_length}.')
            for q in gate.qubits:
                if not 0 <= q < self.num_qubits:
                    raise SchemaError(f'Gate {gate.name}{list(gate.qubits)} refers to unknown qubit {q}.')

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def qubit(self, q: int) -> QubitProperties:
        if not 0 <= q < self.num_qubits:
            raise IndexError(f'Circuit qubit {q} does not fit on device \'{self.name}\' with {self.num_qubits} qubits.')
        return self.qubits[q]

    def find_gate(self, name: str, qubits: Sequence[int]) -> Optional[GateProperties]:
        """
        Directed entry, then the reversed entry, then the mean over all entries of that name.
        None when the device has no entry of that name.
        """
        qubits = tuple(qubits)
        for q in qubits:
            self.qubit(q)
        if (name, qubits) in self._index:
            return self._index[(name, qubits)]
        if len(qubits) == 2 and (name, qubits[::-1]) in self._index:
            return self._index[(name, qubits[::-1])]
        same_kind = [g for g in self.gates if g.name == name and len(g.qubits) == len(qubits)]
        if not same_kind:
            return None
        return GateProperties(
            name, qubits,
            gate_error=sum(g.gate_error for g in same_kind) / len(same_kind),
            gate_length=sum(g.gate_length for g in same_kind) / len(same_kind),
        )

    def calibration(self, kind: str, qubits: Sequence[int]) -> Optional[GateProperties]:
        for name in GATE_CALIBRATION.get(kind, ()):
            gate = self.find_gate(name, qubits)
            if gate is not None:
                return gate
        return None

    def duration_of(self, kind: str, qubits: Sequence[int]) -> float:
        """
        Duration of one circuit op on the device. Missing calibrations count as instantaneous.
        """
        if kind == 'measure':
            return max(self.qubit(q).readout_length for q in qubits)
        if kind == 'twirl':
            return 0.
        gate = self.calibration(kind, qubits)
        return 0. if gate is None else gate.gate_length

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'qubits': [q.to_dict() for q in self.qubits],
            'gates': [g.to_dict() for g in self.gates],
            'coupling_map': [list(edge) for edge in self.coupling_map],
        }

    def __eq__(self, other):
        return isinstance(other, DeviceConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f'DeviceConfig({self.name}, qubits={self.num_qubits}, gates={len(self.gates)})'


def _require(doc: dict, field: str, where: str):
    if field not in doc:
        raise SchemaError(f'Missing field \'{field}\' in {where}.')
    return doc[field]


def _warn_unknown(doc: dict, known: Sequence[str], where: str):
    unknown = sorted(set(doc.keys()) - set(known))
    if unknown:
        warnings.warn(f'Ignoring unknown field(s) {unknown} in {where}.', category=UserWarning)


def parse_device_config(doc: dict, name: str = 'device') -> DeviceConfig:
    if not isinstance(doc, dict):
        raise SchemaError(f'A device document must be a mapping, got {type(doc).__name__}.')
    _warn_unknown(doc, TOP_FIELDS + OPTIONAL_TOP_FIELDS, 'the device document')
    qubits = []
    for i, q in enumerate(_require(doc, 'qubits', 'the device document')):
        where = f'qubits[{i}]'
        _warn_unknown(q, QUBIT_FIELDS, where)
        try:
            qubits.append(QubitProperties(
                t1=_as_time(_require(q, 't1', where)),
                t2=_as_time(_require(q, 't2', where)),
                readout_length=_require(q, 'readout_length', where),
                prob_meas0_prep1=_require(q, 'prob_meas0_prep1', where),
                prob_meas1_prep0=_require(q, 'prob_meas1_prep0', where),
            ))
        except (TypeError, ValueError) as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f'Invalid value in {where}: {e}') from e
    gates = []
    for i, g in enumerate(_require(doc, 'gates', 'the device document')):
        where = f'gates[{i}]'
        _warn_unknown(g, GATE_FIELDS, where)
        try:
            gates.append(GateProperties(
                name=_require(g, 'name', where),
                qubits=_require(g, 'qubits', where),
                gate_error=_require(g, 'gate_error', where),
                gate_length=_require(g, 'gate_length', where),
            ))
        except (TypeError, ValueError) as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f'Invalid value in {where}: {e}') from e
    coupling_map = _require(doc, 'coupling_map', 'the device document')
    for i, edge in enumerate(coupling_map):
        if len(edge) != 2:
            raise SchemaError(f'coupling_map[{i}] must be a qubit pair, got {edge}.')
    return DeviceConfig(qubits, gates, coupling_map, name=doc.get('name', name))


def load_device_config(source: Union[str, pathlib.Path, dict]) -> DeviceConfig:
    """
    :param source: path to a JSON document, or the parsed document itself
    """
    if isinstance(source, dict):
        return parse_device_config(source)
    path = pathlib.Path(source)
    try:
        with open(path, 'r', encoding='utf8') as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f'{path} is not valid JSON: {e}') from e
    return parse_device_config(doc, name=path.stem)


def dump_device_config(config: DeviceConfig, path: Union[str, pathlib.Path] = None) -> str:
    text = json.dumps(config.to_dict(), indent=2)
    if path is not None:
        with open(path, 'w', encoding='utf8') as f:
            f.write(text + '\n')
    return text


def intra_node_pairs(num_qubits: int) -> List[Tuple[int, int]]:
    """
    Even qubits sit on node A, odd qubits on node B; purification gates never cross nodes.
    """
    return [
        (i, j) for i in range(num_qubits) for j in range(i + 1, num_qubits)
        if i % 2 == j % 2
    ]


def uniform_device_config(
        num_qubits: int, t1: float = math.inf, t2: float = math.inf,
        cx_error: float = 0., cx_length: float = 0.,
        sx_error: float = 0., sx_length: float = 0.,
        readout_error: float = 0., readout_length: float = 0.,
        reset_error: float = 0., reset_length: float = 0.,
        name: str = 'uniform'
) -> DeviceConfig:
    """
    Identical qubits with all-to-all intra-node coupling; used for synthetic single-error regimes.
    """
    qubits = [
        QubitProperties(t1, t2, readout_length, readout_error, readout_error)
        for _ in range(num_qubits)
    ]
    gates = []
    for q in range(num_qubits):
        gates.append(GateProperties('rz', [q], 0., 0.))
        gates.append(GateProperties('sx', [q], sx_error, sx_length))
        gates.append(GateProperties('x', [q], sx_error, sx_length))
        gates.append(GateProperties('reset', [q], reset_error, reset_length))
    pairs = intra_node_pairs(num_qubits)
    for i, j in pairs:
        gates.append(GateProperties('cx', [i, j], cx_error, cx_length))
    return DeviceConfig(qubits, gates, pairs, name=name)
