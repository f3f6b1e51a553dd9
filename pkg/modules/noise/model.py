import warnings
from typing import Dict, List, Sequence, Tuple

from scipy.optimize import brentq

from modules.densmat.channel import QuantumChannel, identity_channel
from modules.noise.channels import (
    depolarizing_channel, reset_channel, thermal_relaxation_channel, two_qubit_depolarizing_channel
)
from modules.noise.device import DeviceConfig, GateProperties

DEPOLARIZING_XTOL = 1e-12


def _depolarizing(arity: int, p: float) -> QuantumChannel:
    return depolarizing_channel(p) if arity == 1 else two_qubit_depolarizing_channel(p)


class GateNoise:
    """
    Noise attached to one calibrated gate: per-qubit thermal relaxation over the gate length,
    then a residual depolarizing channel on all operands.
    """

    def __init__(self, thermal: List[QuantumChannel], depolarizing_p: float, length: float, gate_error: float):
        self.thermal = thermal
        self.depolarizing_p = depolarizing_p
        self.length = length
        self.gate_error = gate_error

    @property
    def arity(self) -> int:
        return len(self.thermal)

    def thermal_channel(self) -> QuantumChannel:
        channel = self.thermal[0]
        for other in self.thermal[1:]:
            channel = channel.tensor(other)
        return channel

    def composite(self, p: float = None) -> QuantumChannel:
        p = self.depolarizing_p if p is None else p
        return _depolarizing(self.arity, p).compose(self.thermal_channel())

    def steps(self, targets: Sequence[int]) -> List[Tuple[QuantumChannel, Tuple[int, ...]]]:
        steps = [(ch, (q,)) for ch, q in zip(self.thermal, targets) if self.length > 0]
        if self.depolarizing_p > 0:
            steps.append((_depolarizing(self.arity, self.depolarizing_p), tuple(targets)))
        return steps


def residual_depolarizing(thermal: QuantumChannel, gate_error: float, xtol: float = DEPOLARIZING_XTOL) -> float:
    """
    Depolarizing probability p such that depolarizing(p) after thermal has error rate gate_error.
    0 when the thermal part alone already reaches gate_error; clamped to 1 when gate_error is unreachable.
    """
    e_th = thermal.error_rate()
    if e_th >= gate_error:
        return 0.
    arity = thermal.arity

    def excess(p):
        return _depolarizing(arity, p).compose(thermal).error_rate() - gate_error

    if excess(1.) < 0:
        warnings.warn(
            f'Gate error {gate_error:.4g} exceeds what full depolarizing reaches; clamping p to 1.',
            category=UserWarning
        )
        return 1.
    return float(brentq(excess, 0., 1., xtol=xtol))


class NoiseModel:
    """
    Channels derived from a DeviceConfig: gates, idling, readout confusion and reset.

    :param config: calibrated device parameters
    """

    def __init__(self, config: DeviceConfig):
        self.config = config
        self._gate_noise: Dict[Tuple[str, Tuple[int, ...]], GateNoise] = {}
        self._idle: Dict[Tuple[int, float], QuantumChannel] = {}

    @property
    def num_qubits(self) -> int:
        return self.config.num_qubits

    def has_thermal(self, qubits: Sequence[int] = None) -> bool:
        qubits = range(self.num_qubits) if qubits is None else qubits
        return any(self.config.qubit(q).has_thermal for q in qubits)

    def thermal_channel(self, qubit: int, t: float) -> QuantumChannel:
        q = self.config.qubit(qubit)
        return thermal_relaxation_channel(t, q.t1, q.t2)

    def idle_channel(self, qubit: int, t: float) -> QuantumChannel:
        key = (qubit, t)
        if key not in self._idle:
            if t <= 0 or not self.config.qubit(qubit).has_thermal:
                self._idle[key] = identity_channel(1)
            else:
                self._idle[key] = self.thermal_channel(qubit, t)
        return self._idle[key]

    def _build_gate_noise(self, gate: GateProperties, targets: Tuple[int, ...]) -> GateNoise:
        thermal = [self.thermal_channel(q, gate.gate_length) for q in targets]
        noise = GateNoise(thermal, 0., gate.gate_length, gate.gate_error)
        noise.depolarizing_p = residual_depolarizing(noise.thermal_channel(), gate.gate_error)
        return noise

    def gate_noise(self, kind: str, targets: Sequence[int]) -> GateNoise:
        """
        None for ideal (uncalibrated) gates.
        """
        targets = tuple(targets)
        key = (kind, targets)
        if key not in self._gate_noise:
            gate = self.config.calibration(kind, targets)
            self._gate_noise[key] = None if gate is None else self._build_gate_noise(gate, targets)
        return self._gate_noise[key]

    def gate_steps(self, kind: str, targets: Sequence[int]) -> List[Tuple[QuantumChannel, Tuple[int, ...]]]:
        noise = self.gate_noise(kind, targets)
        return [] if noise is None else noise.steps(targets)

    def gate_length(self, kind: str, targets: Sequence[int]) -> float:
        return self.config.duration_of(kind, targets)

    def confusion(self, qubit: int) -> Tuple[float, float]:
        return self.config.qubit(qubit).confusion

    def reset_error(self, qubit: int) -> float:
        gate = self.config.calibration('reset', (qubit,))
        return 0. if gate is None else gate.gate_error

    def reset_channel(self, qubit: int) -> QuantumChannel:
        return reset_channel(self.reset_error(qubit))

    def residual_p(self, kind: str, targets: Sequence[int]) -> float:
        noise = self.gate_noise(kind, targets)
        return 0. if noise is None else noise.depolarizing_p

    def __repr__(self):
        return f'NoiseModel({self.config.name})'


def build_noise_model(config: DeviceConfig) -> NoiseModel:
    return NoiseModel(config)


def is_noiseless(model: NoiseModel) -> bool:
    cfg = model.config
    return (
        not model.has_thermal()
        and all(g.gate_error == 0. for g in cfg.gates)
        and all(q.prob_meas0_prep1 == 0. and q.prob_meas1_prep0 == 0. for q in cfg.qubits)
    )
