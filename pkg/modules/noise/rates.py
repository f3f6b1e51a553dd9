from typing import Dict, Sequence

import numpy as np

from modules.densmat.state import DomainError
from modules.noise.channels import lambda_amplitude, lambda_phase, thermal_error_rate
from modules.noise.device import DeviceConfig
from modules.noise.model import NoiseModel

ERROR_TYPES = ('depolarizing', 'amplitude_damping', 'phase_damping', 'measurement', 'idling')


class ErrorRates:
    """
    Per-error-type rates, each the mean over the qubit channels involved.
    """

    def __init__(
            self, e_depolarizing: float = 0., e_amplitude_damping: float = 0., e_phase_damping: float = 0.,
            e_measurement: float = 0., e_idling: float = 0.
    ):
        self.e_depolarizing = float(e_depolarizing)
        self.e_amplitude_damping = float(e_amplitude_damping)
        self.e_phase_damping = float(e_phase_damping)
        self.e_measurement = float(e_measurement)
        self.e_idling = float(e_idling)

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, f'e_{name}') for name in ERROR_TYPES}

    def values(self):
        return list(self.as_dict().values())

    def __repr__(self):
        body = ', '.join(f'{k}={v:.3g}' for k, v in self.as_dict().items())
        return f'ErrorRates({body})'


def _entangling_gates_of(config: DeviceConfig, qubit: int):
    all_cx = [g for g in config.gates if g.name == 'cx']
    own = [g for g in all_cx if qubit in g.qubits]
    # uncoupled qubits take the device-wide calibration
    return own if own else all_cx


def estimate_error_rates(
        config: DeviceConfig, ep_source, protocol_qubits: Sequence[int],
        ep_demand: int = 2, noise: NoiseModel = None
) -> ErrorRates:
    """
    :param ep_source: anything with tau (seconds) and throughput_n
    :param protocol_qubits: device qubits the protocol may occupy
    :param ep_demand: raw EPs needed before a round can start; idling counts only when one cycle cannot supply them
    :param noise: model built from config, reused for its residual depolarizing cache
    """
    qubits = list(protocol_qubits)
    if not qubits:
        raise DomainError('Cannot estimate error rates over an empty qubit set.')
    noise = NoiseModel(config) if noise is None else noise
    wait = ep_source.tau / ep_source.throughput_n
    dep, amp, phase, meas, idle = [], [], [], [], []
    for q in qubits:
        props = config.qubit(q)
        gates = _entangling_gates_of(config, q)
        if gates:
            dep.append(np.mean([noise.residual_p('cx', g.qubits) for g in gates]))
            length = float(np.mean([g.gate_length for g in gates]))
        else:
            dep.append(0.)
            length = 0.
        amp.append(lambda_amplitude(length, props.t1))
        phase.append(lambda_phase(length, props.t1, props.t2))
        meas.append(0.5 * (props.prob_meas0_prep1 + props.prob_meas1_prep0))
        if ep_source.throughput_n < ep_demand and wait > 0 and props.has_thermal:
            idle.append(thermal_error_rate(wait, props.t1, props.t2))
        else:
            idle.append(0.)
    return ErrorRates(
        e_depolarizing=np.mean(dep),
        e_amplitude_damping=np.mean(amp),
        e_phase_damping=np.mean(phase),
        e_measurement=np.mean(meas),
        e_idling=np.mean(idle),
    )
