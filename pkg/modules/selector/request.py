import json
import pathlib
from typing import Union

from modules.densmat.state import DomainError
from modules.noise.device import DeviceConfig, load_device_config
from modules.protocols.generation import EPSource


class SelectionRequest:
    """
    Inputs of one selection.

    f_in only has to lie in [0, 1], but not every value can be prepared. On a device with thermal
    relaxation the tuning delay reaches fidelities from 1 (reset error caps reused slots lower) down
    to about 0.5, the long-delay limit; with T2 well below 2 T1 the minimum dips slightly under 0.5.
    Without thermal relaxation raw EPs are Werner states, so f_in must be at least 0.25. A request
    outside that range stops with NO_IMPROVEMENT and an empty trace.

    :param f_in: raw EP fidelity
    :param tau: seconds per generation cycle
    :param throughput_n: EPs per generation cycle
    :param buffer_size: qubits available for purification
    :param config: device calibration
    :param t_qos: allotted time in seconds
    :param f_out_target: fidelity at which purification stops
    """

    def __init__(
            self, f_in: float, tau: float, throughput_n: int, buffer_size: int, config: DeviceConfig,
            t_qos: float, f_out_target: float
    ):
        for name, value in (('f_in', f_in), ('f_out_target', f_out_target)):
            if not 0. <= value <= 1.:
                raise DomainError(f'{name} must lie in [0, 1], got {value}.')
        if t_qos < 0:
            raise DomainError(f't_qos must be non-negative, got {t_qos}.')
        if int(buffer_size) != buffer_size or buffer_size < 4:
            raise DomainError(f'buffer_size must be an integer >= 4, got {buffer_size}.')
        self.f_in = float(f_in)
        self.ep_source = EPSource(tau, throughput_n)
        self.buffer_size = int(buffer_size)
        self.config = config
        self.t_qos = float(t_qos)
        self.f_out_target = float(f_out_target)

    @property
    def tau(self) -> float:
        return self.ep_source.tau

    @property
    def throughput_n(self) -> int:
        return self.ep_source.throughput_n

    @property
    def usable_qubits(self) -> int:
        return min(self.buffer_size, self.config.num_qubits)

    def to_dict(self, embed_config: bool = True) -> dict:
        return {
            'f_in': self.f_in, 'tau': self.tau, 'throughput_n': self.throughput_n,
            'buffer_size': self.buffer_size, 't_qos': self.t_qos, 'f_out_target': self.f_out_target,
            'config': self.config.to_dict() if embed_config else self.config.name,
        }

    @classmethod
    def from_dict(cls, doc: dict, config: DeviceConfig = None) -> 'SelectionRequest':
        """
        :param config: overrides doc['config'], which may be a device document or a path to one
        """
        if config is None:
            config = load_device_config(doc['config'])
        return cls(
            f_in=doc['f_in'], tau=doc['tau'], throughput_n=doc.get('throughput_n', 1),
            buffer_size=doc['buffer_size'], config=config, t_qos=doc['t_qos'],
            f_out_target=doc['f_out_target'],
        )

    def __repr__(self):
        return (f'SelectionRequest(f_in={self.f_in}, tau={self.tau:.3g}, n={self.throughput_n}, '
                f'buffer={self.buffer_size}, device={self.config.name}, t_qos={self.t_qos:.3g}, '
                f'f_out={self.f_out_target})')


def dump_document(doc: dict, path: Union[str, pathlib.Path] = None) -> str:
    text = json.dumps(doc, indent=2)
    if path is not None:
        path = pathlib.Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf8') as f:
            f.write(text + '\n')
    return text
