import functools
import pathlib
from typing import Dict, List, Sequence, Union

import numpy as np
import yaml

from modules.densmat.state import DomainError
from modules.noise.device import DeviceConfig, GateProperties, QubitProperties, intra_node_pairs, load_device_config
from modules.selector.request import SelectionRequest

RANDOM_GROUPS = ('random_better', 'random_current', 'random_worse')
FIXTURE_GROUP = 'device_fixture'
GROUPS = RANDOM_GROUPS + (FIXTURE_GROUP,)
GROUP_ALIASES = {str(i): name for i, name in enumerate(GROUPS, start=1)}

DEFAULT_RANGES = pathlib.Path(__file__).resolve().parents[2] / 'fixtures' / 'ranges.yaml'


def resolve_group(group: Union[str, int]) -> str:
    group = GROUP_ALIASES.get(str(group).strip(), str(group).strip())
    if group not in GROUPS:
        raise DomainError(f'Unknown benchmark group \'{group}\'; expected one of {GROUPS} or 1-{len(GROUPS)}.')
    return group


@functools.lru_cache(maxsize=8)
def _load_ranges(path: str) -> dict:
    with open(path, encoding='utf-8') as f:
        return yaml.safe_load(f)


def load_ranges(path: Union[str, pathlib.Path] = None) -> dict:
    return _load_ranges(str(DEFAULT_RANGES if path is None else path))


class Scenario:
    def __init__(self, group: str, index: int, request: SelectionRequest, name: str = None):
        self.group = group
        self.index = index
        self.request = request
        self.name = f'{group}-{index}' if name is None else name

    def to_dict(self) -> dict:
        return {'name': self.name, 'group': self.group, 'index': self.index,
                'request': self.request.to_dict(embed_config=False)}

    def __repr__(self):
        return f'Scenario({self.name}, {self.request})'


def _scaled_ranges(ranges: dict, group: str) -> Dict[str, List[float]]:
    factor = ranges['groups'][group]
    scaling = ranges['scaling']
    device = {}
    for field, (low, high) in ranges['current'].items():
        if field in scaling['error_fields']:
            low, high = min(low * factor, scaling['error_cap']), min(high * factor, scaling['error_cap'])
        elif field in scaling['time_fields']:
            low, high = low / factor, high / factor
        device[field] = [float(low), float(high)]
    return device


def sample_device(rng: np.random.Generator, num_qubits: int, device_ranges: Dict[str, Sequence[float]],
                  name: str = 'sampled') -> DeviceConfig:
    """
    Independent per-qubit and per-gate draws; T2 is clipped to 2 * T1.
    """
    def draw(field):
        low, high = device_ranges[field]
        return float(rng.uniform(low, high))

    qubits = []
    for _ in range(num_qubits):
        t1 = draw('t1')
        t2 = min(draw('t2'), 2. * t1)
        qubits.append(QubitProperties(t1, t2, draw('readout_length'), draw('readout_error'), draw('readout_error')))
    gates = []
    for q in range(num_qubits):
        sx_error, sx_length = draw('sx_error'), draw('sx_length')
        gates.append(GateProperties('rz', [q], 0., 0.))
        gates.append(GateProperties('sx', [q], sx_error, sx_length))
        gates.append(GateProperties('x', [q], sx_error, sx_length))
        gates.append(GateProperties('reset', [q], draw('reset_error'), draw('reset_length')))
    pairs = intra_node_pairs(num_qubits)
    for i, j in pairs:
        gates.append(GateProperties('cx', [i, j], draw('cx_error'), draw('cx_length')))
    return DeviceConfig(qubits, gates, pairs, name=name)


def sample_scenario(group: str, rng_seed: int, index: int, ranges: dict = None) -> Scenario:
    """
    Deterministic in (group, rng_seed, index).
    """
    group = resolve_group(group)
    if group not in RANDOM_GROUPS:
        raise DomainError(f'Group \'{group}\' is not sampled; use fixture_scenarios.')
    ranges = load_ranges() if ranges is None else ranges
    rng = np.random.default_rng([rng_seed, index])
    req = ranges['request']
    buffer_size = int(rng.integers(req['buffer_size'][0], req['buffer_size'][1] + 1))
    throughput_n = int(rng.integers(req['throughput_n'][0], req['throughput_n'][1] + 1))
    tau = float(rng.uniform(*req['tau']))
    f_in = float(rng.uniform(*req['f_in']))
    f_out_target = float(rng.uniform(*req['f_out_target']))
    t_qos = float(rng.uniform(*req['t_qos']))
    name = f'{group}-{rng_seed}-{index}'
    config = sample_device(rng, buffer_size, _scaled_ranges(ranges, group), name=name)
    request = SelectionRequest(
        f_in=f_in, tau=tau, throughput_n=throughput_n, buffer_size=buffer_size, config=config,
        t_qos=t_qos, f_out_target=f_out_target
    )
    return Scenario(group, index, request, name=name)


def fixture_scenarios(paths: Sequence[Union[str, pathlib.Path]], params: dict) -> List[Scenario]:
    """
    One scenario per device snapshot, all sharing the request parameters in params.
    """
    scenarios = []
    for index, path in enumerate(paths):
        config = load_device_config(path)
        request = SelectionRequest(
            f_in=params['f_in'], tau=params['tau'], throughput_n=params['throughput_n'],
            buffer_size=params['buffer_size'], config=config, t_qos=params['t_qos'],
            f_out_target=params['f_out_target']
        )
        scenarios.append(Scenario(FIXTURE_GROUP, index, request, name=config.name))
    return scenarios
