import math
import pathlib
import sys
from typing import List, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from modules.noise.channels import lambda_phase
from modules.noise.device import DeviceConfig, uniform_device_config
from modules.noise.model import NoiseModel
from modules.protocols.execution import ProtocolRunner
from modules.protocols.generation import EPSource
from modules.protocols.registry import ProtocolSpec, protocol_registry
from utils.csv_utils import write_csv
from utils.multiprocess_utils import ordered_map

ERROR_KINDS = ('depolarizing', 'amplitude_damping', 'phase_damping', 'idling')
GRID_COLUMNS = ['f_in', 'error_value', 'best_protocol_id', 'delta_f_max']
NO_PROTOCOL = 'none'

DEFAULT_REGIMES = {
    'depolarizing': {'axis': [1e-4, 1e-1], 'scale': 'log'},
    'amplitude_damping': {'axis': [1e-4, 0.5], 'scale': 'log', 't1': 5e-7},
    'phase_damping': {'axis': [1e-8, 1e-6], 'scale': 'log', 't1': 1e-3, 't2': 1e-6},
    'idling': {'axis': [1., 1000.], 'scale': 'log', 't1': 1e-5, 't2': 1e-5, 'throughput_n': 1},
}


def check_kind(error_kind: str):
    if error_kind not in ERROR_KINDS:
        raise ValueError(f'Unknown error kind \'{error_kind}\'; expected one of {ERROR_KINDS}.')


def make_axis(bounds: Sequence[float], num: int, scale: str = 'linear') -> np.ndarray:
    low, high = bounds
    if num == 1:
        return np.array([float(low)])
    if scale == 'log':
        return np.geomspace(low, high, num)
    return np.linspace(low, high, num)


def regime_setup(error_kind: str, value: float, regime: dict, num_qubits: int) -> Tuple[DeviceConfig, EPSource, float]:
    """
    Single-error device for one error-axis value.

    :param value: depolarizing p, amplitude damping lambda, gate length in seconds (phase damping)
        or per-EP wait in nanoseconds (idling); the damping regimes set the length of the CX gates only
    :return: device, EP source, reported error value
    """
    check_kind(error_kind)
    if error_kind == 'depolarizing':
        # residual depolarizing p on every gate: 1q error p / 2, 2q error 3p / 4
        config = uniform_device_config(num_qubits, cx_error=0.75 * value, sx_error=0.5 * value,
                                       name=f'depolarizing-{value:.4g}')
        return config, EPSource(0.), value
    if error_kind == 'amplitude_damping':
        t1 = regime['t1']
        length = -t1 * math.log1p(-value)
        config = uniform_device_config(num_qubits, t1=t1, t2=2. * t1, cx_length=length,
                                       name=f'amplitude-{value:.4g}')
        return config, EPSource(0.), value
    if error_kind == 'phase_damping':
        t1, t2 = regime['t1'], regime['t2']
        config = uniform_device_config(num_qubits, t1=t1, t2=t2, cx_length=value,
                                       name=f'phase-{value:.4g}')
        return config, EPSource(0.), lambda_phase(value, t1, t2)
    n = int(regime.get('throughput_n', 1))
    config = uniform_device_config(num_qubits, t1=regime['t1'], t2=regime['t2'], name=f'idling-{value:.4g}')
    return config, EPSource(value * 1e-9 * n, n), value


class PhaseGrid:
    """
    cells[i][j] holds (best protocol ID or None, max fidelity gain) at f_in_axis[i], error_axis[j].
    """

    def __init__(self, error_kind: str, f_in_axis: Sequence[float], error_axis: Sequence[float],
                 cells: List[List[Tuple[Union[int, None], float]]]):
        assert len(cells) == len(f_in_axis) and all(len(row) == len(error_axis) for row in cells), \
            f'Grid is not {len(f_in_axis)}x{len(error_axis)}.'
        self.error_kind = error_kind
        self.f_in_axis = [float(f) for f in f_in_axis]
        self.error_axis = [float(e) for e in error_axis]
        self.cells = cells

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.f_in_axis), len(self.error_axis)

    def best_ids(self) -> np.ndarray:
        return np.array([[best for best, _ in row] for row in self.cells], dtype=object)

    def delta_f(self) -> np.ndarray:
        return np.array([[delta for _, delta in row] for row in self.cells], dtype=np.float64)

    def rows(self) -> List[dict]:
        return [
            {
                'f_in': f_in, 'error_value': error_value,
                'best_protocol_id': NO_PROTOCOL if best is None else best, 'delta_f_max': delta,
            }
            for f_in, row in zip(self.f_in_axis, self.cells)
            for error_value, (best, delta) in zip(self.error_axis, row)
        ]

    def to_csv(self, path: Union[str, pathlib.Path]) -> str:
        return write_csv(path, GRID_COLUMNS, self.rows())


def best_protocol(runner: ProtocolRunner, f_in: float, catalog: Sequence[ProtocolSpec]) -> Tuple[Union[int, None], float]:
    """
    Largest fidelity gain over the catalog; ties go to the lower ID. None when every protocol loses fidelity,
    with a NaN gain when f_in cannot be prepared at all.
    """
    best, best_delta = None, -math.inf
    for spec in catalog:
        outcome = runner(f_in, spec)
        if not outcome.reachable:
            continue
        delta = outcome.f_out - f_in
        if delta > best_delta:
            best, best_delta = spec.id, delta
    if best_delta < 0:
        best = None
    if math.isinf(best_delta):
        best_delta = math.nan
    return best, best_delta


def _sweep_column(error_kind: str, value: float, f_in_axis: Sequence[float], regime: dict, protocol_ids: Sequence[int]):
    catalog = [spec for spec in protocol_registry() if spec.id in protocol_ids]
    num_qubits = max(spec.qubits_needed for spec in catalog)
    config, ep_source, reported = regime_setup(error_kind, value, regime, num_qubits)
    runner = ProtocolRunner(NoiseModel(config), ep_source)
    return reported, [best_protocol(runner, f_in, catalog) for f_in in f_in_axis]


def sweep_phase_diagram(
        error_kind: str, f_in_axis: Sequence[float], error_axis: Sequence[float], regime: dict = None,
        catalog: Sequence[ProtocolSpec] = None, num_workers: int = 1, progress: bool = True
) -> PhaseGrid:
    """
    Every catalog protocol on every (f_in, error) cell of a single-error regime.

    :param error_axis: regime parameter values, see regime_setup; the grid reports the resulting error values
    :param regime: regime constants; DEFAULT_REGIMES[error_kind] when None
    """
    check_kind(error_kind)
    if len(f_in_axis) == 0 or len(error_axis) == 0:
        raise ValueError('Sweep axes must not be empty.')
    for name, axis in (('f_in', f_in_axis), ('error', error_axis)):
        steps = np.diff(np.asarray(axis, dtype=np.float64))
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError(f'The {name} axis must be strictly monotone.')
    regime = DEFAULT_REGIMES[error_kind] if regime is None else regime
    catalog = protocol_registry() if catalog is None else catalog
    ids = [spec.id for spec in catalog]
    args = [(error_kind, float(value), [float(f) for f in f_in_axis], regime, ids) for value in error_axis]
    reported, columns = [], []
    for res in tqdm(ordered_map(_sweep_column, args, num_workers), total=len(args), desc=f'| {error_kind}',
                    disable=not progress, file=sys.stderr):
        if res is None:
            raise RuntimeError(f'A {error_kind} sweep column failed; see the traceback above.')
        reported.append(res[0])
        columns.append(res[1])
    cells = [[columns[j][i] for j in range(len(error_axis))] for i in range(len(f_in_axis))]
    return PhaseGrid(error_kind, f_in_axis, reported, cells)
