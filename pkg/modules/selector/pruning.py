from typing import Dict, List

from modules.noise.device import DeviceConfig
from modules.noise.rates import ErrorRates
from modules.protocols.circuit import estimate_duration
from modules.protocols.generation import EPSource
from modules.protocols.registry import ProtocolSpec
from modules.selector.thresholds import Thresholds


class DurationTable:
    """
    estimate_duration memoized for one device and EP source.
    """

    def __init__(self, config: DeviceConfig, ep_source: EPSource):
        self.config = config
        self.ep_source = ep_source
        self._cache: Dict[tuple, float] = {}

    def __call__(self, spec: ProtocolSpec) -> float:
        key = spec.key()
        if key not in self._cache:
            self._cache[key] = estimate_duration(spec, self.config, self.ep_source)
        return self._cache[key]


def prune_by_capacity(
        catalog: List[ProtocolSpec], request, t_remain: float = None, durations: DurationTable = None
) -> List[ProtocolSpec]:
    """
    Keep protocols that fit both the buffer and the device, and whose estimated runtime fits the budget.

    :param t_remain: budget left, request.t_qos when None; nothing fits a spent budget
    """
    t_remain = request.t_qos if t_remain is None else t_remain
    if t_remain <= 0:
        return []
    if durations is None:
        durations = DurationTable(request.config, request.ep_source)
    return [
        spec for spec in catalog
        if spec.qubits_needed <= request.usable_qubits and durations(spec) <= t_remain
    ]


def noise_flags(rates: ErrorRates, th: Thresholds) -> Dict[str, bool]:
    values = rates.as_dict()
    if th.v3_clause == 'any':
        drop_expedient = any(v > th.v3 for v in values.values())
    else:
        drop_expedient = values['idling'] > th.v3
    return {
        'drop_multi_round': any(v > th.v1 for v in values.values()),
        'drop_bbpssw': all(v < th.v2 for v in values.values()),
        'drop_expedient': drop_expedient,
    }


def prune_by_noise(catalog: List[ProtocolSpec], rates: ErrorRates, th: Thresholds) -> List[ProtocolSpec]:
    flags = noise_flags(rates, th)
    pruned = []
    for spec in catalog:
        if flags['drop_multi_round'] and spec.rounds > 2:
            continue
        if flags['drop_bbpssw'] and spec.family == 'BBPSSW':
            continue
        if flags['drop_expedient'] and spec.family == 'EXPEDIENT':
            continue
        pruned.append(spec)
    return pruned


def sort_candidates(catalog: List[ProtocolSpec], f_in: float, th: Thresholds) -> List[ProtocolSpec]:
    """
    The favored family first, then fewer rounds, fewer qubits and catalog ID.
    """
    favored = th.favored_family(f_in)
    return sorted(
        catalog, key=lambda spec: (spec.family != favored, spec.rounds, spec.qubits_needed, spec.id)
    )
