from typing import List

from basics.base_selector import BaseSelector, SelectionResult
from modules.noise.rates import ErrorRates, estimate_error_rates
from modules.protocols.execution import ProtocolRunner
from modules.protocols.registry import ProtocolSpec
from modules.selector.pruning import DurationTable, prune_by_capacity, prune_by_noise, sort_candidates
from modules.selector.thresholds import Thresholds


class CatalogSelector(BaseSelector):
    """
    Capacity-pruned catalog, re-checked against the remaining budget on every step.
    """

    def __init__(self, thresholds: Thresholds = None, catalog: List[ProtocolSpec] = None, **kwargs):
        super().__init__(catalog=catalog, **kwargs)
        self.thresholds = Thresholds() if thresholds is None else thresholds
        self.durations: DurationTable = None

    def prepare(self, request, noise) -> List[ProtocolSpec]:
        self.durations = DurationTable(request.config, request.ep_source)
        return prune_by_capacity(self.catalog, request, durations=self.durations)

    def feasible(self, pool, request, t_remain):
        return prune_by_capacity(pool, request, t_remain=t_remain, durations=self.durations)

    def rank(self, candidates, f):
        return sort_candidates(candidates, f, self.thresholds)


class ProtocolSelector(CatalogSelector):
    """
    Prunes by capacity and by the device's estimated error rates, then tries the head of the
    fidelity-dependent family sort.
    """

    def __init__(self, thresholds: Thresholds = None, catalog: List[ProtocolSpec] = None, **kwargs):
        super().__init__(thresholds=thresholds, catalog=catalog, **kwargs)
        self.rates: ErrorRates = None

    def prepare(self, request, noise) -> List[ProtocolSpec]:
        pool = super().prepare(request, noise)
        if not pool:
            return []
        self.rates = estimate_error_rates(
            request.config, request.ep_source, range(request.usable_qubits),
            ep_demand=min(spec.ep_demand for spec in pool), noise=noise
        )
        return prune_by_noise(pool, self.rates, self.thresholds)


def select(
        request, th: Thresholds = None, noise=None, runner: ProtocolRunner = None,
        catalog: List[ProtocolSpec] = None, verbose: bool = False
) -> SelectionResult:
    return ProtocolSelector(thresholds=th, catalog=catalog, verbose=verbose).select(
        request, noise=noise, runner=runner
    )
