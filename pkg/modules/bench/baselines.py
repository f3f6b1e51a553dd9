from typing import List

from basics.base_selector import SelectionResult
from modules.protocols.execution import ProtocolRunner
from modules.protocols.registry import ProtocolSpec, find_protocol, protocol_registry
from modules.selector.select import CatalogSelector
from modules.selector.thresholds import Thresholds

DEFAULT_PROTOCOL = 'EXPEDIENTx1'
TIE_TOL = 1e-9


class DefaultBaseline(CatalogSelector):
    """
    One round of EXPEDIENT, repeated while it improves the fidelity and the budget lasts.
    """

    def __init__(self, catalog: List[ProtocolSpec] = None, **kwargs):
        catalog = protocol_registry() if catalog is None else catalog
        super().__init__(catalog=[find_protocol(DEFAULT_PROTOCOL, catalog)], **kwargs)

    def rank(self, candidates, f):
        return candidates


class ExhaustiveSearch(CatalogSelector):
    """
    Greedy oracle: every step simulates all protocols that fit and keeps the best one.
    Fidelity ties go to the protocol the family sort would try first.
    """

    def __init__(self, thresholds: Thresholds = None, catalog: List[ProtocolSpec] = None, tie_tol: float = TIE_TOL,
                 **kwargs):
        super().__init__(thresholds=thresholds, catalog=catalog, **kwargs)
        self.tie_tol = tie_tol

    def choose(self, candidates, f, t_remain, runner):
        best = None
        for spec in candidates:
            outcome = runner(f, spec)
            if not outcome.reachable or outcome.duration > t_remain:
                continue
            if best is None or outcome.f_out > best[1].f_out + self.tie_tol:
                best = (spec, outcome)
        return best


def default_baseline(request, noise=None, runner: ProtocolRunner = None,
                     catalog: List[ProtocolSpec] = None) -> SelectionResult:
    return DefaultBaseline(catalog=catalog).select(request, noise=noise, runner=runner)


def exhaustive_search(request, noise=None, runner: ProtocolRunner = None, th: Thresholds = None,
                      catalog: List[ProtocolSpec] = None) -> SelectionResult:
    return ExhaustiveSearch(thresholds=th, catalog=catalog).select(request, noise=noise, runner=runner)
