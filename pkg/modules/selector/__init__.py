from basics.base_selector import (
    BUDGET_EXHAUSTED, NO_IMPROVEMENT, NO_QUALIFYING_PROTOCOL, STEP_LIMIT, TARGET_MET,
    BaseSelector, SelectionResult, SelectionStep
)
from modules.selector.pruning import DurationTable, noise_flags, prune_by_capacity, prune_by_noise, sort_candidates
from modules.selector.request import SelectionRequest, dump_document
from modules.selector.select import CatalogSelector, ProtocolSelector, select
from modules.selector.thresholds import Thresholds
