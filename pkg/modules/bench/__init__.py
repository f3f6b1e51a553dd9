from modules.bench.baselines import DefaultBaseline, ExhaustiveSearch, default_baseline, exhaustive_search
from modules.bench.report import (
    CLASSES, REPORT_COLUMNS, BenchReport, ScenarioRow, classify, evaluate_scenario, run_benchmark
)
from modules.bench.scenarios import (
    FIXTURE_GROUP, GROUPS, RANDOM_GROUPS, Scenario, fixture_scenarios, load_ranges, resolve_group,
    sample_device, sample_scenario
)
from modules.bench.sweep import (
    DEFAULT_REGIMES, ERROR_KINDS, GRID_COLUMNS, NO_PROTOCOL, PhaseGrid, best_protocol, make_axis, regime_setup,
    sweep_phase_diagram
)
