import pathlib
import sys
from typing import List, Sequence, Union

import numpy as np
from tqdm import tqdm

from modules.bench.baselines import TIE_TOL, default_baseline, exhaustive_search
from modules.bench.scenarios import (
    FIXTURE_GROUP, Scenario, fixture_scenarios, load_ranges, resolve_group, sample_scenario
)
from modules.noise.model import NoiseModel
from modules.protocols.execution import ProtocolRunner
from modules.selector.select import select
from modules.selector.thresholds import Thresholds
from utils.csv_utils import write_csv
from utils.multiprocess_utils import ordered_map

REPORT_COLUMNS = ['scenario', 'class', 'f_in', 'f_selected', 'f_default', 'f_exhaustive', 'protocols']
CLASSES = ('failure', 'success', 'nan')
OPTIMAL_TOL = 1e-6


def classify(f_selected: float, f_default: float, exhaustive_improves: bool, tie_tol: float = TIE_TOL) -> str:
    """
    nan when even the exhaustive search improves nothing; ties with the default count as success.
    """
    if not exhaustive_improves:
        return 'nan'
    return 'success' if f_selected >= f_default - tie_tol else 'failure'


class ScenarioRow:
    def __init__(self, scenario: str, index: int, f_in: float, f_selected: float, f_default: float,
                 f_exhaustive: float, protocols: Sequence[str], exhaustive_improves: bool, tie_tol: float = TIE_TOL):
        self.scenario = scenario
        self.index = index
        self.f_in = f_in
        self.f_selected = f_selected
        self.f_default = f_default
        self.f_exhaustive = f_exhaustive
        self.protocols = list(protocols)
        self.cls = classify(f_selected, f_default, exhaustive_improves, tie_tol=tie_tol)

    @property
    def delta_f(self) -> float:
        return self.f_selected - self.f_in

    def is_optimal(self, tol: float = OPTIMAL_TOL) -> bool:
        return self.cls == 'success' and abs(self.f_selected - self.f_exhaustive) <= tol

    def to_dict(self) -> dict:
        return {
            'scenario': self.scenario, 'class': self.cls, 'f_in': self.f_in, 'f_selected': self.f_selected,
            'f_default': self.f_default, 'f_exhaustive': self.f_exhaustive, 'protocols': '+'.join(self.protocols),
        }


class BenchReport:
    def __init__(self, group: str, rows: List[ScenarioRow], optimal_tol: float = OPTIMAL_TOL):
        self.group = group
        self.rows = sorted(rows, key=lambda r: r.index)
        self.optimal_tol = optimal_tol

    def rate(self, cls: str) -> float:
        if not self.rows:
            return 0.
        return sum(r.cls == cls for r in self.rows) / len(self.rows)

    @property
    def p_failure(self) -> float:
        return self.rate('failure')

    @property
    def p_success(self) -> float:
        return self.rate('success')

    @property
    def p_nan(self) -> float:
        return self.rate('nan')

    @property
    def p_optimal(self) -> float:
        successes = [r for r in self.rows if r.cls == 'success']
        if not successes:
            return 0.
        return sum(r.is_optimal(self.optimal_tol) for r in successes) / len(successes)

    @property
    def delta_f_max(self) -> float:
        return max((r.delta_f for r in self.rows), default=0.)

    @property
    def delta_f_mean(self) -> float:
        return float(np.mean([r.delta_f for r in self.rows])) if self.rows else 0.

    def metrics(self) -> dict:
        return {
            'p_failure': self.p_failure, 'p_success': self.p_success, 'p_nan': self.p_nan,
            'p_optimal': self.p_optimal, 'delta_f_max': self.delta_f_max, 'delta_f_mean': self.delta_f_mean,
        }

    def summary_line(self) -> str:
        return ' '.join(f'{k}={v:.4f}' for k, v in self.metrics().items())

    def to_csv(self, path: Union[str, pathlib.Path]) -> str:
        return write_csv(path, REPORT_COLUMNS, [r.to_dict() for r in self.rows])


def evaluate_scenario(scenario: Scenario, th: Thresholds = None, tie_tol: float = TIE_TOL) -> ScenarioRow:
    """
    Selector, default and exhaustive search on one scenario, sharing one memoized simulator.
    """
    request = scenario.request
    runner = ProtocolRunner(NoiseModel(request.config), request.ep_source)
    selected = select(request, th=th, runner=runner)
    default = default_baseline(request, runner=runner)
    exhaustive = exhaustive_search(request, runner=runner, th=th)
    return ScenarioRow(
        scenario.name, scenario.index, request.f_in, selected.f_final, default.f_final, exhaustive.f_final,
        [spec.name for spec in selected.p_out], exhaustive_improves=len(exhaustive.p_out) > 0, tie_tol=tie_tol
    )


def _random_trial(group: str, rng_seed: int, index: int, ranges: dict, th_dict: dict, tie_tol: float):
    scenario = sample_scenario(group, rng_seed, index, ranges=ranges)
    return evaluate_scenario(scenario, Thresholds.from_dict(th_dict), tie_tol=tie_tol)


def _fixture_trial(path: str, index: int, params: dict, th_dict: dict, tie_tol: float):
    scenario = fixture_scenarios([path], params)[0]
    scenario.index = index
    return evaluate_scenario(scenario, Thresholds.from_dict(th_dict), tie_tol=tie_tol)


def run_benchmark(
        group: str, trials: int = 100, rng_seed: int = 0, th: Thresholds = None, ranges: dict = None,
        fixture_paths: Sequence[Union[str, pathlib.Path]] = None, fixture_params: dict = None,
        num_workers: int = 1, tie_tol: float = TIE_TOL, optimal_tol: float = OPTIMAL_TOL, progress: bool = True
) -> BenchReport:
    """
    :param trials: scenarios drawn for a random group; the fixture group runs every snapshot once
    :param fixture_paths: device snapshots of the device_fixture group
    :param fixture_params: request parameters shared by the fixture scenarios
    """
    group = resolve_group(group)
    th_dict = (Thresholds() if th is None else th).to_dict()
    if group == FIXTURE_GROUP:
        assert fixture_paths, 'The device_fixture group needs at least one device snapshot.'
        args = [(str(p), i, fixture_params, th_dict, tie_tol) for i, p in enumerate(fixture_paths)]
        func = _fixture_trial
    else:
        assert trials >= 1, f'trials must be >= 1, got {trials}.'
        ranges = load_ranges() if ranges is None else ranges
        args = [(group, rng_seed, i, ranges, th_dict, tie_tol) for i in range(trials)]
        func = _random_trial
    rows = []
    for row in tqdm(ordered_map(func, args, num_workers), total=len(args), desc=f'| {group}',
                    disable=not progress, file=sys.stderr):
        if row is None:
            raise RuntimeError(f'A {group} trial failed; see the traceback above.')
        rows.append(row)
    return BenchReport(group, rows, optimal_tol=optimal_tol)
