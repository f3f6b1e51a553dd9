import math

import numpy as np
import pytest

from modules.bench.baselines import DefaultBaseline, ExhaustiveSearch, default_baseline, exhaustive_search
from modules.bench.report import (
    CLASSES, REPORT_COLUMNS, BenchReport, ScenarioRow, classify, evaluate_scenario, run_benchmark
)
from modules.bench.scenarios import (
    FIXTURE_GROUP, RANDOM_GROUPS, Scenario, _scaled_ranges, fixture_scenarios, load_ranges, resolve_group,
    sample_scenario
)
from modules.bench.sweep import (
    NO_PROTOCOL, best_protocol, make_axis, regime_setup, sweep_phase_diagram
)
from modules.densmat.state import DomainError
from modules.noise.channels import lambda_amplitude, lambda_phase
from modules.noise.model import NoiseModel
from modules.protocols.execution import ProtocolRunner
from modules.protocols.registry import find_protocol, protocol_registry
from modules.selector.select import select
from utils.csv_utils import read_csv


class FixedOutcome:
    def __init__(self, f_out, reachable=True):
        self.f_out = f_out
        self.reachable = reachable


class TestBaselines:
    def test_default_uses_one_expedient_round(self, noiseless_request):
        result = default_baseline(noiseless_request)
        assert result.f_final >= 0.9
        assert set(spec.name for spec in result.p_out) == {'EXPEDIENTx1'}
        assert [spec.name for spec in DefaultBaseline().catalog] == ['EXPEDIENTx1']

    def test_exhaustive_step_is_at_least_as_good(self, noiseless_request):
        selected = select(noiseless_request)
        exhaustive = exhaustive_search(noiseless_request)
        assert exhaustive.trace[0].f_after >= selected.trace[0].f_after - 1e-12
        assert exhaustive.f_final >= 0.9

    def test_exhaustive_respects_budget(self, noiseless_request):
        outcomes = {'slow': (0.99, 2.), 'fast': (0.8, 0.5)}

        class StubRunner:
            def __call__(self, f, spec):
                f_out, duration = outcomes[spec]
                outcome = FixedOutcome(f_out)
                outcome.duration = duration
                return outcome

        picked = ExhaustiveSearch().choose(['slow', 'fast'], 0.7, 1., StubRunner())
        assert picked[0] == 'fast'


class TestClassification:
    def test_classify(self):
        assert classify(0.9, 0.9, True) == 'success'
        assert classify(0.9 - 1e-12, 0.9, True) == 'success'
        assert classify(0.89, 0.9, True) == 'failure'
        assert classify(0.5, 0.9, False) == 'nan'

    def test_report_metrics(self):
        rows = [
            ScenarioRow('s-1', 1, 0.8, 0.9, 0.85, 0.9, ['DEJMPSx1'], True),
            ScenarioRow('s-0', 0, 0.8, 0.82, 0.85, 0.9, ['DEJMPSx1'], True),
            ScenarioRow('s-2', 2, 0.8, 0.88, 0.85, 0.9, ['BBPSSWx1', 'DEJMPSx1'], True),
            ScenarioRow('s-3', 3, 0.8, 0.8, 0.8, 0.8, [], False),
        ]
        report = BenchReport('random_current', rows)
        assert [r.scenario for r in report.rows] == ['s-0', 's-1', 's-2', 's-3']
        assert report.p_failure == pytest.approx(0.25)
        assert report.p_success == pytest.approx(0.5)
        assert report.p_nan == pytest.approx(0.25)
        assert report.p_optimal == pytest.approx(0.5)
        assert report.delta_f_max == pytest.approx(0.1)
        assert report.delta_f_mean == pytest.approx(0.05)
        assert report.summary_line() == (
            'p_failure=0.2500 p_success=0.5000 p_nan=0.2500 p_optimal=0.5000 '
            'delta_f_max=0.1000 delta_f_mean=0.0500'
        )
        assert report.rows[2].to_dict()['protocols'] == 'BBPSSWx1+DEJMPSx1'

    def test_empty_report(self):
        report = BenchReport('random_better', [])
        assert report.p_success == 0.
        assert report.delta_f_max == 0.

    def test_csv(self, tmp_path):
        rows = [ScenarioRow('s-0', 0, 0.8, 0.9, 0.85, 0.9, ['DEJMPSx1'], True)]
        path = tmp_path / 'report.csv'
        text = BenchReport('random_current', rows).to_csv(path)
        assert text.splitlines()[0] == ','.join(REPORT_COLUMNS)
        records = read_csv(path)
        assert records[0]['class'] == 'success'
        assert records[0]['f_selected'] == '0.9'

    def test_evaluate_scenario(self, noiseless_request):
        row = evaluate_scenario(Scenario('random_current', 0, noiseless_request))
        assert row.cls in CLASSES
        assert row.cls != 'nan'
        assert row.f_selected >= 0.9
        assert row.delta_f == pytest.approx(row.f_selected - 0.7)


class TestScenarios:
    def test_group_aliases(self):
        assert resolve_group('1') == 'random_better'
        assert resolve_group(4) == FIXTURE_GROUP
        assert resolve_group('random_worse') == 'random_worse'
        with pytest.raises(DomainError):
            resolve_group('random_best')

    def test_scaling(self):
        ranges = load_ranges()
        worse = _scaled_ranges(ranges, 'random_worse')
        better = _scaled_ranges(ranges, 'random_better')
        assert worse['cx_error'] == pytest.approx([0.03, 0.2])
        assert worse['readout_error'][1] == pytest.approx(0.5)
        assert worse['t1'] == pytest.approx([5e-6, 3e-5])
        assert better['t1'] == pytest.approx([5e-4, 3e-3])
        assert better['cx_length'] == _scaled_ranges(ranges, 'random_current')['cx_length']

    @pytest.mark.parametrize('group', RANDOM_GROUPS)
    def test_sampling_is_deterministic(self, group):
        a = sample_scenario(group, 7, 3)
        b = sample_scenario(group, 7, 3)
        c = sample_scenario(group, 7, 4)
        assert a.request.to_dict() == b.request.to_dict()
        assert a.request.to_dict() != c.request.to_dict()

    def test_sampled_device(self):
        request = sample_scenario('random_current', 0, 0).request
        ranges = load_ranges()['request']
        assert request.config.num_qubits == request.buffer_size
        assert ranges['buffer_size'][0] <= request.buffer_size <= ranges['buffer_size'][1]
        assert ranges['f_in'][0] <= request.f_in <= ranges['f_in'][1]
        for q in request.config.qubits:
            assert q.t2 <= 2 * q.t1

    def test_fixture_group_is_not_sampled(self):
        with pytest.raises(DomainError):
            sample_scenario(FIXTURE_GROUP, 0, 0)

    def test_fixture_scenarios(self, root):
        params = {'f_in': 0.9, 'tau': 1e-8, 'throughput_n': 10, 'buffer_size': 10, 't_qos': 5e-6, 'f_out_target': 0.95}
        paths = [root / 'fixtures' / f'ibm_{name}_like.json' for name in ('cairo', 'hanoi')]
        scenarios = fixture_scenarios(paths, params)
        assert [s.name for s in scenarios] == ['cairo', 'hanoi']
        assert scenarios[1].index == 1
        assert scenarios[0].request.usable_qubits == 10


class TestSweep:
    def test_axes(self):
        np.testing.assert_allclose(make_axis([1e-4, 1e-1], 4, 'log'), [1e-4, 1e-3, 1e-2, 1e-1])
        np.testing.assert_allclose(make_axis([0.55, 1.0], 4), [0.55, 0.7, 0.85, 1.0])
        assert list(make_axis([0.6, 0.9], 1)) == [0.6]

    def test_regimes(self):
        config, _, reported = regime_setup('depolarizing', 0.01, {}, 4)
        assert config.find_gate('cx', (0, 2)).gate_error == pytest.approx(0.0075)
        assert config.find_gate('sx', (0,)).gate_error == pytest.approx(0.005)
        assert reported == 0.01

        config, _, reported = regime_setup('amplitude_damping', 0.1, {'t1': 5e-7}, 4)
        length = config.find_gate('cx', (0, 2)).gate_length
        assert lambda_amplitude(length, 5e-7) == pytest.approx(0.1)
        assert config.qubit(0).t2 == pytest.approx(1e-6)

        _, _, reported = regime_setup('phase_damping', 1e-7, {'t1': 1e-3, 't2': 1e-6}, 4)
        assert reported == pytest.approx(lambda_phase(1e-7, 1e-3, 1e-6))

        _, source, reported = regime_setup('idling', 100., {'t1': 1e-5, 't2': 1e-5, 'throughput_n': 2}, 4)
        assert source.tau == pytest.approx(2e-7)
        assert source.per_ep_wait == pytest.approx(1e-7)
        assert reported == 100.

    @pytest.mark.parametrize('kind, value, regime', [
        ('amplitude_damping', 0.1, {'t1': 5e-7}),
        ('phase_damping', 1e-7, {'t1': 1e-3, 't2': 1e-6}),
    ])
    def test_damping_regimes_only_slow_down_cx(self, kind, value, regime):
        config, _, _ = regime_setup(kind, value, regime, 4)
        assert config.find_gate('cx', (0, 1)).gate_length > 0.
        assert config.find_gate('sx', (0,)).gate_length == 0.
        assert config.find_gate('x', (0,)).gate_length == 0.

    def test_best_protocol_skips_unreachable(self):
        catalog = [find_protocol('BBPSSWx1'), find_protocol('DEJMPSx1')]

        def runner(f, spec):
            return FixedOutcome(f + 0.1, reachable=False) if spec.id == 1 else FixedOutcome(f + 0.02)

        best, delta = best_protocol(runner, 0.8, catalog)
        assert best == 6
        assert delta == pytest.approx(0.02)
        best, delta = best_protocol(lambda f, spec: FixedOutcome(f, reachable=False), 0.8, catalog)
        assert best is None
        assert math.isnan(delta)

    def test_depolarizing_never_helps(self):
        catalog = [find_protocol('BBPSSWx1'), find_protocol('DEJMPSx1'), find_protocol('DEJMPSx2')]
        errors = [1e-4, 1e-3, 1e-2, 1e-1]
        runners = []
        for value in errors:
            config, source, _ = regime_setup('depolarizing', value, {}, 8)
            runners.append(ProtocolRunner(NoiseModel(config), source))
        for f_in in (0.6, 0.8, 0.95):
            for spec in catalog:
                f_out = [runner(f_in, spec).f_out for runner in runners]
                assert all(b <= a + 1e-12 for a, b in zip(f_out, f_out[1:]))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            regime_setup('crosstalk', 0.1, {}, 4)

    def test_best_protocol_ties_go_to_lower_id(self):
        catalog = protocol_registry()
        gains = {spec.id: 0.05 for spec in catalog}
        gains[3] = 0.08
        gains[9] = 0.08

        def runner(f, spec):
            return FixedOutcome(f + gains[spec.id])

        best, delta = best_protocol(runner, 0.8, catalog)
        assert best == 3
        assert delta == pytest.approx(0.08)

    def test_best_protocol_none_when_all_lose(self):
        best, delta = best_protocol(lambda f, spec: FixedOutcome(f - 0.01), 0.8, protocol_registry())
        assert best is None
        assert delta == pytest.approx(-0.01)

    def test_small_depolarizing_grid(self, tmp_path):
        catalog = [find_protocol('BBPSSWx1'), find_protocol('DEJMPSx1')]
        grid = sweep_phase_diagram('depolarizing', [0.7, 1.0], [1e-4, 1e-1], catalog=catalog, progress=False)
        assert grid.shape == (2, 2)
        ids = grid.best_ids()
        assert ids[0, 0] in (1, 6)
        assert grid.delta_f()[0, 0] > 0.
        assert ids[1, 1] is None
        grid.to_csv(tmp_path / 'grid.csv')
        rows = read_csv(tmp_path / 'grid.csv')
        assert len(rows) == 4
        assert rows[3]['best_protocol_id'] == NO_PROTOCOL
        assert math.isclose(float(rows[3]['error_value']), 1e-1)

    def test_depolarizing_corners(self):
        catalog = [find_protocol(name) for name in ('BBPSSWx1', 'DEJMPSx1', 'DEJMPSx2', 'EXPEDIENTx1')]
        grid = sweep_phase_diagram('depolarizing', [0.7, 1.0], [0., 1e-1], catalog=catalog, progress=False)
        ids, delta = grid.best_ids(), grid.delta_f()
        # nothing to purify at f_in = 1 without noise
        assert delta[1, 0] == pytest.approx(0., abs=1e-12)
        assert ids[0, 0] is not None and delta[0, 0] > 0.
        assert ids[1, 1] is None and delta[1, 1] < 0.

    @pytest.mark.parametrize('f_in_axis, error_axis', [([], [1e-3]), ([0.7, 0.7], [1e-3]), ([0.7], [1e-3, 1e-2, 1e-3])])
    def test_bad_axes(self, f_in_axis, error_axis):
        with pytest.raises(ValueError):
            sweep_phase_diagram('depolarizing', f_in_axis, error_axis, progress=False)


@pytest.mark.slow
class TestFullRuns:
    def test_random_group(self):
        report = run_benchmark('random_current', trials=3, rng_seed=0, num_workers=1, progress=False)
        assert len(report.rows) == 3
        assert report.p_failure + report.p_success + report.p_nan == pytest.approx(1.)
        again = run_benchmark('random_current', trials=3, rng_seed=0, num_workers=1, progress=False)
        assert again.summary_line() == report.summary_line()

    def test_fixture_group(self, root):
        params = {'f_in': 0.9, 'tau': 1e-8, 'throughput_n': 10, 'buffer_size': 10, 't_qos': 5e-6, 'f_out_target': 0.95}
        report = run_benchmark(
            FIXTURE_GROUP, fixture_paths=[root / 'fixtures' / 'ibm_cairo_like.json'], fixture_params=params,
            num_workers=1, progress=False
        )
        assert len(report.rows) == 1
        assert report.rows[0].scenario == 'cairo'

        row = report.rows[0]
        assert row.cls == 'success'
        assert row.is_optimal()
        assert row.protocols == ['DEJMPSx1']
        assert row.f_selected >= 0.95

    def test_random_current_guarantees(self):
        report = run_benchmark('random_current', trials=100, rng_seed=0, num_workers=1, progress=False)
        assert len(report.rows) == 100
        assert report.p_failure + report.p_success + report.p_nan == pytest.approx(1.)
        for row in report.rows:
            assert row.f_selected >= row.f_in
            assert row.f_exhaustive >= row.f_in
            # the exhaustive first step is at least as good as the selector's
            if row.f_selected > row.f_in:
                assert row.cls != 'nan'
                assert row.f_exhaustive > row.f_in

    def test_phase_damping_columns(self):
        catalog = [find_protocol(name) for name in ('DEJMPSx2', 'DEJMPSx3', 'EXPEDIENTx1')]
        grid = sweep_phase_diagram('phase_damping', [0.56, 0.9], [1e-8, 1e-6], catalog=catalog, progress=False)
        ids = grid.best_ids()
        # an untwirled phi-/phi+ mixture this close to 0.5 loses fidelity in every protocol
        assert ids[0, 0] is None and ids[0, 1] is None
        assert ids[1, 0] is not None
        assert grid.delta_f()[1, 0] > 0.
