import json

import pytest

from basics.base_selector import (
    BUDGET_EXHAUSTED, NO_IMPROVEMENT, NO_QUALIFYING_PROTOCOL, STEP_LIMIT, TARGET_MET, SelectionResult
)
from modules.bench.baselines import default_baseline, exhaustive_search
from modules.densmat.state import DomainError
from modules.noise.device import uniform_device_config
from modules.noise.model import NoiseModel
from modules.noise.rates import ErrorRates
from modules.protocols.execution import ProtocolRunner
from modules.protocols.registry import find_protocol, protocol_registry
from modules.selector.pruning import DurationTable, noise_flags, prune_by_capacity, prune_by_noise, sort_candidates
from modules.selector.request import SelectionRequest, dump_document
from modules.selector.select import CatalogSelector, ProtocolSelector, select
from modules.selector.thresholds import Thresholds


def names(specs):
    return [spec.name for spec in specs]


def make_request(config, **kwargs):
    args = dict(f_in=0.7, tau=0., throughput_n=1, buffer_size=12, t_qos=1., f_out_target=0.9)
    args.update(kwargs)
    return SelectionRequest(config=config, **args)


class TestThresholds:
    def test_defaults(self):
        th = Thresholds()
        assert (th.v1, th.v2, th.v3, th.f_b) == (1e-4, 1e-4, 0.01, 0.58)

    @pytest.mark.parametrize('kwargs', [{'v1': 2.}, {'f_b': -0.1}, {'sort_polarity': 'up'}, {'v3_clause': 'x'}])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            Thresholds(**kwargs)

    def test_from_dict_ignores_unknown_keys(self):
        th = Thresholds.from_dict({'f_b': 0.6, 'v2': None, 'comment': 'ignored'})
        assert th.f_b == 0.6
        assert th.v2 == 1e-4
        assert Thresholds.from_dict(th.to_dict()).to_dict() == th.to_dict()

    def test_favored_family(self):
        th = Thresholds()
        assert th.favored_family(0.9) == 'DEJMPS'
        # the boundary itself is not above f_b
        assert th.favored_family(0.58) == 'EXPEDIENT'
        assert Thresholds(sort_polarity='inverted').favored_family(0.9) == 'EXPEDIENT'


class TestNoisePruning:
    def test_quiet_device_drops_bbpssw(self):
        flags = noise_flags(ErrorRates(), Thresholds())
        assert flags == {'drop_multi_round': False, 'drop_bbpssw': True, 'drop_expedient': False}
        assert 'BBPSSW' not in {spec.family for spec in prune_by_noise(protocol_registry(), ErrorRates(), Thresholds())}

    def test_noisy_device_drops_deep_nesting(self):
        pruned = prune_by_noise(protocol_registry(), ErrorRates(e_depolarizing=1e-3), Thresholds())
        assert max(spec.rounds for spec in pruned) == 2
        assert 'BBPSSWx1' in names(pruned)
        assert 'EXPEDIENTx2' in names(pruned)

    def test_thresholds_are_strict(self):
        th = Thresholds()
        flags = noise_flags(ErrorRates(1e-4, 1e-4, 1e-4, 1e-4, 1e-4), th)
        assert not flags['drop_multi_round']
        assert not flags['drop_bbpssw']

    def test_v3_clause(self):
        readout_heavy = ErrorRates(e_measurement=0.02)
        idle_heavy = ErrorRates(e_idling=0.02)
        assert noise_flags(readout_heavy, Thresholds())['drop_expedient']
        assert not noise_flags(readout_heavy, Thresholds(v3_clause='idling'))['drop_expedient']
        assert noise_flags(idle_heavy, Thresholds(v3_clause='idling'))['drop_expedient']


class TestSorting:
    def test_high_fidelity_prefers_dejmps(self):
        ordered = sort_candidates(protocol_registry(), 0.9, Thresholds())
        assert names(ordered)[:5] == ['DEJMPSx1', 'DEJMPSx2-reuse', 'DEJMPSx2', 'DEJMPSx3-reuse', 'DEJMPSx3']
        # then the remaining families by rounds
        assert names(ordered)[5:7] == ['BBPSSWx1', 'EXPEDIENTx1']

    def test_low_fidelity_prefers_expedient(self):
        ordered = sort_candidates(protocol_registry(), 0.55, Thresholds())
        assert names(ordered)[:2] == ['EXPEDIENTx1', 'EXPEDIENTx2']

    def test_inverted_polarity(self):
        ordered = sort_candidates(protocol_registry(), 0.9, Thresholds(sort_polarity='inverted'))
        assert ordered[0].family == 'EXPEDIENT'


class TestCapacity:
    def test_buffer_limits_catalog(self, noiseless_config):
        pool = prune_by_capacity(protocol_registry(), make_request(noiseless_config, buffer_size=8))
        assert max(spec.qubits_needed for spec in pool) <= 8
        assert 'EXPEDIENTx1' not in names(pool)
        assert 'BBPSSWx3-reuse' in names(pool)

    def test_device_limits_catalog(self):
        request = make_request(uniform_device_config(6), buffer_size=24)
        assert request.usable_qubits == 6
        pool = prune_by_capacity(protocol_registry(), request)
        assert max(spec.qubits_needed for spec in pool) == 6

    def test_budget_limits_catalog(self):
        config = uniform_device_config(12, cx_length=1e-7, readout_length=1e-6)
        request = make_request(config, t_qos=1.15e-6)
        durations = DurationTable(config, request.ep_source)
        assert durations(find_protocol('DEJMPSx1')) == pytest.approx(1.1e-6)
        assert durations(find_protocol('DEJMPSx2')) == pytest.approx(1.2e-6)
        pool = prune_by_capacity(protocol_registry(), request, durations=durations)
        assert names(pool) == ['BBPSSWx1', 'DEJMPSx1']

    def test_spent_budget(self, noiseless_config):
        assert prune_by_capacity(protocol_registry(), make_request(noiseless_config), t_remain=0.) == []


class TestRequest:
    @pytest.mark.parametrize('kwargs', [{'f_in': 1.2}, {'t_qos': -1.}, {'buffer_size': 3}, {'f_out_target': -0.5}])
    def test_validation(self, noiseless_config, kwargs):
        with pytest.raises(DomainError):
            make_request(noiseless_config, **kwargs)

    def test_document(self, noiseless_config, tmp_path):
        request = make_request(noiseless_config)
        path = tmp_path / 'out' / 'request.json'
        dump_document(request.to_dict(), path)
        with open(path, encoding='utf8') as f:
            doc = json.load(f)
        restored = SelectionRequest.from_dict(doc)
        assert restored.to_dict() == request.to_dict()
        assert request.to_dict(embed_config=False)['config'] == 'noiseless'


class TestSelection:
    def test_noiseless_selection_reaches_target(self, noiseless_request):
        result = select(noiseless_request)
        assert result.reason == TARGET_MET
        assert result.f_final >= 0.9
        assert set(names(result.p_out)) == {'DEJMPSx1'}
        fidelities = [noiseless_request.f_in] + [step.f_after for step in result.trace]
        assert all(b > a for a, b in zip(fidelities, fidelities[1:]))
        assert result.trace[0].f_after == pytest.approx(0.7352941, abs=1e-7)

    def test_target_already_met(self, noiseless_config):
        result = select(make_request(noiseless_config, f_in=0.95))
        assert result.reason == TARGET_MET
        assert result.p_out == []
        assert result.f_final == 0.95

    def test_no_qualifying_protocol(self, noiseless_config):
        result = select(make_request(noiseless_config, t_qos=0.))
        assert result.reason == NO_QUALIFYING_PROTOCOL
        assert not result.qualified
        assert result.p_out == []

    def test_budget_runs_out(self):
        config = uniform_device_config(12, cx_length=1e-7, readout_length=1e-6)
        result = select(make_request(config, t_qos=1.5e-6))
        assert result.reason == BUDGET_EXHAUSTED
        assert names(result.p_out) == ['DEJMPSx1']
        assert result.time_used == pytest.approx(1.1e-6)
        assert result.time_used <= 1.5e-6

    def test_no_improvement(self):
        config = uniform_device_config(12, cx_error=0.2)
        result = select(make_request(config, f_in=0.99, f_out_target=0.999))
        assert result.reason == NO_IMPROVEMENT
        assert result.p_out == []
        assert result.f_final == 0.99

    def test_step_limit(self, noiseless_request):
        result = ProtocolSelector(max_steps=2).select(noiseless_request)
        assert result.reason == STEP_LIMIT
        assert len(result.trace) == 2

    def test_selector_keeps_rates(self, noiseless_request):
        selector = ProtocolSelector()
        selector.select(noiseless_request)
        assert selector.rates is not None
        assert selector.rates.e_depolarizing == 0.

    def test_catalog_selector_skips_noise_pruning(self, noiseless_request):
        result = CatalogSelector(max_steps=1).select(noiseless_request)
        assert names(result.p_out) == ['DEJMPSx1']
        selector = CatalogSelector()
        pool = selector.prepare(noiseless_request, None)
        assert 'BBPSSWx1' in names(pool)

    def test_restricted_catalog(self, noiseless_request):
        catalog = [find_protocol('EXPEDIENTx1')]
        result = select(noiseless_request, catalog=catalog)
        assert set(names(result.p_out)) == {'EXPEDIENTx1'}

    def test_trace_output(self, noiseless_request):
        result = select(noiseless_request)
        text = result.format_trace()
        assert 'DEJMPSx1' in text
        assert text.splitlines()[-1].startswith('f_final=')
        doc = result.to_dict()
        assert doc['reason'] == TARGET_MET
        assert len(doc['trace']) == len(result.trace)
        assert repr(SelectionResult(0.8)).startswith('SelectionResult([]')

    def test_unreachable_input_on_thermal_device(self, cairo_config):
        # long delays never push the raw fidelity much below 0.5
        request = make_request(
            cairo_config, f_in=0.4, tau=1e-8, throughput_n=10, buffer_size=10, t_qos=5e-6, f_out_target=0.95
        )
        for selector in (select, exhaustive_search):
            with pytest.warns(UserWarning, match='cannot run'):
                result = selector(request)
            assert result.reason == NO_IMPROVEMENT
            assert result.p_out == []
            assert result.f_final == 0.4

    def test_unreachable_input_without_thermal_noise(self, noiseless_config):
        request = make_request(noiseless_config, f_in=0.2)
        for selector in (select, exhaustive_search, default_baseline):
            with pytest.warns(UserWarning, match='cannot run'):
                result = selector(request)
            assert result.reason == NO_IMPROVEMENT
            assert result.p_out == []
            assert result.f_final == 0.2
            assert result.time_used == 0.


class TestDeviceScenario:
    def test_cairo_single_round(self, cairo_config):
        request = make_request(
            cairo_config, f_in=0.9, tau=1e-8, throughput_n=10, buffer_size=10, t_qos=5e-6, f_out_target=0.95
        )
        runner = ProtocolRunner(NoiseModel(cairo_config), request.ep_source)
        selected = select(request, runner=runner)
        searched = exhaustive_search(request, runner=runner)
        for result in (selected, searched):
            assert result.reason == TARGET_MET
            assert names(result.p_out) == ['DEJMPSx1']
            assert result.time_used <= 5e-6
        assert selected.f_final == pytest.approx(searched.f_final, abs=1e-12)
        assert selected.f_final >= 0.95
        assert selected.f_final == pytest.approx(0.96, abs=0.01)
        # S on A and S^dag on B leave a damped raw pair unchanged
        assert runner(0.9, find_protocol('BBPSSWx1')).f_out == pytest.approx(selected.f_final, abs=1e-9)

    def test_two_rounds_do_not_fit(self, cairo_config):
        request = make_request(cairo_config, tau=1e-8, throughput_n=10, buffer_size=10, t_qos=5e-6)
        durations = DurationTable(cairo_config, request.ep_source)
        assert durations(find_protocol('DEJMPSx1')) <= 5e-6
        assert durations(find_protocol('DEJMPSx2')) > 5e-6
        assert durations(find_protocol('EXPEDIENTx1')) > 5e-6
