import json

import pytest
from click.testing import CliRunner

from modules.noise.device import dump_device_config, uniform_device_config
from utils.csv_utils import read_csv


@pytest.fixture
def invoke(purify_cli):
    runner = CliRunner()

    def run(*args):
        return runner.invoke(purify_cli.main, [str(a) for a in args])
    return run


@pytest.fixture
def noiseless_device(tmp_path):
    path = tmp_path / 'noiseless.json'
    dump_device_config(uniform_device_config(12, name='noiseless'), path)
    return path


def test_catalog(invoke):
    result = invoke('catalog')
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert len(lines) == 13
    assert 'EXPEDIENTx2' in lines[-1]


def test_select_reaches_target(invoke, noiseless_device, tmp_path):
    out = tmp_path / 'selection.json'
    result = invoke(
        'select', '--device', noiseless_device, '--f-in', 0.7, '--tau', 0, '--n', 1, '--buffer', 12,
        '--t-qos', 1, '--f-out', 0.9, '--out', out
    )
    assert result.exit_code == 0, result.output
    assert 'reason=target met' in result.output
    with open(out, encoding='utf8') as f:
        doc = json.load(f)
    assert doc['result']['reason'] == 'target met'
    assert doc['request']['buffer_size'] == 12
    assert doc['thresholds']['f_b'] == 0.58


def test_select_threshold_flags(invoke, noiseless_device, tmp_path):
    out = tmp_path / 'selection.json'
    result = invoke(
        'select', '--device', noiseless_device, '--f-in', 0.7, '--tau', 0, '--buffer', 12, '--t-qos', 1,
        '--f-out', 0.9, '--sort-polarity', 'inverted', '--fb', 0.6, '--out', out
    )
    assert result.exit_code == 0, result.output
    with open(out, encoding='utf8') as f:
        doc = json.load(f)
    assert doc['thresholds']['sort_polarity'] == 'inverted'
    assert doc['thresholds']['f_b'] == 0.6
    assert doc['result']['p_out'][0] == 'EXPEDIENTx1'


def test_select_request_file(invoke, noiseless_device, tmp_path):
    request = tmp_path / 'request.json'
    request.write_text(json.dumps({
        'f_in': 0.95, 'tau': 0., 'throughput_n': 1, 'buffer_size': 12, 't_qos': 1., 'f_out_target': 0.9,
        'config': str(noiseless_device),
    }), encoding='utf8')
    result = invoke('select', '--request', request)
    assert result.exit_code == 0, result.output
    assert 'f_final=0.950000' in result.output


def test_select_without_budget(invoke):
    result = invoke('select', '--t-qos', 0)
    assert result.exit_code == 2


@pytest.mark.parametrize('args', [
    ['select', '--f-in', 1.5],
    ['select', '--device', 'missing-device.json'],
    ['select', '--fb', 0.6, '--sort-polarity', 'sideways'],
    ['bench', '--group', 'random_best'],
    ['simulate', '--protocol', 'BBPSSWx9', '--f-in', 0.8, '--noiseless'],
    ['sweep', '--kind', 'depolarizing', '--grid', '2by2', '--out', 'unused.csv'],
])
def test_invalid_input(invoke, args):
    assert invoke(*args).exit_code == 1


def test_simulate_noiseless(invoke):
    result = invoke('simulate', '--protocol', 'BBPSSWx1', '--f-in', 0.7, '--noiseless', '--listing')
    assert result.exit_code == 0, result.output
    assert 'f_out=0.735294' in result.output
    assert 'success_prob=0.680000' in result.output
    assert '# BBPSSWx1' in result.output


def test_hparams_override(invoke, noiseless_device, tmp_path):
    out = tmp_path / 'selection.json'
    result = invoke(
        'select', '--device', noiseless_device, '--f-in', 0.7, '--tau', 0, '--buffer', 12, '--t-qos', 1,
        '--f-out', 0.9, '--hparams', 'max_steps=1', '--out', out
    )
    assert result.exit_code == 0, result.output
    assert 'reason=step limit' in result.output


@pytest.mark.slow
def test_sweep_grid(invoke, tmp_path):
    out = tmp_path / 'sweep.csv'
    args = ['sweep', '--kind', 'depolarizing', '--grid', '2x2', '--jobs', 1]
    first = invoke(*args, '--out', out)
    assert first.exit_code == 0, first.output
    rows = read_csv(out)
    assert len(rows) == 4
    assert list(rows[0]) == ['f_in', 'error_value', 'best_protocol_id', 'delta_f_max']
    text = out.read_text(encoding='utf8')
    assert invoke(*args, '--out', out).exit_code == 0
    assert out.read_text(encoding='utf8') == text
