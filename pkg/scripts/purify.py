import os
import pathlib
import sys
from pathlib import Path

import click

root_dir = Path(__file__).resolve().parent.parent
os.environ['PYTHONPATH'] = str(root_dir)
sys.path.insert(0, str(root_dir))

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_PROTOCOL = 2


class PurifyGroup(click.Group):
    """
    Maps outcomes to exit codes: 0 success, 1 input or validation errors, 2 no qualifying protocol.
    """

    def main(self, *args, **kwargs):
        kwargs['standalone_mode'] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_ERROR)
        except click.Abort:
            click.echo('| Aborted.', err=True)
            sys.exit(EXIT_ERROR)
        except (ValueError, OSError, KeyError, AssertionError) as e:
            click.echo(f'| Error: {e}', err=True)
            sys.exit(EXIT_ERROR)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def resolve_path(path) -> Path:
    path = Path(path)
    return path if path.is_absolute() else root_dir / path


def load_settings(config: pathlib.Path, hparams_str: str) -> dict:
    from modules.densmat.state import set_max_qubits
    from utils.hparams import set_hparams

    hparams = set_hparams(str(config), hparams_str)
    set_max_qubits(hparams.get('max_qubits', 12))
    return hparams


def build_thresholds(hparams: dict, overrides: dict):
    from modules.selector.thresholds import Thresholds

    doc = dict(hparams.get('thresholds') or {})
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return Thresholds.from_dict(doc)


def num_jobs(jobs, hparams: dict) -> int:
    from utils.multiprocess_utils import resolve_num_workers

    return resolve_num_workers(hparams.get('num_workers', 0) if jobs is None else jobs)


def config_option(default: str):
    return click.option(
        '--config', type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
        default=root_dir / 'configs' / default, show_default=True,
        help='YAML settings file'
    )


hparams_option = click.option(
    '--hparams', type=str, default='',
    help='Temporary settings overrides, e.g. thresholds.f_b=0.6,num_workers=4'
)
jobs_option = click.option(
    '--jobs', type=click.IntRange(min=0), default=None,
    help='Worker processes; 0 uses every core'
)


def threshold_options(func):
    options = [
        click.option('--v1', type=click.FloatRange(0., 1.), default=None, help='Multi-round pruning threshold'),
        click.option('--v2', type=click.FloatRange(0., 1.), default=None, help='BBPSSW pruning threshold'),
        click.option('--v3', type=click.FloatRange(0., 1.), default=None, help='EXPEDIENT pruning threshold'),
        click.option('--fb', 'f_b', type=click.FloatRange(0., 1.), default=None, help='Family sort boundary'),
        click.option('--sort-polarity', type=click.Choice(['standard', 'inverted']), default=None),
        click.option('--v3-clause', type=click.Choice(['any', 'idling']), default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group(cls=PurifyGroup)
def main():
    pass


@main.command(help='Select purification protocols for one buffer and device')
@config_option('selector.yaml')
@hparams_option
@click.option('--device', type=click.Path(dir_okay=False, path_type=pathlib.Path), default=None,
              help='Device calibration JSON; the configured default device otherwise')
@click.option('--request', 'request_path', type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
              default=None, help='Selection request JSON; flags below override its fields')
@click.option('--f-in', type=click.FloatRange(0., 1.), default=None, help='Raw EP fidelity')
@click.option('--tau', type=click.FloatRange(min=0.), default=None, help='Seconds per EP generation cycle')
@click.option('--n', 'throughput_n', type=click.IntRange(min=1), default=None, help='EPs per generation cycle')
@click.option('--buffer', 'buffer_size', type=click.IntRange(min=4), default=None, help='Qubits in the buffer')
@click.option('--t-qos', type=click.FloatRange(min=0.), default=None, help='Allotted time in seconds')
@click.option('--f-out', 'f_out_target', type=click.FloatRange(0., 1.), default=None, help='Target fidelity')
@threshold_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=pathlib.Path), default=None,
              help='Write the request and result as JSON')
@click.option('--verbose', is_flag=True, default=False, help='Log every step to stderr')
def select(config, hparams, device, request_path, out, verbose, **flags):
    import json

    from basics.base_selector import BaseSelector, NO_QUALIFYING_PROTOCOL
    from modules.noise.device import load_device_config
    from modules.selector.request import SelectionRequest, dump_document
    from utils import build_object_from_class_name

    settings = load_settings(config, hparams)
    th = build_thresholds(settings, {k: flags.pop(k) for k in ('v1', 'v2', 'v3', 'f_b', 'sort_polarity', 'v3_clause')})
    doc = dict(settings.get('request') or {})
    if request_path is not None:
        with open(request_path, encoding='utf8') as f:
            doc.update(json.load(f))
    doc.update({k: v for k, v in flags.items() if v is not None})
    if device is not None:
        device_config = load_device_config(device)
    elif isinstance(doc.get('config'), dict):
        device_config = load_device_config(doc['config'])
    else:
        device_config = load_device_config(resolve_path(doc.get('config') or settings['default_device']))
    request = SelectionRequest.from_dict(doc, config=device_config)
    click.echo(f'| {request}', err=True)
    click.echo(f'| {th}', err=True)

    selector = build_object_from_class_name(
        settings['selector_cls'], BaseSelector, thresholds=th, max_steps=settings.get('max_steps', 64),
        verbose=verbose
    )
    result = selector.select(request)
    click.echo(result.format_trace())
    if out is not None:
        dump_document({'request': request.to_dict(), 'thresholds': th.to_dict(), 'result': result.to_dict()}, out)
        click.echo(f'| Result saved to \'{out}\'.', err=True)
    if result.reason == NO_QUALIFYING_PROTOCOL:
        click.echo('| No protocol qualifies for this buffer, device and budget.', err=True)
        return EXIT_NO_PROTOCOL
    return EXIT_OK


@main.command(help='Sweep input fidelity against one error type and record the best protocol per cell')
@config_option('sweep.yaml')
@hparams_option
@click.option('--kind', type=click.Choice(['depolarizing', 'amplitude_damping', 'phase_damping', 'idling']),
              required=True, help='Single error type of the sweep')
@click.option('--grid', type=str, default=None, help='RxC: f_in points x error points')
@click.option('--out', type=click.Path(dir_okay=False, path_type=pathlib.Path), required=True,
              help='Output CSV')
@jobs_option
def sweep(config, hparams, kind, grid, out, jobs):
    from modules.bench.sweep import make_axis, sweep_phase_diagram
    from utils import Timer, parse_grid

    settings = load_settings(config, hparams)
    sweep_args = settings['sweep']
    rows, cols = parse_grid(grid or sweep_args['grid'])
    regime = sweep_args['regimes'][kind]
    f_in_axis = make_axis(sweep_args['f_in_range'], rows)
    error_axis = make_axis(regime['axis'], cols, regime.get('scale', 'linear'))
    with Timer(f'sweep {kind} {rows}x{cols}', print_time=True):
        grid_result = sweep_phase_diagram(
            kind, f_in_axis, error_axis, regime=regime, num_workers=num_jobs(jobs, settings)
        )
    grid_result.to_csv(out)
    click.echo(f'| {rows * cols} cells saved to \'{out}\'.', err=True)
    return EXIT_OK


@main.command(help='Score the selector against the default and exhaustive baselines on a benchmark group')
@config_option('bench.yaml')
@hparams_option
@click.option('--group', type=str, required=True,
              help='random_better | random_current | random_worse | device_fixture, or 1-4')
@click.option('--trials', type=click.IntRange(min=1), default=None, help='Scenarios of a random group')
@click.option('--seed', type=int, default=None, help='Sampling seed')
@threshold_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=pathlib.Path), default=None,
              help='Per-scenario CSV')
@jobs_option
def bench(config, hparams, group, trials, seed, out, jobs, **flags):
    from modules.bench.report import run_benchmark
    from modules.bench.scenarios import load_ranges, resolve_group
    from utils import Timer

    settings = load_settings(config, hparams)
    bench_args = settings['bench']
    group = resolve_group(group)
    th = build_thresholds(settings, flags)
    trials = bench_args['trials'] if trials is None else trials
    seed = bench_args['seed'] if seed is None else seed
    with Timer(f'bench {group}', print_time=True):
        report = run_benchmark(
            group, trials=trials, rng_seed=seed, th=th, ranges=load_ranges(resolve_path(settings['ranges'])),
            fixture_paths=[resolve_path(p) for p in settings['device_fixtures']],
            fixture_params=bench_args['device_fixture'], num_workers=num_jobs(jobs, settings),
            tie_tol=bench_args['tie_tol'], optimal_tol=bench_args['optimal_tol']
        )
    if out is not None:
        report.to_csv(out)
        click.echo(f'| {len(report.rows)} scenarios saved to \'{out}\'.', err=True)
    click.echo(f'group={group} trials={len(report.rows)} {report.summary_line()}')
    return EXIT_OK


@main.command(help='Simulate one protocol once')
@config_option('base.yaml')
@hparams_option
@click.option('--protocol', 'protocol_ref', type=str, required=True, help='Catalog ID or name, e.g. DEJMPSx2-reuse')
@click.option('--f-in', type=click.FloatRange(0., 1.), required=True, help='Raw EP fidelity')
@click.option('--device', type=click.Path(dir_okay=False, path_type=pathlib.Path), default=None,
              help='Device calibration JSON; the configured default device otherwise')
@click.option('--noiseless', is_flag=True, default=False, help='Ideal gates and Werner inputs')
@click.option('--tau', type=click.FloatRange(min=0.), default=0., show_default=True)
@click.option('--n', 'throughput_n', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--listing', is_flag=True, default=False, help='Also print the timed circuit')
def simulate(config, hparams, protocol_ref, f_in, device, noiseless, tau, throughput_n, listing):
    from modules.noise.device import load_device_config, uniform_device_config
    from modules.noise.model import NoiseModel
    from modules.protocols.circuit import build_protocol_circuit
    from modules.protocols.execution import run_protocol
    from modules.protocols.generation import EPSource
    from modules.protocols.registry import find_protocol

    settings = load_settings(config, hparams)
    spec = find_protocol(protocol_ref)
    if noiseless:
        device_config = uniform_device_config(spec.qubits_needed, name='noiseless')
    else:
        device_config = load_device_config(resolve_path(device or settings['default_device']))
    noise = NoiseModel(device_config)
    ep_source = EPSource(tau, throughput_n)
    outcome = run_protocol(f_in, spec, noise, ep_source)
    click.echo(f'{spec.name} (#{spec.id}) on {device_config.name}: f_in={f_in:.6f} f_out={outcome.f_out:.6f} '
               f'success_prob={outcome.success_prob:.6f} duration={outcome.duration:.4e}')
    if listing:
        click.echo(build_protocol_circuit(spec, ep_source, timing=noise).format_listing())
    return EXIT_OK


@main.command(help='List the protocol catalog')
def catalog():
    from modules.protocols.registry import protocol_registry

    click.echo(f'{"id":>3s}  {"name":<18s} {"family":<10s} {"rounds":>6s} {"reuse":>5s} {"qubits":>6s} {"eps":>4s}')
    for spec in protocol_registry():
        click.echo(f'{spec.id:>3d}  {spec.name:<18s} {spec.family:<10s} {spec.rounds:>6d} '
                   f'{str(spec.reuse).lower():>5s} {spec.qubits_needed:>6d} {spec.ep_demand:>4d}')
    return EXIT_OK


if __name__ == '__main__':
    main()
