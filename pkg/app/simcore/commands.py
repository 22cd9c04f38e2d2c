"""`flask sim ...` commands: the command line front door of the simulator"""
import csv
import os

import click
from flask import Blueprint
from flask import current_app

from app.agent.ledger import IncidentLedger
from app.dss import DssConfig
from app.metrics import ConfusionMatrix, REAR_CAMERA_MATRIX, FRONT_CAMERA_MATRIX, write_json, write_records_csv
from app.metrics.exceptions import ZeroDenominatorError, EmptySampleSetError
from app.vault import EncryptionKey
from app.vault.exceptions import InvalidKeyError
from . import logger
from .comparison import compare_strategies
from .exceptions import ScenarioError, ConsentWithheldError, InsufficientComparisonError
from .models import StrategyKind
from .presets import DEVICE_PRESETS, get_device_preset
from .scenario import load_scenario, build_scenario, dump_scenario
from .session import run_session

sim_commands = Blueprint('sim_commands', __name__, cli_group='sim')

SIMULATION_ERRORS = (ScenarioError, ConsentWithheldError, InsufficientComparisonError, ZeroDenominatorError,
                     EmptySampleSetError, InvalidKeyError)
TRUE_LABELS = {'1', 'true', 'yes', 'violation'}
FALSE_LABELS = {'0', 'false', 'no', 'normal'}


def fail(error: Exception):
    logger.warning(f'Command failed with {type(error).__name__}: {error}')
    raise click.ClickException(f'{type(error).__name__}: {error}')


def run_options() -> dict:
    """Options of a simulated run taken from the application config"""
    config = current_app.config
    key = EncryptionKey.from_hex(config['VAULT_KEY_HEX'], config['VAULT_KEY_ID'])
    return {
        'key': key,
        'dss_config': DssConfig.from_mapping(config),
        'payload_bytes': int(config['SIM_PAYLOAD_BYTES']),
        'tick_interval_ms': int(config['SIM_TICK_INTERVAL_MS']),
        'queue_capacity': int(config['TRANSPORT_QUEUE_CAPACITY']),
        'fallback_deadline_ms': int(config['TRANSPORT_FALLBACK_DEADLINE_MS']),
        'store_capacity_bytes': config.get('VAULT_STORE_CAPACITY_BYTES'),
    }


@sim_commands.cli.command('run')
@click.option('--scenario', 'scenario_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Scenario json file')
@click.option('--strategy', type=click.Choice([kind.value for kind in StrategyKind]), default='onload',
              show_default=True)
@click.option('--device', type=click.Choice(sorted(DEVICE_PRESETS)), default=None,
              help='Device preset, the scenario detector profile if omitted')
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False), help='Folder for the reports')
def run_command(scenario_path: str, strategy: str, device: str, out_dir: str):
    """Simulate one ride and write its session report"""
    try:
        scenario = load_scenario(scenario_path)
        options = run_options()
        agent = IncidentLedger(keys=current_app.config['AGENT_KEYS'])
        agent.add_key(options['key'])
        store_root = current_app.config.get('VAULT_STORE_ROOT') or current_app.instance_path
        report = run_session(scenario, scenario.strategy.with_kind(strategy),
                             get_device_preset(device) if device else None, agent=agent, store_root=store_root,
                             **options)
    except SIMULATION_ERRORS as error:
        fail(error)

    name = f'session_{scenario.session_id.hex()}_{report.strategy.name}_{report.device.name}'
    write_json(os.path.join(out_dir, f'{name}.json'), report.to_dict())
    write_records_csv(os.path.join(out_dir, f'{name}.csv'), [report.to_record()])
    click.echo(f'{report.frames_processed} frames, {report.warnings} warnings, '
               f'{report.incidents_recorded} incidents recorded, {report.incidents_delivered} delivered, '
               f'{report.incidents_pending} pending')
    if report.mean_latency_ms is not None:
        click.echo(f'mean latency {report.mean_latency_ms:.1f} ms, raw frame bytes sent {report.raw_frame_bytes}')
    try:
        report.raise_for_consent()
    except ConsentWithheldError as error:
        fail(error)


@sim_commands.cli.command('compare')
@click.option('--scenario', 'scenario_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Scenario json file')
@click.option('--device', 'devices', type=click.Choice(sorted(DEVICE_PRESETS)), multiple=True,
              help='Device presets to compare, reference-phone if omitted')
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False), help='Folder for the reports')
def compare_command(scenario_path: str, devices: tuple, out_dir: str):
    """Compare onload and offload analysis of one ride"""
    try:
        scenario = load_scenario(scenario_path)
        strategies = [scenario.strategy.with_kind(kind) for kind in StrategyKind]
        profiles = [get_device_preset(name) for name in devices or ('reference-phone',)]
        report = compare_strategies(scenario, strategies, profiles, **run_options())
    except SIMULATION_ERRORS as error:
        fail(error)

    write_json(os.path.join(out_dir, 'comparison.json'), report.to_dict())
    write_records_csv(os.path.join(out_dir, 'comparison.csv'), [row.to_dict() for row in report.rows])
    write_records_csv(os.path.join(out_dir, 'references.csv'), report.reference_records())
    for row in report.rows:
        latency = 'n/a' if row.mean_latency_ms is None else f'{row.mean_latency_ms:.1f} ms'
        click.echo(f'{row.strategy:<8} {row.device:<18} {latency:>12}  off-device {row.bytes_off_device} bytes')
    for profile in profiles:
        onload = report.row(StrategyKind.ONLOAD.value, profile.name).mean_latency_ms
        offload = report.row(StrategyKind.OFFLOAD.value, profile.name).mean_latency_ms
        if onload is not None and offload is not None:
            click.echo(f'{profile.name}: onload analysis is {offload - onload:.1f} ms a frame faster than offload')
    fastest = report.fastest()
    if fastest:
        click.echo(f'fastest: {fastest.strategy} on {fastest.device}')
    for label, latency in report.references:
        click.echo(f'{label} {latency:g} ms')


def parse_label(value: str) -> bool:
    value = value.strip().lower()
    if value in TRUE_LABELS:
        return True
    if value in FALSE_LABELS:
        return False
    raise ScenarioError(f"Label '{value}' is neither a violation nor a normal pose")


def echo_matrix(title: str, matrix: ConfusionMatrix):
    scores = matrix.scores()
    click.echo(f'{title}: tp={matrix.tp} fp={matrix.fp} fn={matrix.fn} tn={matrix.tn} '
               f'precision={scores.precision:.4f} recall={scores.recall:.4f} accuracy={scores.accuracy:.4f}')


@sim_commands.cli.command('metrics')
@click.option('--labels', 'labels_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='CSV of predicted,actual pairs; the published camera matrices are shown if omitted')
def metrics_command(labels_path: str):
    """Replay labelled pairs into a confusion matrix and print its scores"""
    try:
        if labels_path is None:
            echo_matrix('rear camera', REAR_CAMERA_MATRIX)
            echo_matrix('front camera', FRONT_CAMERA_MATRIX)
            return
        with open(labels_path, newline='', encoding='utf-8') as file:
            rows = [row for row in csv.reader(file) if row and not row[0].strip().startswith('#')]
        if rows and rows[0][0].strip().lower() == 'predicted':
            rows = rows[1:]
        pairs = []
        for row in rows:
            if len(row) < 2:
                raise ScenarioError(f'Row {row} must hold a predicted and an actual label')
            pairs.append((parse_label(row[0]), parse_label(row[1])))
        echo_matrix(os.path.basename(labels_path), ConfusionMatrix.from_pairs(pairs))
    except SIMULATION_ERRORS as error:
        fail(error)


def parse_episode(value: str):
    try:
        start, length = (int(part) for part in value.split(':'))
    except ValueError as error:
        raise click.BadParameter(f"Episode '{value}' must look like START:LENGTH") from error
    return start, length


@sim_commands.cli.command('scenario')
@click.argument('out_path', type=click.Path(dir_okay=False))
@click.option('--frames', 'n_frames', type=int, default=50, show_default=True)
@click.option('--interval', 'interval_ms', type=int, default=100, show_default=True, help='Time between frames, ms')
@click.option('--episode', 'episodes', multiple=True, help='Violation episode as START:LENGTH in frames')
@click.option('--night-from', type=int, default=None, help='Index of the first night frame')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--no-consent', is_flag=True, help='The passenger did not consent to monitoring')
@click.option('--night-only', is_flag=True, help='The passenger consented to night monitoring only')
def scenario_command(out_path: str, n_frames: int, interval_ms: int, episodes: tuple, night_from: int, seed: int,
                     no_consent: bool, night_only: bool):
    """Write a synthetic scenario file"""
    try:
        scenario = build_scenario(n_frames=n_frames, interval_ms=interval_ms,
                                  episodes=[parse_episode(value) for value in episodes], seed=seed,
                                  consent=not no_consent, consent_scope='night' if night_only else 'all',
                                  night_from=night_from, dimension=int(current_app.config['SIM_FEATURE_DIMENSION']))
    except SIMULATION_ERRORS as error:
        fail(error)
    dump_scenario(scenario, out_path)
    click.echo(f'Scenario {scenario.session_id.hex()} with {len(scenario.frames)} frames was written to {out_path}')
