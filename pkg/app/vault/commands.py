"""`flask vault ...` commands to seal, open and list incident envelopes by hand"""
import os

import click
from flask import Blueprint
from flask import current_app

from app.detector import DetectionClass
from app.detector.exceptions import InvalidDetectionError
from . import logger
from .envelope import EncryptionKey, IncidentMeta, seal_incident, open_incident, parse_envelope_header
from .exceptions import MalformedEnvelopeError, KeyMismatchError, IntegrityFailureError, InvalidKeyError
from .store import IncidentStore

vault_commands = Blueprint('vault_commands', __name__, cli_group='vault')

VAULT_ERRORS = (MalformedEnvelopeError, KeyMismatchError, IntegrityFailureError, InvalidKeyError,
                InvalidDetectionError)


def fail(error: Exception):
    """Logs the error and stops the command with a non-zero exit code"""
    logger.warning(f'Vault command failed with {type(error).__name__}: {error}')
    raise click.ClickException(f'{type(error).__name__}: {error}')


def configured_key(key_hex: str, key_id: int) -> EncryptionKey:
    """Key given on the command line, the configured vault key for what is omitted"""
    return EncryptionKey.from_hex(key_hex or current_app.config['VAULT_KEY_HEX'],
                                  current_app.config['VAULT_KEY_ID'] if key_id is None else key_id)


@vault_commands.cli.command('seal')
@click.argument('payload_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('envelope_path', type=click.Path(dir_okay=False))
@click.option('--session', 'session_hex', required=True, help='Session id, 32 hex digits')
@click.option('--timestamp', 'timestamp_ms', type=int, required=True, help='Incident time, ms since epoch')
@click.option('--class', 'category', default='Violation', show_default=True)
@click.option('--confidence', type=float, required=True)
@click.option('--key-hex', default=None, help='Key as hex, VAULT_KEY_HEX if omitted')
@click.option('--key-id', type=int, default=None, help='Key id, VAULT_KEY_ID if omitted')
def seal_command(payload_path: str, envelope_path: str, session_hex: str, timestamp_ms: int, category: str,
                 confidence: float, key_hex: str, key_id: int):
    """Encrypt a payload file into an envelope file"""
    try:
        key = configured_key(key_hex, key_id)
        session_id = bytes.fromhex(session_hex)
        meta = IncidentMeta(session_id=session_id, timestamp_ms=timestamp_ms,
                            category=DetectionClass.parse(category), confidence=confidence)
    except ValueError as error:
        fail(error)
    with open(payload_path, 'rb') as file:
        envelope = seal_incident(file.read(), meta, key)
    with open(envelope_path, 'wb') as file:
        file.write(envelope)
    click.echo(f'{len(envelope)} bytes sealed with key {key.key_id} into {envelope_path}')


@vault_commands.cli.command('open')
@click.argument('envelope_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('payload_path', type=click.Path(dir_okay=False), required=False)
@click.option('--key-hex', default=None, help='Key as hex, VAULT_KEY_HEX if omitted')
@click.option('--key-id', type=int, default=None, help='Key id, VAULT_KEY_ID if omitted')
def open_command(envelope_path: str, payload_path: str, key_hex: str, key_id: int):
    """Check and decrypt an envelope file; without PAYLOAD_PATH only the metadata is shown"""
    with open(envelope_path, 'rb') as file:
        envelope = file.read()
    try:
        key = configured_key(key_hex, key_id)
        meta, payload = open_incident(envelope, key)
    except VAULT_ERRORS as error:
        fail(error)
    click.echo(f'session {meta.session_id.hex()} at {meta.timestamp_ms} ms: {meta.category.label} '
               f'{meta.confidence:.4f}, {len(payload)} payload bytes')
    if payload_path:
        with open(payload_path, 'wb') as file:
            file.write(payload)


@vault_commands.cli.command('list')
@click.option('--root', default=None, type=click.Path(file_okay=False),
              help='Device store root, VAULT_STORE_ROOT or the instance folder if omitted')
def list_command(root: str):
    """List incidents kept in the hidden device store"""
    store = IncidentStore(root or current_app.config.get('VAULT_STORE_ROOT') or current_app.instance_path)
    for identifier in store.list_incidents():
        try:
            header = parse_envelope_header(store.read_incident(identifier))
        except MalformedEnvelopeError as error:
            click.echo(f'{identifier} unreadable: {error}')
            continue
        click.echo(f'{identifier} {header.category.label} {header.confidence_x1e4} '
                   f'{header.envelope_len} bytes')
    click.echo(f'{len(store.list_incidents())} incidents in {os.path.abspath(store.directory)}')
