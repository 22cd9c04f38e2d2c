"""
Append-only incident log of the agent with its in-memory index.

Every record of the log file is `received_at_ms` (8 bytes, big endian) followed by the envelope bytes exactly as they
came from the device. The envelope header declares its own length, so the file is replayed into the index at start-up
without any other framing. Only a record cut short at the end of the file is dropped; a damaged complete record is
skipped but keeps its incident id, so the ids of later records never shift. Session to vehicle bindings go into a
small text log beside it.
"""
import os
import struct
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Set, Tuple

from app.vault import EncryptionKey, IncidentMeta, open_incident, parse_envelope_header, declared_envelope_len
from app.vault.exceptions import IntegrityFailureError, KeyMismatchError, MalformedEnvelopeError
from . import logger
from .exceptions import UnknownKeyIdError, DuplicateEnvelopeError, IncidentNotFoundError

_RECEIVED_AT = struct.Struct('>Q')
DuplicateKey = Tuple[bytes, int, int]


@dataclass(frozen=True)
class StoredIncident:
    incident_id: int
    session_id: bytes
    vehicle_id: Optional[str]
    received_at_ms: int
    meta: IncidentMeta
    plaintext_crc32: int
    payload: Optional[bytes] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        """Listing representation. The payload is never part of it"""
        return {
            'incident_id': self.incident_id,
            'session_id': self.session_id.hex(),
            'vehicle_id': self.vehicle_id,
            'received_at_ms': self.received_at_ms,
            'timestamp_ms': self.meta.timestamp_ms,
            'class': self.meta.category.label,
            'confidence': self.meta.confidence,
            'payload_len': len(self.payload) if self.payload is not None else None,
        }


def parse_key_config(keys: Mapping) -> Dict[int, EncryptionKey]:
    """Turns a `{key_id: hex string or bytes}` mapping into encryption keys"""
    result = {}
    for key_id, value in (keys or {}).items():
        if isinstance(value, EncryptionKey):
            result[value.key_id] = value
        elif isinstance(value, (bytes, bytearray)):
            result[int(key_id)] = EncryptionKey(bytes(value), int(key_id))
        else:
            result[int(key_id)] = EncryptionKey.from_hex(value, int(key_id))
    return result


class IncidentLedger:
    """
    Ingests envelopes, checks them with the shared keys and keeps the incidents.
    Ingests are serialized by a lock, so incident ids are assigned atomically in arrival order. Readers copy the index
    under the same lock and therefore always see a consistent prefix of it.
    With no log path the ledger lives in memory only, which is what the simulator uses.
    """

    def __init__(self, log_path: Optional[str] = None, keys: Optional[Mapping] = None):
        self._lock = threading.Lock()
        self._log_path: Optional[str] = None
        self._keys: Dict[int, EncryptionKey] = {}
        self._incidents: Dict[int, StoredIncident] = {}
        self._next_id = 1
        self._seen: Set[DuplicateKey] = set()
        self._vehicles_by_session: Dict[bytes, str] = {}
        self.open(log_path, keys)

    def init_app(self, app):
        """Reads `AGENT_LOG_PATH` and `AGENT_KEYS` of the flask app and replays the log"""
        log_path = app.config.get('AGENT_LOG_PATH') or os.path.join(app.instance_path, 'incidents.log')
        self.open(log_path, app.config.get('AGENT_KEYS'))

    def open(self, log_path: Optional[str] = None, keys: Optional[Mapping] = None):
        with self._lock:
            self._log_path = log_path
            self._keys = parse_key_config(keys)
            self._incidents = {}
            self._next_id = 1
            self._seen = set()
            self._vehicles_by_session = {}
            if log_path:
                os.makedirs(os.path.dirname(os.path.abspath(log_path)), exist_ok=True)
                self._replay_sessions()
                self._replay_log()

    @property
    def log_path(self) -> Optional[str]:
        return self._log_path

    @property
    def sessions_path(self) -> Optional[str]:
        return self._log_path + '.sessions' if self._log_path else None

    @property
    def key_ids(self) -> Set[int]:
        return set(self._keys)

    @property
    def count(self) -> int:
        with self._lock:
            return len(self._incidents)

    def add_key(self, key: EncryptionKey):
        with self._lock:
            self._keys[key.key_id] = key

    def _replay_log(self):
        if not os.path.exists(self._log_path):
            return
        with open(self._log_path, 'rb') as file:
            data = file.read()
        offset = 0
        while offset < len(data):
            start = offset + _RECEIVED_AT.size
            try:
                end = start + declared_envelope_len(data[start:])
            except MalformedEnvelopeError:
                end = len(data) + 1
            if end > len(data):
                # a crash in the middle of an append leaves a torn tail
                logger.error(f'Incident log is cut at byte {offset}: the last record is truncated')
                with open(self._log_path, 'r+b') as file:
                    file.truncate(offset)
                break
            received_at_ms, = _RECEIVED_AT.unpack_from(data, offset)
            incident_id = self._next_id
            self._next_id += 1
            try:
                envelope = data[start:end]
                self._index(incident_id, envelope, received_at_ms, self._decrypt(envelope, strict=False))
            except MalformedEnvelopeError as error:
                logger.critical(f'Record of incident {incident_id} at byte {offset} of the incident log is damaged '
                                f'and was skipped: {error}')
            offset = end
        logger.info(f'{len(self._incidents)} incidents were replayed from {self._log_path}')

    def _replay_sessions(self):
        if not os.path.exists(self.sessions_path):
            return
        with open(self.sessions_path, encoding='utf-8') as file:
            for line in file:
                parts = line.split(maxsplit=1)
                if len(parts) == 2:
                    self._vehicles_by_session[bytes.fromhex(parts[0])] = parts[1].strip()

    def _decrypt(self, envelope: bytes, strict: bool = True) -> Optional[bytes]:
        header = parse_envelope_header(envelope)
        key = self._keys.get(header.key_id)
        if key is None:
            if strict:
                raise UnknownKeyIdError(header.key_id)
            logger.error(f'No key {header.key_id} to decrypt a replayed incident, its payload is unavailable')
            return None
        try:
            _, payload = open_incident(envelope, key)
        except (IntegrityFailureError, KeyMismatchError) as error:
            if strict:
                raise
            logger.error(f'Replayed incident cannot be decrypted with key {header.key_id}, its payload is unavailable: '
                         f'{error}')
            return None
        return payload

    def _index(self, incident_id: int, envelope: bytes, received_at_ms: int,
               payload: Optional[bytes]) -> StoredIncident:
        header = parse_envelope_header(envelope)
        incident = StoredIncident(incident_id=incident_id, session_id=header.session_id,
                                  vehicle_id=self._vehicles_by_session.get(header.session_id),
                                  received_at_ms=received_at_ms, meta=header.to_meta(),
                                  plaintext_crc32=header.plaintext_crc32, payload=payload)
        self._incidents[incident_id] = incident
        self._seen.add((header.session_id, header.timestamp_ms, header.plaintext_crc32))
        return incident

    def _bind_session(self, session_id: bytes, vehicle_id: str):
        if self._vehicles_by_session.get(session_id) == vehicle_id:
            return
        self._vehicles_by_session[session_id] = vehicle_id
        if self._log_path:
            with open(self.sessions_path, 'a', encoding='utf-8') as file:
                file.write(f'{session_id.hex()} {vehicle_id}\n')

    def ingest(self, envelope: bytes, vehicle_id: Optional[str] = None, received_at_ms: Optional[int] = None) -> int:
        """
        Opens an envelope with the key of its key id, persists it and returns the new incident id.
        :param envelope: envelope bytes from the device
        :param vehicle_id: vehicle the session runs in; binds the session to it
        :param received_at_ms: arrival time, wall clock by default
        :return: incident id, 1 for the first incident
        """
        header = parse_envelope_header(envelope)
        if received_at_ms is None:
            received_at_ms = int(time.time() * 1000)
        with self._lock:
            duplicate_key = (header.session_id, header.timestamp_ms, header.plaintext_crc32)
            if duplicate_key in self._seen:
                logger.warning(f'Envelope of session {header.session_id.hex()} at {header.timestamp_ms} '
                               f'was delivered twice')
                raise DuplicateEnvelopeError('Incident has already been ingested')
            try:
                payload = self._decrypt(envelope)
            except UnknownKeyIdError:
                logger.warning(f'Envelope came with unknown key id {header.key_id}')
                raise
            if vehicle_id:
                self._bind_session(header.session_id, vehicle_id)
            if self._log_path:
                with open(self._log_path, 'ab') as file:
                    file.write(_RECEIVED_AT.pack(received_at_ms) + envelope)
                    file.flush()
                    os.fsync(file.fileno())
            incident = self._index(self._next_id, envelope, received_at_ms, payload)
            self._next_id += 1
        logger.info(f'Incident {incident.incident_id} of session {header.session_id.hex()} was ingested')
        return incident.incident_id

    def query_incidents(self, session_id: Optional[bytes] = None) -> List[StoredIncident]:
        """Incidents of one session (of all sessions if none is given) in incident id order"""
        with self._lock:
            snapshot = list(self._incidents.values())
        return [incident for incident in snapshot if session_id is None or incident.session_id == session_id]

    def get_incident(self, incident_id: int) -> StoredIncident:
        with self._lock:
            if incident_id not in self._incidents:
                raise IncidentNotFoundError(f'Incident {incident_id} does not exist')
            return self._incidents[incident_id]

    def fetch_payload(self, incident_id: int) -> bytes:
        incident = self.get_incident(incident_id)
        if incident.payload is None:
            raise UnknownKeyIdError(f'Payload of incident {incident_id} cannot be decrypted with the loaded keys')
        return incident.payload
