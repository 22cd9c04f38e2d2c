"""Incident encryption, the incident envelope wire format and the hidden on-device store"""
import logging

logger = logging.getLogger(__name__)

from .envelope import EncryptionKey, IncidentMeta, EnvelopeHeader, ENVELOPE_HEADER_SIZE, MAGIC, VERSION
from .envelope import xor_transform, seal_incident, open_incident, parse_envelope_header, declared_envelope_len
from .store import IncidentStore, STORE_DIRECTORY, INCIDENT_SUFFIX
