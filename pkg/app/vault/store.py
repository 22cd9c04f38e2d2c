"""Write-once store of sealed incidents in a hidden folder of the device"""
import errno
import os
import tempfile
import threading
from typing import List, Optional

from . import logger
from .envelope import parse_envelope_header
from .exceptions import StorageFullError, DuplicateIncidentError

STORE_DIRECTORY = '.smr_incidents'
INCIDENT_SUFFIX = '.smri'


class IncidentStore:
    """
    Keeps envelopes under `<root>/.smr_incidents/` as `<timestamp_ms>_<frame_id>.smri`. Both numbers are zero padded,
    so the lexicographic order of the names is the chronological order of the incidents.
    A file becomes visible only when it is complete: it is written aside under a temporary name and then hard linked
    into place, which also fails atomically when the name is taken.
    """

    def __init__(self, root: str, capacity_bytes: Optional[int] = None):
        self._directory = os.path.join(root, STORE_DIRECTORY)
        self._capacity_bytes = capacity_bytes
        self._lock = threading.Lock()
        os.makedirs(self._directory, exist_ok=True)

    @property
    def directory(self) -> str:
        return self._directory

    @staticmethod
    def incident_name(timestamp_ms: int, frame_id: int) -> str:
        return f'{timestamp_ms:020d}_{frame_id:010d}{INCIDENT_SUFFIX}'

    def used_bytes(self) -> int:
        return sum(os.path.getsize(os.path.join(self._directory, name)) for name in self._incident_files())

    def _incident_files(self) -> List[str]:
        return sorted(name for name in os.listdir(self._directory) if name.endswith(INCIDENT_SUFFIX))

    def store_incident(self, envelope: bytes, frame_id: int = 0) -> str:
        """
        Writes a sealed envelope once.
        :param envelope: envelope bytes, never a plain payload
        :param frame_id: frame which triggered the incident
        :return: path of the stored file
        """
        header = parse_envelope_header(envelope)
        name = self.incident_name(header.timestamp_ms, frame_id)
        path = os.path.join(self._directory, name)
        with self._lock:
            if self._capacity_bytes is not None and self.used_bytes() + len(envelope) > self._capacity_bytes:
                logger.error(f'Device store is full, incident {name} is not saved')
                raise StorageFullError(errno.ENOSPC, 'Device incident store is full', path)
            descriptor, temporary = tempfile.mkstemp(prefix='.partial-', dir=self._directory)
            try:
                with os.fdopen(descriptor, 'wb') as file:
                    file.write(envelope)
                    file.flush()
                    os.fsync(file.fileno())
                os.link(temporary, path)
            except FileExistsError as error:
                logger.warning(f'Incident {name} has already been stored')
                raise DuplicateIncidentError(errno.EEXIST, 'Incident has already been stored', path) from error
            except OSError as error:
                if error.errno == errno.ENOSPC:
                    raise StorageFullError(errno.ENOSPC, 'Device incident store is full', path) from error
                raise
            finally:
                os.unlink(temporary)
        logger.info(f'Incident {name} was stored')
        return path

    def list_incidents(self) -> List[str]:
        """Identifiers (file names without the suffix) in timestamp order"""
        return [name[:-len(INCIDENT_SUFFIX)] for name in self._incident_files()]

    def read_incident(self, identifier: str) -> bytes:
        with open(os.path.join(self._directory, identifier + INCIDENT_SUFFIX), 'rb') as file:
            return file.read()
