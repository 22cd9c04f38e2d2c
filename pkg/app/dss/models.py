"""State, actions and config of the per-session decision support machine"""
import enum
import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from app.detector import Detection, SceneFrame
from .exceptions import InvalidDssConfigError

TRUE_VALUES = ('1', 'true', 'yes', 'on')


class Phase(str, enum.Enum):
    MONITORING = 'Monitoring'
    WARNED = 'Warned'
    COOLDOWN = 'Cooldown'


class ActionKind(str, enum.Enum):
    WARN = 'Warn'
    RECORD_INCIDENT = 'RecordIncident'
    NONE = 'None'


@dataclass(frozen=True)
class DssConfig:
    """
    :param confidence_threshold: a violation must be strictly more confident than this to count
    :param warn_window_ms: how long a warning waits for the violation to continue
    :param cooldown_ms: how long hits are ignored after an incident was recorded
    :param rearm_expired_warning: a hit after an expired warning warns again instead of being ignored
    """
    confidence_threshold: float = 0.80
    warn_window_ms: int = 30000
    cooldown_ms: int = 10000
    rearm_expired_warning: bool = False

    def __post_init__(self):
        if not 0.0 < self.confidence_threshold < 1.0:
            raise InvalidDssConfigError(f'Confidence threshold {self.confidence_threshold} must lie in (0, 1)')
        if self.warn_window_ms <= 0 or self.cooldown_ms <= 0:
            raise InvalidDssConfigError('Warn window and cooldown must be positive')

    @classmethod
    def from_mapping(cls, config: Mapping) -> 'DssConfig':
        """Builds the config from `DSS_*` keys of a flask config or any other mapping"""
        return cls(confidence_threshold=float(config.get('DSS_CONFIDENCE_THRESHOLD', cls.confidence_threshold)),
                   warn_window_ms=int(config.get('DSS_WARN_WINDOW_MS', cls.warn_window_ms)),
                   cooldown_ms=int(config.get('DSS_COOLDOWN_MS', cls.cooldown_ms)),
                   rearm_expired_warning=str(config.get('DSS_REARM_EXPIRED_WARNING', '')).lower() in TRUE_VALUES)


@dataclass(frozen=True)
class DssState:
    session_id: bytes
    phase: Phase = Phase.MONITORING
    phase_entered_at: int = 0
    incident_count: int = 0

    def __post_init__(self):
        if len(self.session_id) != 16:
            raise ValueError('Session id must be 16 bytes long')

    @classmethod
    def new_session(cls, session_id: Optional[bytes] = None, started_at: int = 0) -> 'DssState':
        return cls(session_id=session_id or os.urandom(16), phase_entered_at=started_at)

    def enter(self, phase: Phase, t_ms: int, incidents: int = 0) -> 'DssState':
        return replace(self, phase=phase, phase_entered_at=t_ms, incident_count=self.incident_count + incidents)


@dataclass(frozen=True)
class DssAction:
    kind: ActionKind = ActionKind.NONE
    frame: Optional[SceneFrame] = None
    detection: Optional[Detection] = None

    @classmethod
    def none(cls) -> 'DssAction':
        return cls()
