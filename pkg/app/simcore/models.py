"""Scenario, strategy and device descriptions and the reports of the simulator"""
import enum
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from app.detector import DetectorProfile, Lighting, SceneFrame
from app.metrics import ConfusionMatrix, LatencyKind, LatencySample, LatencyStats, Scores, latency_stats
from app.metrics.exceptions import EmptySampleSetError, ZeroDenominatorError
from app.transport import LinkModel, Transfer, always_up
from app.vault import EncryptionKey
from .exceptions import ScenarioError, ConsentWithheldError

DEFAULT_DEVICE_KEY = EncryptionKey(b'smr-development', key_id=1)


class StrategyKind(str, enum.Enum):
    ONLOAD = 'onload'
    OFFLOAD = 'offload'


@dataclass(frozen=True)
class Strategy:
    """
    Where a frame is analysed. Onload runs the detector on the phone; offload ships the whole frame to an edge node
    and waits for its detections. The offload parameters are ignored for onload.
    """
    kind: StrategyKind = StrategyKind.ONLOAD
    frame_bytes: int = 1_000_000
    uplink_bytes_per_s: float = 1_000_000.0
    rtt_ms: float = 50.0
    edge_inference_ms: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', StrategyKind(self.kind))
        if self.kind is StrategyKind.OFFLOAD and not (
                self.frame_bytes > 0 and self.uplink_bytes_per_s > 0 and self.rtt_ms > 0
                and self.edge_inference_ms > 0):
            raise ScenarioError('Offload frame size, bandwidth, rtt and edge inference must be positive')

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def onload(cls) -> 'Strategy':
        return cls(StrategyKind.ONLOAD)

    @classmethod
    def offload(cls, **parameters) -> 'Strategy':
        return cls(StrategyKind.OFFLOAD, **parameters)

    def with_kind(self, kind: StrategyKind) -> 'Strategy':
        return replace(self, kind=StrategyKind(kind))

    @classmethod
    def from_mapping(cls, data: Optional[Mapping]) -> 'Strategy':
        data = dict(data or {})
        kwargs = {key: float(data[key]) for key in ('uplink_bytes_per_s', 'rtt_ms', 'edge_inference_ms')
                  if key in data}
        if 'frame_bytes' in data:
            kwargs['frame_bytes'] = int(data['frame_bytes'])
        try:
            return cls(kind=StrategyKind(str(data.get('kind', 'onload')).lower()), **kwargs)
        except ValueError as error:
            raise ScenarioError(f"Unknown strategy '{data.get('kind')}'") from error

    def to_dict(self) -> dict:
        return {'kind': self.kind.value, 'frame_bytes': self.frame_bytes,
                'uplink_bytes_per_s': self.uplink_bytes_per_s, 'rtt_ms': self.rtt_ms,
                'edge_inference_ms': self.edge_inference_ms}


@dataclass(frozen=True)
class DeviceProfile:
    """
    Phone the session runs on. Only `inference_ms` drives the simulation, the rest are published measurements kept
    for the reports.
    """
    name: str
    inference_ms: float = 28.0
    reference_latency_ms: Optional[float] = None
    accuracy: Optional[float] = None
    ram_mb: Optional[float] = None
    battery_mah: Optional[float] = None

    def __post_init__(self):
        if not self.inference_ms > 0:
            raise ScenarioError(f'Device {self.name} must have a positive inference latency')

    def to_dict(self) -> dict:
        return {'name': self.name, 'inference_ms': self.inference_ms,
                'reference_latency_ms': self.reference_latency_ms, 'accuracy': self.accuracy,
                'ram_mb': self.ram_mb, 'battery_mah': self.battery_mah}


class ConsentScope(str, enum.Enum):
    ALL = 'all'
    NIGHT = 'night'


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    One ride to simulate. Frames must be strictly increasing in time. Without consent the pipeline never runs;
    with the night scope only night frames are monitored.
    """
    session_id: bytes
    vehicle_id: str
    consent: bool
    frames: Tuple[SceneFrame, ...]
    detector_profile: DetectorProfile = field(default_factory=DetectorProfile)
    link: LinkModel = field(default_factory=always_up)
    seed: int = 0
    consent_scope: ConsentScope = ConsentScope.ALL
    base_confidence: float = 0.9
    strategy: Strategy = field(default_factory=Strategy)

    def __post_init__(self):
        if len(self.session_id) != 16:
            raise ScenarioError('Session id must be 16 bytes long')
        object.__setattr__(self, 'frames', tuple(self.frames))
        object.__setattr__(self, 'consent_scope', ConsentScope(self.consent_scope))
        for previous, current in zip(self.frames, self.frames[1:]):
            if current.t_ms <= previous.t_ms:
                raise ScenarioError(f'Frame {current.frame_id} at {current.t_ms} ms does not come after '
                                    f'frame {previous.frame_id} at {previous.t_ms} ms')
        if len({frame.frame_id for frame in self.frames}) != len(self.frames):
            raise ScenarioError('Frame ids must be unique')

    @property
    def duration_ms(self) -> int:
        return self.frames[-1].t_ms if self.frames else 0

    @property
    def lighting_schedule(self) -> List[Tuple[int, Lighting]]:
        """Moments when the lighting changes, starting with the first frame"""
        schedule = []
        for frame in self.frames:
            if not schedule or schedule[-1][1] is not frame.lighting:
                schedule.append((frame.t_ms, frame.lighting))
        return schedule

    def in_scope(self, frame: SceneFrame) -> bool:
        return self.consent_scope is ConsentScope.ALL or frame.lighting is Lighting.NIGHT


@dataclass(frozen=True)
class IncidentTrace:
    """Path of one recorded incident from the frame to the agent"""
    frame_id: int
    t_ms: int
    confidence: float
    envelope_id: int
    envelope_bytes: int
    stored_as: Optional[str] = None
    incident_id: Optional[int] = None
    delivered_at_ms: Optional[float] = None

    def to_dict(self) -> dict:
        return {'frame_id': self.frame_id, 't_ms': self.t_ms, 'confidence': self.confidence,
                'envelope_id': self.envelope_id, 'envelope_bytes': self.envelope_bytes, 'stored_as': self.stored_as,
                'incident_id': self.incident_id, 'delivered_at_ms': self.delivered_at_ms}


def _stats_or_none(samples: Sequence[LatencySample], **filters) -> Optional[LatencyStats]:
    try:
        return latency_stats(samples, **filters)
    except EmptySampleSetError:
        return None


@dataclass
class SessionReport:
    session_id: bytes
    strategy: Strategy
    device: DeviceProfile
    consent_withheld: bool = False
    frames_total: int = 0
    frames_processed: int = 0
    frames_skipped: int = 0
    frame_latencies: List[Tuple[int, float]] = field(default_factory=list)
    samples: List[LatencySample] = field(default_factory=list)
    warnings: int = 0
    incidents_recorded: int = 0
    incidents_delivered: int = 0
    incidents_pending: int = 0
    raw_frame_bytes: int = 0
    envelope_bytes: int = 0
    fallback_records: int = 0
    fallback_payload_bytes: int = 0
    confusion: ConfusionMatrix = field(default_factory=ConfusionMatrix)
    events: List[str] = field(default_factory=list)
    incidents: List[IncidentTrace] = field(default_factory=list)
    transfers: List[Transfer] = field(default_factory=list, repr=False)

    @property
    def bytes_off_device(self) -> int:
        return self.raw_frame_bytes + self.envelope_bytes

    def latency(self, kind: LatencyKind = LatencyKind.END_TO_END,
                lighting: Optional[Lighting] = None) -> Optional[LatencyStats]:
        return _stats_or_none(self.samples, kind=kind, lighting=lighting)

    @property
    def mean_latency_ms(self) -> Optional[float]:
        stats = self.latency()
        return stats.mean_ms if stats else None

    def scores(self) -> Optional[Scores]:
        try:
            return self.confusion.scores()
        except ZeroDenominatorError:
            return None

    def raise_for_consent(self):
        if self.consent_withheld:
            raise ConsentWithheldError(f'Session {self.session_id.hex()} ran without the passenger consent')

    def to_record(self) -> Dict[str, Any]:
        """One flat row of the session"""
        end_to_end = self.latency()
        day, night = self.latency(lighting=Lighting.DAY), self.latency(lighting=Lighting.NIGHT)
        upload = self.latency(LatencyKind.UPLOAD)
        scores = self.scores()
        record = {
            'session_id': self.session_id.hex(),
            'strategy': self.strategy.name,
            'device': self.device.name,
            'consent_withheld': self.consent_withheld,
            'frames_total': self.frames_total,
            'frames_processed': self.frames_processed,
            'frames_skipped': self.frames_skipped,
            'warnings': self.warnings,
            'incidents_recorded': self.incidents_recorded,
            'incidents_delivered': self.incidents_delivered,
            'incidents_pending': self.incidents_pending,
            'raw_frame_bytes': self.raw_frame_bytes,
            'envelope_bytes': self.envelope_bytes,
            'fallback_records': self.fallback_records,
            'fallback_payload_bytes': self.fallback_payload_bytes,
        }
        record.update(self.confusion.to_dict())
        record.update({
            'precision': scores.precision if scores else None,
            'recall': scores.recall if scores else None,
            'accuracy': scores.accuracy if scores else None,
            'latency_mean_ms': end_to_end.mean_ms if end_to_end else None,
            'latency_p50_ms': end_to_end.p50 if end_to_end else None,
            'latency_p95_ms': end_to_end.p95 if end_to_end else None,
            'latency_count': end_to_end.count if end_to_end else 0,
            'day_latency_mean_ms': day.mean_ms if day else None,
            'night_latency_mean_ms': night.mean_ms if night else None,
            'upload_latency_mean_ms': upload.mean_ms if upload else None,
        })
        return record

    def to_dict(self) -> Dict[str, Any]:
        """Full report without the wire bytes"""
        document = self.to_record()
        document.update({
            'strategy_parameters': self.strategy.to_dict(),
            'device_profile': self.device.to_dict(),
            'frame_latencies_ms': [[frame_id, latency] for frame_id, latency in self.frame_latencies],
            'events': list(self.events),
            'incidents': [incident.to_dict() for incident in self.incidents],
        })
        return document


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    device: str
    mean_latency_ms: Optional[float]
    p95_latency_ms: Optional[float]
    bytes_off_device: int
    raw_frame_bytes: int
    envelope_bytes: int
    incidents_recorded: int
    incidents_delivered: int

    @classmethod
    def from_report(cls, report: SessionReport) -> 'ComparisonRow':
        stats = report.latency()
        return cls(strategy=report.strategy.name, device=report.device.name,
                   mean_latency_ms=stats.mean_ms if stats else None, p95_latency_ms=stats.p95 if stats else None,
                   bytes_off_device=report.bytes_off_device, raw_frame_bytes=report.raw_frame_bytes,
                   envelope_bytes=report.envelope_bytes, incidents_recorded=report.incidents_recorded,
                   incidents_delivered=report.incidents_delivered)

    def to_dict(self) -> dict:
        return {'strategy': self.strategy, 'device': self.device, 'mean_latency_ms': self.mean_latency_ms,
                'p95_latency_ms': self.p95_latency_ms, 'bytes_off_device': self.bytes_off_device,
                'privacy_exposure_bytes': self.raw_frame_bytes, 'envelope_bytes': self.envelope_bytes,
                'incidents_recorded': self.incidents_recorded, 'incidents_delivered': self.incidents_delivered}


@dataclass(frozen=True)
class ComparisonReport:
    """Computed rows side by side with published latencies of other systems, which are citations only"""
    session_id: bytes
    rows: Tuple[ComparisonRow, ...]
    references: Tuple[Tuple[str, float], ...]
    sessions: Tuple[SessionReport, ...] = field(default=(), repr=False, compare=False)

    def row(self, strategy: str, device: Optional[str] = None) -> ComparisonRow:
        for row in self.rows:
            if row.strategy == strategy and (device is None or row.device == device):
                return row
        raise KeyError(f'No row for strategy {strategy} on device {device}')

    def fastest(self) -> Optional[ComparisonRow]:
        """Row with the lowest mean latency, None when no run analysed a frame"""
        measured = [row for row in self.rows if row.mean_latency_ms is not None]
        if not measured:
            return None
        return min(measured, key=lambda row: row.mean_latency_ms)

    def reference_records(self) -> List[dict]:
        return [{'system': label, 'average_latency_ms': latency} for label, latency in self.references]

    def to_dict(self) -> dict:
        return {'session_id': self.session_id.hex(), 'rows': [row.to_dict() for row in self.rows],
                'references': self.reference_records()}
