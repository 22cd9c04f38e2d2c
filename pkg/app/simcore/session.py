"""
One monitored ride as a simpy timeline. Time is in simulated milliseconds.

    camera   - releases every frame at its timestamp and starts its analysis (on the phone or at the edge node)
    monitor  - feeds analysed frames to the decision support machine in frame order; a recorded incident is sealed,
               stored in the hidden folder of the device and queued for the uplink
    uplink   - ticks the outbound queue over the link schedule and hands delivered envelopes to the agent
"""
import contextlib
import dataclasses
import os
import tempfile
from typing import Dict, List, Optional

import numpy as np
import simpy

from app.agent.exceptions import DuplicateEnvelopeError
from app.agent.ledger import IncidentLedger
from app.detector import Detection, Detector, ScriptedDetector, SceneFrame
from app.dss import ActionKind, DssConfig, DssState, format_warn_event, is_hit, step
from app.metrics import LatencyKind, LatencySample
from app.transport import OutboundQueue, tick
from app.vault import EncryptionKey, IncidentMeta, IncidentStore, seal_incident
from app.vault.exceptions import StorageFullError, DuplicateIncidentError
from . import logger
from .models import DEFAULT_DEVICE_KEY, DeviceProfile, IncidentTrace, Scenario, SessionReport
from .models import Strategy, StrategyKind
from .scenario import capture_payload

DEFAULT_PAYLOAD_BYTES = 120_000
DEFAULT_DRAIN_LIMIT_MS = 24 * 60 * 60 * 1000


def frame_latency(strategy: Strategy, device: DeviceProfile, frame: Optional[SceneFrame] = None) -> float:
    """
    Time from the capture of a frame until its detections are available on the phone.
    Onload: the inference on the device. Offload: the frame upload, one round trip and the inference at the edge.
    """
    if strategy.kind is StrategyKind.ONLOAD:
        return device.inference_ms
    return strategy.frame_bytes / strategy.uplink_bytes_per_s * 1000 + strategy.rtt_ms + strategy.edge_inference_ms


def frame_seed(scenario: Scenario, frame: SceneFrame) -> int:
    return int(np.random.SeedSequence([scenario.seed, frame.frame_id]).generate_state(1)[0])


class SessionSimulation:
    """Processes and shared state of one run. A simulation object runs once"""

    def __init__(self, scenario: Scenario, strategy: Strategy, device: DeviceProfile, detector: Detector,
                 agent: IncidentLedger, store: IncidentStore, key: EncryptionKey, dss_config: DssConfig,
                 queue: OutboundQueue, payload_bytes: int, tick_interval_ms: int, drain_limit_ms: int):
        self.env = simpy.Environment()
        self.scenario = scenario
        self.strategy = strategy
        self.device = device
        self.detector = detector
        self.agent = agent
        self.store = store
        self.key = key
        self.dss_config = dss_config
        self.queue = queue
        self.payload_bytes = payload_bytes
        self.tick_interval_ms = tick_interval_ms
        self.drain_limit_ms = drain_limit_ms

        self.report = SessionReport(session_id=scenario.session_id, strategy=strategy, device=device,
                                    frames_total=len(scenario.frames))
        first_t = scenario.frames[0].t_ms if scenario.frames else 0
        self.state = DssState.new_session(scenario.session_id, started_at=first_t)
        self._monitored = [frame for frame in scenario.frames if scenario.in_scope(frame)]
        self._analysed = {frame.frame_id: self.env.event() for frame in self._monitored}
        self._traces: Dict[int, IncidentTrace] = {}
        self._frames_by_envelope: Dict[int, SceneFrame] = {}
        self._ingested: List[Optional[int]] = []
        self._drain_until: Optional[float] = None

    def camera(self):
        for frame in self.scenario.frames:
            yield self.env.timeout(frame.t_ms - self.env.now)
            if frame.frame_id not in self._analysed:
                self.report.frames_skipped += 1
                continue
            self.env.process(self.analyse(frame))

    def analyse(self, frame: SceneFrame):
        detections, inference_ms = self.detector.detect(frame, frame_seed(self.scenario, frame))
        if self.strategy.kind is StrategyKind.ONLOAD:
            latency = inference_ms
        else:
            # dss still runs on the phone, only the detector moves to the edge
            inference_ms = self.strategy.edge_inference_ms
            latency = frame_latency(self.strategy, self.device, frame)
            self.report.raw_frame_bytes += self.strategy.frame_bytes
        yield self.env.timeout(latency)
        self._analysed[frame.frame_id].succeed((detections, latency, inference_ms))

    def monitor(self):
        for frame in self._monitored:
            detections, latency, inference_ms = yield self._analysed[frame.frame_id]
            self.report.frames_processed += 1
            self.report.frame_latencies.append((frame.frame_id, latency))
            self.report.samples.append(LatencySample(LatencyKind.END_TO_END, latency, frame.lighting))
            self.report.samples.append(LatencySample(LatencyKind.INFERENCE, inference_ms, frame.lighting))
            self.report.confusion = self.report.confusion.update(is_hit(detections, self.dss_config),
                                                                 frame.has_violation)

            self.state, action = step(self.state, frame, detections, self.dss_config)
            if action.kind is ActionKind.WARN:
                self.report.warnings += 1
                self.report.events.append(format_warn_event(self.state, frame.t_ms))
            elif action.kind is ActionKind.RECORD_INCIDENT:
                self.record_incident(frame, action.detection)
        self._drain_until = self.env.now + self.drain_limit_ms

    def record_incident(self, frame: SceneFrame, detection: Detection):
        payload = capture_payload(frame, self.scenario.seed, self.payload_bytes)
        meta = IncidentMeta(session_id=self.scenario.session_id, timestamp_ms=frame.t_ms,
                            category=detection.category, confidence=detection.confidence)
        envelope = seal_incident(payload, meta, self.key)
        stored_as = None
        try:
            stored_as = os.path.basename(self.store.store_incident(envelope, frame.frame_id))
        except StorageFullError:
            logger.error(f'Incident of frame {frame.frame_id} is not kept on the device, the store is full')
        except DuplicateIncidentError:
            stored_as = IncidentStore.incident_name(frame.t_ms, frame.frame_id)
        item = self.queue.enqueue(envelope, now_ms=int(self.env.now))
        self.report.incidents_recorded += 1
        self._frames_by_envelope[item.envelope_id] = frame
        self._traces[item.envelope_id] = IncidentTrace(frame_id=frame.frame_id, t_ms=frame.t_ms,
                                                       confidence=detection.confidence,
                                                       envelope_id=item.envelope_id, envelope_bytes=item.size,
                                                       stored_as=stored_as)
        logger.info(f'Incident of session {self.scenario.session_id.hex()} was recorded at frame {frame.frame_id}')

    def deliver(self, envelope: bytes):
        try:
            incident_id = self.agent.ingest(envelope, vehicle_id=self.scenario.vehicle_id,
                                            received_at_ms=int(self.env.now))
        except DuplicateEnvelopeError:
            # the agent already holds it, so the device may forget it
            incident_id = None
        self._ingested.append(incident_id)

    def uplink(self):
        while True:
            self._ingested.clear()
            result = tick(self.queue, self.scenario.link, self.env.now, self.deliver)
            for transfer, incident_id in zip(result.transfers, self._ingested):
                frame = self._frames_by_envelope[transfer.envelope_id]
                self.report.envelope_bytes += transfer.size_bytes
                self.report.transfers.append(transfer)
                self.report.samples.append(LatencySample(LatencyKind.UPLOAD, transfer.latency_ms, frame.lighting))
                self._traces[transfer.envelope_id] = dataclasses.replace(
                    self._traces[transfer.envelope_id], incident_id=incident_id,
                    delivered_at_ms=transfer.completed_at_ms)
            for record in result.fallbacks:
                self.report.fallback_records += 1
                self.report.fallback_payload_bytes += record.payload_bytes
                self.report.events.append(record.to_line())

            if self._drain_until is not None and (len(self.queue) == 0 or self.env.now >= self._drain_until):
                return
            wait = self.next_tick_in()
            if wait is None:
                return
            yield self.env.timeout(wait)

    def next_tick_in(self) -> Optional[float]:
        """Ticks run every tick interval; while the link is down with work queued the clock jumps to the next event"""
        now = self.env.now
        pending = self.queue.pending
        if self.scenario.link.is_up(now) or not pending:
            return self.tick_interval_ms
        candidates = [item.enqueued_at_ms + self.queue.deadline_ms + 1 - now
                      for item in pending if not item.fallback_sent]
        next_up = self.scenario.link.next_up(now)
        if next_up is not None:
            candidates.append(next_up - now)
        if self._drain_until is None:
            candidates.append(self.tick_interval_ms)
        else:
            candidates = [min(candidate, self._drain_until - now) for candidate in candidates]
        if not candidates:
            return None
        return max(min(candidates), 1)

    def run(self) -> SessionReport:
        self.env.process(self.camera())
        self.env.process(self.monitor())
        uplink = self.env.process(self.uplink())
        self.env.run(until=uplink)

        self.report.incidents_delivered = self.queue.delivered
        self.report.incidents_pending = len(self.queue)
        self.report.incidents = [self._traces[envelope_id] for envelope_id in sorted(self._traces)]
        logger.info(f'Session {self.scenario.session_id.hex()} ({self.strategy.name}) is over: '
                    f'{self.report.warnings} warnings, {self.report.incidents_recorded} incidents recorded, '
                    f'{self.report.incidents_delivered} delivered')
        return self.report


def run_session(scenario: Scenario, strategy: Optional[Strategy] = None, device: Optional[DeviceProfile] = None,
                detector: Optional[Detector] = None, agent: Optional[IncidentLedger] = None,
                store_root: Optional[str] = None, key: Optional[EncryptionKey] = None,
                dss_config: Optional[DssConfig] = None, payload_bytes: int = DEFAULT_PAYLOAD_BYTES,
                tick_interval_ms: int = 100, queue_capacity: int = 1024, fallback_deadline_ms: int = 300000,
                drain_limit_ms: int = DEFAULT_DRAIN_LIMIT_MS, store_capacity_bytes: Optional[int] = None
                ) -> SessionReport:
    """
    Simulates a ride. The run is deterministic: the same scenario, strategy and device give an identical report.
    :param scenario: ride to simulate
    :param strategy: where frames are analysed, the scenario default if none is given
    :param device: phone of the ride; by default its inference time is the one of the scenario detector profile
    :param detector: detector to run, by default a scripted detector replaying the ground truth on the device
    :param agent: agent which receives the incidents, a fresh in-memory one by default
    :param store_root: folder of the device store, a temporary folder by default
    :param store_capacity_bytes: size limit of the device store, none by default
    :param key: device key shared with the agent
    :param drain_limit_ms: how long the uplink keeps delivering after the last frame
    :return: session report
    """
    strategy = strategy or scenario.strategy
    device = device or DeviceProfile('scenario', inference_ms=scenario.detector_profile.inference_ms)
    key = key or DEFAULT_DEVICE_KEY
    if tick_interval_ms <= 0 or payload_bytes < 0:
        raise ValueError('Tick interval must be positive and payload size cannot be negative')

    if not scenario.consent:
        logger.warning(f'Passenger did not consent, session {scenario.session_id.hex()} is not monitored')
        return SessionReport(session_id=scenario.session_id, strategy=strategy, device=device, consent_withheld=True,
                             frames_total=len(scenario.frames), frames_skipped=len(scenario.frames))

    if detector is None:
        profile = dataclasses.replace(scenario.detector_profile, inference_ms=device.inference_ms)
        detector = ScriptedDetector(profile, base_confidence=scenario.base_confidence)
    if agent is None:
        agent = IncidentLedger(keys={key.key_id: key})

    with contextlib.ExitStack() as stack:
        if store_root is None:
            store_root = stack.enter_context(tempfile.TemporaryDirectory(prefix='smr-device-'))
        store = IncidentStore(store_root, store_capacity_bytes)
        queue = OutboundQueue(queue_capacity, fallback_deadline_ms)
        simulation = SessionSimulation(scenario, strategy, device, detector, agent, store, key,
                                       dss_config or DssConfig(), queue, payload_bytes, tick_interval_ms,
                                       drain_limit_ms)
        return simulation.run()
